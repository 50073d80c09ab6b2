"""Command-line front end.

Subcommands: ``simulate``, ``fit``, ``summarize``, ``compare``, ``predict``,
``utility``.  Every command is deterministic given its flags (the seed
included); repeated invocations produce byte-identical files.

Exit codes: 0 success, 2 input or configuration error, 3 runtime numeric
failure, 4 convergence-diagnostic failure.

A JSON config file (``--config``) may supply any long-form option; explicit
command-line flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import dataio
from .cpt import CostProfile, WeightingParams
from .errors import (
    DomainError,
    EvaluationError,
    FaultcastError,
    InitializationError,
    InputError,
)
from .model import M1, M2, ModelSpec, ParameterVector
from .model_compare import compare, format_comparison, pointwise_loglik
from .posterior import (
    Posterior,
    PredictorSetting,
    fit,
    marginal_density,
    posterior_predictive,
    predictive_interval,
    summarize,
)
from .sampler import Draws, SamplerConfig, ess_bulk, split_rhat
from .scenarios import (
    Scenario,
    ScenarioOption,
    builtin_scenario,
    evaluate_scenario,
    format_report,
    format_sweep,
    sensitivity_sweep,
)
from .synthetic import DESIGN_PRESETS, TRUTH_PRESETS, DesignSpec, generate, summary_stats

RHAT_GATE = 1.05

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_DIAGNOSTICS = 4


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise InputError("config must be a JSON object")
    return config


def _pick(flag_value, config: dict, key: str, default=None):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _require_seed(args, config) -> int:
    seed = _pick(args.seed, config, "seed")
    if seed is None:
        raise InputError("--seed is required (or provide \"seed\" in the config)")
    return int(seed)


def _split(text, config, key, default):
    raw = _pick(text, config, key, None)
    if raw is None:
        return default
    if isinstance(raw, str):
        parts = raw.replace(":", ",").split(",")
    else:
        parts = list(raw)
    if len(parts) != 2:
        raise InputError(f"{key} must be two numbers, got {raw!r}")
    return float(parts[0]), float(parts[1])


# ---------------------------------------------------------------------------
# loading artifacts
# ---------------------------------------------------------------------------


def _meta_path(draws_path) -> Path:
    return Path(str(draws_path) + ".meta.json")


def _infer_spec(names, zi_link) -> tuple[ModelSpec, int]:
    names = tuple(names)
    if names == ("alpha", "beta_a", "beta_e"):
        return ModelSpec(kind=M1), 0
    base = ("alpha", "beta_a", "beta_e", "alpha_p", "beta_p", "mu_s", "sigma_s")
    if names[:7] == base and all(n == f"z_{i}" for i, n in enumerate(names[7:])):
        spec = ModelSpec(kind=M2, zi_link=zi_link or "logit")
        return spec, len(names) - 7
    raise InputError(f"draws columns do not match any model layout: {names[:8]}...")


def load_posterior(draws_path, model=None, zi_link=None) -> Posterior:
    """Rebuild a Posterior from a draws CSV (plus its sidecar, when present)."""
    draws = Draws.load_csv(draws_path)
    meta = {}
    meta_file = _meta_path(draws_path)
    if meta_file.exists():
        with open(meta_file) as fh:
            meta = json.load(fh)
    spec, n_subjects = _infer_spec(draws.names, zi_link or meta.get("zi_link"))
    if model is not None and model != spec.kind:
        raise InputError(
            f"{draws_path}: draws belong to model {spec.kind}, not {model}"
        )
    if draws.n_chains >= 2 and draws.n_draws >= 4:
        diagnostics = {
            name: (split_rhat(draws, name), ess_bulk(draws, name))
            for name in draws.names
        }
    else:
        diagnostics = {name: (math.nan, math.nan) for name in draws.names}
    return Posterior(
        draws=draws,
        spec=spec,
        n_subjects=n_subjects,
        data_fingerprint=meta.get("data_fingerprint", ""),
        diagnostics=diagnostics,
    )


def _load_truth(name_or_path):
    if name_or_path in TRUTH_PRESETS:
        return TRUTH_PRESETS[name_or_path]
    try:
        with open(name_or_path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read truth: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"truth file is not valid JSON: {exc}") from None
    kind = raw.pop("model", M2)
    if kind not in (M1, M2):
        raise InputError(f"truth model must be m1 or m2, got {kind!r}")
    try:
        truth = ParameterVector(**raw)
    except TypeError as exc:
        raise InputError(f"bad truth file: {exc}") from None
    return truth, kind


def _load_design(name_or_path) -> DesignSpec:
    if name_or_path in DESIGN_PRESETS:
        return DESIGN_PRESETS[name_or_path]
    try:
        with open(name_or_path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read design: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"design file is not valid JSON: {exc}") from None
    cells = tuple(tuple(cell) for cell in raw.get("cells", ()))
    return DesignSpec(
        cells=cells, sessions_per_subject=int(raw.get("sessions_per_subject", 1))
    )


def _cost_profile(args, config) -> CostProfile:
    costs = config.get("costs", {})
    return CostProfile(
        savings_per_fault=float(_pick(args.savings, costs, "savings_per_fault", 150.0)),
        hourly_cost_low=float(_pick(args.cost_low, costs, "hourly_cost_low", 100.0)),
        hourly_cost_high=float(_pick(args.cost_high, costs, "hourly_cost_high", 200.0)),
        hourly_cost_mixed=float(
            _pick(args.cost_mixed, costs, "hourly_cost_mixed", 134.38)
        ),
        session_hours=float(_pick(args.hours, costs, "session_hours", 3.0)),
    )


def _weighting(args, config) -> WeightingParams:
    weighting = config.get("weighting", {})
    return WeightingParams(
        gamma_gain=float(_pick(args.gamma_gain, weighting, "gamma_gain", 0.61)),
        gamma_loss=float(_pick(args.gamma_loss, weighting, "gamma_loss", 0.69)),
        mode=_pick(args.weighting_mode, weighting, "mode", "cumulative"),
    )


def _scenario(args, config, data) -> Scenario:
    name = _pick(args.scenario, config, "scenario")
    if name is None:
        raise InputError("--scenario is required")
    if data is not None:
        experience_split = data.experience_proportions()
        approach_split = data.approach_proportions()
    else:
        experience_split = (12, 23)
        approach_split = (1, 1)
    experience_split = _split(args.experience_split, config, "experience_split",
                              experience_split)
    approach_split = _split(args.approach_split, config, "approach_split",
                            approach_split)
    for entry in config.get("scenarios", []):
        if entry.get("name") == name:
            options = []
            for raw in entry.get("options", []):
                setting = _setting_from_raw(raw, experience_split, approach_split)
                options.append(
                    ScenarioOption(
                        label=raw["label"], setting=setting,
                        cost=raw.get("cost", "mixed"),
                    )
                )
            return Scenario(name=name, options=tuple(options))
    return builtin_scenario(
        name, experience_split=experience_split, approach_split=approach_split
    )


def _setting_from_raw(raw, experience_split, approach_split) -> PredictorSetting:
    def level(key, split):
        val = raw.get(key, "mix")
        if val in (0, 1):
            return val, None
        if val in ("0", "1"):
            return int(val), None
        if val == "mix":
            total = split[0] + split[1]
            return None, (split[0] / total, split[1] / total)
        raise InputError(f"scenario option {key} must be 0, 1 or 'mix', got {val!r}")

    approach, approach_weights = level("approach", approach_split)
    experience, experience_weights = level("experience", experience_split)
    return PredictorSetting(
        approach=approach,
        experience=experience,
        approach_weights=approach_weights,
        experience_weights=experience_weights,
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    seed = _require_seed(args, config)
    truth, kind = _load_truth(_pick(args.truth, config, "truth", "reference"))
    design = _load_design(_pick(args.design, config, "design", "reference"))
    zi_link = _pick(args.zi_link, config, "zi_link", "logit")
    spec = ModelSpec(kind=kind, zi_link=zi_link)
    data = generate(truth, design, spec, seed=seed)
    dataio.write_dataset(data, args.out)
    print(f"wrote {len(data)} observations to {args.out}")
    print(f"{'group':<6} {'n':>4} {'median':>7} {'mean':>6} {'sd':>6} {'min':>4} {'max':>4}")
    for row in summary_stats(data):
        sd = f"{row.sd:.1f}" if math.isfinite(row.sd) else "-"
        print(f"{row.group:<6} {row.n:>4} {row.median:>7.1f} {row.mean:>6.1f} "
              f"{sd:>6} {row.min:>4} {row.max:>4}")
    return EXIT_OK


def cmd_fit(args) -> int:
    config = _load_config(args.config)
    seed = _require_seed(args, config)
    data = dataio.read_dataset(args.data)
    kind = _pick(args.model, config, "model", M2)
    zi_link = _pick(args.zi_link, config, "zi_link", "logit")
    spec = ModelSpec(kind=kind, zi_link=zi_link)
    sampler_config = SamplerConfig(
        seed=seed,
        chains=int(_pick(args.chains, config, "chains", 4)),
        warmup=int(_pick(args.warmup, config, "warmup", 1000)),
        draws=int(_pick(args.draws_per_chain, config, "draws", 1000)),
    )
    post = fit(data, spec, sampler_config)
    post.draws.save_csv(args.out)

    def scrub(x):
        return None if (isinstance(x, float) and math.isnan(x)) else x

    meta = {
        "model": spec.kind,
        "zi_link": spec.zi_link,
        "n_subjects": data.n_subjects,
        "data_fingerprint": post.data_fingerprint,
        "seed": sampler_config.seed,
        "chains": sampler_config.chains,
        "warmup": sampler_config.warmup,
        "draws": sampler_config.draws,
        "diagnostics": {
            name: {"rhat": scrub(r), "ess": scrub(e)}
            for name, (r, e) in post.diagnostics.items()
        },
        "mean_acceptance": post.draws.acceptance.mean(axis=0).round(4).tolist(),
    }
    with open(_meta_path(args.out), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if sampler_config.chains < 2:
        print("warning: convergence diagnostics are undefined with a single chain",
              file=sys.stderr)
        return EXIT_OK
    offenders = [
        (name, rhat)
        for name, (rhat, _) in post.diagnostics.items()
        if math.isfinite(rhat) and rhat > RHAT_GATE
    ]
    if offenders:
        listing = ", ".join(f"{n} (rhat={r:.3f})" for n, r in offenders)
        print(f"convergence failure: split-rhat above {RHAT_GATE} for {listing}",
              file=sys.stderr)
        return EXIT_DIAGNOSTICS
    worst = max(r for r, _ in post.diagnostics.values())
    print(f"wrote draws to {args.out} (worst split-rhat {worst:.4f})")
    return EXIT_OK


def cmd_summarize(args) -> int:
    config = _load_config(args.config)
    post = load_posterior(args.draws, model=_pick(args.model, config, "model"),
                          zi_link=_pick(args.zi_link, config, "zi_link"))
    ci = float(_pick(args.ci, config, "ci", 0.94))
    rows = summarize(post, ci_level=ci)
    with open(args.out, "w", newline="") as fh:
        fh.write("parameter,mean,sd,ci_lo,ci_hi\n")
        for r in rows:
            fh.write(
                f"{r.parameter},{_fmt(r.mean)},{_fmt(r.sd)},"
                f"{_fmt(r.ci_lo)},{_fmt(r.ci_hi)}\n"
            )
    population = [r for r in rows if r.parameter in post.population_names]
    width = max(len(r.parameter) for r in rows)
    print(f"{'parameter':<{width}} {'mean':>8} {'sd':>8} "
          f"{'lo':>8} {'hi':>8}   ({ci:.0%} interval)")
    for r in population:
        print(f"{r.parameter:<{width}} {r.mean:>8.2f} {r.sd:>8.2f} "
              f"{r.ci_lo:>8.2f} {r.ci_hi:>8.2f}")

    bins = int(_pick(args.bins, config, "bins", 40))
    marginals = [marginal_density(post, name, bins=bins, ci_level=ci)
                 for name in post.population_names]
    marginals_out = args.marginals
    if marginals_out is None:
        marginals_out = str(Path(args.out).with_suffix("")) + "_marginals.csv"
    with open(marginals_out, "w", newline="") as fh:
        fh.write("parameter,bin_lo,bin_hi,height\n")
        for marg in marginals:
            for lo, hi, height in zip(marg.edges[:-1], marg.edges[1:], marg.heights):
                fh.write(f"{marg.parameter},{_fmt(lo)},{_fmt(hi)},{_fmt(height)}\n")
    if not args.no_figures:
        from . import plots

        figure = str(Path(args.out).with_suffix("")) + "_marginals.png"
        plots.save_marginals_figure(marginals, figure)
    return EXIT_OK


def _prediction_rows(post, data, args, config):
    experience_split = _split(
        args.experience_split, config, "experience_split",
        data.experience_proportions() if data else (12, 23),
    )
    approach_split = _split(
        args.approach_split, config, "approach_split",
        data.approach_proportions() if data else (1, 1),
    )
    ew = (experience_split[0] / sum(experience_split),
          experience_split[1] / sum(experience_split))
    aw = (approach_split[0] / sum(approach_split),
          approach_split[1] / sum(approach_split))
    return [
        ("low-experience", PredictorSetting(approach=None, approach_weights=aw,
                                            experience=0)),
        ("high-experience", PredictorSetting(approach=None, approach_weights=aw,
                                             experience=1)),
        ("exploratory", PredictorSetting(approach=0, experience=None,
                                         experience_weights=ew)),
        ("test-case", PredictorSetting(approach=1, experience=None,
                                       experience_weights=ew)),
        ("exploratory+low", PredictorSetting(approach=0, experience=0)),
        ("exploratory+high", PredictorSetting(approach=0, experience=1)),
    ]


def cmd_predict(args) -> int:
    config = _load_config(args.config)
    seed = _require_seed(args, config)
    post = load_posterior(args.draws, model=_pick(args.model, config, "model"),
                          zi_link=_pick(args.zi_link, config, "zi_link"))
    data = dataio.read_dataset(args.data) if args.data else None
    mode = _pick(args.mode, config, "predictive_mode", "expectation")
    subject_mode = _pick(args.subject_mode, config, "subject_mode", "fresh")
    ci = float(_pick(args.ci, config, "ci", 0.94))
    n_rep = int(_pick(args.reps, config, "predictive_reps", 1))

    results = []
    samples = {}
    for offset, (label, setting) in enumerate(_prediction_rows(post, data, args, config)):
        pd = posterior_predictive(
            post, setting, mode=mode, n_rep=n_rep, seed=seed + offset,
            subject_mode=subject_mode,
        )
        lo, hi, mean = predictive_interval(pd, level=ci)
        results.append((label, lo, hi, mean))
        samples[label] = pd.samples

    if args.samples:
        with open(args.samples, "w", newline="") as fh:
            fh.write("setting,sample\n")
            for label, values in samples.items():
                for v in values:
                    fh.write(f"{label},{_fmt(float(v))}\n")

    with open(args.out, "w", newline="") as fh:
        fh.write("setting,ci_lo,ci_hi,mean\n")
        for label, lo, hi, mean in results:
            fh.write(f"{label},{_fmt(lo)},{_fmt(hi)},{_fmt(mean)}\n")
    width = max(len(r[0]) for r in results)
    print(f"{'setting':<{width}} {'lo':>7} {'hi':>7} {'mean':>8}   "
          f"({ci:.0%} interval, {mode} mode)")
    for label, lo, hi, mean in results:
        print(f"{label:<{width}} {lo:>7.2f} {hi:>7.2f} {mean:>8.2f}")
    if not args.no_figures:
        from . import plots

        figure = str(Path(args.out).with_suffix("")) + "_predictions.png"
        plots.save_prediction_figure(results, figure)
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _load_config(args.config)
    if len(args.draws) < 2:
        raise InputError("compare needs at least two --draws files")
    data = dataio.read_dataset(args.data)
    entries = []
    for path in args.draws:
        post = load_posterior(path, zi_link=_pick(args.zi_link, config, "zi_link"))
        label = Path(path).stem
        entries.append((label, pointwise_loglik(post, data, label)))
    result = compare(entries)
    print(format_comparison(result))
    with open(args.out, "w", newline="") as fh:
        fh.write("model,elpd,se,p_eff,rank\n")
        for e in result.entries:
            fh.write(f"{e.label},{_fmt(e.elpd)},{_fmt(e.se)},{_fmt(e.p_eff)},{e.rank}\n")
    if not args.no_figures:
        from . import plots

        figure = str(Path(args.out).with_suffix("")) + "_comparison.png"
        plots.save_comparison_figure(result, figure)
    return EXIT_OK


def _parse_sweep(text):
    if text is None:
        return None
    try:
        name, values = text.split("=", 1)
        grid = [float(v) for v in values.split(",") if v]
    except ValueError as exc:
        raise InputError(f"bad --sweep (expected NAME=v1,v2,...): {exc}") from None
    if not grid:
        raise InputError("sweep needs at least one value")
    return name.strip(), grid


def cmd_utility(args) -> int:
    config = _load_config(args.config)
    seed = _require_seed(args, config)
    post = load_posterior(args.draws, model=_pick(args.model, config, "model"),
                          zi_link=_pick(args.zi_link, config, "zi_link"))
    data = dataio.read_dataset(args.data) if args.data else None
    profile = _cost_profile(args, config)
    weighting = _weighting(args, config)
    scenario = _scenario(args, config, data)
    n_rep = int(_pick(args.reps, config, "predictive_reps", 1))
    subject_mode = _pick(args.subject_mode, config, "subject_mode", "fresh")
    sweep_spec = _parse_sweep(_pick(args.sweep, config, "sweep"))

    if sweep_spec is None:
        report = evaluate_scenario(
            post, scenario, profile, weighting, n_rep=n_rep, seed=seed,
            subject_mode=subject_mode,
        )
        print(format_report(report))
        with open(args.out, "w", newline="") as fh:
            fh.write(
                "option,utility,mc_se,tail_lo_value,tail_lo_p,central_value,"
                "central_p,tail_hi_value,tail_hi_p\n"
            )
            for opt in report.options:
                lo, mid, hi = opt.tails
                fh.write(
                    f"{opt.label},{_fmt(opt.utility)},{_fmt(opt.mc_se)},"
                    f"{_fmt(lo.value)},{_fmt(lo.probability)},"
                    f"{_fmt(mid.value)},{_fmt(mid.probability)},"
                    f"{_fmt(hi.value)},{_fmt(hi.probability)}\n"
                )
        if not args.no_figures:
            from . import plots

            figure = str(Path(args.out).with_suffix("")) + "_utility.png"
            plots.save_utility_figure(report, figure)
        return EXIT_OK

    parameter, grid = sweep_spec
    sweep = sensitivity_sweep(
        post, scenario, profile, weighting, parameter, grid, n_rep=n_rep,
        seed=seed, subject_mode=subject_mode,
    )
    print(format_sweep(sweep))
    labels = [opt.label for opt in scenario.options]
    with open(args.out, "w", newline="") as fh:
        fh.write(parameter + "," + ",".join(labels) + ",best\n")
        for row in sweep.rows:
            cells = ",".join(_fmt(row.utilities[l]) for l in labels)
            fh.write(f"{_fmt(row.value)},{cells},{row.best}\n")
    if not args.no_figures:
        from . import plots

        figure = str(Path(args.out).with_suffix("")) + "_sweep.png"
        plots.save_sweep_figure(sweep, figure)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("--seed", type=int, help="random seed (required where sampling occurs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultcast",
        description="Bayesian fault-count models with decision-utility reporting",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="generate a synthetic dataset")
    _add_common(simulate)
    simulate.add_argument("--truth", help="truth preset name or JSON file")
    simulate.add_argument("--design", help="design preset name or JSON file")
    simulate.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    simulate.add_argument("--out", required=True)
    simulate.set_defaults(handler=cmd_simulate)

    fit_cmd = commands.add_parser("fit", help="run the sampler on a dataset")
    _add_common(fit_cmd)
    fit_cmd.add_argument("--data", required=True)
    fit_cmd.add_argument("--model", choices=[M1, M2])
    fit_cmd.add_argument("--chains", type=int)
    fit_cmd.add_argument("--warmup", type=int)
    fit_cmd.add_argument("--draws", type=int, dest="draws_per_chain")
    fit_cmd.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    fit_cmd.add_argument("--out", required=True)
    fit_cmd.set_defaults(handler=cmd_fit)

    summarize_cmd = commands.add_parser("summarize", help="parameter summary table")
    _add_common(summarize_cmd)
    summarize_cmd.add_argument("--draws", required=True)
    summarize_cmd.add_argument("--model", choices=[M1, M2])
    summarize_cmd.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    summarize_cmd.add_argument("--ci", type=float)
    summarize_cmd.add_argument("--bins", type=int)
    summarize_cmd.add_argument("--marginals", help="histogram CSV path")
    summarize_cmd.add_argument("--no-figures", action="store_true")
    summarize_cmd.add_argument("--out", required=True)
    summarize_cmd.set_defaults(handler=cmd_summarize)

    compare_cmd = commands.add_parser("compare", help="PSIS-LOO model comparison")
    _add_common(compare_cmd)
    compare_cmd.add_argument("--draws", action="append", required=True)
    compare_cmd.add_argument("--data", required=True)
    compare_cmd.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    compare_cmd.add_argument("--no-figures", action="store_true")
    compare_cmd.add_argument("--out", required=True)
    compare_cmd.set_defaults(handler=cmd_compare)

    predict = commands.add_parser("predict", help="posterior-predictive table")
    _add_common(predict)
    predict.add_argument("--draws", required=True)
    predict.add_argument("--data")
    predict.add_argument("--model", choices=[M1, M2])
    predict.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    predict.add_argument("--mode", choices=["expectation", "outcome"])
    predict.add_argument("--subject-mode", choices=["fresh", "average"],
                         dest="subject_mode")
    predict.add_argument("--ci", type=float)
    predict.add_argument("--reps", type=int)
    predict.add_argument("--experience-split", dest="experience_split")
    predict.add_argument("--approach-split", dest="approach_split")
    predict.add_argument("--samples", help="also dump the raw predictive samples (CSV)")
    predict.add_argument("--no-figures", action="store_true")
    predict.add_argument("--out", required=True)
    predict.set_defaults(handler=cmd_predict)

    utility = commands.add_parser("utility", help="decision-utility report")
    _add_common(utility)
    utility.add_argument("--draws", required=True)
    utility.add_argument("--data")
    utility.add_argument("--model", choices=[M1, M2])
    utility.add_argument("--zi-link", choices=["logit", "log"], dest="zi_link")
    utility.add_argument("--scenario")
    utility.add_argument("--sweep", help="parameter sweep, e.g. S=150,1000")
    utility.add_argument("--reps", type=int)
    utility.add_argument("--subject-mode", choices=["fresh", "average"],
                         dest="subject_mode")
    utility.add_argument("--savings", type=float)
    utility.add_argument("--cost-low", type=float, dest="cost_low")
    utility.add_argument("--cost-high", type=float, dest="cost_high")
    utility.add_argument("--cost-mixed", type=float, dest="cost_mixed")
    utility.add_argument("--hours", type=float)
    utility.add_argument("--gamma-gain", type=float, dest="gamma_gain")
    utility.add_argument("--gamma-loss", type=float, dest="gamma_loss")
    utility.add_argument("--weighting-mode", choices=["cumulative", "pointwise"],
                         dest="weighting_mode")
    utility.add_argument("--experience-split", dest="experience_split")
    utility.add_argument("--approach-split", dest="approach_split")
    utility.add_argument("--no-figures", action="store_true")
    utility.add_argument("--out", required=True)
    utility.set_defaults(handler=cmd_utility)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InitializationError, EvaluationError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FaultcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
