"""Dataset CSV schema: ``subject,approach,experience,faults``.

Approach accepts 0/1 or the labels exploratory/testcase; experience accepts
0/1 or low/high.  Values are canonicalized to integers on ingest.  Subject
ids must be dense (0..max) so they can index model parameters directly.
"""

from __future__ import annotations

from .errors import InputError
from .model import Dataset, Observation

_APPROACH = {"0": 0, "1": 1, "exploratory": 0, "testcase": 1}
_EXPERIENCE = {"0": 0, "1": 1, "low": 0, "high": 1}

HEADER = "subject,approach,experience,faults"


def _canon(raw: str, table: dict, what: str, where: str) -> int:
    key = raw.strip().lower()
    if key not in table:
        raise InputError(f"{where}: bad {what} value {raw!r}")
    return table[key]


def read_dataset(path) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != HEADER:
            raise InputError(
                f"{path}: expected header {HEADER!r}, got {header!r}"
            )
        observations = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            where = f"{path}:{lineno}"
            if len(parts) != 4:
                raise InputError(f"{where}: expected 4 columns, got {len(parts)}")
            try:
                subject = int(parts[0])
                faults = int(parts[3])
            except ValueError as exc:
                raise InputError(f"{where}: {exc}") from None
            approach = _canon(parts[1], _APPROACH, "approach", where)
            experience = _canon(parts[2], _EXPERIENCE, "experience", where)
            if faults < 0:
                raise InputError(f"{where}: negative fault count {faults}")
            if subject < 0:
                raise InputError(f"{where}: negative subject id {subject}")
            observations.append(
                Observation(
                    subject=subject,
                    approach=approach,
                    experience=experience,
                    faults=faults,
                )
            )
    if not observations:
        raise InputError(f"{path}: no observations")
    ids = sorted({o.subject for o in observations})
    n_subjects = ids[-1] + 1
    if ids != list(range(n_subjects)):
        missing = sorted(set(range(n_subjects)) - set(ids))
        raise InputError(f"{path}: subject ids must be dense; missing {missing[:5]}")
    return Dataset(observations=tuple(observations), n_subjects=n_subjects)


def write_dataset(data: Dataset, path):
    with open(path, "w", newline="") as fh:
        fh.write(HEADER + "\n")
        for o in data.observations:
            fh.write(f"{o.subject},{o.approach},{o.experience},{o.faults}\n")
