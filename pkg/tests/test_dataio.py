import pytest

from faultcast.dataio import read_dataset, write_dataset
from faultcast.errors import InputError
from faultcast.model import Dataset, Observation


def test_roundtrip(tmp_path):
    data = Dataset(
        (
            Observation(0, 0, 0, 3),
            Observation(1, 1, 1, 0),
            Observation(2, 0, 1, 7),
        ),
        3,
    )
    path = tmp_path / "d.csv"
    write_dataset(data, path)
    loaded = read_dataset(path)
    assert loaded.observations == data.observations
    assert loaded.n_subjects == 3


def test_label_canonicalization(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "subject,approach,experience,faults\n"
        "0,exploratory,low,4\n"
        "1,testcase,HIGH,2\n"
        "2,1,0,0\n"
    )
    data = read_dataset(path)
    assert data.approach.tolist() == [0, 1, 1]
    assert data.experience.tolist() == [0, 1, 0]


def test_bad_header(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("subject,faults\n0,1\n")
    with pytest.raises(InputError):
        read_dataset(path)


def test_error_names_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "subject,approach,experience,faults\n0,0,0,1\n1,2,0,1\n"
    )
    with pytest.raises(InputError, match=":3"):
        read_dataset(path)


def test_sparse_subject_ids_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("subject,approach,experience,faults\n0,0,0,1\n5,1,1,2\n")
    with pytest.raises(InputError, match="dense"):
        read_dataset(path)


def test_negative_faults_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("subject,approach,experience,faults\n0,0,0,-3\n")
    with pytest.raises(InputError):
        read_dataset(path)
