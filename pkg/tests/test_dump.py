import json
import struct

import numpy as np
import pytest

from passive_purify.dump import MAGIC, read_matrix, read_operator, write_matrix, write_operator
from passive_purify.errors import StructureError
from passive_purify.fock import SectorOperator, enumerate_sector, joint_basis


@pytest.fixture
def op(rng):
    jb = joint_basis(enumerate_sector(2, 1), enumerate_sector(2, 2))
    return SectorOperator.square(jb, rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))


@pytest.mark.parametrize("fmt", ["binary", "text"])
def test_round_trip(tmp_path, op, fmt):
    path = tmp_path / f"blk.{fmt}"
    write_operator(path, op, fmt, label="x")
    back = read_operator(path)
    assert back.basis_row == op.basis_row
    np.testing.assert_array_equal(back.entries, op.entries)


def test_binary_layout(tmp_path):
    mat = np.array([[1 + 2j, 3.5], [-1j, 0.25]])
    path = tmp_path / "m.ppd"
    write_matrix(path, mat)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    (hlen,) = struct.unpack("<I", raw[8:12])
    head = json.loads(raw[12:12 + hlen])
    assert head["rows"] == 2 and head["endianness"] == "little" and head["order"] == "row-major"
    payload = struct.unpack("<8d", raw[12 + hlen:])
    assert payload == (1.0, 2.0, 3.5, 0.0, 0.0, -1.0, 0.25, 0.0)


def test_text_layout(tmp_path):
    path = tmp_path / "m.json"
    write_matrix(path, np.array([[1 - 1j]]), fmt="text")
    doc = json.loads(path.read_text())
    assert doc["entries"] == [[[1.0, -1.0]]]
    mat, head = read_matrix(path)
    assert mat[0, 0] == 1 - 1j and head["basis_row"] is None


def test_bad_inputs(tmp_path):
    with pytest.raises(StructureError):
        write_matrix(tmp_path / "v", np.ones(3))
    with pytest.raises(StructureError):
        write_matrix(tmp_path / "v", np.ones((2, 2)), fmt="csv")
    path = tmp_path / "short.ppd"
    write_matrix(path, np.ones((2, 2)))
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(StructureError):
        read_matrix(path)
    other = tmp_path / "other.json"
    other.write_text('{"format": "something"}')
    with pytest.raises(StructureError):
        read_matrix(other)
    write_matrix(tmp_path / "nobasis", np.ones((2, 2)))
    with pytest.raises(StructureError):
        read_operator(tmp_path / "nobasis")
