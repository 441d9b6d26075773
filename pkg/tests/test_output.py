"""
Tests para los archivos de resultados: snapshots CSV, índice y registro de corrida
"""

import json

import numpy as np
import pytest

from uukin.cli import RunRecord, TrajectorySink, emit_snapshot, emit_table, read_index, read_snapshot
from uukin.cli.output import file_digest, read_checkpoint_iso, read_table, write_checkpoint_iso
from uukin.core import DistributionIso, RadialGrid, ThetaProfile, initial_bose
from uukin.errors import DomainError, new_warning
from uukin.lattice import Lattice3, initial_bose_lattice


@pytest.fixture
def grid():
    return RadialGrid.geometric(64, 1e-4, 1e2)


def test_emit_snapshot(tmp_path):
    print("\n🧪 Testing emit_snapshot...")

    zero = DistributionIso.zeros(RadialGrid.uniform(4, 0.0, 3.0))
    path = emit_snapshot(zero, tmp_path / "zero.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == "eps,f"
    assert lines[1] == "0,0"
    print("  ✅ PASS: header plus one row per node")

    lattice = initial_bose_lattice(0.5, ThetaProfile.from_name("exp"), Lattice3(3))
    header, data = read_table(emit_snapshot(lattice, tmp_path / "lattice.csv"))
    assert header == ["kx", "ky", "kz", "f"]
    assert data.shape == (27, 4)
    print("  ✅ PASS: lattice snapshot columns")

    with pytest.raises(DomainError):
        emit_snapshot(object(), tmp_path / "bad.csv")
    print("  ✅ PASS: unknown states rejected")


def test_snapshot_bitwise(tmp_path, grid):
    print("\n🧪 Testing snapshot precision...")

    f = initial_bose(0.9, ThetaProfile.from_name("exp_poly", poly_a=0.7), grid)
    back = read_snapshot(emit_snapshot(f, tmp_path / "f.csv"))
    assert np.array_equal(back.grid.nodes, grid.nodes)
    assert np.array_equal(back.values, f.values)
    print("  ✅ PASS: 17 significant digits read back bit-identical")


def test_emit_table(tmp_path):
    print("\n🧪 Testing emit_table...")

    path = emit_table(tmp_path / "moments.csv", {"t": [0.0, 0.5], "N": np.array([1.0, 1.0])})
    header, data = read_table(path)
    assert header == ["t", "N"]
    assert data.tolist() == [[0.0, 1.0], [0.5, 1.0]]
    print("  ✅ PASS: named columns")


def test_trajectory_sink(tmp_path, grid):
    print("\n🧪 Testing TrajectorySink...")

    f = initial_bose(0.5, ThetaProfile.from_name("exp"), grid)
    sink = TrajectorySink(tmp_path)
    for t in (0.0, 0.25, 0.25, 0.5):
        sink.write(t, f)
    assert [(s, t) for s, t, _ in sink.rows] == [(0, 0.0), (1, 0.25), (2, 0.5)]
    assert read_index(sink.index_path) == sink.rows
    assert all(p.exists() for p in sink.files())
    print("  ✅ PASS: non-increasing times are skipped")

    resumed = TrajectorySink(tmp_path, append=True)
    resumed.write(0.75, f)
    assert resumed.rows[-1][:2] == (3, 0.75)
    assert len(read_index(resumed.index_path)) == 4
    print("  ✅ PASS: append continues the step count")

    fresh = TrajectorySink(tmp_path)
    assert fresh.rows == [] and read_index(fresh.index_path) == []
    print("  ✅ PASS: a new sink starts an empty index")


def test_checkpoint_iso(tmp_path, grid):
    print("\n🧪 Testing isotropic checkpoints...")

    assert read_checkpoint_iso(tmp_path, grid) is None
    f = initial_bose(0.5, ThetaProfile.from_name("exp"), grid)
    write_checkpoint_iso(f, 1.25, tmp_path)
    back, t = read_checkpoint_iso(tmp_path, grid)
    assert t == 1.25
    assert np.array_equal(back.values, f.values)
    print("  ✅ PASS: snapshot and time restored")

    with pytest.raises(DomainError):
        read_checkpoint_iso(tmp_path, RadialGrid.geometric(32, 1e-4, 1e2))
    print("  ✅ PASS: grid mismatch rejected")


def test_run_record(tmp_path):
    print("\n🧪 Testing RunRecord...")

    data = emit_table(tmp_path / "a.csv", {"x": [1.0]})
    record = RunRecord("scales", {"scenario": "scales"}, "0.1.0")
    record.add_file(data, tmp_path)
    record.add_file(data, tmp_path)
    record.diagnostics["values"] = np.array([1.0, np.inf])
    record.diagnostics["flag"] = np.bool_(True)
    record.warnings.append(new_warning("zero coupling", {"eps": 0.0}))
    record.status = "ok"
    payload = json.loads(record.write(tmp_path / "record.json").read_text())

    assert payload["files"] == [{"path": "a.csv", "sha256": file_digest(data)}]
    assert payload["diagnostics"] == {"values": [1.0, "inf"], "flag": True}
    assert payload["warnings"][0]["message"] == "zero coupling"
    assert payload["status"] == "ok" and payload["finished"] is None
    print("  ✅ PASS: files hashed once, numpy values made plain")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    print("=" * 60)
    print("Testing Output")
    print("=" * 60)

    with tempfile.TemporaryDirectory() as tmp:
        test_emit_snapshot(Path(tmp))
        test_emit_table(Path(tmp))
        test_run_record(Path(tmp))

    print("\n" + "=" * 60)
    print("✅ All output tests passed!")
    print("=" * 60)
