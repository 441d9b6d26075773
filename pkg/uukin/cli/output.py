"""
Result files: CSV snapshots, trajectory index, run record.

Floats go out with 17 significant digits so every float64 reads back
bit-identical.
"""

import csv
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml

from uukin.boundary_layer.hierarchy import HierarchyState
from uukin.core.distribution import DistributionIso
from uukin.core.grid import RadialGrid
from uukin.errors import CODE_DOMAIN, ErrorList, get_errors, new_fatal
from uukin.lattice.lattice import DistributionLattice

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
INDEX_NAME = "index.csv"
INDEX_HEADER = ("step", "t", "path")


def _io_error(action: str, path: Path, err: OSError):
    return new_fatal(f"cannot {action} {path}: {err.strerror or err}", {"path": str(path)}, code=CODE_DOMAIN)


def _write_table(path: Path, header: str, columns: List[np.ndarray]):
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack(columns) if columns else np.zeros((0, 0))
    try:
        np.savetxt(path, table, fmt=FLOAT_FORMAT, delimiter=",", header=header, comments="")
    except OSError as e:
        raise _io_error("write", path, e) from None


def emit_snapshot(state: Union[DistributionIso, DistributionLattice, HierarchyState], path) -> Path:
    """
    Write one state as CSV with a header row.

    DistributionIso → ``eps,f``; DistributionLattice → ``kx,ky,kz,f``;
    HierarchyState → ``r,h_re,h_im``.
    """
    path = Path(path)
    if isinstance(state, DistributionIso):
        _write_table(path, "eps,f", [state.grid.nodes, state.values])
    elif isinstance(state, DistributionLattice):
        k = state.lattice.indices
        _write_table(path, "kx,ky,kz,f", [k[:, 0], k[:, 1], k[:, 2], state.values])
    elif isinstance(state, HierarchyState):
        _write_table(path, "r,h_re,h_im", [state.separations, state.h.real, state.h.imag])
    else:
        raise new_fatal(f"cannot emit a {type(state).__name__}", {"path": str(path)})
    return path


def emit_table(path, columns: Dict[str, Any]) -> Path:
    """Plot-ready CSV of equally long named columns."""
    path = Path(path)
    names = list(columns)
    _write_table(path, ",".join(names), [np.asarray(columns[n], dtype=np.float64) for n in names])
    return path


def read_table(path) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    try:
        with open(path) as f:
            header = f.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except OSError as e:
        raise _io_error("read", path, e) from None
    return header, data


def read_snapshot(path, grid: Optional[RadialGrid] = None) -> DistributionIso:
    header, data = read_table(path)
    if header[:2] != ["eps", "f"]:
        raise new_fatal("not an isotropic snapshot", {"path": str(path), "header": header})
    grid = grid or RadialGrid(data[:, 0])
    return DistributionIso(grid, data[:, 1])


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class TrajectorySink:
    """
    Snapshot files ``snapshots/snap_<step>.csv`` plus ``index.csv`` mapping
    step and time to the file. Opening an existing directory appends.
    """

    def __init__(self, directory, append: bool = False):
        self.__dir = Path(directory)
        self.__index = self.__dir / INDEX_NAME
        self.__rows: List[Tuple[int, float, str]] = []
        self.__dir.joinpath("snapshots").mkdir(parents=True, exist_ok=True)
        if append and self.__index.exists():
            self.__rows = read_index(self.__index)
        else:
            self.__flush()

    @property
    def index_path(self) -> Path:
        return self.__index

    @property
    def rows(self) -> List[Tuple[int, float, str]]:
        return list(self.__rows)

    def __flush(self):
        try:
            with open(self.__index, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(INDEX_HEADER)
                for step, t, rel in self.__rows:
                    writer.writerow([step, FLOAT_FORMAT % t, rel])
        except OSError as e:
            raise _io_error("write", self.__index, e) from None

    def write(self, t: float, state) -> Path:
        step = self.__rows[-1][0] + 1 if self.__rows else 0
        if self.__rows and not t > self.__rows[-1][1]:
            return self.__dir / self.__rows[-1][2]
        rel = f"snapshots/snap_{step:06d}.csv"
        path = emit_snapshot(state, self.__dir / rel)
        self.__rows.append((step, float(t), rel))
        with open(self.__index, "a", newline="") as f:
            csv.writer(f).writerow([step, FLOAT_FORMAT % t, rel])
        return path

    def files(self) -> List[Path]:
        return [self.__index] + [self.__dir / rel for _, _, rel in self.__rows]


def read_index(path) -> List[Tuple[int, float, str]]:
    path = Path(path)
    try:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if tuple(header or ()) != INDEX_HEADER:
                raise new_fatal("not a trajectory index", {"path": str(path), "header": header})
            return [(int(step), float(t), rel) for step, t, rel in reader]
    except OSError as e:
        raise _io_error("read", path, e) from None


def write_checkpoint_iso(f: DistributionIso, t: float, directory) -> Tuple[Path, Path]:
    """Resume point for isotropic runs: snapshot CSV plus a YAML sidecar."""
    directory = Path(directory)
    data = emit_snapshot(f, directory / "checkpoint.csv")
    meta = directory / "checkpoint.yml"
    with open(meta, "w") as fh:
        yaml.safe_dump({"t": float(t), "nodes": int(f.grid.size)}, fh, sort_keys=False)
    return data, meta


def read_checkpoint_iso(directory, grid: RadialGrid) -> Optional[Tuple[DistributionIso, float]]:
    directory = Path(directory)
    data, meta = directory / "checkpoint.csv", directory / "checkpoint.yml"
    if not (data.exists() and meta.exists()):
        return None
    with open(meta) as fh:
        info = yaml.safe_load(fh) or {}
    f = read_snapshot(data, grid)
    if int(info.get("nodes", -1)) != grid.size:
        raise new_fatal("checkpoint grid does not match the configuration",
                        {"path": str(data), "nodes": info.get("nodes"), "expected": grid.size})
    return f, float(info["t"])


@dataclass
class RunRecord:
    scenario: str
    config: Dict[str, Any]
    version: str
    started: float = field(default_factory=time.time)
    finished: Optional[float] = None
    status: str = "running"
    exit_code: int = 0
    files: List[Dict[str, str]] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    warnings: ErrorList = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None

    def add_file(self, path, root):
        path = Path(path)
        rel = str(path.relative_to(root)) if path.is_absolute() or str(path).startswith(str(root)) else str(path)
        self.files = [f for f in self.files if f["path"] != rel]
        self.files.append({"path": rel, "sha256": file_digest(path)})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "version": self.version,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(self.started)),
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(self.finished)) if self.finished else None,
            "status": self.status,
            "exit_code": self.exit_code,
            "config": self.config,
            "files": self.files,
            "diagnostics": _plain(self.diagnostics),
            "warnings": get_errors(self.warnings),
            "error": self.error,
        }

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(path, "w") as f:
                json.dump(self.to_dict(), f, indent=2, sort_keys=False)
        except OSError as e:
            raise _io_error("write", path, e) from None
        return path


def _plain(value):
    """numpy scalars and arrays to JSON types; non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if np.isfinite(v) else repr(v)
    return value
