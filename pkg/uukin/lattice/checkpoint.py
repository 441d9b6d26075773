"""
PairCorrelation checkpoints.

``<stem>.bin`` holds the dense φ array as little-endian interleaved
(re, im) float64 in index-lexicographic order; ``<stem>.yml`` holds
M, Δp, t, ε and the format version.
"""

import logging
import os
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import yaml

from uukin.errors import CODE_CONFIG, new_fatal
from uukin.lattice.lattice import DEFAULT_BUDGET, Lattice3, PairCorrelation

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
_DTYPE = np.dtype("<c16")

PathLike = Union[str, os.PathLike]


def _paths(stem: PathLike) -> Tuple[Path, Path]:
    stem = Path(stem)
    return stem.with_suffix(".bin"), stem.with_suffix(".yml")


def write_checkpoint(phi: PairCorrelation, stem: PathLike) -> Tuple[Path, Path]:
    data_path, meta_path = _paths(stem)
    data_path.parent.mkdir(parents=True, exist_ok=True)
    np.ascontiguousarray(phi.data, dtype=_DTYPE).tofile(data_path)
    meta = {
        "version": CHECKPOINT_VERSION,
        "M": phi.lattice.side,
        "dp": float(phi.lattice.spacing),
        "t": float(phi.time),
        "eps": float(phi.eps),
    }
    meta.update({k: v for k, v in phi.meta.items() if k not in meta})
    with open(meta_path, "w") as f:
        yaml.safe_dump(meta, f, sort_keys=False)
    logger.debug("checkpoint written: %s", data_path)
    return data_path, meta_path


def read_checkpoint(stem: PathLike, budget: int = DEFAULT_BUDGET) -> PairCorrelation:
    data_path, meta_path = _paths(stem)
    if not meta_path.exists() or not data_path.exists():
        raise new_fatal("checkpoint files missing", {"stem": str(stem)}, code=CODE_CONFIG)
    with open(meta_path) as f:
        meta = yaml.safe_load(f) or {}
    version = meta.get("version")
    if version != CHECKPOINT_VERSION:
        raise new_fatal(f"unsupported checkpoint version {version!r}",
                        {"stem": str(stem)}, code=CODE_CONFIG)
    try:
        lattice = Lattice3(int(meta["M"]), float(meta["dp"]))
        t = float(meta["t"])
        eps = float(meta["eps"])
    except KeyError as e:
        raise new_fatal(f"checkpoint sidecar misses '{e.args[0]}'",
                        {"stem": str(stem)}, code=CODE_CONFIG) from None
    lattice.check_capacity(budget)
    n = lattice.size
    raw = np.fromfile(data_path, dtype=_DTYPE)
    if raw.size != n ** 3:
        raise new_fatal("checkpoint size does not match the lattice",
                        {"entries": int(raw.size), "expected": n ** 3}, code=CODE_CONFIG)
    extra = {k: v for k, v in meta.items() if k not in ("version", "M", "dp", "t", "eps")}
    return PairCorrelation(lattice, raw.astype(np.complex128).reshape(n, n, n), t, eps, extra)
