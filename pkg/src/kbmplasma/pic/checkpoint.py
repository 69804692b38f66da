"""Binary checkpoints of a kinetic run.

Layout (little endian)::

    8 bytes   magic  b"KBMPIC\\x00\\x01"
    uint32    format version
    uint32    header length H
    H bytes   UTF-8 JSON header: clock, step, loss counters, array table
    ...       float64 arrays in header order

The header records every array's name and length, so readers can verify
the payload size before trusting it.
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

from ..errors import KbmError

MAGIC = b"KBMPIC\x00\x01"
VERSION = 1
_ARRAYS = ("electrons.x", "electrons.v", "electrons.weight", "ions.x", "ions.v", "ions.weight", "p")


class CheckpointError(KbmError, ValueError):
    """Malformed or incompatible checkpoint file."""


def dump_path(base, step: int) -> Path:
    base = Path(base) if base is not None else Path.cwd() / "pic"
    if base.suffix == ".ckpt":
        base = base.with_suffix("")
    return base.with_name(f"{base.name}_abort_{step:08d}.ckpt")


def _get(state, name):
    obj = state
    for part in name.split("."):
        obj = getattr(obj, part)
    return np.ascontiguousarray(obj, dtype="<f8")


def save(path, state, config=None) -> Path:
    """Write ``state`` atomically; ``config`` is echoed into the header for provenance."""
    path = Path(path)
    arrays = {n: _get(state, n) for n in _ARRAYS}
    header = {
        "t": state.t,
        "step": state.step,
        "species": {
            sp: {"charge": getattr(state, sp).charge, "lost_weight": getattr(state, sp).lost_weight,
                 "lost_count": getattr(state, sp).lost_count}
            for sp in ("electrons", "ions")
        },
        "arrays": [[n, int(a.size)] for n, a in arrays.items()],
        "losses": state.losses,
    }
    if config is not None:
        header["config"] = {
            "eps": config.params.eps, "mu": config.params.mu, "gamma": config.params.gamma,
            "b": config.params.b, "profile": config.profile.kind, "x_max": config.x_max,
            "n_cells": config.n_cells, "dt": config.dt, "seed": config.seed,
        }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for a in arrays.values():
            fh.write(a.tobytes())
    os.replace(tmp, path)
    return path


def load(path):
    """Read a checkpoint back into a :class:`~kbmplasma.pic.solver.PicState`."""
    from .solver import PicState, Species

    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise CheckpointError("not a kinetic-run checkpoint (bad magic)")
    version, hlen = struct.unpack_from("<II", data, 8)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    off = 16
    header = json.loads(data[off : off + hlen].decode("utf-8"))
    off += hlen
    need = sum(n for _, n in header["arrays"]) * 8
    if len(data) - off != need:
        raise CheckpointError(f"payload is {len(data) - off} bytes, header describes {need}")
    arrays = {}
    for name, n in header["arrays"]:
        arrays[name] = np.frombuffer(data, dtype="<f8", count=n, offset=off).astype(float)
        off += 8 * n
    sp = {}
    for name in ("electrons", "ions"):
        meta = header["species"][name]
        sp[name] = Species(
            arrays[f"{name}.x"], arrays[f"{name}.v"], arrays[f"{name}.weight"], meta["charge"],
            meta["lost_weight"], meta["lost_count"],
        )
    return PicState(sp["electrons"], sp["ions"], arrays["p"], header["t"], header["step"], header["losses"])
