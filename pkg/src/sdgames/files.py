"""JSON files for games, strategies, SDPs and Dantzig games.

Floats are written with Python's shortest round-trip representation, so
reading a file back reproduces every double bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .dantzig import DantzigGame
from .errors import ContractViolation
from .games import SemidefiniteGame
from .sdp import Constraint, Sense, SdpProblem

NEG_A = "negA"


def jsonable(obj):
    """Convert numpy containers and scalars to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n"


def digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise ContractViolation(f"cannot read {path}: {exc}") from None


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractViolation(f"cannot read {path}: {exc}") from None


def _array(data, shape, what):
    try:
        a = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise ContractViolation(f"{what} is not a numeric array") from None
    if shape is not None and a.shape != tuple(shape):
        raise ContractViolation(f"{what} has shape {a.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(a)):
        raise ContractViolation(f"{what} has non-finite entries")
    return a


# -- games --------------------------------------------------------------------


def game_to_dict(g: SemidefiniteGame) -> dict:
    d = {"m": g.m, "n": g.n, "A": g.A.tolist(), "B": NEG_A if g.is_zero_sum else g.B.tolist()}
    if g.name:
        d["name"] = g.name
    if g.params:
        d["params"] = dict(g.params)
    return d


def game_from_dict(d) -> SemidefiniteGame:
    if not isinstance(d, dict) or not {"m", "n", "A", "B"} <= d.keys():
        raise ContractViolation("game file needs keys m, n, A and B")
    m, n = int(d["m"]), int(d["n"])
    A = _array(d["A"], (m, m, n, n), "A")
    B = -A if d["B"] == NEG_A else _array(d["B"], (m, m, n, n), "B")
    return SemidefiniteGame(A, B, name=str(d.get("name", "")), params=dict(d.get("params", {})))


def save_game(g: SemidefiniteGame, path) -> None:
    Path(path).write_text(dumps(game_to_dict(g)))


def load_game(path) -> SemidefiniteGame:
    return game_from_dict(read_json(path))


# -- strategies -----------------------------------------------------------------


def load_strategy(path, key: str = "X") -> np.ndarray:
    """A matrix stored either bare or under ``"X"``/``"Y"``/``"matrix"``."""
    d = read_json(path)
    if isinstance(d, dict):
        for k in (key, "X", "Y", "matrix"):
            if k in d:
                d = d[k]
                break
        else:
            raise ContractViolation(f"strategy file {path} has no matrix entry")
    M = _array(d, None, "strategy")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation(f"strategy must be a square matrix, got shape {M.shape}")
    return M


def save_strategy(X, path, key: str = "X") -> None:
    Path(path).write_text(dumps({key: np.asarray(X)}))


# -- SDPs and Dantzig games -----------------------------------------------------


def sdp_to_dict(p: SdpProblem) -> dict:
    return {"n": p.n, "C": p.C.tolist(),
            "constraints": [{"A": c.A.tolist(), "b": c.b, "sense": c.sense.value} for c in p.constraints]}


def sdp_from_dict(d) -> SdpProblem:
    if not isinstance(d, dict) or not {"n", "C", "constraints"} <= d.keys():
        raise ContractViolation("SDP file needs keys n, C and constraints")
    n = int(d["n"])
    C = _array(d["C"], (n, n), "C")
    cons = []
    for i, c in enumerate(d["constraints"]):
        try:
            sense = Sense(c.get("sense", "eq"))
        except ValueError:
            raise ContractViolation(f"constraint {i} has unknown sense {c.get('sense')!r}") from None
        cons.append(Constraint(_array(c["A"], (n, n), f"A[{i}]"), float(c["b"]), sense))
    return SdpProblem(C, tuple(cons))


def save_sdp(p: SdpProblem, path) -> None:
    Path(path).write_text(dumps(sdp_to_dict(p)))


def load_sdp(path) -> SdpProblem:
    return sdp_from_dict(read_json(path))


def dantzig_to_dict(g: DantzigGame) -> dict:
    return {"Q": g.Q.tolist(), "blocks": list(g.blocks), "order": g.order}


def dantzig_from_dict(d) -> DantzigGame:
    if not isinstance(d, dict) or not {"Q", "blocks"} <= d.keys():
        raise ContractViolation("Dantzig game file needs keys Q and blocks")
    return DantzigGame.from_blocks(_array(d["Q"], None, "Q"), d["blocks"], d.get("order", "diag-first"))
