"""Orbit iterations for relatively nonexpansive maps and the approximate-fixed-point bound."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameter, OutOfDomain, WrongMode
from .maps import MapDescriptor, apply_rows, image_side, side_of
from .pairs import pair_extents
from .spaces import Cat0ClosedForm, cat0_modulus, modulus as _modulus

STATIONARY_STEP = 1e-14


@dataclass
class IterationTrace:
    iterates: list
    gaps: list
    stopped_reason: str
    n_iters: int
    pair_gap: Optional[float] = None
    dist: Optional[float] = None
    rows: np.ndarray = field(default=None, repr=False)

    def to_json(self, space) -> dict:
        out = {
            "stopped_reason": self.stopped_reason,
            "n_iters": self.n_iters,
            "gaps": [float(g) for g in self.gaps],
            "iterates": [space.point_to_json(r) for r in self.rows],
        }
        if self.pair_gap is not None:
            out["pair_gap"] = self.pair_gap
            out["dist"] = self.dist
        return out

    def json_lines(self, space) -> str:
        """One JSON object per iterate."""
        return "".join(
            json.dumps({"n": n, "point": space.point_to_json(r), "gap": float(g)}) + "\n"
            for n, (r, g) in enumerate(zip(self.rows, self.gaps))
        )

    def csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,gap\n")
        for n, g in enumerate(self.gaps):
            buf.write(f"{n},{float(g)!r}\n")
        return buf.getvalue()


def _start(m: MapDescriptor, x0):
    space = m.pair.space
    X = space.encode(x0)
    side = side_of(m, X)[0]
    if side is None:
        raise OutOfDomain("starting point lies in neither A nor B")
    return space, X, side


def _trace(space, rows, gaps, reason, pair_gap=None, dist=None):
    R = np.vstack(rows)
    return IterationTrace(space.decode(R), list(map(float, gaps)), reason, len(rows) - 1,
                          pair_gap, dist, R)


def midpoint_iterate(m: MapDescriptor, x0, eps: float, max_iter: int = 10_000) -> IterationTrace:
    """x_{n+1} = midpoint(x_n, T x_n) until d(x_n, T x_n) <= eps.

    Stops with ``"GapBelowEps"``, ``"MaxIter"`` or ``"Stationary"`` (a step
    shorter than 1e-14 while the gap is still above ``eps``).
    """
    if m.mode != "noncyclic":
        raise WrongMode("midpoint iteration needs a noncyclic map")
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    space, x, side = _start(m, x0)
    rows, gaps = [x], []
    while True:
        tx = apply_rows(m, x, side)
        gap = float(space.dist(x, tx)[0])
        gaps.append(gap)
        if gap <= eps:
            return _trace(space, rows, gaps, "GapBelowEps")
        if len(rows) - 1 >= max_iter:
            return _trace(space, rows, gaps, "MaxIter")
        nxt = space.midpoint(x, tx)
        if float(space.dist(x, nxt)[0]) <= STATIONARY_STEP:
            return _trace(space, rows, gaps, "Stationary")
        x = nxt
        rows.append(x)


def cyclic_iterate(m: MapDescriptor, x0, eps: float, max_iter: int = 10_000,
                   dist: Optional[float] = None) -> IterationTrace:
    """x_{n+1} = T x_n until |d(x_n, T x_n) - dist(A, B)| <= eps; ``pair_gap`` is the last gap."""
    if m.mode != "cyclic":
        raise WrongMode("cyclic iteration needs a cyclic map")
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    space, x, side = _start(m, x0)
    if dist is None:
        dist = pair_extents(m.pair).dist_upper
    rows, gaps = [x], []
    while True:
        tx = apply_rows(m, x, side)
        gap = float(space.dist(x, tx)[0])
        gaps.append(gap)
        if abs(gap - dist) <= eps:
            return _trace(space, rows, gaps, "GapBelowEps", gap, dist)
        if len(rows) - 1 >= max_iter:
            return _trace(space, rows, gaps, "MaxIter", gap, dist)
        if gap <= STATIONARY_STEP:
            return _trace(space, rows, gaps, "Stationary", gap, dist)
        x, side = tx, image_side(m, side)
        rows.append(x)


@dataclass(frozen=True)
class PhiBound:
    b: float
    eps: float
    phi: int
    delta: float

    def to_json(self) -> dict:
        return {"b": self.b, "eps": self.eps, "phi": self.phi, "delta": self.delta}


def phi_bound(b: float, eps: float, modulus=None, space=None) -> PhiBound:
    """Phi(eps) = ceil(2b / (eps * delta(b, eps/b))).

    Some iterate of the midpoint scheme with index at most ``phi`` has gap
    at most ``eps`` when the orbit stays within ``b`` of a fixed point.
    ``space`` is needed only for an empirical modulus.
    """
    b, eps = float(b), float(eps)
    if not (b > 0 and eps > 0):
        raise InvalidParameter("b and eps must be positive")
    ratio = eps / b
    if ratio > 2.0:
        raise InvalidParameter("eps/b must not exceed 2")
    modulus = Cat0ClosedForm() if modulus is None else modulus
    if isinstance(modulus, Cat0ClosedForm) and space is None:
        delta = float(cat0_modulus(ratio))
    else:
        if space is None:
            raise InvalidParameter("an empirical modulus needs a space")
        delta = _modulus(modulus, space, b, ratio)
    if not delta > 0:
        raise InvalidParameter("modulus vanished; no finite bound")
    return PhiBound(b, eps, int(math.ceil(2.0 * b / (eps * delta))), float(delta))


def first_hit(gaps, eps: float) -> Optional[int]:
    """Smallest n with gaps[n] <= eps, or None."""
    for n, g in enumerate(gaps):
        if g <= eps:
            return n
    return None
