"""A bounded convex pair without proximal normal structure that still has best proximity points.

The ambient space is R^dim under ``max(|x|_inf, |x|_2 / sqrt 2)``, a finite
truncation of a reflexive sequence space. With

    A = {x : |x| <= 1, x1 = 1, x >= 0},   B = {x : |x| <= 2, x1 = 2, x >= 0}

one has dist(A, B) = 1 and delta(A, B) = 2, while every x in A sees B at
farthest distance at least ``2 - 1/sqrt(dim - 1)``. That bound tends to 2, the
diameter, so no point of A is "central" in the limit. Yet every cyclic
relatively nonexpansive T satisfies d(T(2e1), T^2(2e1)) = 1 = dist(A, B),
because 2e1 is at distance exactly 1 from all of A.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import sets as cs
from .errors import InvalidParameter
from .maps import Isometry, MapDescriptor, ProjectOnto, apply_rows
from .pairs import PairDescriptor, farthest_rows, pair_extents, partner_rows
from .solvers import cyclic_iterate
from .spaces import MaxNormSeq

SURROGATE_NOTE = (
    "x in A has |x|_2 <= sqrt 2 and x1 = 1, so some coordinate j >= 2 has "
    "x_j <= 1/sqrt(dim-1); then |x - (2e1 + 2e_j)| >= 2 - x_j"
)


@dataclass(frozen=True)
class JamesInstance:
    dim: int
    space: MaxNormSeq
    A: cs.JamesSlice
    B: cs.JamesSlice

    @property
    def pair(self) -> PairDescriptor:
        return PairDescriptor(self.space, self.A, self.B)

    def e(self, i: int, scale: float = 1.0):
        """``scale * e_i`` with 1-based index i."""
        return cs.unit_vector(self.dim, i - 1, scale)


def build_instance(dim: int) -> JamesInstance:
    dim = int(dim)
    if dim < 3:
        raise InvalidParameter("dim must be at least 3 so that two tail directions exist")
    space = MaxNormSeq(dim)
    inst = JamesInstance(dim, space, cs.JamesSlice(1.0, 1.0), cs.JamesSlice(2.0, 2.0))
    assert cs.contains(space, inst.A, inst.e(1)) and cs.contains(space, inst.B, inst.e(1, 2.0))
    return inst


def remark_pair(inst: JamesInstance):
    """Polytopes conv{e1 + e_n} in A and conv{2e1 + 2e_n} in B, n = 2..dim."""
    one = [inst.e(1).coords] * (inst.dim - 1)
    va = tuple(cs.MaxNormVec(tuple(np.add(one[k], inst.e(k + 2).coords))) for k in range(inst.dim - 1))
    vb = tuple(cs.MaxNormVec(tuple(2.0 * np.array(p.coords))) for p in va)
    return cs.Polytope(va), cs.Polytope(vb)


def corpus_maps(inst: JamesInstance) -> dict:
    """Cyclic maps on A u B that are relatively nonexpansive by construction.

    constant: A -> {2e1}, B -> {e1}. The image distance is 1 <= dist(A, B).
    swap-shift: x -> (x with coordinates 2 and 3 swapped) + e1 on A; B -> {e1}.
    shift: x -> x + e1 on A; B -> {e1}. For both, d(Tx, Ty) = |x| <= 1.
    """
    pair = inst.pair
    p1 = ProjectOnto(cs.singleton(inst.e(1)))
    p2 = ProjectOnto(cs.singleton(inst.e(1, 2.0)))
    perm = list(range(inst.dim))
    perm[1], perm[2] = perm[2], perm[1]
    e1 = tuple(inst.e(1).coords)
    return {
        "constant": MapDescriptor("cyclic", (p2,), (p1,), pair),
        "swap-shift": MapDescriptor("cyclic", (Isometry(perm=tuple(perm), shift=e1),), (p1,), pair),
        "shift": MapDescriptor("cyclic", (Isometry(shift=e1),), (p1,), pair),
    }


def surrogate_bound(dim: int) -> float:
    return 2.0 - 1.0 / np.sqrt(dim - 1)


def pns_surrogate_min(inst: JamesInstance, n_samples: int, seed: int) -> float:
    """Smallest farthest distance to B over sampled points of A (exact per point in the sup-part)."""
    X = cs.sample_rows(inst.space, inst.A, n_samples, seed)
    val, _, _, _ = farthest_rows(inst.space, X, inst.B)
    return float(val.min())


@dataclass
class Section5Report:
    dist: float
    diam: float
    pns_surrogate_min: float
    pns_surrogate_bound: float
    best_prox_gap: float
    dim: int
    samples: int
    seed: int
    details: dict
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "dist": self.dist,
            "diam": self.diam,
            "pns_surrogate_min": self.pns_surrogate_min,
            "pns_surrogate_bound": self.pns_surrogate_bound,
            "best_prox_gap": self.best_prox_gap,
            "dim": self.dim,
            "samples": self.samples,
            "seed": self.seed,
            "checks": self.checks,
            "passed": self.passed,
            "details": self.details,
        }


def verify_section5(inst: JamesInstance, n_samples: int = 10_000, seed: int = 0, tol: float = 1e-9,
                    maps: Optional[dict] = None, remark: bool = False) -> Section5Report:
    space = inst.space
    pj = space.point_to_json
    ext = pair_extents(inst.pair)

    # every sampled x in A is witnessed in A0 by x + e1 in B
    X = cs.sample_rows(space, inst.A, n_samples, seed)
    shifted = X.copy()
    shifted[:, 0] += 1.0
    in_b = cs.contains_rows(space, inst.B, shifted, 0.0)
    unit = np.abs(space.dist(X, shifted) - 1.0) <= tol
    a0_ok = int((in_b & unit).sum())

    vals, _, _, _ = farthest_rows(space, X, inst.B)
    sur_min = float(vals.min())
    sur_bound = float(surrogate_bound(inst.dim))

    two = space.encode(inst.e(1, 2.0))
    far_2e1, _, far_exact, _ = farthest_rows(space, two, inst.A)
    _, near_2e1 = partner_rows(space, two, inst.A)

    maps = corpus_maps(inst) if maps is None else maps
    gaps = {}
    for name, m in maps.items():
        t1 = apply_rows(m, two, "B")
        t2 = apply_rows(m, t1, "A")
        tr = cyclic_iterate(m, inst.e(1, 2.0), tol, max_iter=0, dist=ext.dist_upper)
        gaps[name] = {
            "T(2e1)": pj(t1[0]),
            "gap": float(space.dist(t1, t2)[0]),
            "orbit_gap": tr.pair_gap,
            "n_iters": tr.n_iters,
        }
    worst = max(gaps.values(), key=lambda g: abs(g["gap"] - 1.0))["gap"] if gaps else float("nan")

    details = {
        "arg_dist": [pj(space.encode(p)[0]) for p in ext.arg_dist],
        "arg_diam": [pj(space.encode(p)[0]) for p in ext.arg_diam],
        "dist_exact": bool(ext.dist_exact),
        "diam_exact": bool(ext.diam_exact),
        "farthest_2e1_A": float(far_2e1[0]),
        "dist_2e1_A": float(near_2e1[0]),
        "a0_witnessed": a0_ok,
        "map_gaps": gaps,
        "surrogate_derivation": SURROGATE_NOTE,
    }
    if remark:
        ra, rb = remark_pair(inst)
        rext = pair_extents(PairDescriptor(space, ra, rb, n_samples=min(n_samples, 2000), seed=seed))
        details["remark"] = {"dist_lower": rext.dist_lower, "dist_upper": rext.dist_upper,
                             "diam": rext.diam_lower, "diam_exact": bool(rext.diam_exact)}
    checks = {
        "dist": abs(ext.dist_upper - 1.0) <= tol and ext.dist_exact,
        "diam": abs(ext.diam_lower - 2.0) <= tol and ext.diam_exact,
        "pns_surrogate": sur_min >= sur_bound - max(tol, 1e-6),
        "farthest_2e1": abs(far_2e1[0] - 1.0) <= tol and bool(far_exact[0]),
        "dist_2e1": abs(near_2e1[0] - 1.0) <= tol,
        "best_proximity": all(abs(g["gap"] - 1.0) <= tol for g in gaps.values()),
        "a0_all_of_A": a0_ok == len(X),
    }
    return Section5Report(
        dist=ext.dist_upper, diam=ext.diam_lower,
        pns_surrogate_min=sur_min, pns_surrogate_bound=sur_bound,
        best_prox_gap=float(worst), dim=inst.dim, samples=int(n_samples), seed=int(seed),
        details=details, checks={k: bool(v) for k, v in checks.items()},
    )
