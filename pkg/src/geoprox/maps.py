"""Cyclic and noncyclic self-maps of A u B built from a small primitive grammar.

A map carries one rule per set; a rule is a list of primitives applied left
to right. Primitives are metric projections, isometries, the identity and,
for building negative examples, Euclidean affine maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import sets as cs
from .errors import InvalidParameter, OutOfDomain, UnsupportedSpace
from .laws import LawReport, evaluate, run_chunks, ABS_FLOOR
from .pairs import PairDescriptor
from .spaces import (
    EuclideanSpace,
    HyperbolicPlane,
    MaxNormSeq,
    MetricTree,
    Space,
)

DOMAIN_TOL = 1e-7
MODES = ("cyclic", "noncyclic")


@dataclass(frozen=True)
class ProjectOnto:
    """Metric projection onto "A", "B", "other", "same" or an explicit set."""

    target: object


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Isometry:
    """Space-specific isometry.

    euclidean: ``x -> matrix @ x + shift`` with orthogonal ``matrix``
    hyperbolic: ``x -> matrix @ x`` with ``matrix`` preserving the Minkowski form
    tree: ``vertex_map`` an automorphism of the weighted tree
    maxnorm: ``x -> x[perm] + shift`` with ``perm[0] == 0``
    """

    matrix: Optional[tuple] = None
    shift: Optional[tuple] = None
    vertex_map: Optional[tuple] = None
    perm: Optional[tuple] = None


@dataclass(frozen=True)
class Affine:
    """``x -> matrix @ x + shift`` on a vector space, with no isometry requirement."""

    matrix: tuple
    shift: Optional[tuple] = None


Primitive = Union[ProjectOnto, Identity, Isometry, Affine]


@dataclass(frozen=True)
class MapDescriptor:
    mode: str
    rule_a: tuple
    rule_b: tuple
    pair: PairDescriptor

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameter(f"mode must be one of {MODES}")
        for prim in self.rule_a + self.rule_b:
            check_primitive(self.pair.space, prim)


# ---------------------------------------------------------------------------
# primitive checks and evaluation


def _mat(m, shape=None):
    M = np.asarray(m, dtype=np.float64)
    if shape is not None and M.shape != shape:
        raise InvalidParameter(f"expected matrix of shape {shape}, got {M.shape}")
    return M


def check_primitive(space: Space, prim) -> None:
    if isinstance(prim, (Identity, ProjectOnto)):
        if isinstance(prim, ProjectOnto) and not isinstance(prim.target, str):
            cs.check_set(space, prim.target)
        return
    if isinstance(prim, Affine):
        if not isinstance(space, (EuclideanSpace, MaxNormSeq)):
            raise UnsupportedSpace("affine maps need a vector space")
        _mat(prim.matrix, (space.dim, space.dim))
        return
    if not isinstance(prim, Isometry):
        raise InvalidParameter(f"unknown primitive {prim!r}")
    if isinstance(space, EuclideanSpace):
        M = _mat(prim.matrix if prim.matrix is not None else np.eye(space.dim), (space.dim, space.dim))
        if not np.allclose(M.T @ M, np.eye(space.dim), atol=1e-12):
            raise InvalidParameter("euclidean isometry matrix must be orthogonal")
    elif isinstance(space, HyperbolicPlane):
        M = _mat(prim.matrix, (3, 3))
        J = np.diag([1.0, -1.0, -1.0])
        if not np.allclose(M.T @ J @ M, J, atol=1e-12) or M[0, 0] < 1.0 - 1e-12:
            raise InvalidParameter("hyperbolic isometry must preserve the Minkowski form and the upper sheet")
    elif isinstance(space, MetricTree):
        _tree_vertex_map(space, prim.vertex_map)
    elif isinstance(space, MaxNormSeq):
        perm = np.asarray(prim.perm if prim.perm is not None else range(space.dim))
        if sorted(perm.tolist()) != list(range(space.dim)) or perm[0] != 0:
            raise InvalidParameter("maxnorm isometry needs a permutation fixing coordinate 1")


def _tree_vertex_map(space: MetricTree, vmap):
    """Validate an automorphism given as pairs (v, image) and return edge index/orientation tables."""
    if vmap is None:
        raise InvalidParameter("tree isometry needs a vertex_map")
    # compare ids as strings so JSON object keys match integer vertex ids
    sid = {str(v): i for i, v in enumerate(space.vertices)}
    given = {str(k): str(v) for k, v in (vmap.items() if isinstance(vmap, dict) else vmap)}
    if not set(given) <= set(sid):
        raise InvalidParameter("vertex_map names an unknown vertex")
    # unlisted vertices stay fixed
    f = {**{k: k for k in sid}, **given}
    if sorted(f.values()) != sorted(sid):
        raise InvalidParameter("vertex_map must be a bijection of the vertex set")
    img_e = np.empty(len(space.elen), dtype=np.int64)
    flip = np.empty(len(space.elen), dtype=bool)
    for e in range(len(space.elen)):
        a, b = str(space.vertices[space.ea[e]]), str(space.vertices[space.eb[e]])
        ia, ib = sid[f[a]], sid[f[b]]
        e2 = space.edge_of[ia, ib]
        if e2 < 0 or space.elen[e2] != space.elen[e]:
            raise InvalidParameter("vertex_map does not preserve weighted edges")
        img_e[e] = e2
        flip[e] = space.ea[e2] != ia
    return img_e, flip


def apply_primitive(space: Space, prim, X, side: str, pair: PairDescriptor):
    X = np.atleast_2d(X)
    if isinstance(prim, Identity):
        return X
    if isinstance(prim, ProjectOnto):
        tgt = prim.target
        if isinstance(tgt, str):
            if tgt not in ("A", "B", "other", "same"):
                raise InvalidParameter(f"unknown projection target {tgt!r}")
            if tgt in ("other", "same"):
                tgt = side if tgt == "same" else ("B" if side == "A" else "A")
            tgt = pair.A if tgt == "A" else pair.B
        return cs.project_rows(space, tgt, X)
    if isinstance(prim, Affine):
        M = _mat(prim.matrix)
        s = np.zeros(space.dim) if prim.shift is None else _mat(prim.shift)
        return X @ M.T + s
    if isinstance(space, EuclideanSpace):
        M = np.eye(space.dim) if prim.matrix is None else _mat(prim.matrix)
        s = np.zeros(space.dim) if prim.shift is None else _mat(prim.shift)
        return X @ M.T + s
    if isinstance(space, HyperbolicPlane):
        return space.normalize(X @ _mat(prim.matrix).T)
    if isinstance(space, MetricTree):
        img_e, flip = _tree_vertex_map(space, prim.vertex_map)
        e = X[:, 0].astype(np.int64)
        e2 = img_e[e]
        o = np.where(flip[e], space.elen[e2] - X[:, 1], X[:, 1])
        return np.column_stack([e2.astype(np.float64), o])
    if isinstance(space, MaxNormSeq):
        perm = np.arange(space.dim) if prim.perm is None else np.asarray(prim.perm)
        s = np.zeros(space.dim) if prim.shift is None else _mat(prim.shift)
        return X[:, perm] + s
    raise UnsupportedSpace(f"no isometries on {space.kind}")


def apply_rows(m: MapDescriptor, X, side: str):
    """Evaluate the rule of ``side`` ("A" or "B") on rows already known to lie in that set."""
    space = m.pair.space
    for prim in (m.rule_a if side == "A" else m.rule_b):
        X = apply_primitive(space, prim, X, side, m.pair)
    return X


def side_of(m: MapDescriptor, X, tol: float = DOMAIN_TOL):
    """"A" where a row lies in A, else "B" where it lies in B, else None; A wins on A n B."""
    space = m.pair.space
    X = np.atleast_2d(X)
    inA = cs.contains_rows(space, m.pair.A, X, tol)
    inB = cs.contains_rows(space, m.pair.B, X, tol)
    return np.where(inA, "A", np.where(inB, "B", None))


def apply(m: MapDescriptor, p):
    """T(p) for p in A u B.

    Raises
    ------
    OutOfDomain
        If p lies in neither set (membership tolerance 1e-7).
    """
    space = m.pair.space
    X = space.encode(p)
    side = side_of(m, X)[0]
    if side is None:
        raise OutOfDomain("point lies in neither A nor B")
    return space.decode(apply_rows(m, X, side)[0])


def image_side(m: MapDescriptor, side: str) -> str:
    if m.mode == "noncyclic":
        return side
    return "B" if side == "A" else "A"


# ---------------------------------------------------------------------------
# constructors


def make_projection_map(pair: PairDescriptor) -> MapDescriptor:
    """P = P_B on A and P_A on B; cyclic and relatively nonexpansive in CAT(0) spaces."""
    if not pair.space.is_cat0:
        raise UnsupportedSpace(f"projection map needs a CAT(0) space, not {pair.space.kind}")
    return MapDescriptor("cyclic", (ProjectOnto("other"),), (ProjectOnto("other"),), pair)


def identity_map(pair: PairDescriptor) -> MapDescriptor:
    return MapDescriptor("noncyclic", (Identity(),), (Identity(),), pair)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def euclidean_rotation(theta: float, center) -> Isometry:
    """Planar rotation by ``theta`` about ``center``."""
    R = rotation_matrix(theta)
    c = np.asarray(center, dtype=np.float64)
    return Isometry(matrix=tuple(map(tuple, R)), shift=tuple(c - R @ c))


def hyperbolic_rotation(theta: float) -> Isometry:
    """Rotation about the hyperboloid's origin (1, 0, 0)."""
    M = np.eye(3)
    M[1:, 1:] = rotation_matrix(theta)
    return Isometry(matrix=tuple(map(tuple, M)))


def hyperbolic_boost(s: float) -> Isometry:
    """Translation by hyperbolic distance ``s`` along the x2 axis."""
    M = np.array([[np.cosh(s), np.sinh(s), 0.0], [np.sinh(s), np.cosh(s), 0.0], [0.0, 0.0, 1.0]])
    return Isometry(matrix=tuple(map(tuple, M)))


# ---------------------------------------------------------------------------
# checks


def check_rel_nonexpansive(m: MapDescriptor, n_samples: int = 10_000, seed: int = 0, tol: float = 1e-8,
                           upgrade_mode: bool = False, threads=None) -> LawReport:
    """Sample pairs x in A, y in B and test d(Tx, Ty) <= d(x, y) + tol.

    With ``upgrade_mode`` a third of the pairs each come from A x B, A x A
    and B x B.
    """
    space, pair = m.pair.space, m.pair
    kinds = (("A", "B"), ("A", "A"), ("B", "B")) if upgrade_mode else (("A", "B"),)
    sets = {"A": pair.A, "B": pair.B}

    def body(k, rng, size):
        which = rng.integers(0, len(kinds), size)
        X = np.empty((size, space.width))
        Y = np.empty((size, space.width))
        TX = np.empty_like(X)
        TY = np.empty_like(Y)
        for w, (sx, sy) in enumerate(kinds):
            idx = np.flatnonzero(which == w)
            if len(idx) == 0:
                continue
            X[idx] = cs.random_rows(space, sets[sx], rng, len(idx))
            Y[idx] = cs.random_rows(space, sets[sy], rng, len(idx))
            TX[idx] = apply_rows(m, X[idx], sx)
            TY[idx] = apply_rows(m, Y[idx], sy)
        return evaluate(space, space.dist(TX, TY), space.dist(X, Y), "le", (X, Y), tol)

    total = run_chunks(n_samples, seed, body, threads)
    return LawReport(
        law="rel-nonexpansive-upgrade" if upgrade_mode else "rel-nonexpansive",
        space=space.kind,
        samples_run=total.samples,
        violations=total.violations,
        worst_margin=float(total.worst if total.samples else 0.0),
        witness=total.witness,
        seed=int(seed),
        tolerance=max(float(tol), ABS_FLOOR),
    )


@dataclass
class ContainmentReport:
    samples_run: int
    violations: int
    witness: object

    def to_json(self, space) -> dict:
        w = None if self.witness is None else space.point_to_json(space.encode(self.witness)[0])
        return {"samples_run": self.samples_run, "violations": self.violations, "witness": w}


def check_containment(m: MapDescriptor, n_samples: int = 10_000, seed: int = 0,
                      tol: float = DOMAIN_TOL) -> ContainmentReport:
    """Check that T maps A and B into the sets its mode prescribes."""
    space, pair = m.pair.space, m.pair
    sets = {"A": pair.A, "B": pair.B}
    half = n_samples // 2
    violations, witness = 0, None
    for k, side in enumerate(("A", "B")):
        n = half if side == "A" else n_samples - half
        X = cs.sample_rows(space, sets[side], n, seed + k)
        TX = apply_rows(m, X, side)
        ok = cs.contains_rows(space, sets[image_side(m, side)], TX, tol)
        violations += int((~ok).sum())
        if witness is None and not ok.all():
            witness = space.decode(X[int(np.argmin(ok))])
    return ContainmentReport(n_samples, violations, witness)


# ---------------------------------------------------------------------------
# JSON


def primitive_from_json(space: Space, obj, named_sets=None):
    if isinstance(obj, str):
        obj = {"op": obj}
    op = obj.get("op")
    if op == "identity":
        return Identity()
    if op == "project":
        tgt = obj.get("target", "other")
        if isinstance(tgt, dict):
            tgt = cs.set_from_json(space, tgt)
        elif tgt not in ("A", "B", "other", "same"):
            if named_sets is None or tgt not in named_sets:
                raise InvalidParameter(f"unknown projection target {tgt!r}")
            tgt = named_sets[tgt]
        return ProjectOnto(tgt)
    if op == "isometry":
        tup = lambda v: None if v is None else tuple(tuple(r) if isinstance(r, list) else r for r in v)  # noqa: E731
        vm = obj.get("vertex_map")
        if isinstance(vm, dict):
            vm = tuple(vm.items())
        return Isometry(matrix=tup(obj.get("matrix")), shift=tup(obj.get("shift")),
                        vertex_map=vm, perm=tup(obj.get("perm")))
    if op == "affine":
        return Affine(tuple(map(tuple, obj["matrix"])), None if obj.get("shift") is None else tuple(obj["shift"]))
    raise InvalidParameter(f"unknown map primitive {op!r}")


def _floats(v):
    return np.asarray(v, dtype=np.float64).tolist()


def primitive_to_json(space: Space, prim) -> dict:
    if isinstance(prim, Identity):
        return {"op": "identity"}
    if isinstance(prim, ProjectOnto):
        t = prim.target
        return {"op": "project", "target": t if isinstance(t, str) else cs.set_to_json(space, t)}
    if isinstance(prim, Affine):
        return {"op": "affine", "matrix": _floats(prim.matrix),
                "shift": None if prim.shift is None else _floats(prim.shift)}
    out = {"op": "isometry"}
    if prim.matrix is not None:
        out["matrix"] = _floats(prim.matrix)
    if prim.shift is not None:
        out["shift"] = _floats(prim.shift)
    if prim.vertex_map is not None:
        out["vertex_map"] = dict(prim.vertex_map)
    if prim.perm is not None:
        out["perm"] = [int(i) for i in prim.perm]
    return out


def map_from_json(pair: PairDescriptor, obj: dict, named_sets=None) -> MapDescriptor:
    """``{"mode": ..., "rule": [...]}`` or per-set ``"rule_a"``/``"rule_b"``."""
    if not isinstance(obj, dict) or obj.get("mode") not in MODES:
        raise InvalidParameter("map needs a mode of 'cyclic' or 'noncyclic'")
    space = pair.space
    ra = obj.get("rule_a", obj.get("rule"))
    rb = obj.get("rule_b", obj.get("rule"))
    if ra is None or rb is None:
        raise InvalidParameter("map needs a rule (or rule_a and rule_b)")
    conv = lambda r: tuple(primitive_from_json(space, p, named_sets) for p in r)  # noqa: E731
    return MapDescriptor(obj["mode"], conv(ra), conv(rb), pair)


def map_to_json(m: MapDescriptor) -> dict:
    space = m.pair.space
    out = {"mode": m.mode}
    ra = [primitive_to_json(space, p) for p in m.rule_a]
    rb = [primitive_to_json(space, p) for p in m.rule_b]
    if ra == rb:
        out["rule"] = ra
    else:
        out["rule_a"], out["rule_b"] = ra, rb
    return out


__all__ = [
    "Affine", "ContainmentReport", "Identity", "Isometry", "MapDescriptor", "ProjectOnto",
    "apply", "apply_rows", "check_containment", "check_rel_nonexpansive", "euclidean_rotation",
    "hyperbolic_boost", "hyperbolic_rotation", "identity_map", "make_projection_map",
    "map_from_json", "map_to_json", "rotation_matrix", "side_of",
]
