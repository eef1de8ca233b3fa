"""Geodesic metric spaces, metric projections and best proximity points.

Four model spaces (Euclidean, hyperbolic plane, weighted metric trees and a
max-norm sequence space), closed convex sets with projections, pair extents,
relatively nonexpansive maps, orbit solvers and a sampling engine for the
metric inequalities behind Busemann convexity and CAT(0).
"""
from .errors import (
    DegenerateInput,
    GeoproxError,
    InvalidParameter,
    InvalidPoint,
    InvalidSet,
    NoConvergence,
    OutOfDomain,
    UnsupportedSpace,
    WrongMode,
)
from .kernels import BACKEND
from .laws import LawId, LawReport, four_point_holds, parallel_to, verify_law
from .maps import (
    Affine,
    Identity,
    Isometry,
    MapDescriptor,
    ProjectOnto,
    apply,
    check_containment,
    check_rel_nonexpansive,
    make_projection_map,
)
from .pairs import (
    ExtentReport,
    PairDescriptor,
    PnsWitness,
    farthest,
    is_proximal,
    min_sets,
    pair_extents,
    pns_witness,
)
from .section5 import build_instance, verify_section5
from .sets import Ball, JamesSlice, Polytope, Segment, SubtreeHull, contains, project, singleton
from .solvers import IterationTrace, PhiBound, cyclic_iterate, midpoint_iterate, phi_bound
from .spaces import (
    Cat0ClosedForm,
    Empirical,
    EuclideanSpace,
    EuclideanVec,
    HyperbolicPlane,
    HyperboloidVec,
    MaxNormSeq,
    MaxNormVec,
    MetricTree,
    TreePoint,
    combine,
    distance,
    midpoint,
    modulus,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
