"""Per-distribution rate regions and the algebra for their unions.

Each bound evaluated at one auxiliary law is a pentagon
``{R1 <= r1_max, R2 <= r2_max, R1 + R2 <= sum_max}`` (a :class:`CornerRegion`).
A union over many laws is summarized by its Pareto frontier (a :class:`RateRegion`).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .info import (
    JointTable,
    ProbVector,
    assemble_joint,
    conditional_entropy,
    joint_axes,
    mutual_information,
)

CLAMP_TOL = 1e-10
MERGE_TOL = 1e-9


class CardinalityError(ValueError):
    pass


class BoundKind(str, enum.Enum):
    HK_INNER = "hk_inner"
    THM1_OUTER = "thm1_outer"
    THM4_OUTER = "thm4_outer"
    CAPACITY = "capacity"
    SATO = "sato"

    @property
    def convex(self) -> bool:
        return self is not BoundKind.SATO


class RegionShape(str, enum.Enum):
    PENTAGON = "pentagon"
    RECTANGLE = "rectangle"


# --- auxiliary input laws ---------------------------------------------------

def _pmf_rows(arr, shape_name: str) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    if arr.min() < -1e-12:
        raise ValueError(f"{shape_name} has negative entries")
    arr = np.clip(arr, 0.0, None)
    flat = arr.reshape(arr.shape[0], -1)
    sums = flat.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise ValueError(f"{shape_name} slices must each sum to 1")
    return (flat / sums[:, None]).reshape(arr.shape)


@dataclass(frozen=True, eq=False)
class AuxInput:
    """A law ``p(q) p(u, x1 | q) p(x2 | q)``.

    Arrays: ``p_q[q]``, ``p_ux1_given_q[q, u, x1]``, ``p_x2_given_q[q, x2]``.
    """

    p_q: np.ndarray
    p_ux1_given_q: np.ndarray
    p_x2_given_q: np.ndarray

    def __init__(self, p_q, p_ux1_given_q, p_x2_given_q):
        p_q = ProbVector(p_q).values.copy()
        p_ux1 = np.asarray(p_ux1_given_q, dtype=float)
        p_x2 = np.asarray(p_x2_given_q, dtype=float)
        if p_ux1.ndim != 3 or p_x2.ndim != 2:
            raise ValueError("expected p_ux1_given_q[q,u,x1] and p_x2_given_q[q,x2]")
        if p_ux1.shape[0] != p_q.shape[0] or p_x2.shape[0] != p_q.shape[0]:
            raise ValueError("Q alphabet sizes disagree")
        p_ux1 = _pmf_rows(p_ux1, "p_ux1_given_q")
        p_x2 = _pmf_rows(p_x2, "p_x2_given_q")
        for a in (p_q, p_ux1, p_x2):
            a.setflags(write=False)
        object.__setattr__(self, "p_q", p_q)
        object.__setattr__(self, "p_ux1_given_q", p_ux1)
        object.__setattr__(self, "p_x2_given_q", p_x2)

    n_q = property(lambda self: self.p_ux1_given_q.shape[0])
    n_u = property(lambda self: self.p_ux1_given_q.shape[1])
    n_x1 = property(lambda self: self.p_ux1_given_q.shape[2])
    n_x2 = property(lambda self: self.p_x2_given_q.shape[1])

    @classmethod
    def from_p_u_x1(cls, p_u_x1, p_x2) -> "AuxInput":
        """Constant Q; ``p_u_x1[u, x1]`` and ``p_x2[x2]``."""
        p_u_x1 = np.asarray(p_u_x1, dtype=float)
        return cls([1.0], p_u_x1[None], np.asarray(p_x2, dtype=float)[None])

    @classmethod
    def constant(cls, p_x1, p_x2) -> "AuxInput":
        """U and Q both constant."""
        return cls.from_p_u_x1(np.asarray(p_x1, dtype=float)[None], p_x2)

    @classmethod
    def u_equals_x1(cls, p_x1, p_x2) -> "AuxInput":
        p_x1 = np.asarray(p_x1, dtype=float)
        return cls.from_p_u_x1(np.diag(p_x1), p_x2)

    @classmethod
    def random(cls, rng: np.random.Generator, n_q: int, n_u: int, n_x1: int,
               n_x2: int) -> "AuxInput":
        """Dirichlet(1) draw for every factor."""
        p_q = rng.dirichlet(np.ones(n_q))
        p_ux1 = rng.dirichlet(np.ones(n_u * n_x1), size=n_q).reshape(n_q, n_u, n_x1)
        p_x2 = rng.dirichlet(np.ones(n_x2), size=n_q)
        return cls(p_q, p_ux1, p_x2)

    def joint(self) -> np.ndarray:
        """p(q, u, x1, x2)."""
        return (self.p_q[:, None, None, None] * self.p_ux1_given_q[..., None]
                * self.p_x2_given_q[:, None, None, :])

    def to_dict(self) -> dict:
        return {"p_q": self.p_q.tolist(), "p_ux1_given_q": self.p_ux1_given_q.tolist(),
                "p_x2_given_q": self.p_x2_given_q.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "AuxInput":
        return cls(d["p_q"], d["p_ux1_given_q"], d["p_x2_given_q"])


def check_cardinality(aux: AuxInput, zc, kind: BoundKind | str) -> None:
    kind = BoundKind(kind)
    if aux.n_x1 != zc.n_x1 or aux.n_x2 != zc.n_x2:
        raise ValueError("aux alphabets do not match the channel")
    if aux.n_q > 4:
        raise CardinalityError(f"|Q| = {aux.n_q} exceeds 4")
    limit = zc.n_x1 + (2 if kind is BoundKind.HK_INNER else 1)
    if aux.n_u > limit:
        raise CardinalityError(f"|U| = {aux.n_u} exceeds {limit} for {kind.value}")


# --- regions ----------------------------------------------------------------

def _clamp(x: float, name: str) -> float:
    if x < 0.0:
        if x < -CLAMP_TOL:
            raise ValueError(f"{name} = {x!r} is negative")
        return 0.0
    return float(x)


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "r1", _clamp(self.r1, "r1"))
        object.__setattr__(self, "r2", _clamp(self.r2, "r2"))

    def __iter__(self):
        return iter((self.r1, self.r2))


@dataclass(frozen=True)
class CornerRegion:
    """``{(R1, R2) >= 0 : R1 <= r1_max, R2 <= r2_max, R1 + R2 <= sum_max}``.

    A redundant sum constraint is clamped to ``r1_max + r2_max`` on construction.
    """

    r1_max: float
    r2_max: float
    sum_max: float

    def __post_init__(self):
        a = _clamp(self.r1_max, "r1_max")
        b = _clamp(self.r2_max, "r2_max")
        c = min(_clamp(self.sum_max, "sum_max"), a + b)
        object.__setattr__(self, "r1_max", a)
        object.__setattr__(self, "r2_max", b)
        object.__setattr__(self, "sum_max", c)

    @property
    def is_rectangle(self) -> bool:
        return self.sum_max >= self.r1_max + self.r2_max - 1e-12

    def contains(self, r1: float, r2: float, tol: float = 0.0) -> bool:
        return (r1 <= self.r1_max + tol and r2 <= self.r2_max + tol
                and r1 + r2 <= self.sum_max + tol)

    def corner_points(self) -> list[tuple[float, float]]:
        """The two dominant corners (equal for a rectangle)."""
        a = min(self.r1_max, self.sum_max)
        b = min(self.r2_max, self.sum_max)
        c = min(self.sum_max, a + b)
        return [(a, c - a), (c - b, b)]

    def intercepts(self) -> list[tuple[float, float]]:
        return [(min(self.r1_max, self.sum_max), 0.0), (0.0, min(self.r2_max, self.sum_max))]

    def support(self, lam: float) -> float:
        """max of R1 + lam R2 over the region (lam = inf means R2 alone)."""
        if math.isinf(lam):
            return max(p[1] for p in self.corner_points())
        return max(p[0] + lam * p[1] for p in self.corner_points())

    def as_tuple(self) -> tuple[float, float, float]:
        return self.r1_max, self.r2_max, self.sum_max


class _Terms:
    """Lazy information terms over an ``assemble_joint`` table."""

    def __init__(self, joint: JointTable, include_T: bool):
        self.j = joint
        self.ax = joint_axes(include_T)

    def _a(self, names: str) -> list[int]:
        return [self.ax[n] for n in names.split()] if names else []

    def H(self, target: str, given: str = "") -> float:
        return conditional_entropy(self.j, self._a(target), self._a(given))

    def I(self, a: str, b: str, given: str = "") -> float:
        return mutual_information(self.j, self._a(a), self._a(b), self._a(given))


def _terms(aux: AuxInput, zc, include_T: bool = False, x2_ref: int = 0) -> _Terms:
    return _Terms(assemble_joint(aux, zc, include_T=include_T, x2_ref=x2_ref), include_T)


def _first_region_terms(t: _Terms) -> tuple[float, float]:
    i1 = t.I("X1", "Y1", "U Q")
    m = min(t.I("Y1", "U", "Q"), t.I("Y2", "U", "X2 Q"))
    return i1, i1 + m


def g_inner(aux: AuxInput, zc) -> CornerRegion:
    """Superposition / partial-decoding achievable region at one law."""
    check_cardinality(aux, zc, BoundKind.HK_INNER)
    t = _terms(aux, zc)
    i1, r1 = _first_region_terms(t)
    return CornerRegion(r1, t.I("X2", "Y2", "U Q"), i1 + t.I("U X2", "Y2", "Q"))


def g_outer(aux: AuxInput, zc) -> CornerRegion:
    """Outer-bound pentagon at one law (valid for Condition-1 channels)."""
    check_cardinality(aux, zc, BoundKind.THM4_OUTER)
    t = _terms(aux, zc)
    i1, r1 = _first_region_terms(t)
    b = t.I("U X2", "Y2", "Q")
    return CornerRegion(r1, b, i1 + b)


def g_thm1(aux: AuxInput, zc, x2_ref: int = 0) -> CornerRegion:
    """The outer bound in its imaginary-output form, with gamma eliminated.

    T is produced by ``V2(. | x1, x2_ref)``.
    """
    check_cardinality(aux, zc, BoundKind.THM1_OUTER)
    t = _terms(aux, zc, include_T=True, x2_ref=x2_ref)
    base = t.H("Y1", "U Q") - t.H("Y1", "X1")
    m = min(t.I("Y1", "U", "Q"), t.I("T", "U", "Q"))
    b = max(t.H("Y2", "Q") - t.H("T", "U Q"), 0.0)
    return CornerRegion(max(base + m, 0.0), b, max(base + b, 0.0))


def _restricted_aux(p_u_x1, zc, p_star) -> AuxInput:
    if p_star is None:
        raise ValueError("p_star is required")
    p_star = p_star.values if isinstance(p_star, ProbVector) else np.asarray(p_star, float)
    p_u_x1 = np.asarray(getattr(p_u_x1, "values", p_u_x1), dtype=float)
    if p_u_x1.ndim != 2 or p_u_x1.shape[1] != zc.n_x1:
        raise ValueError("p_u_x1 must be indexed [u][x1]")
    aux = AuxInput.from_p_u_x1(p_u_x1, p_star)
    check_cardinality(aux, zc, BoundKind.CAPACITY)
    return aux


def capacity_corner(p_u_x1, zc, p_star, tau: Optional[float]) -> CornerRegion:
    """Capacity pentagon at ``p(u) p(x1|u)`` for a channel meeting both conditions.

    X2 is drawn from ``p_star`` and ``tau`` is the maximal output entropy at
    receiver 2.
    """
    if tau is None:
        raise ValueError("tau is required")
    aux = _restricted_aux(p_u_x1, zc, p_star)
    t = _terms(aux, zc)
    i1 = t.I("X1", "Y1", "U")
    m = min(t.I("U", "Y1"), t.I("U", "Y2", "X2"))
    b = tau - t.H("Y2", "X2 U")
    if b < -CLAMP_TOL:
        raise ValueError(f"tau = {tau} is below H(Y2|X2,U); was it computed for this channel?")
    return CornerRegion(i1 + m, b, i1 + b)


def achievable_restricted(p_u_x1, zc, p_star, tau: Optional[float]) -> CornerRegion:
    """Achievable pentagon with no time sharing and X2 ~ p_star.

    Evaluated as the general achievable region at that law, i.e. with
    ``I(X2; Y2 | U)`` and ``I(U, X2; Y2)`` rather than through ``tau``; the two
    agree exactly when p_star attains tau for every law of X1.
    """
    if tau is None:
        raise ValueError("tau is required")
    aux = _restricted_aux(p_u_x1, zc, p_star)
    return g_inner(aux, zc)


@dataclass(frozen=True)
class PointA:
    point: RatePair
    predicate: bool
    i_u_y1: float
    i_u_y2: float


def corner_point_A(aux: AuxInput, zc) -> PointA:
    """Corner ``(r1_max, sum_max - r1_max)`` of the outer pentagon and its test.

    ``predicate`` is ``I(U;Y1|Q) >= I(U;Y2|Q)``; when it holds the corner is
    achievable.
    """
    reg = g_outer(aux, zc)
    t = _terms(aux, zc)
    i1, i2 = t.I("U", "Y1", "Q"), t.I("U", "Y2", "Q")
    a = min(reg.r1_max, reg.sum_max)
    return PointA(RatePair(a, reg.sum_max - a), bool(i1 >= i2), i1, i2)


def classify(aux: AuxInput, zc) -> RegionShape:
    """Shape of the achievable pentagon as decided by ``I(U;Y1|Q) >= I(U;Y2|Q)``."""
    t = _terms(aux, zc)
    if t.I("U", "Y1", "Q") >= t.I("U", "Y2", "Q"):
        return RegionShape.PENTAGON
    return RegionShape.RECTANGLE


# --- unions -----------------------------------------------------------------

@dataclass
class RateRegion:
    """Downward-closed union summarized by its sorted Pareto frontier.

    With ``hulled`` set the region is the convex hull of the frontier (time
    sharing); otherwise it is the staircase union of boxes under each point.
    ``realizers[i]``, when present, is the law whose region produced point ``i``.
    """

    frontier: list
    bound_kind: BoundKind
    meta: dict = field(default_factory=dict)
    realizers: Optional[list] = None
    hulled: bool = False

    def __post_init__(self):
        self.bound_kind = BoundKind(self.bound_kind)
        self.frontier = [p if isinstance(p, RatePair) else RatePair(*p) for p in self.frontier]
        for p, q in zip(self.frontier, self.frontier[1:]):
            if not (q.r1 > p.r1 and q.r2 <= p.r2):
                raise ValueError("frontier must be sorted by increasing R1, non-increasing R2")
        if self.realizers is not None and len(self.realizers) != len(self.frontier):
            raise ValueError("one realizer per frontier point")

    def points(self) -> np.ndarray:
        return np.array([(p.r1, p.r2) for p in self.frontier], dtype=float).reshape(-1, 2)

    @property
    def max_r1(self) -> float:
        return self.frontier[-1].r1 if self.frontier else 0.0

    @property
    def max_r2(self) -> float:
        return self.frontier[0].r2 if self.frontier else 0.0

    @property
    def max_sum(self) -> float:
        return max((p.r1 + p.r2 for p in self.frontier), default=0.0)

    def slack(self, r1: float, r2: float) -> float:
        """Largest t with ``(r1 + t, r2 + t)`` in the region; negative when outside."""
        pts = self.points()
        if pts.size == 0:
            return -math.inf
        if not self.hulled or len(pts) == 1:
            return float(np.max(np.minimum(pts[:, 0] - r1, pts[:, 1] - r2)))
        cons = [((1.0, 0.0), pts[-1, 0]), ((0.0, 1.0), pts[0, 1])]
        for p, q in zip(pts[:-1], pts[1:]):
            n = (p[1] - q[1], q[0] - p[0])
            cons.append((n, n[0] * p[0] + n[1] * p[1]))
        return float(min((rhs - n[0] * r1 - n[1] * r2) / (n[0] + n[1]) for n, rhs in cons))

    def upper_r2(self, r1: float) -> float:
        """Largest R2 in the region at rate ``r1`` (``-inf`` past the R1 maximum)."""
        return _height(self.points(), r1, self.hulled)

    def upper_r1(self, r2: float) -> float:
        """Largest R1 in the region at rate ``r2``."""
        return _height(self.points()[::-1, ::-1], r2, self.hulled)

    def pareto_gap(self, r1: float, r2: float) -> float:
        """How far the region reaches beyond ``(r1, r2)`` along either axis.

        Zero for a Pareto-optimal point, positive for a dominated one (even if it
        sits on a flat edge of the boundary), negative outside the region.
        """
        return max(self.upper_r2(r1) - r2, self.upper_r1(r2) - r1)

    def contains(self, r1: float, r2: float, tol: float = MERGE_TOL) -> bool:
        return self.slack(r1, r2) >= -tol

    def support(self, lam: float) -> float:
        pts = self.points()
        if math.isinf(lam):
            return float(pts[:, 1].max())
        return float(np.max(pts[:, 0] + lam * pts[:, 1]))


def _height(pts: np.ndarray, x: float, hulled: bool) -> float:
    """Upper boundary of a downward-closed region over the first coordinate.

    ``pts`` is a frontier sorted by increasing first coordinate.
    """
    if pts.size == 0 or x > pts[-1, 0] + MERGE_TOL:
        return -math.inf
    # coordinates are only meaningful to the merge tolerance
    x = min(x, pts[-1, 0])
    if not hulled or x <= pts[0, 0]:
        return float(pts[pts[:, 0] >= x, 1].max())
    k = int(np.searchsorted(pts[:, 0], x))
    (x0, y0), (x1, y1) = pts[k - 1], pts[k]
    return float(y0 + (y1 - y0) * (x - x0) / (x1 - x0))


def _pareto(points: np.ndarray, tol: float) -> np.ndarray:
    """Indices of the tolerance-merged Pareto frontier, in increasing-R1 order.

    Every dropped point is dominated by a kept point up to ``tol`` in one
    coordinate, so merging never shrinks the region by more than ``tol``.
    """
    order = np.lexsort((-points[:, 1], -points[:, 0]))
    keep = []
    best_r2 = -math.inf
    for i in order:
        if points[i, 1] > best_r2:
            keep.append(i)
            best_r2 = points[i, 1]
    keep.reverse()
    if not keep:
        return np.array(keep, dtype=int)
    out = [keep[0]]
    # R2 of the first point of the current merge group; replacements are measured
    # against it so that merges do not chain beyond tol
    top_r2 = points[keep[0], 1]
    for i in keep[1:]:
        p = points[out[-1]]
        q = points[i]
        if q[0] - p[0] <= tol:
            # q barely moves right but drops in R2: p dominates within tolerance
            continue
        if top_r2 - q[1] <= tol:
            out[-1] = i
            continue
        out.append(i)
        top_r2 = q[1]
    return np.array(out, dtype=int)


def union_frontier(regions: Sequence[CornerRegion], payloads: Optional[Sequence] = None,
                   bound_kind: BoundKind | str = BoundKind.THM4_OUTER,
                   meta: Optional[dict] = None, tol: float = MERGE_TOL) -> RateRegion:
    """Pareto frontier of a union of pentagons (no convexification)."""
    if not regions:
        raise ValueError("need at least one region")
    pts, owners = [], []
    for k, reg in enumerate(regions):
        for p in reg.corner_points() + reg.intercepts():
            pts.append(p)
            owners.append(k)
    arr = np.array(pts, dtype=float)
    keep = _pareto(arr, tol)
    realizers = None
    if payloads is not None:
        if len(payloads) != len(regions):
            raise ValueError("one payload per region")
        realizers = [payloads[owners[i]] for i in keep]
    return RateRegion([RatePair(*arr[i]) for i in keep], bound_kind, dict(meta or {}),
                      realizers, hulled=False)


def convex_hull(region: RateRegion, tol: float = 1e-12) -> RateRegion:
    """Time-sharing closure: keep only the extreme points of the upper-right hull."""
    pts = region.points()
    idx = list(range(len(pts)))
    hull: list[int] = []
    for i in idx:
        while len(hull) >= 2:
            o, a = pts[hull[-2]], pts[hull[-1]]
            b = pts[i]
            cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
            # pop a when it lies no more than tol (perpendicular distance) above o-b
            if cross >= -tol * math.hypot(b[0] - o[0], b[1] - o[1]):
                hull.pop()
            else:
                break
        hull.append(i)
    realizers = None if region.realizers is None else [region.realizers[i] for i in hull]
    meta = dict(region.meta)
    meta["hulled"] = True
    return RateRegion([region.frontier[i] for i in hull], region.bound_kind, meta,
                      realizers, hulled=True)


def sato_region(zc, cfg=None, hull: bool = False) -> RateRegion:
    """Union over product laws of the interference-free rectangles.

    ``{R1 <= I(X1;Y1), R2 <= I(X2;Y2|X1)}``; the raw staircase by default, its
    convex hull with ``hull=True``.
    """
    from .search import trace_frontier

    region = trace_frontier(zc, BoundKind.SATO, cfg)
    return convex_hull(region) if hull else region
