"""Linear overapproximators of the convex quadratic D over the det-1 box set.

The final cumulative matrix satisfies x1*x2 + x3*x4 = 1 (its determinant)
inside the entrywise box found by bound tightening, where
(x1, x2, x3, x4) = (w11, w22, w12, w21).  Because D is convex, an affine
function dominating D on the extreme points of that set dominates it on the
whole set.  Fixing two of the variables at box corners reduces the extreme-
point geometry to a 2-d slice y1*y2 = beta inside a rectangle:

* the curve meets the rectangle in two orthants -> the convex hull is a
  polytope with at most four extreme points, all on the curve;
* the curve meets it in a single orthant -> the hull is a cone section with
  infinitely many extreme points; it is outer-approximated by a quadrilateral
  built from the two boundary crossings and one tangent segment touching the
  curve at the geometric mean of the (updated) first-variable bounds;
* beta = 0 degenerates the curve to the coordinate axes and the slice to a
  cross, whose hull vertices are the axis-box crossings.

Candidate points are harvested from all sixteen corner slices, affine
functions are interpolated through 5-point subsets, and only those dominating
D on every candidate survive.  Dominance transfers from the candidates to
every reachable design by convexity, which the tests certify by enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .bounds import EntryBounds, _corner_matrices
from .errors import (
    EmptyCandidateSet,
    InconsistentBounds,
    NoValidHyperplane,
    SingularSystem,
)
from .materials import Catalog
from .optics import ComplexIndex

#: Membership / deduplication tolerance for candidate points.
POINT_TOL = 1e-9
#: A hyperplane must dominate g on every candidate up to this slack ...
DOMINATION_TOL = 1e-9
#: ... and accepted hyperplanes are lifted by the same amount.
LIFT = 1e-9
#: Relative residual allowed when interpolating the 5-point system.
RESIDUAL_TOL = 1e-8
#: Enumerate all 5-subsets up to this candidate count, sample beyond it.
EXHAUSTIVE_LIMIT = 12
RANDOM_SUBSETS = 5000


@dataclass(frozen=True)
class Box4:
    """Entrywise bounds on (x1, x2, x3, x4) = (w11, w22, w12, w21)."""

    lower: tuple[float, float, float, float]
    upper: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise InconsistentBounds(f"bad box {self.lower} > {self.upper}")

    @classmethod
    def from_entry_bounds(cls, eb: EntryBounds, wavelength_idx: int, depth: int | None = None) -> "Box4":
        """Final-layer box in x-order; entry arrays store (a11, a12, a21, a22)."""
        n = eb.lower.shape[1] - 1 if depth is None else depth
        lo, hi = eb.box(wavelength_idx, n)
        order = (0, 3, 1, 2)  # a11, a22, a12, a21
        return cls(tuple(lo[e] for e in order), tuple(hi[e] for e in order))

    def contains(self, point: Sequence[float], tol: float = POINT_TOL) -> bool:
        return all(
            lo - tol <= v <= hi + tol
            for v, lo, hi in zip(point, self.lower, self.upper)
        )


@dataclass(frozen=True)
class CandidateSet:
    points: tuple[tuple[float, float, float, float], ...]

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points)


@dataclass(frozen=True)
class Hyperplane:
    """Affine overapproximator a0 + a1*x1 + a2*x2 + a3*x3 + a4*x4 >= g(x)."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float

    def coefficients(self) -> tuple[float, float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3, self.a4)

    def value(self, point: Sequence[float]) -> float:
        return (
            self.a0
            + self.a1 * point[0]
            + self.a2 * point[1]
            + self.a3 * point[2]
            + self.a4 * point[3]
        )


def _inside(v: float, lo: float, hi: float, tol: float = POINT_TOL) -> bool:
    return lo - tol <= v <= hi + tol


def _dedupe(points: list[tuple[float, ...]], tol: float = POINT_TOL) -> list[tuple[float, ...]]:
    kept: list[tuple[float, ...]] = []
    for p in points:
        if not any(max(abs(a - b) for a, b in zip(p, q)) <= tol for q in kept):
            kept.append(p)
    return kept


def _tangent_quad(
    b1: tuple[float, float], b2: tuple[float, float], beta: float,
    crossings: list[tuple[float, float]],
) -> list[tuple[float, float]]:
    """Single-orthant case: crossings plus tangent-segment endpoints.

    Works in the positive orthant after sign reflection.  The updated box is
    the bounding box of the two crossings; the tangent to y1*y2 = beta at
    y1 = sqrt of the product of the updated first-variable bounds cuts that
    box in two points, closing an outer quadrilateral around the arc.
    """
    s1 = 1.0 if crossings[0][0] > 0 else -1.0
    s2 = 1.0 if crossings[0][1] > 0 else -1.0
    pts = [(s1 * p, s2 * q) for p, q in crossings]
    beta_pos = s1 * s2 * beta
    y1lo, y1hi = min(p for p, _ in pts), max(p for p, _ in pts)
    y2lo, y2hi = min(q for _, q in pts), max(q for _, q in pts)
    t1 = math.sqrt(abs(y1lo * y1hi))
    t2 = beta_pos / t1
    # tangent line through (t1, t2): y2 = 2*t2 - (t2/t1)*y1
    tangent: list[tuple[float, float]] = []
    for y1 in (y1lo, y1hi):
        y2 = 2.0 * t2 - (t2 / t1) * y1
        if _inside(y2, y2lo, y2hi):
            tangent.append((y1, y2))
    for y2 in (y2lo, y2hi):
        if t2 == 0:
            continue
        y1 = (2.0 * t2 - y2) * t1 / t2
        if _inside(y1, y1lo, y1hi):
            tangent.append((y1, y2))
    out = crossings + [(s1 * p, s2 * q) for p, q in _dedupe(tangent)]
    return out


def extreme_points_2d(
    b1: tuple[float, float], b2: tuple[float, float], beta: float
) -> list[tuple[float, float]]:
    """Extreme points of conv{(y1, y2) in box : y1*y2 = beta} (outer set in the cone case)."""
    lo1, hi1 = b1
    lo2, hi2 = b2
    if beta == 0.0:
        pts: list[tuple[float, float]] = []
        if _inside(0.0, lo2, hi2):
            pts += [(lo1, 0.0), (hi1, 0.0)]
        if _inside(0.0, lo1, hi1):
            pts += [(0.0, lo2), (0.0, hi2)]
        return _dedupe(pts)

    crossings: list[tuple[float, float]] = []
    for y1 in (lo1, hi1):
        if y1 != 0.0 and _inside(beta / y1, lo2, hi2):
            crossings.append((y1, beta / y1))
    for y2 in (lo2, hi2):
        if y2 != 0.0 and _inside(beta / y2, lo1, hi1):
            crossings.append((beta / y2, y2))
    crossings = _dedupe(crossings)
    if not crossings:
        return []
    orthants = {(p > 0, q > 0) for p, q in crossings}
    if len(orthants) > 1 or len(crossings) < 2:
        # Both branches reached (or a degenerate tangential touch): the
        # crossings themselves are the polytope vertices.
        return crossings
    return _dedupe(_tangent_quad(b1, b2, beta, crossings))


def collect_candidates(box: Box4) -> CandidateSet:
    """Harvest extreme-point candidates from all sixteen corner slices."""
    lo, hi = box.lower, box.upper
    points: list[tuple[float, float, float, float]] = []
    for x1 in (lo[0], hi[0]):
        for x2 in (lo[1], hi[1]):
            beta = 1.0 - x1 * x2
            for y3, y4 in extreme_points_2d((lo[2], hi[2]), (lo[3], hi[3]), beta):
                points.append((x1, x2, y3, y4))
    for x3 in (lo[2], hi[2]):
        for x4 in (lo[3], hi[3]):
            beta = 1.0 - x3 * x4
            for y1, y2 in extreme_points_2d((lo[0], hi[0]), (lo[1], hi[1]), beta):
                points.append((y1, y2, x3, x4))
    points = _dedupe(points)
    if not points:
        raise EmptyCandidateSet("no extreme-point candidates inside the box")
    return CandidateSet(tuple(points))


def denominator_on_x(substrate: ComplexIndex) -> Callable[[Sequence[float]], float]:
    """D as a function of the x-ordered 4-vector (w11, w22, w12, w21)."""
    a, b = substrate.re, substrate.im

    def g(x: Sequence[float]) -> float:
        x1, x2, x3, x4 = x
        return (x1 - b * x3) ** 2 + (a * x3) ** 2 + (x4 + b * x2) ** 2 + (a * x2) ** 2 + 2.0 * a

    return g


def fit_hyperplane(
    points: Sequence[Sequence[float]], g: Callable[[Sequence[float]], float]
) -> Hyperplane:
    """Affine interpolation of g through 5 points in 4-space."""
    if len(points) != 5:
        raise ValueError(f"need exactly 5 points, got {len(points)}")
    mat = np.column_stack([np.ones(5), np.array(points)])
    rhs = np.array([g(p) for p in points])
    try:
        alpha = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    residual = np.abs(mat @ alpha - rhs).max()
    if not np.isfinite(alpha).all() or residual > RESIDUAL_TOL * max(1.0, np.abs(rhs).max()):
        raise SingularSystem(f"ill-conditioned system, residual {residual:g}")
    return Hyperplane(*map(float, alpha))


def constant_overapproximator(box: Box4, substrate: ComplexIndex) -> Hyperplane:
    """Global fallback: the corner maximum of the convex D bounds D on the whole box."""
    g = denominator_on_x(substrate)
    best = max(
        g(corner)
        for corner in (
            tuple(box.upper[e] if p & (1 << e) else box.lower[e] for e in range(4))
            for p in range(16)
        )
    )
    return Hyperplane(best + LIFT, 0.0, 0.0, 0.0, 0.0)


def _subset_iter(count: int, gvals: np.ndarray, seed: int):
    if count <= EXHAUSTIVE_LIMIT:
        yield from combinations(range(count), 5)
        return
    ranked = np.argsort(gvals, kind="stable")
    extremal = sorted(set(ranked[:6]) | set(ranked[-6:]))
    yield from combinations(extremal, 5)
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, ...]] = set()
    for _ in range(RANDOM_SUBSETS):
        pick = tuple(sorted(rng.choice(count, size=5, replace=False).tolist()))
        if pick not in seen:
            seen.add(pick)
            yield pick


def generate_overapproximators(
    box: Box4,
    substrate: ComplexIndex,
    seed: int = 42,
) -> list[Hyperplane]:
    """All validated affine overapproximators of D over the box's det-1 set.

    5-point subsets of the candidate set are enumerated exhaustively up to
    ``EXHAUSTIVE_LIMIT`` candidates; beyond that, the subsets of the twelve
    extremal-D candidates plus a seeded random sample are tried.  A fit
    survives only if it dominates D on *every* candidate (up to tolerance);
    survivors are lifted so the dominance is exact in exported models.
    """
    cands = collect_candidates(box)
    pts = cands.as_array()
    g = denominator_on_x(substrate)
    gvals = np.array([g(p) for p in pts])
    if len(cands) < 5:
        raise NoValidHyperplane(f"only {len(cands)} candidates, need 5")

    kept: list[Hyperplane] = []
    coeffs: list[np.ndarray] = []
    for subset in _subset_iter(len(cands), gvals, seed):
        try:
            h = fit_hyperplane(pts[list(subset)], g)
        except SingularSystem:
            continue
        vals = h.a0 + pts @ np.array([h.a1, h.a2, h.a3, h.a4])
        if np.all(vals >= gvals - DOMINATION_TOL):
            lifted = np.array([h.a0 + LIFT, h.a1, h.a2, h.a3, h.a4])
            scale = max(1.0, np.abs(lifted).max())
            if not any(np.abs(lifted - c).max() <= 1e-7 * scale for c in coeffs):
                coeffs.append(lifted)
                kept.append(Hyperplane(*map(float, lifted)))
    if not kept:
        raise NoValidHyperplane("no 5-point fit dominates D on the candidate set")
    return kept


def hyperplanes_for_catalog(
    catalog: Catalog, entry_bounds: EntryBounds, seed: int = 42
) -> list[list[Hyperplane]]:
    """Per-wavelength overapproximator families, with the constant fallback."""
    out: list[list[Hyperplane]] = []
    for li in range(len(catalog.spectrum)):
        box = Box4.from_entry_bounds(entry_bounds, li)
        sub = catalog.substrate_indices[li]
        try:
            out.append(generate_overapproximators(box, sub, seed=seed))
        except (NoValidHyperplane, EmptyCandidateSet):
            out.append([constant_overapproximator(box, sub)])
    return out
