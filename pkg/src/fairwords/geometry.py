"""Polygonal exchange systems on the sum-zero hyperplane.

For an alphabet of size d the deviation orbits live in the hyperplane of
sum-zero vectors; dropping the last coordinate (the ``iota`` chart) turns
everything into plain 2-D geometry when d = 3.  This module constructs the
two partitions whose pieces the generators exchange:

* the hypercubic system: images of the upper cube faces under the projection
  along alpha (parallelograms for d = 3), exchanged by x -> x + alpha - e_i;
* the greedy-rule system for parameters (C, C'): the closure of the orbit of
  0 is a fundamental domain of the plane modulo Z^2, carved into atoms by
  which letter the rule emits.  It is built exactly, by refining a small
  seed square with the piecewise translation until the covered area reaches
  the covolume.

Verification oracles check the fundamental-domain property by sampling
(``verify_tiling``), cross-check generated words against point location
(``verify_natural_partition``), and enumerate the dual model-set description
of billiard words (``model_set_vertices``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import NoConvergence, OutOfDomain, UnsupportedDimension
from .sequences import (
    FrequencyVector,
    SumZeroVector,
    TijdemanParams,
    choose_tijdeman_letter,
    generate_letters,
    hypercubic_letter,
    in_hypercubic_domain,
)

__all__ = [
    "HalfPlane",
    "ConvexPolygon",
    "PartitionAtom",
    "ExchangeSystem",
    "project_pi_alpha",
    "iota",
    "iota_inverse",
    "hypercubic_region_of",
    "tijdeman_region_of",
    "exchange_step",
    "clip",
    "subtract",
    "q_cells",
    "exact_partition_d3",
    "hypercubic_partition_d3",
    "verify_tiling",
    "verify_natural_partition",
    "model_set_vertices",
    "connected_components",
]

DEDUP_TOL = 1e-9
MIN_AREA = 1e-12


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HalfPlane:
    """The region a*x + b*y <= c, with (a, b) normalised to unit length."""

    a: float
    b: float
    c: float
    closed: bool = True  # strictness is informational; geometry uses closures

    def __post_init__(self):
        n = math.hypot(self.a, self.b)
        if n < 1e-15:
            raise ValueError("half-plane normal must be nonzero")
        object.__setattr__(self, "a", self.a / n)
        object.__setattr__(self, "b", self.b / n)
        object.__setattr__(self, "c", self.c / n)

    def signed(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return pts[:, 0] * self.a + pts[:, 1] * self.b - self.c

    def complement(self) -> "HalfPlane":
        return HalfPlane(-self.a, -self.b, -self.c, closed=not self.closed)


def _shoelace(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _dedup(vertices: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    keep = []
    for v in vertices:
        if not keep or max(abs(v[0] - keep[-1][0]), abs(v[1] - keep[-1][1])) > tol:
            keep.append(v)
    while len(keep) > 1 and max(abs(keep[0][0] - keep[-1][0]),
                                abs(keep[0][1] - keep[-1][1])) <= tol:
        keep.pop()
    return np.array(keep, dtype=float) if keep else np.zeros((0, 2))


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """A convex polygon with counterclockwise vertices and positive area."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _dedup(np.asarray(self.vertices, dtype=float))
        if v.shape[0] < 3:
            raise ValueError("a polygon needs at least 3 distinct vertices")
        if _shoelace(v) < 0:
            v = v[::-1].copy()
        area = _shoelace(v)
        if area < MIN_AREA:
            raise ValueError(f"degenerate polygon, area {area!r}")
        e1 = np.roll(v, -1, axis=0) - v
        e2 = np.roll(e1, -1, axis=0)
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        scale = float(np.abs(e1).max()) ** 2
        if np.any(cross < -1e-9 * max(scale, 1.0)):
            raise ValueError("polygon is not convex")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return _shoelace(self.vertices)

    def edges(self):
        """Outward unit normals (k, 2) and offsets (k,): inside is n.p <= c."""
        v = self.vertices
        d = np.roll(v, -1, axis=0) - v
        normals = np.stack([d[:, 1], -d[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = np.einsum("ij,ij->i", normals, v)
        return normals, offsets

    def margins(self, points: np.ndarray) -> np.ndarray:
        """Max signed edge distance: <= 0 inside, > 0 outside (lower bound)."""
        normals, offsets = self.edges()
        pts = np.atleast_2d(points)
        return (pts @ normals.T - offsets).max(axis=1)

    def contains(self, point, tol: float = 0.0) -> bool:
        return bool(self.margins(np.asarray(point, float)[None, :])[0] <= tol)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return (v + w).T @ cr / (6.0 * self.area)

    def bbox(self):
        v = self.vertices
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    def translated(self, t) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(t, float))


def _bbox_overlap(b1, b2, tol: float = 1e-12) -> bool:
    return not (b1[2] < b2[0] - tol or b2[2] < b1[0] - tol
                or b1[3] < b2[1] - tol or b2[3] < b1[1] - tol)


def clip(poly: ConvexPolygon, half: HalfPlane) -> ConvexPolygon | None:
    """Intersection of a convex polygon with a half-plane (None if empty)."""
    v = poly.vertices
    s = half.signed(v)
    eps = 1e-12
    if np.all(s <= eps):
        return poly
    if np.all(s >= -eps):
        return None
    out = []
    k = v.shape[0]
    for i in range(k):
        j = (i + 1) % k
        si, sj = s[i], s[j]
        if si <= eps:
            out.append(v[i])
        if (si > eps) != (sj > eps):
            t = si / (si - sj)
            out.append(v[i] + t * (v[j] - v[i]))
    if len(out) < 3:
        return None
    try:
        return ConvexPolygon(np.array(out))
    except ValueError:
        return None


def _clip_many(poly: ConvexPolygon | None, halves) -> ConvexPolygon | None:
    for h in halves:
        if poly is None:
            return None
        poly = clip(poly, h)
    return poly


def _edge_halfplanes(poly: ConvexPolygon):
    normals, offsets = poly.edges()
    return [HalfPlane(float(n[0]), float(n[1]), float(c))
            for n, c in zip(normals, offsets)]


def subtract(poly: ConvexPolygon, other: ConvexPolygon) -> list[ConvexPolygon]:
    """Decompose poly minus other into interior-disjoint convex polygons."""
    if not _bbox_overlap(poly.bbox(), other.bbox()):
        return [poly]
    pieces = []
    remaining: ConvexPolygon | None = poly
    for h in _edge_halfplanes(other):
        outside = clip(remaining, h.complement())
        if outside is not None:
            pieces.append(outside)
        remaining = clip(remaining, h)
        if remaining is None:
            break
    return pieces


def intersect(poly: ConvexPolygon, other: ConvexPolygon) -> ConvexPolygon | None:
    """Intersection of two convex polygons (None if of negligible area)."""
    if not _bbox_overlap(poly.bbox(), other.bbox()):
        return None
    return _clip_many(poly, _edge_halfplanes(other))


# ---------------------------------------------------------------------------
# charts between the sum-zero hyperplane and the plane
# ---------------------------------------------------------------------------

def project_pi_alpha(v, alpha: FrequencyVector) -> SumZeroVector:
    """Projection along the alpha direction onto the sum-zero hyperplane:
    v - (sum v)*alpha; sends each basis vector e_i to e_i - alpha."""
    v = np.asarray(v, dtype=float)
    return SumZeroVector(v - float(v.sum()) * alpha.alphas)


def iota(x: SumZeroVector) -> np.ndarray:
    """Drop the last coordinate (recoverable as minus the sum of the rest)."""
    return np.array(x.coords[:-1])


def iota_inverse(y) -> SumZeroVector:
    y = np.asarray(y, dtype=float)
    return SumZeroVector(np.append(y, -float(y.sum())))


# ---------------------------------------------------------------------------
# region classification
# ---------------------------------------------------------------------------

def hypercubic_region_of(x: SumZeroVector, alpha: FrequencyVector) -> int:
    """Which face image of the projected cube contains x (letter in 1..d)."""
    xv, av = x.coords, alpha.alphas
    if not in_hypercubic_domain(xv, av):
        raise OutOfDomain("point is not in the projected unit cube")
    return hypercubic_letter(xv, av) + 1


def tijdeman_region_of(x: SumZeroVector, params: TijdemanParams) -> int:
    """Which greedy-rule region contains x (letter in 1..d); smallest index
    on overlaps, matching the generator's tie rule exactly."""
    xv = x.coords
    if np.any(xv < -params.C_prime - 1e-9):
        raise OutOfDomain("point has a coordinate below -C'")
    return choose_tijdeman_letter(xv, params.alpha.alphas,
                                  params.C, params.C_prime) + 1


def exchange_step(x: SumZeroVector, kind: str, params) -> SumZeroVector:
    """Apply x -> x + alpha - e_i for the letter chosen by the given system.

    ``kind`` is "hypercubic" (params may be a FrequencyVector or
    TijdemanParams) or "tijdeman" (params must be TijdemanParams).
    """
    if kind == "hypercubic":
        alpha = params.alpha if isinstance(params, TijdemanParams) else params
        letter = hypercubic_region_of(x, alpha)
    elif kind == "tijdeman":
        alpha = params.alpha
        letter = tijdeman_region_of(x, params)
    else:
        raise ValueError(f"unknown system kind {kind!r}")
    nxt = x.coords + alpha.alphas
    nxt = nxt.copy()
    nxt[letter - 1] -= 1.0
    return SumZeroVector(nxt)


# ---------------------------------------------------------------------------
# partitions for d = 3
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PartitionAtom:
    """All pieces translated by the same vector under the exchange."""

    letter: int
    polygons: list
    translation: np.ndarray  # 2-D, congruent to (alpha_1, alpha_2) mod Z^2

    @property
    def area(self) -> float:
        return sum(p.area for p in self.polygons)


@dataclass(frozen=True, eq=False)
class ExchangeSystem:
    """A full partition (one atom per letter) with its defining parameters."""

    atoms: list
    alpha: FrequencyVector
    C: float
    C_prime: float

    def __post_init__(self):
        total = self.total_area
        if abs(total - 1.0) > 1e-6:
            raise ValueError(
                f"atom areas must sum to the covolume 1, got {total!r}"
            )

    @property
    def total_area(self) -> float:
        return sum(a.area for a in self.atoms)

    def all_polygons(self):
        return [p for a in self.atoms for p in a.polygons]

    def max_overlap_area(self) -> float:
        """Largest pairwise intersection area between stored pieces."""
        polys = self.all_polygons()
        worst = 0.0
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                common = intersect(polys[i], polys[j])
                if common is not None:
                    worst = max(worst, common.area)
        return worst


def _require_d3(d: int):
    if d != 3:
        raise UnsupportedDimension(
            f"exact polygonal construction is only implemented for d = 3, got d = {d}"
        )


def _coordinate_form(j: int) -> np.ndarray:
    """Linear form on the plane computing coordinate j of the lifted
    sum-zero vector (x, y, -x-y)."""
    return np.array([(1.0, 0.0), (0.0, 1.0), (-1.0, -1.0)][j])


def _translations_d3(alpha: FrequencyVector) -> list:
    a1, a2 = float(alpha.alphas[0]), float(alpha.alphas[1])
    return [np.array([a1 - 1.0, a2]), np.array([a1, a2 - 1.0]), np.array([a1, a2])]


def q_cells(params: TijdemanParams) -> list:
    """The closed convex cells of the greedy-rule regions, for d = 3.

    For each letter i and each admissibility pattern J containing i, the cell
    collects the points whose admissible letters are exactly J and whose
    travel time is minimised at i.  Cells are returned as (letter, polygon)
    with empty ones dropped; across letters their interiors are disjoint.
    """
    _require_d3(params.d)
    av = params.alpha.alphas
    big_c, big_cp = params.C, params.C_prime
    # the ambient region [-C', inf)^3 on the hyperplane is the triangle below
    base = ConvexPolygon(np.array([
        [-big_cp, -big_cp],
        [2.0 * big_cp, -big_cp],
        [-big_cp, 2.0 * big_cp],
    ]))
    cells = []
    for i in range(3):
        for pattern in itertools.product((False, True), repeat=3):
            if not pattern[i]:
                continue
            halves = []
            for j in range(3):
                f = _coordinate_form(j)
                level = 1.0 - av[j] - big_cp
                if pattern[j]:
                    halves.append(HalfPlane(-f[0], -f[1], -level))
                else:
                    halves.append(HalfPlane(f[0], f[1], level, closed=False))
            for j in range(3):
                if j == i or not pattern[j]:
                    continue
                # (C - x_i)/a_i <= (C - x_j)/a_j as a linear constraint
                f = av[j] * _coordinate_form(i) - av[i] * _coordinate_form(j)
                halves.append(HalfPlane(-f[0], -f[1],
                                        big_c * (av[i] - av[j]), closed=False))
            poly = _clip_many(base, halves)
            if poly is not None:
                cells.append((i + 1, poly))
    return cells


def hypercubic_partition_d3(alpha: FrequencyVector) -> ExchangeSystem:
    """The projected-cube partition for d = 3: one parallelogram per letter,
    the image of the face x_i = 1 under projection along alpha."""
    _require_d3(alpha.d)
    atoms = []
    trans = _translations_d3(alpha)
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        corners = []
        for lam, mu in ((0, 0), (1, 0), (1, 1), (0, 1)):
            v = np.zeros(3)
            v[i], v[j], v[k] = 1.0, lam, mu
            corners.append(iota(project_pi_alpha(v, alpha)))
        atoms.append(PartitionAtom(i + 1, [ConvexPolygon(np.array(corners))],
                                   trans[i]))
    return ExchangeSystem(atoms, alpha, 1.0, 2.0 * alpha.max)


def _chebyshev_seed(big_c: float, big_cp: float) -> ConvexPolygon:
    """Seed square inside (C-1, 1-C')^3 on the hyperplane: centred at the
    Chebyshev centre, with side equal to half the inradius."""
    rows, rhs = [], []
    for j in range(3):
        f = _coordinate_form(j)
        rows.append([-f[0], -f[1]])
        rhs.append(-(big_c - 1.0))       # x_j >= C - 1
        rows.append([f[0], f[1]])
        rhs.append(1.0 - big_cp)         # x_j <= 1 - C'
    rows = np.array(rows)
    rhs = np.array(rhs)
    norms = np.linalg.norm(rows, axis=1)
    # maximise r subject to a.c + r|a| <= b
    res = linprog(c=[0.0, 0.0, -1.0],
                  A_ub=np.column_stack([rows, norms]), b_ub=rhs,
                  bounds=[(None, None), (None, None), (0.0, None)],
                  method="highs")
    if not res.success or res.x[2] <= 0.0:
        raise NoConvergence(0.0, 0, "seed region is empty; C + C' is too large")
    cx, cy, r = res.x
    h = r / 4.0  # half of (inradius / 2)
    return ConvexPolygon(np.array([
        [cx - h, cy - h], [cx + h, cy - h], [cx + h, cy + h], [cx - h, cy + h],
    ]))


# --- raw-array clipping (no per-piece validation; used by the refinement) --

def _area_raw(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _clip_raw(v: np.ndarray, a: float, b: float, c: float):
    """Clip raw CCW vertices against a*x + b*y <= c; None when degenerate."""
    s = v[:, 0] * a + v[:, 1] * b - c
    eps = 1e-12
    if np.all(s <= eps):
        return v
    if np.all(s >= -eps):
        return None
    out = []
    k = v.shape[0]
    for i in range(k):
        j = (i + 1) % k
        if s[i] <= eps:
            out.append(v[i])
        if (s[i] > eps) != (s[j] > eps):
            t = s[i] / (s[i] - s[j])
            out.append(v[i] + t * (v[j] - v[i]))
    if len(out) < 3:
        return None
    w = _dedup(np.array(out), tol=1e-12)
    if w.shape[0] < 3 or _area_raw(w) < MIN_AREA:
        return None
    return w


def _clip_raw_many(v, halves):
    for a, b, c in halves:
        if v is None:
            return None
        v = _clip_raw(v, a, b, c)
    return v


def _subtract_squares_raw(piece, squares):
    """Decompose piece minus a union of axis-aligned squares (each given as
    (x, y, side)).  Pieces are only ever split by squares they genuinely
    meet, which keeps the decomposition close to minimal."""
    out = []
    stack = [(piece, 0)]
    while stack:
        v, start = stack.pop()
        vb = (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())
        hit = -1
        for t in range(start, len(squares)):
            sx, sy, side = squares[t]
            if (vb[2] <= sx or vb[0] >= sx + side
                    or vb[3] <= sy or vb[1] >= sy + side):
                continue
            inner = _clip_raw_many(v, ((-1.0, 0.0, -sx), (1.0, 0.0, sx + side),
                                       (0.0, -1.0, -sy), (0.0, 1.0, sy + side)))
            if inner is not None:
                hit = t
                break
        if hit < 0:
            out.append(v)
            continue
        sx, sy, side = squares[hit]
        remaining = v
        for a, b, c in ((-1.0, 0.0, -sx), (1.0, 0.0, sx + side),
                        (0.0, -1.0, -sy), (0.0, 1.0, sy + side)):
            outside = _clip_raw(remaining, -a, -b, -c)
            if outside is not None:
                stack.append((outside, hit + 1))
            remaining = _clip_raw(remaining, a, b, c)
            if remaining is None:
                break
    return out


def _hull_raw(points: np.ndarray) -> np.ndarray:
    """Convex hull (CCW) of a small point set, monotone-chain."""
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    def half(iterable):
        chain = []
        for p in iterable:
            while len(chain) >= 2:
                q, r = chain[-2], chain[-1]
                if (r[0] - q[0]) * (p[1] - q[1]) - (r[1] - q[1]) * (p[0] - q[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain
    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _merge_convex_raw(pieces, grid: float = 0.1, tol: float = 1e-10):
    """Greedily fuse pieces whose union is convex (hull area equals the sum
    of areas).  Repeated passes with a spatial grid keep this near-linear."""
    polys = [np.asarray(p, float) for p in pieces]
    areas = [_area_raw(p) for p in polys]
    changed = True
    while changed:
        changed = False
        buckets: dict = {}
        for idx, p in enumerate(polys):
            if p is None:
                continue
            x0, y0 = p[:, 0].min(), p[:, 1].min()
            x1, y1 = p[:, 0].max(), p[:, 1].max()
            for gx in range(int(np.floor(x0 / grid)), int(np.floor(x1 / grid)) + 1):
                for gy in range(int(np.floor(y0 / grid)), int(np.floor(y1 / grid)) + 1):
                    buckets.setdefault((gx, gy), []).append(idx)
        for members in buckets.values():
            for ii in range(len(members)):
                i = members[ii]
                if polys[i] is None:
                    continue
                for jj in range(ii + 1, len(members)):
                    j = members[jj]
                    if polys[j] is None or polys[i] is None:
                        continue
                    hull = _hull_raw(np.vstack([polys[i], polys[j]]))
                    if hull.shape[0] < 3:
                        continue
                    if _area_raw(hull) <= areas[i] + areas[j] + tol:
                        polys[i] = _dedup(hull, tol=1e-12)
                        areas[i] = _area_raw(polys[i])
                        polys[j] = None
                        changed = True
    return [p for p in polys if p is not None]


def exact_partition_d3(params: TijdemanParams, area_tol: float = 1e-9,
                       n_cap: int = 200) -> ExchangeSystem:
    """Build the greedy-rule partition exactly by refinement, for d = 3.

    A seed square whose lattice translates never collide is pushed through
    the piecewise translation; the closure of its orbit is the fundamental
    domain.  Modulo Z^2 the orbit of the square after k steps is just the
    square translated by k*alpha, so coverage lives on the torus as a union
    of equal axis-aligned squares: each generation keeps only the part of
    the frontier image not yet covered by those squares (novel parts are
    automatically disjoint from everything accumulated, by the unique-
    representative property).  Stops when the covered area reaches
    1 - area_tol; hitting n_cap first raises NoConvergence.
    """
    _require_d3(params.d)
    cell_data = []
    for letter, poly in q_cells(params):
        normals, offsets = poly.edges()
        halves = [(float(n[0]), float(n[1]), float(c))
                  for n, c in zip(normals, offsets)]
        cell_data.append((letter, halves, poly.bbox()))
    trans = _translations_d3(params.alpha)

    seed = _chebyshev_seed(params.C, params.C_prime)
    side = float(seed.vertices[:, 0].max() - seed.vertices[:, 0].min())
    anchor0 = seed.vertices.min(axis=0)
    alpha2 = params.alpha.alphas[:2]

    def square_anchor(k: int) -> np.ndarray:
        return (anchor0 + k * alpha2) % 1.0

    acc = [np.array(seed.vertices)]
    covered = seed.area
    frontier = [np.array(seed.vertices)]
    anchors = np.empty((n_cap + 1, 2))
    anchors[0] = square_anchor(0)
    iterations = 0
    while covered < 1.0 - area_tol and frontier and iterations < n_cap:
        iterations += 1
        prev = anchors[:iterations]
        new_frontier = []
        for piece in frontier:
            pbox = (piece[:, 0].min(), piece[:, 1].min(),
                    piece[:, 0].max(), piece[:, 1].max())
            for letter, halves, cbox in cell_data:
                if not _bbox_overlap(pbox, cbox):
                    continue
                part = _clip_raw_many(piece, halves)
                if part is None:
                    continue
                image = part + trans[letter - 1]
                # torus novelty: subtract every covering square translate
                centre = image.mean(axis=0)
                shift = -np.floor(centre)
                tau = image + shift
                radius = side + 0.5 * max(
                    tau[:, 0].max() - tau[:, 0].min(),
                    tau[:, 1].max() - tau[:, 1].min(),
                )
                delta = (prev - (centre + shift)) % 1.0
                delta = np.where(delta > 0.5, delta - 1.0, delta)
                near = np.nonzero(np.all(np.abs(delta) <= radius, axis=1))[0]
                squares = [(centre[0] + shift[0] + delta[j, 0],
                            centre[1] + shift[1] + delta[j, 1], side)
                           for j in near]
                for v in _subtract_squares_raw(tau, squares):
                    acc.append(v - shift)
                    covered += _area_raw(v)
                    new_frontier.append(v - shift)
        anchors[iterations] = square_anchor(iterations)
        frontier = new_frontier
    if covered < 1.0 - area_tol:
        raise NoConvergence(covered, iterations)

    # fuse fragments whose union is convex, then split along the region
    # cells so that every final polygon lies in a single region
    merged = _merge_convex_raw(acc, grid=max(side, 0.05))
    buckets: dict[int, list] = {1: [], 2: [], 3: []}
    for piece in merged:
        pbox = (piece[:, 0].min(), piece[:, 1].min(),
                piece[:, 0].max(), piece[:, 1].max())
        for letter, halves, cbox in cell_data:
            if not _bbox_overlap(pbox, cbox):
                continue
            part = _clip_raw_many(piece, halves)
            if part is not None:
                buckets[letter].append(ConvexPolygon(part))
    atoms = [PartitionAtom(i + 1, buckets[i + 1], trans[i]) for i in range(3)]
    return ExchangeSystem(atoms, params.alpha, params.C, params.C_prime)


# ---------------------------------------------------------------------------
# adjacency of pieces (to count the connected components of an atom)
# ---------------------------------------------------------------------------

def _edges_touch(p: ConvexPolygon, q: ConvexPolygon, tol: float = 1e-7) -> bool:
    """Whether two polygons share a boundary segment of length > tol."""
    vp, vq = p.vertices, q.vertices
    for i in range(vp.shape[0]):
        a1, a2 = vp[i], vp[(i + 1) % vp.shape[0]]
        da = a2 - a1
        la = math.hypot(*da)
        ua = da / la
        na = np.array([-ua[1], ua[0]])
        for j in range(vq.shape[0]):
            b1, b2 = vq[j], vq[(j + 1) % vq.shape[0]]
            db = b2 - b1
            lb = math.hypot(*db)
            if abs(db @ na) > tol:
                continue  # not parallel
            if abs((b1 - a1) @ na) > tol:
                continue  # parallel but offset
            s1, s2 = (b1 - a1) @ ua, (b2 - a1) @ ua
            overlap = min(la, max(s1, s2)) - max(0.0, min(s1, s2))
            if overlap > tol:
                return True
    return False


def connected_components(polygons) -> list:
    """Group polygons into edge-connected components (lists of indices)."""
    n = len(polygons)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    boxes = [p.bbox() for p in polygons]
    for i in range(n):
        for j in range(i + 1, n):
            if not _bbox_overlap(boxes[i], boxes[j], tol=1e-6):
                continue
            if find(i) != find(j) and _edges_touch(polygons[i], polygons[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


# ---------------------------------------------------------------------------
# verification oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TilingReport:
    passed: bool
    samples: int
    scored: int
    covered_once: int
    deficit: float      # fraction of scored points covered zero times
    excess: float       # fraction covered more than once
    excluded: int       # points within 1e-6 of some piece edge

    @property
    def once_fraction(self) -> float:
        return self.covered_once / self.scored if self.scored else 0.0


def verify_tiling(system: ExchangeSystem, samples: int = 100_000,
                  seed: int = 0) -> TilingReport:
    """Sample points of [-2, 2]^2 and count covering integer translates of
    the partition; passes when at least 99.9% of the scored points are
    covered exactly once (edge-near points are not scored)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-2.0, 2.0, size=(samples, 2))
    cover = np.zeros(samples, np.int32)
    near_edge = np.zeros(samples, bool)
    for poly in system.all_polygons():
        normals, offsets = poly.edges()
        base = pts @ normals.T - offsets
        x0, y0, x1, y1 = poly.bbox()
        for qx in range(-4, 5):
            if x1 + qx < -2.0 - 1e-9 or x0 + qx > 2.0 + 1e-9:
                continue
            for qy in range(-4, 5):
                if y1 + qy < -2.0 - 1e-9 or y0 + qy > 2.0 + 1e-9:
                    continue
                shift = normals[:, 0] * qx + normals[:, 1] * qy
                margin = (base - shift).max(axis=1)
                cover += margin < -1e-6
                near_edge |= np.abs(margin) <= 1e-6
    scored = ~near_edge
    n_scored = int(scored.sum())
    once = int((cover[scored] == 1).sum())
    deficit = float((cover[scored] == 0).sum()) / max(n_scored, 1)
    excess = float((cover[scored] > 1).sum()) / max(n_scored, 1)
    passed = n_scored > 0 and once / n_scored >= 0.999
    return TilingReport(passed, samples, n_scored, once, deficit, excess,
                        int(near_edge.sum()))


@dataclass(frozen=True)
class NaturalPartitionReport:
    passed: bool
    steps: int
    orbit_mismatches: int       # emitted letter's atom does not contain the point
    classify_mismatches: int    # point clearly interior to a different atom
    translate_failures: int     # sampled point of t_i + P_i escaping the union
    excluded: int               # boundary-near orbit points, not scored


def _atom_margins(system: ExchangeSystem, pts: np.ndarray) -> np.ndarray:
    """(n_points, d) matrix of margins to each atom (min over its pieces)."""
    out = np.full((pts.shape[0], len(system.atoms)), np.inf)
    for k, atom in enumerate(system.atoms):
        for poly in atom.polygons:
            np.minimum(out[:, k], poly.margins(pts), out=out[:, k])
    return out


def _sample_interior(poly: ConvexPolygon, count: int, rng) -> np.ndarray:
    """Uniform points strictly inside a convex polygon (fan triangulation)."""
    v = poly.vertices
    tri = [(v[0], v[i], v[i + 1]) for i in range(1, v.shape[0] - 1)]
    areas = np.array([abs(_shoelace(np.array(t))) for t in tri])
    choice = rng.choice(len(tri), size=count, p=areas / areas.sum())
    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    out = np.empty((count, 2))
    for idx, (a, b, c) in enumerate(tri):
        mask = choice == idx
        k = int(mask.sum())
        if not k:
            continue
        u, w = r1[mask], r2[mask]
        p = (1 - u)[:, None] * a + (u * (1 - w))[:, None] * b + (u * w)[:, None] * c
        out[mask] = p
    centre = poly.centroid
    return centre + (out - centre) * (1.0 - 1e-9)


def verify_natural_partition(system: ExchangeSystem, params: TijdemanParams,
                             n_steps: int = 100_000, kind: str = "tijdeman",
                             samples_per_atom: int = 1000,
                             seed: int = 0, tol: float = 1e-7
                             ) -> NaturalPartitionReport:
    """Cross-check a generated orbit against the partition geometry.

    (a) every orbit point lies in the atom of its emitted letter, (b) each
    translated atom stays inside the union, (c) point location agrees with
    the generator letter for letter.  Points within ``tol`` of a boundary
    are not scored.
    """
    letters, _, points, _, _ = generate_letters(
        kind, params.alpha, params.x0, n_steps,
        big_c=params.C, big_cp=params.C_prime, store_points=True,
    )
    pts2 = points[:-1, :2]
    margins = _atom_margins(system, pts2)
    lidx = letters.astype(np.int64) - 1
    own = margins[np.arange(n_steps), lidx]
    nearest = margins.argmin(axis=1)
    best = margins.min(axis=1)

    boundary = np.abs(own) <= tol
    orbit_bad = own > tol
    classify_bad = (nearest != lidx) & (best < -tol) & orbit_bad
    excluded = int((boundary & ~orbit_bad).sum())

    rng = np.random.default_rng(seed)
    translate_failures = 0
    for atom in system.atoms:
        per_poly = max(1, samples_per_atom // max(len(atom.polygons), 1))
        for poly in atom.polygons:
            sample = _sample_interior(poly, per_poly, rng) + atom.translation
            inside = _atom_margins(system, sample).min(axis=1)
            translate_failures += int((inside > tol).sum())

    n_orbit_bad = int(orbit_bad.sum())
    n_classify_bad = int(classify_bad.sum())
    passed = n_orbit_bad == 0 and n_classify_bad == 0 and translate_failures == 0
    return NaturalPartitionReport(passed, n_steps, n_orbit_bad, n_classify_bad,
                                  translate_failures, excluded)


@dataclass(frozen=True)
class ModelSetPoints:
    points: frozenset       # lattice points strictly inside the window test
    boundary: frozenset     # lattice points within 1e-9 of the window edge


def model_set_vertices(alpha: FrequencyVector, x0: SumZeroVector, window,
                       box_max: int, tol: float = 1e-9) -> ModelSetPoints:
    """Lattice points x of {0..M}^3 whose projection along alpha falls in
    x0 - window; the window is an ExchangeSystem or a list of polygons in
    the dropped-coordinate chart."""
    _require_d3(alpha.d)
    if box_max > 200:
        raise ValueError("box_max is capped at 200")
    polys = window.all_polygons() if isinstance(window, ExchangeSystem) else list(window)
    rng_ = np.arange(box_max + 1)
    grid = np.stack(np.meshgrid(rng_, rng_, rng_, indexing="ij"), axis=-1)
    pts = grid.reshape(-1, 3).astype(float)
    sums = pts.sum(axis=1)
    proj = pts - sums[:, None] * alpha.alphas
    w = iota(x0)[None, :] - proj[:, :2]
    dist = np.full(w.shape[0], np.inf)
    for poly in polys:
        np.minimum(dist, poly.margins(w), out=dist)
    inside = dist < -tol
    near = np.abs(dist) <= tol
    ints = pts.astype(np.int64)
    points = frozenset(map(tuple, ints[inside]))
    boundary = frozenset(map(tuple, ints[near]))
    return ModelSetPoints(points, boundary)
