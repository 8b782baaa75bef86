"""Factor counting, growth-exponent fitting, and line-arrangement counting.

Distinct length-n windows are counted exactly with a rank-doubling scheme:
equality classes of windows of length 2k come from sorting pairs of length-k
classes, so every count is collision-free without hashing.  The arrangement
side provides the classical binomial upper bound on the number of regions a
set of lines cuts the plane into, plus an exact small-instance region
counter based on strict sign vectors.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, DegeneracyWarning, SaturationWarning
from .geometry import HalfPlane
from .sequences import LetterSequence

__all__ = [
    "ComplexityProfile",
    "factor_complexity",
    "complexity_profile",
    "exponent_fit",
    "arrangement_region_bound",
    "count_regions_2d",
]


@dataclass(frozen=True, eq=False)
class ComplexityProfile:
    """Counts of distinct factors p(1..n_max) of a fixed finite prefix."""

    counts: np.ndarray
    prefix_length: int
    d: int
    nonmonotone_at: tuple = field(default=())

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        for n, p in enumerate(c, start=1):
            cap = min(self.d ** n if n < 64 else np.iinfo(np.int64).max,
                      self.prefix_length - n + 1)
            if not 1 <= p <= cap:
                raise ValueError(f"impossible factor count p({n}) = {p}")
        bad = tuple(int(n) for n in range(1, c.size) if c[n] < c[n - 1])
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "nonmonotone_at", bad)

    @property
    def n_max(self) -> int:
        return self.counts.size

    def p(self, n: int) -> int:
        return int(self.counts[n - 1])


def _distinct_window_counts(letters: np.ndarray, lengths) -> dict:
    """Exact number of distinct windows of each requested length.

    Doubles equality-class ranks: rank_{2k}[i] identifies the pair
    (rank_k[i], rank_k[i+k]); a window of length n is then identified by
    (rank_a[i], rank_a[i+n-a]) for the largest power of two a <= n, since
    the two length-a windows cover it.
    """
    total = letters.size
    out = {}
    rank = letters.astype(np.int64)
    level = 1
    for n in sorted(set(lengths)):
        if not 1 <= n <= total:
            raise ValueError(f"window length {n} out of range 1..{total}")
        while 2 * level <= n:
            m = total - 2 * level + 1
            code = (rank[:m] << 32) | rank[level : level + m]
            rank = np.unique(code, return_inverse=True)[1].astype(np.int64)
            level *= 2
        m = total - n + 1
        if n == level:
            out[n] = int(np.unique(rank[:m]).size)
        else:
            code = (rank[:m] << 32) | rank[n - level : n - level + m]
            out[n] = int(np.unique(code).size)
    return out


def factor_complexity(word: LetterSequence, n: int) -> int:
    """Exact number of distinct length-n factors of the word."""
    return _distinct_window_counts(word.letters, [n])[n]


def complexity_profile(word: LetterSequence, n_max: int) -> ComplexityProfile:
    """p(n) for n = 1..n_max; warns when the prefix is too short to trust
    the largest counts (fewer than 10 windows per observed factor)."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if n_max > len(word) // 10:
        raise ValueError(
            f"n_max = {n_max} exceeds the saturation guard |word|/10 = {len(word) // 10}"
        )
    counts = _distinct_window_counts(word.letters, range(1, n_max + 1))
    profile = ComplexityProfile(
        np.array([counts[n] for n in range(1, n_max + 1)]), len(word), word.d
    )
    if profile.p(n_max) > (len(word) - n_max) / 10:
        warnings.warn(
            f"p({n_max}) = {profile.p(n_max)} observed in only "
            f"{len(word) - n_max + 1} windows; counts near n_max are unreliable",
            SaturationWarning,
            stacklevel=2,
        )
    return profile


def exponent_fit(profile: ComplexityProfile, n_lo: int, n_hi: int) -> float:
    """Least-squares slope of log p(n) against log n on [n_lo, n_hi]."""
    if not 2 <= n_lo < n_hi <= profile.n_max:
        raise ValueError("need 2 <= n_lo < n_hi <= n_max")
    ns = np.arange(n_lo, n_hi + 1)
    if ns.size < 5:
        raise DegenerateFit(f"only {ns.size} points in [{n_lo}, {n_hi}]")
    ps = profile.counts[n_lo - 1 : n_hi].astype(float)
    if np.any(ps <= 0):
        raise ValueError("all counts must be positive")
    return float(np.polyfit(np.log(ns), np.log(ps), 1)[0])


def arrangement_region_bound(n: int, dim: int) -> int:
    """Maximum number of regions n hyperplanes cut dim-space into:
    sum of binomials C(n, 0) + ... + C(n, dim), exactly."""
    if n < 0 or dim < 1:
        raise ValueError("need n >= 0 and dim >= 1")
    return sum(math.comb(n, k) for k in range(min(n, dim) + 1))


def _unique_lines(lines) -> list:
    """Deduplicate to (a, b, c) with a canonical sign."""
    out = []
    for h in lines:
        a, b, c = h.a, h.b, h.c
        if a < -1e-12 or (abs(a) <= 1e-12 and b < 0):
            a, b, c = -a, -b, -c
        if not any(abs(a - u) <= 1e-9 and abs(b - v) <= 1e-9 and abs(c - w) <= 1e-9
                   for u, v, w in out):
            out.append((a, b, c))
    return out


def count_regions_2d(lines) -> int:
    """Exact number of connected components of the plane minus <= 12 lines.

    Candidate points are taken on angular bisectors around every intersection
    point, on a circle enclosing all intersections (for the unbounded
    regions), and on a coarse grid; points are merged by their strict sign
    vector, and the sampling radius shrinks until the count stabilises.
    Emits DegeneracyWarning when lines are parallel or >= 3 are concurrent.
    """
    uniq = _unique_lines(lines)
    n = len(uniq)
    if n > 12:
        raise ValueError("exact region counting is limited to 12 lines")
    if n == 0:
        return 1
    arr = np.array(uniq)

    # pairwise intersections, clustered into distinct points
    raw = []
    parallel = False
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(uniq, 2):
        det = a1 * b2 - a2 * b1
        if abs(det) <= 1e-12:
            parallel = True
            continue
        raw.append(((b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det))
    pts = []
    for p in raw:
        if not any(abs(p[0] - q[0]) <= 1e-9 and abs(p[1] - q[1]) <= 1e-9
                   for q in pts):
            pts.append(p)
    concurrent = False
    through = []
    for p in pts:
        s = arr[:, 0] * p[0] + arr[:, 1] * p[1] - arr[:, 2]
        members = np.nonzero(np.abs(s) <= 1e-9)[0]
        through.append((p, members))
        if members.size >= 3:
            concurrent = True
    if parallel or concurrent:
        warnings.warn(
            "arrangement is degenerate (parallel or concurrent lines); "
            "the binomial bound need not be attained",
            DegeneracyWarning,
            stacklevel=2,
        )

    span = max((max(abs(p[0]), abs(p[1])) for p in pts), default=1.0)
    span = max(span, float(np.abs(arr[:, 2]).max()))
    radius = 2.0 * (span + 1.0)

    def signatures(eps: float, n_angles: int):
        cand = []
        for p, members in through:
            angles = sorted(
                t for i in members
                for t in (math.atan2(-arr[i, 0], arr[i, 1]) % math.pi,)
            )
            rays = sorted(set(angles) | {a + math.pi for a in angles})
            for lo, hi in zip(rays, rays[1:] + [rays[0] + 2 * math.pi]):
                mid = (lo + hi) / 2.0
                cand.append((p[0] + eps * math.cos(mid), p[1] + eps * math.sin(mid)))
        for k in range(n_angles):
            t = 2 * math.pi * (k + 0.5) / n_angles
            cand.append((radius * math.cos(t), radius * math.sin(t)))
        for gx in np.linspace(-radius, radius, 9):
            for gy in np.linspace(-radius, radius, 9):
                cand.append((gx, gy))
        svs = set()
        cand = np.array(cand)
        s = cand @ arr[:, :2].T - arr[:, 2]
        keep = np.abs(s).min(axis=1) > eps * 1e-3
        for row in np.sign(s[keep]).astype(np.int8):
            svs.add(row.tobytes())
        return len(svs)

    counts = []
    eps, n_angles = 1e-3, 16 * n + 16
    for _ in range(6):
        counts.append(signatures(eps, n_angles))
        if len(counts) >= 2 and counts[-1] == counts[-2]:
            break
        eps /= 10.0
        n_angles *= 2
    return counts[-1]
