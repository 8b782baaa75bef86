"""Generators and statistics for low-discrepancy letter sequences.

Given a frequency vector alpha in (0,1)^d with unit sum, the generators emit
letters over {1,..,d} so that letter counts track n*alpha as closely as
possible.  The deviation after n letters is the sum-zero vector

    x_n = x_0 + n*alpha - counts(u_0 .. u_{n-1}),

and both generators pick the next letter by a travel-time rule on x_n:

* ``billiard_*``  -- the classical hypercubic cutting words: the letter is
  the smallest argmin of (1 - x_i)/alpha_i, and the deviation orbit lives in
  the projection of the unit cube along alpha onto the sum-zero hyperplane.
* ``tijdeman_*``  -- the greedy rule with two constants (C, C'): letters
  whose choice would push a coordinate below -C' are discarded, and among
  the rest the smallest travel time (C - x_i)/alpha_i wins.  For admissible
  (C, C') the orbit stays in the box [-C', C]^d, which bounds the letter
  discrepancy of the word by max(C, C').

The statistics (prefix discrepancy, balance, abelian complexity) apply to
arbitrary finite words.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import DOMAIN_EPS, TIE_EPS
from .errors import BoundViolation, EmptyEligibleSet, OutOfDomain

__all__ = [
    "FrequencyVector",
    "SumZeroVector",
    "TijdemanParams",
    "LetterSequence",
    "OrbitTrace",
    "canonical_params",
    "d_constant",
    "tijdeman_step",
    "tijdeman_generate",
    "billiard_step",
    "billiard_generate",
    "generate_letters",
    "parikh",
    "discrepancy_prefix",
    "balance",
    "abelian_complexity",
]

#: box tolerance used by the orbit-boundedness guarantee
BOX_EPS = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FrequencyVector:
    """Letter frequencies (alpha_1, ..., alpha_d), each in (0,1), summing to 1."""

    alphas: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("a frequency vector needs d >= 2 entries")
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise ValueError("frequencies must lie strictly inside (0, 1)")
        if abs(float(a.sum()) - 1.0) > 1e-12:
            raise ValueError(f"frequencies must sum to 1, got {a.sum()!r}")
        object.__setattr__(self, "alphas", _readonly(a))

    @property
    def d(self) -> int:
        return self.alphas.size

    @property
    def min(self) -> float:
        return float(self.alphas.min())

    @property
    def max(self) -> float:
        return float(self.alphas.max())

    def __iter__(self):
        return iter(self.alphas)

    def __repr__(self):
        return f"FrequencyVector({list(self.alphas)!r})"


@dataclass(frozen=True, eq=False)
class SumZeroVector:
    """A point of the hyperplane of vectors whose coordinates sum to zero."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("need at least two coordinates")
        if abs(float(c.sum())) > 1e-9:
            raise ValueError(f"coordinates must sum to 0, got {c.sum()!r}")
        object.__setattr__(self, "coords", _readonly(c))

    @classmethod
    def zero(cls, d: int) -> "SumZeroVector":
        return cls(np.zeros(d))

    @property
    def d(self) -> int:
        return self.coords.size

    def norm_inf(self) -> float:
        return float(np.abs(self.coords).max())

    def __repr__(self):
        return f"SumZeroVector({list(self.coords)!r})"


@dataclass(frozen=True, eq=False)
class TijdemanParams:
    """The tuple (alpha, C, C', x0) driving the greedy generator.

    Validity requires C >= 0 and C' >= 1 - 1/d; below that floor the
    admissible set of letters can become empty along the orbit.
    """

    alpha: FrequencyVector
    C: float
    C_prime: float
    x0: SumZeroVector

    def __post_init__(self):
        d = self.alpha.d
        if self.x0.d != d:
            raise ValueError("x0 dimension does not match alpha")
        if self.C < 0.0:
            raise ValueError(f"C must be >= 0, got {self.C}")
        if self.C_prime < 1.0 - 1.0 / d - TIE_EPS:
            raise ValueError(
                f"C' must be >= 1 - 1/d = {1.0 - 1.0 / d}; got {self.C_prime}"
            )

    @property
    def d(self) -> int:
        return self.alpha.d

    @property
    def canonical(self) -> bool:
        """Whether (C, C') sit in the regime where the orbit closure is a
        fundamental domain: both in [1 - (1 + min alpha)/(2d - 2), 1)."""
        low = 1.0 - (1.0 + self.alpha.min) / (2 * self.d - 2)
        return (
            low - TIE_EPS <= self.C < 1.0
            and low - TIE_EPS <= self.C_prime < 1.0
        )

    def box_guaranteed(self) -> bool:
        """Whether the [-C', C]^d orbit bound is guaranteed for these values:
        C, C' >= 1 - 1/d, C <= 1, C + C' >= 2 - (1 + min alpha)/(d - 1), and
        x0 inside [C-1, C]^d."""
        d, amin = self.d, self.alpha.min
        eps = TIE_EPS
        if not (self.C >= 1.0 - 1.0 / d - eps and self.C_prime >= 1.0 - 1.0 / d - eps):
            return False
        if self.C > 1.0 + eps:
            return False
        if self.C + self.C_prime < 2.0 - (1.0 + amin) / (d - 1) - eps:
            return False
        x = self.x0.coords
        return bool(np.all(x >= self.C - 1.0 - eps) and np.all(x <= self.C + eps))


@dataclass(frozen=True, eq=False)
class LetterSequence:
    """A finite word over the alphabet {1, ..., d}."""

    letters: np.ndarray
    d: int

    def __post_init__(self):
        a = np.asarray(self.letters)
        if a.dtype.kind not in "iu":
            a = a.astype(np.int64)
        if a.size and (a.min() < 1 or a.max() > self.d):
            raise ValueError(f"letters must lie in 1..{self.d}")
        a = np.ascontiguousarray(a, dtype=np.int8 if self.d < 128 else np.int64)
        a.flags.writeable = False
        object.__setattr__(self, "letters", a)

    @classmethod
    def from_iterable(cls, letters, d: int) -> "LetterSequence":
        return cls(np.asarray(list(letters)), d)

    def __len__(self):
        return self.letters.size

    def __getitem__(self, i):
        return int(self.letters[i])


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    """Deviation orbit x_0..x_N, the emitted word, and its running sup norm."""

    points: np.ndarray          # (N+1, d) rows summing to ~0
    letters: LetterSequence
    running_max: np.ndarray     # running_max[n] = max_{k<=n} |x_k - x_0|_inf

    @property
    def discrepancy(self) -> float:
        """Prefix maximum of |x_n - x_0|_inf; a lower estimate of the full
        supremum over the infinite word."""
        return float(self.running_max[-1])


def d_constant(d: int) -> float:
    """The optimal worst-case discrepancy constant 1 - 1/(2d - 2)."""
    if d < 2:
        raise ValueError("alphabet size must be at least 2")
    return 1.0 - 1.0 / (2 * d - 2)


def canonical_params(alpha: FrequencyVector) -> TijdemanParams:
    """Parameters minimising max(C, C') subject to generator validity.

    C = C' = 1 - (1 + min alpha)/(2d - 2), clamped from below to the
    validity floor 1 - 1/d (the clamp only bites for d = 2, where the
    unclamped value would leave steps with no admissible letter).
    """
    d = alpha.d
    c = max(1.0 - (1.0 + alpha.min) / (2 * d - 2), 1.0 - 1.0 / d)
    return TijdemanParams(alpha, c, c, SumZeroVector.zero(d))


# ---------------------------------------------------------------------------
# single steps (reference implementations of the letter choice)
# ---------------------------------------------------------------------------

def choose_tijdeman_letter(x: np.ndarray, alpha: np.ndarray,
                           big_c: float, big_cp: float) -> int:
    """Smallest admissible index minimising (C - x_i)/alpha_i (0-based).

    Admissible means x_i + alpha_i - 1 >= -C' up to the tie tolerance.
    Travel times within relative tolerance of the minimum count as ties.
    """
    eligible = x + alpha - 1.0 >= -big_cp - TIE_EPS
    if not eligible.any():
        raise EmptyEligibleSet(step=None)
    t = (big_c - x) / alpha
    tmin = float(t[eligible].min())
    tol = TIE_EPS * max(1.0, abs(tmin))
    for i in range(x.size):
        if eligible[i] and t[i] <= tmin + tol:
            return i
    raise AssertionError("unreachable")


def in_hypercubic_domain(x: np.ndarray, alpha: np.ndarray,
                         tol: float = DOMAIN_EPS) -> bool:
    """Whether a sum-zero x is the alpha-projection of a point of [0,1]^d.

    Membership means the travel interval [max(-x_i/alpha_i), min((1-x_i)/alpha_i)]
    is nonempty; the lower end is then automatically >= 0.
    """
    smin = float(((1.0 - x) / alpha).min())
    smax = float((-x / alpha).max())
    return smin >= -tol and smax <= smin + tol


def hypercubic_letter(x: np.ndarray, alpha: np.ndarray) -> int:
    """Smallest argmin of (1 - x_i)/alpha_i (0-based), with tie tolerance."""
    t = (1.0 - x) / alpha
    tmin = float(t.min())
    tol = TIE_EPS * max(1.0, abs(tmin))
    return int(np.nonzero(t <= tmin + tol)[0][0])


def tijdeman_step(x: SumZeroVector, params: TijdemanParams):
    """One step of the greedy rule: returns (letter in 1..d, next deviation)."""
    xv = x.coords
    if np.any(xv < -params.C_prime - DOMAIN_EPS):
        raise OutOfDomain(
            f"point has a coordinate below -C' = {-params.C_prime}"
        )
    i = choose_tijdeman_letter(xv, params.alpha.alphas, params.C, params.C_prime)
    nxt = xv + params.alpha.alphas
    nxt = nxt.copy()
    nxt[i] -= 1.0
    return i + 1, SumZeroVector(nxt)


def billiard_step(x: SumZeroVector, alpha: FrequencyVector):
    """One cutting-word step: returns (letter in 1..d, next deviation)."""
    xv, av = x.coords, alpha.alphas
    if not in_hypercubic_domain(xv, av):
        raise OutOfDomain("point is not in the projected unit cube")
    i = hypercubic_letter(xv, av)
    nxt = xv + av
    nxt = nxt.copy()
    nxt[i] -= 1.0
    return i + 1, SumZeroVector(nxt)


# ---------------------------------------------------------------------------
# long-horizon generation
# ---------------------------------------------------------------------------

def generate_letters(kind: str, alpha: FrequencyVector, x0: SumZeroVector,
                     n_steps: int, big_c: float = 1.0, big_cp: float | None = None,
                     store_points: bool = False):
    """Run the compiled recurrence; returns (letters, running_max, points, lo, hi).

    ``kind`` is "tijdeman" or "billiard".  ``points`` is an (N+1, d) array
    when store_points is set, else an empty array.  lo/hi are per-coordinate
    orbit extremes.
    """
    if n_steps < 0:
        raise ValueError("step count must be nonnegative")
    if kind not in ("tijdeman", "billiard"):
        raise ValueError(f"unknown generator kind {kind!r}")
    d = alpha.d
    billiard = kind == "billiard"
    if big_cp is None:
        big_cp = float(d) if billiard else 0.0
    letters = np.zeros(n_steps, np.int8)
    running_max = np.zeros(n_steps + 1)
    points = np.zeros((n_steps + 1, d)) if store_points else np.zeros((0, 0))
    status, lo, hi = _kernels.orbit_kernel(
        alpha.alphas, float(big_c), float(big_cp), x0.coords, n_steps,
        billiard, letters, running_max, points, store_points,
    )
    if status != _kernels.STATUS_OK:
        if billiard:
            raise OutOfDomain(
                f"deviation left the projected cube at step {status}", step=status
            )
        raise EmptyEligibleSet(step=status)
    return letters, running_max, points, lo, hi


def tijdeman_generate(params: TijdemanParams, n_steps: int) -> OrbitTrace:
    """Generate N letters of the greedy word and the full deviation orbit.

    When the box preconditions hold (see TijdemanParams.box_guaranteed) the
    orbit is checked against [-C' - 1e-9, C + 1e-9]^d; leaving it raises
    BoundViolation since that can only be a numerical bug.
    """
    letters, running_max, points, lo, hi = generate_letters(
        "tijdeman", params.alpha, params.x0, n_steps,
        big_c=params.C, big_cp=params.C_prime, store_points=True,
    )
    if params.box_guaranteed():
        if lo.min() < -params.C_prime - BOX_EPS or hi.max() > params.C + BOX_EPS:
            raise BoundViolation(
                f"orbit reached [{lo.min()}, {hi.max()}] outside "
                f"[-{params.C_prime}, {params.C}] although the bound was guaranteed"
            )
    return OrbitTrace(points, LetterSequence(letters, params.d), running_max)


def billiard_generate(x0: SumZeroVector, alpha: FrequencyVector,
                      n_steps: int) -> OrbitTrace:
    """Generate N letters of the cutting word from x0 in the projected cube."""
    letters, running_max, points, _, _ = generate_letters(
        "billiard", alpha, x0, n_steps, store_points=True,
    )
    return OrbitTrace(points, LetterSequence(letters, alpha.d), running_max)


# ---------------------------------------------------------------------------
# word statistics
# ---------------------------------------------------------------------------

def parikh(word: LetterSequence) -> np.ndarray:
    """Letter-count vector: component i-1 counts occurrences of letter i."""
    return np.bincount(word.letters, minlength=word.d + 1)[1:].astype(np.int64)


def _prefix_counts(word: LetterSequence, letter: int) -> np.ndarray:
    out = np.zeros(len(word) + 1, np.int64)
    np.cumsum(word.letters == letter, out=out[1:])
    return out


def discrepancy_prefix(word: LetterSequence, alpha: FrequencyVector) -> float:
    """max over prefixes n of |counts(u_[0,n)) - n*alpha|_inf.

    A monotone lower estimate of the supremum over the infinite word.
    """
    if alpha.d != word.d:
        raise ValueError("alphabet sizes differ")
    if len(word) == 0:
        return 0.0
    n = np.arange(1, len(word) + 1, dtype=float)
    best = 0.0
    for i in range(1, word.d + 1):
        dev = np.abs(_prefix_counts(word, i)[1:] - n * alpha.alphas[i - 1])
        best = max(best, float(dev.max()))
    return best


def balance(word: LetterSequence, max_window: int) -> int:
    """Exact count spread: max over letters and window lengths m <= max_window
    of (max - min) letter count over all length-m windows of the word."""
    if max_window > len(word):
        raise ValueError("max_window exceeds the word length")
    if max_window < 1 or len(word) == 0:
        return 0
    best = 0
    for i in range(1, word.d + 1):
        spreads = _kernels.window_spreads(_prefix_counts(word, i), max_window)
        best = max(best, int(spreads.max()))
    return best


def abelian_complexity(word: LetterSequence, n: int) -> int:
    """Number of distinct letter-count vectors among length-n factors."""
    if n < 0 or n > len(word):
        raise ValueError("window length out of range")
    if n == 0:
        return 1
    counts = np.empty((len(word) - n + 1, word.d), np.int32)
    for i in range(1, word.d + 1):
        p = _prefix_counts(word, i)
        counts[:, i - 1] = p[n:] - p[: len(word) - n + 1]
    return int(np.unique(counts, axis=0).shape[0])
