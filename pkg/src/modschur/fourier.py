"""Fourier analysis on Z/NZ: triple counting, Bohr sets, large spectra.

Conventions: characters are x -> e(x*gamma/N) with e(t) = exp(2*pi*i*t), and
transforms are normalised by the uniform probability measure,
``fhat(gamma) = (1/N) * sum_x f(x) e(-x*gamma/N)``.

The Bohr set B(L, delta) is {x : |e(x*l/N) - 1| < delta for all l in L}
with a strict inequality.  Since |e(t) - 1| = 2 sin(pi ||t||), a rational
width can only tie with a chord length when it equals 1 or 2 (Niven), so
those two widths are decided by exact integer arithmetic and every other
width by comparing against a high-precision chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import BudgetExceeded, EmptyBase, InputError, NotCoprime, ScanExhausted

BOHR_BUDGET = 10**7
FFT_ROUNDING_SLACK = 0.25
EXPLICIT_DOUBLING = 16.0


def dft(f: Sequence[complex]) -> np.ndarray:
    """Normalised transform: ``fhat[g] = mean_x f[x] e(-x g / N)``."""
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or f.size == 0:
        raise InputError("dft needs a nonempty 1-d input")
    return np.fft.fft(f) / f.size


def inverse_dft(fhat: Sequence[complex]) -> np.ndarray:
    """Inverse of :func:`dft`: ``f[x] = sum_g fhat[g] e(x g / N)``."""
    fhat = np.asarray(fhat, dtype=complex)
    return np.fft.ifft(fhat) * fhat.size


# -- monochromatic triples ------------------------------------------------


@dataclass(frozen=True)
class TripleCountReport:
    """Counts of (x, y, z) in A_j^3 with a*x = y - z (mod N), per class."""

    per_class: tuple[int, ...]
    total: int
    method: str
    N: int
    a: int


def _autocorrelation_brute(members: np.ndarray, N: int) -> np.ndarray:
    diffs = np.subtract.outer(members, members) % N
    return np.bincount(diffs.ravel(), minlength=N)


def _autocorrelation_fft(indicator: np.ndarray) -> tuple[np.ndarray, float]:
    spec = np.fft.fft(indicator)
    raw = np.fft.ifft(spec * np.conj(spec)).real
    counts = np.rint(raw)
    err = float(np.max(np.abs(raw - counts))) if raw.size else 0.0
    return counts.astype(np.int64), err


def _as_colour_array(colouring, N: int) -> np.ndarray:
    colours = getattr(colouring, "colours", colouring)
    arr = np.asarray(colours, dtype=np.int64)
    if arr.shape != (N,):
        raise InputError(f"colouring must assign a colour to each of the {N} residues")
    if arr.size and arr.min() < 0:
        raise InputError("colour indices must be nonnegative")
    return arr


def count_monochromatic_triples(colouring, a: int, N: int | None = None,
                                method: str = "fft") -> TripleCountReport:
    """Count monochromatic solutions of a*x = y - z in a colouring of Z/NZ.

    ``colouring`` is a sequence of N colour indices (residue 0 first) or a
    :class:`~modschur.search.Colouring` on a ``zmod`` ground.  For each class
    A the count is sum over x in A of c(a*x), with c(t) the number of pairs
    (y, z) in A^2 with y - z = t.  ``method='fft'`` gets c from a rounded
    FFT, falling back to direct counting if any value is further than 0.25
    from an integer; ``method='brute'`` always counts directly.
    """
    if N is None:
        N = len(getattr(colouring, "colours", colouring))
    if N < 1:
        raise InputError("N must be positive")
    if math.gcd(a, N) != 1:
        raise NotCoprime(f"gcd({a}, {N}) != 1")
    if method not in ("fft", "brute"):
        raise InputError(f"unknown method {method!r}")
    colours = _as_colour_array(colouring, N)
    ncls = int(colours.max()) + 1
    dilate = (a * np.arange(N, dtype=np.int64)) % N
    counts = []
    used = method
    for j in range(ncls):
        members = np.flatnonzero(colours == j)
        if members.size == 0:
            counts.append(0)
            continue
        if method == "fft":
            c, err = _autocorrelation_fft((colours == j).astype(float))
            if err >= FFT_ROUNDING_SLACK:
                c = _autocorrelation_brute(members, N)
                used = "fft+brute"
        else:
            c = _autocorrelation_brute(members, N)
        counts.append(int(c[dilate[members]].sum()))
    return TripleCountReport(tuple(counts), sum(counts), used, N, a)


# -- Bohr sets ------------------------------------------------------------


@dataclass(frozen=True)
class BohrSet:
    N: int
    freqs: tuple[int, ...]
    delta: float

    def __post_init__(self):
        if self.N < 1:
            raise InputError("N must be positive")
        if not self.delta > 0:
            raise InputError("width must be positive")
        object.__setattr__(self, "freqs", tuple(sorted({int(f) % self.N for f in self.freqs})))

    @property
    def rank(self) -> int:
        return len(self.freqs)

    def with_width(self, delta: float) -> "BohrSet":
        return BohrSet(self.N, self.freqs, delta)

    def __contains__(self, x: int) -> bool:
        kmax = _max_distance(self.N, self.delta)
        return all(_circle_distance(x * f, self.N) <= kmax for f in self.freqs)


def _circle_distance(t: int, N: int) -> int:
    t %= N
    return min(t, N - t)


def _chord_below(k: int, N: int, delta: float) -> bool:
    """Exactly decide 2*sin(pi*k/N) < delta for 0 <= k <= N/2."""
    if delta > 2:
        return True
    if delta == 2:
        return 2 * k != N
    if delta == 1:
        return 6 * k < N
    with mpmath.workdps(50):
        return 2 * mpmath.sin(mpmath.pi * k / N) < mpmath.mpf(delta)


def _max_distance(N: int, delta: float) -> int:
    """Largest k in [0, N//2] with chord(k/N) < delta (chord grows with k)."""
    lo, hi = 0, N // 2
    if _chord_below(hi, N, delta):
        return hi
    # invariant: chord(lo) < delta <= chord(hi); chord(0) = 0 < delta
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _chord_below(mid, N, delta):
            lo = mid
        else:
            hi = mid
    return lo


def bohr_mask(b: BohrSet, budget: int = BOHR_BUDGET) -> np.ndarray:
    """Boolean membership array over 0..N-1."""
    if b.N > budget:
        raise BudgetExceeded(f"N={b.N} exceeds Bohr enumeration budget {budget}")
    kmax = _max_distance(b.N, b.delta)
    x = np.arange(b.N, dtype=np.int64)
    mask = np.ones(b.N, dtype=bool)
    for f in b.freqs:
        t = (x * f) % b.N
        mask &= np.minimum(t, b.N - t) <= kmax
    return mask


def bohr_members(b: BohrSet, budget: int = BOHR_BUDGET) -> frozenset:
    return frozenset(int(x) for x in np.flatnonzero(bohr_mask(b, budget)))


def bohr_measure(b: BohrSet, budget: int = BOHR_BUDGET) -> float:
    return float(bohr_mask(b, budget).sum()) / b.N


def sumset_mask(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Indicator of A + B in Z/NZ from two indicator arrays, computed directly."""
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    if A.sum() > B.sum():
        A, B = B, A
    out = np.zeros_like(B)
    for a in np.flatnonzero(A):
        out |= np.roll(B, int(a))
    return out


@dataclass(frozen=True)
class BohrBounds:
    measure: float
    lower_bound: float
    lower_ok: bool
    doubling_ratio: float
    doubling_bound: float
    doubling_ok: bool


def bohr_bounds_check(N: int, freqs: Iterable[int], delta: float,
                      budget: int = BOHR_BUDGET) -> BohrBounds:
    """Compare a Bohr set against mu >= (delta/2pi)^d and the 16^d doubling bound."""
    b = BohrSet(N, tuple(freqs), delta)
    d = b.rank
    mu = bohr_measure(b, budget)
    mu2 = bohr_measure(b.with_width(2 * delta), budget)
    lower = (delta / (2 * math.pi)) ** d
    ratio = mu2 / mu
    bound = EXPLICIT_DOUBLING ** d
    return BohrBounds(mu, lower, mu >= lower, ratio, bound, ratio <= bound)


@dataclass(frozen=True)
class RegularPair:
    delta_star: float
    delta_prime: float
    k: int
    index: int
    measure_star: float
    sumset_measure: float

    @property
    def sumset_ratio(self) -> float:
        return self.sumset_measure / self.measure_star


def regular_pair(N: int, freqs: Iterable[int], delta: float, eta: float,
                 growth: float = math.log(EXPLICIT_DOUBLING),
                 budget: int = BOHR_BUDGET) -> RegularPair:
    """Widths delta* in [delta/2, delta] and delta' <= delta* with
    mu(B(delta*) + B(delta')) <= (1 + eta) mu(B(delta*)).

    With k the least integer with exp(growth/k) <= 1 + eta and d the rank,
    sets delta' = delta/(2kd) and scans delta_i = delta/2 + i*delta'.  The
    ratios mu(B(delta_{i+1}))/mu(B(delta_i)) telescope to
    mu(B(delta))/mu(B(delta/2)) <= exp(growth*d), so one of the kd ratios is
    at most 1 + eta.  ``growth`` defaults to log 16.  The sumset inequality
    and the inclusion B(delta') in B(delta*) are checked directly before
    returning.
    """
    if not 0 < eta <= 1:
        raise InputError("eta must lie in (0, 1]")
    base = BohrSet(N, tuple(freqs), delta)
    d = max(1, base.rank)
    k = max(1, math.ceil(growth / math.log1p(eta)))
    while math.exp(growth / k) > 1 + eta:
        k += 1
    while k > 1 and math.exp(growth / (k - 1)) <= 1 + eta:
        k -= 1
    steps = k * d
    delta_prime = delta / (2 * steps)
    widths = [delta / 2 + i * delta_prime for i in range(steps + 1)]
    widths[-1] = delta
    masks = [bohr_mask(base.with_width(w), budget) for w in widths]
    sizes = [int(m.sum()) for m in masks]
    for i in range(steps):
        if sizes[i + 1] <= (1 + eta) * sizes[i]:
            small = bohr_mask(base.with_width(delta_prime), budget)
            if np.any(small & ~masks[i]):
                raise AssertionError("internal error: B(delta') not inside B(delta*)")
            sumset = int(sumset_mask(masks[i], small).sum())
            if sumset > (1 + eta) * sizes[i]:
                raise AssertionError("internal error: sumset exceeds (1+eta) mu(B(delta*))")
            return RegularPair(widths[i], delta_prime, k, i, sizes[i] / N, sumset / N)
    raise ScanExhausted(
        f"no regular width among {steps} steps; doubling exceeded exp({growth:.3f} d)")


# -- large spectrum -------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    """Frequencies where |(1_S dmu_B0)^(gamma)| >= eps * mu_B0(S)."""

    N: int
    epsilon: float
    density: float
    frequencies: tuple[int, ...]
    coefficients: np.ndarray
    parseval_bound: float

    def __contains__(self, gamma: int) -> bool:
        return gamma % self.N in self.frequencies


def large_spectrum(S: Iterable[int], B0: Iterable[int], epsilon: float, N: int,
                   rel_tol: float = 1e-9) -> Spectrum:
    """Large spectrum of S relative to the uniform measure on B0.

    S is first intersected with B0.  Coefficients are
    (1/|B0|) * sum over x in S & B0 of e(-x*gamma/N); a frequency counts when
    its coefficient reaches epsilon * |S & B0| / |B0| up to ``rel_tol``.
    ``parseval_bound`` is 4 / (epsilon^2 * mu_B0(S)), reported only.
    """
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    base = {int(x) % N for x in B0}
    if not base:
        raise EmptyBase("B0 is empty")
    members = sorted({int(x) % N for x in S} & base)
    ind = np.zeros(N)
    ind[members] = 1.0
    coeffs = np.fft.fft(ind) / len(base)
    density = len(members) / len(base)
    threshold = epsilon * density * (1 - rel_tol)
    freqs = tuple(int(g) for g in np.flatnonzero(np.abs(coeffs) >= threshold))
    bound = math.inf if density == 0 else 4 / (epsilon ** 2 * density)
    return Spectrum(N, epsilon, density, freqs, coeffs, bound)
