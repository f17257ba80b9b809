"""Prefix-ratio density estimation and the complement inequality.

Natural density tracks |A(n)|/n at geometric checkpoints; the modulus-weighted
variant tracks f(|A(n)|)/f(n).  A density is a limit property no finite
computation can certify, so every estimate carries its raw ratio trail and a
three-valued verdict.  All functions here are pure and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import IndexSet, SequencePrefix
from .modulus import Modulus

CONVERGED = "converged"
OSCILLATING = "oscillating"
UNDETERMINED = "undetermined"

_SLACK = 1e-12
_CHECKPOINT_FLOOR = 10


@dataclass(frozen=True)
class DensityEstimate:
    """Ratio trail at checkpoints plus an extrapolated limit estimate.

    ``value`` is only set when the verdict is ``converged``; it is the
    intercept of a linear fit of the last-third ratios against 1/log(n),
    clamped to [0, 1].  The trail itself is the evidence.
    """

    checkpoints: tuple[int, ...]
    ratios: tuple[float, ...]
    value: float | None
    verdict: str
    tol: float

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED

    @property
    def final_ratio(self) -> float:
        return self.ratios[-1]


def checkpoints(n: int, floor: int = _CHECKPOINT_FLOOR) -> np.ndarray:
    """Geometric checkpoints ceil(n / 2^j), ascending, all >= floor."""
    n = int(n)
    pts = []
    v = n
    j = 0
    while True:
        v = math.ceil(n / 2 ** j)
        if v < floor:
            break
        pts.append(v)
        j += 1
    return np.unique(np.asarray(pts, dtype=np.int64))


def _window(m: int) -> int:
    return math.ceil(m / 3)


def _diagnose(ratios: np.ndarray, tol: float) -> str:
    m = len(ratios)
    w = _window(m)
    tail = ratios[-w:]
    spread = float(tail.max() - tail.min())
    if spread <= tol:
        return CONVERGED
    prev = ratios[max(0, m - 2 * w): m - w]
    prev_spread = float(prev.max() - prev.min()) if prev.size else 0.0
    if spread <= 0.5 * prev_spread:
        return UNDETERMINED  # still shrinking, no call yet
    if prev_spread <= tol:
        return UNDETERMINED  # late regime change, not a stable oscillation
    return OSCILLATING


def _extrapolate(ns: np.ndarray, ratios: np.ndarray) -> float:
    """Intercept of ratio ~ a + b / log(n) over the given tail, clamped to [0, 1]."""
    if len(ns) < 2:
        return float(min(1.0, max(0.0, ratios[-1])))
    u = 1.0 / np.log(ns.astype(float))
    if float(u.max() - u.min()) < 1e-15:
        return float(min(1.0, max(0.0, ratios[-1])))
    slope, intercept = np.polyfit(u, ratios, 1)
    return float(min(1.0, max(0.0, intercept)))


def _estimate(ns: np.ndarray, raw_ratios: np.ndarray, tol: float) -> DensityEstimate:
    ratios = np.clip(raw_ratios, 0.0, 1.0)
    verdict = _diagnose(ratios, tol)
    value = None
    if verdict == CONVERGED:
        w = _window(len(ratios))
        value = _extrapolate(ns[-w:], ratios[-w:])
    return DensityEstimate(
        checkpoints=tuple(int(v) for v in ns),
        ratios=tuple(float(r) for r in ratios),
        value=value,
        verdict=verdict,
        tol=tol,
    )


def _validated_checkpoints(n: int) -> np.ndarray:
    if n < 100:
        raise ValueError(f"truncation must be >= 100, got {n}")
    ns = checkpoints(n)
    if len(ns) < 3:
        raise ValueError(f"truncation {n} too small to place >= 3 checkpoints")
    return ns


def natural_density(a: IndexSet, n: int, tol: float = 1e-2) -> DensityEstimate:
    """Estimate lim |A(n)|/n from the prefix ratio trail."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    ns = _validated_checkpoints(int(n))
    counts = a.counts(ns)
    return _estimate(ns, counts / ns, tol)


def f_density(a: IndexSet, f: Modulus, n: int, tol: float = 1e-2) -> DensityEstimate:
    """Estimate lim f(|A(n)|)/f(n) for an unbounded modulus f.

    With the identity modulus the ratio trail equals the natural-density
    trail exactly.  A bounded modulus is rejected: the limit the trail is
    chasing is not defined for it.
    """
    if not f.unbounded:
        raise ValueError(f"bounded modulus {f.name!r}: density ratios need an unbounded modulus")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    ns = _validated_checkpoints(int(n))
    counts = a.counts(ns)
    return _estimate(ns, f(counts) / f(ns), tol)


@dataclass(frozen=True)
class ComplementCheck:
    passed: bool
    first_violation: int | None
    n_checked: int


def complement_inequality_check(a: IndexSet, f: Modulus, n: int) -> ComplementCheck:
    """Verify f(n) <= f(|A(n)|) + f(|complement(n)|) for every n up to the truncation.

    Subadditive moduli satisfy this exactly; the check scans all n with a
    1e-12 slack and reports the first violating n.
    """
    n = int(n)
    ns = np.arange(1, n + 1, dtype=np.int64)
    counts = a.counts(ns)
    lhs = f(ns)
    rhs = f(counts) + f(ns - counts)
    viol = np.flatnonzero(lhs > rhs + _SLACK)
    if viol.size:
        return ComplementCheck(False, int(ns[viol[0]]), n)
    return ComplementCheck(True, None, n)


def exceedance_set(s: SequencePrefix, eps: float) -> IndexSet:
    """The explicit index set {i <= N : s_i > eps}."""
    if eps <= 0:
        raise ValueError("threshold eps must be positive")
    members = np.flatnonzero(s.values > eps) + 1
    return IndexSet.from_members(f"exceedances({s.label or 'seq'};eps={eps:g})", members)
