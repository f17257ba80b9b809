"""Membership diagnostics over lacunary blocks.

Three modes share the same pointwise scores s_i = M_i(|A_i(x) - L| / rho_i):

* ``mean``    — block residuals t_r = h_r^{-alpha} sum_{i in J_r} s_i must fall
                below tolerance on the trailing third of blocks;
* ``count``   — exceedance ratios c_r = h_r^{-alpha} #{i in J_r : s_i >= eps}
                must do the same;
* ``density`` — the global exceedance set {i : s_i > eps} must have a
                modulus-weighted density estimate converging to ~0.

Finite truncations cannot certify limits, so verdicts are three-valued
(member / non-member / inconclusive) and every report carries its trail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import LacunaryScheme, SequencePrefix
from .density import DensityEstimate, checkpoints, exceedance_set, f_density
from .errors import TruncationError
from .matrices import SummabilityMatrix, transform_prefix
from .modulus import Modulus
from .orlicz import OrliczFamily, RhoSchedule, const_rho

DEFAULT_TOL = 1e-2
DEFAULT_EPS = 0.1
MIN_BLOCKS = 6

MEMBER = "member"
NON_MEMBER = "non-member"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SpaceParams:
    """Everything a membership test needs besides the sequence itself."""

    matrix: SummabilityMatrix
    family: OrliczFamily
    scheme: LacunaryScheme
    alpha: float = 1.0
    rho: RhoSchedule = field(default_factory=const_rho)
    limit: Optional[float] = None
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")


@dataclass(frozen=True)
class MembershipReport:
    mode: str
    verdict: str
    block_residuals: tuple[float, ...] | None = None
    exceedance_ratios: tuple[float, ...] | None = None
    exceedance_counts: tuple[int, ...] | None = None
    density: DensityEstimate | None = None
    evidence: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


def pointwise_scores(x: SequencePrefix, params: SpaceParams,
                     upto: int | None = None) -> SequencePrefix:
    """s_i = M_i(|A_i(x) - L| / rho_i) for i = 1..upto (default: full prefix)."""
    if params.limit is None:
        raise ValueError("a candidate limit L is required to compute scores")
    n = len(x) if upto is None else int(upto)
    y = transform_prefix(params.matrix, x, n).values
    idx = np.arange(1, n + 1, dtype=np.int64)
    dev = np.abs(y - params.limit) / params.rho.values(idx)
    s = params.family.eval_many(idx, dev)
    return SequencePrefix(s, label=f"scores[{x.label}]" if x.label else "scores")


def block_trails(x: SequencePrefix, params: SpaceParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block residuals t_r, exceedance ratios c_r, and raw exceedance counts."""
    scheme = params.scheme
    if scheme.k_max > len(x):
        raise TruncationError(
            f"scheme extends to {scheme.k_max}, past the sequence truncation {len(x)}")
    s = pointwise_scores(x, params, upto=scheme.k_max).values
    starts = scheme.cuts_array[:-1]
    sums = np.add.reduceat(s, starts)
    counts = np.add.reduceat((s >= params.eps).astype(np.int64), starts)
    halpha = scheme.h.astype(float) ** params.alpha
    return sums / halpha, counts / halpha, counts


def block_residuals(x: SequencePrefix, params: SpaceParams) -> np.ndarray:
    t, _, _ = block_trails(x, params)
    return t


def _trail_verdict(trail: np.ndarray, tol: float) -> tuple[str, int]:
    r = len(trail)
    if r < MIN_BLOCKS:
        raise ValueError(f"need at least {MIN_BLOCKS} blocks for a verdict, got {r}")
    w = math.ceil(r / 3)
    tail = trail[-w:]
    if float(np.max(tail)) <= tol:
        return MEMBER, w
    nondecreasing = bool(np.all(np.diff(tail) >= -1e-9))
    if float(np.min(tail)) >= 2.0 * tol and nondecreasing:
        return NON_MEMBER, w
    return INCONCLUSIVE, w


def _block_evidence(params: SpaceParams, tol: float, window: int) -> dict:
    return {
        "tol": tol,
        "eps": params.eps,
        "alpha": params.alpha,
        "window": window,
        "h": [int(v) for v in params.scheme.h],
        "k_max": params.scheme.k_max,
    }


def mean_membership(x: SequencePrefix, params: SpaceParams,
                    tol: float = DEFAULT_TOL) -> MembershipReport:
    """Verdict on whether the block residual trail t_r tends to 0."""
    t, c, counts = block_trails(x, params)
    verdict, w = _trail_verdict(t, tol)
    return MembershipReport(
        mode="mean",
        verdict=verdict,
        block_residuals=tuple(float(v) for v in t),
        exceedance_ratios=tuple(float(v) for v in c),
        exceedance_counts=tuple(int(v) for v in counts),
        evidence=_block_evidence(params, tol, w),
    )


def count_membership(x: SequencePrefix, params: SpaceParams,
                     tol: float = DEFAULT_TOL) -> MembershipReport:
    """Verdict on whether the per-block exceedance ratio trail c_r tends to 0."""
    t, c, counts = block_trails(x, params)
    verdict, w = _trail_verdict(c, tol)
    return MembershipReport(
        mode="count",
        verdict=verdict,
        block_residuals=tuple(float(v) for v in t),
        exceedance_ratios=tuple(float(v) for v in c),
        exceedance_counts=tuple(int(v) for v in counts),
        evidence=_block_evidence(params, tol, w),
    )


def density_membership(x: SequencePrefix, params: SpaceParams, f: Modulus,
                       tol: float = DEFAULT_TOL) -> MembershipReport:
    """Verdict on whether the global exceedance set {i : s_i > eps} has
    modulus-weighted density converging to <= tol."""
    if not f.unbounded:
        raise ValueError(f"bounded modulus {f.name!r}: the density mode needs an unbounded modulus")
    s = pointwise_scores(x, params)
    excess = exceedance_set(s, params.eps)
    dens = f_density(excess, f, len(s), tol)
    if dens.converged and dens.value <= tol:
        verdict = MEMBER
    elif dens.converged and dens.value >= 2.0 * tol:
        verdict = NON_MEMBER
    else:
        verdict = INCONCLUSIVE
    t = c = counts = None
    if params.scheme.k_max <= len(x):
        t_arr, c_arr, n_arr = block_trails(x, params)
        t = tuple(float(v) for v in t_arr)
        c = tuple(float(v) for v in c_arr)
        counts = tuple(int(v) for v in n_arr)
    return MembershipReport(
        mode="density",
        verdict=verdict,
        block_residuals=t,
        exceedance_ratios=c,
        exceedance_counts=counts,
        density=dens,
        evidence={"tol": tol, "eps": params.eps, "modulus": f.name, "n": len(s)},
    )


def stat_limit_estimate(x: SequencePrefix, params: SpaceParams, f: Modulus,
                        eps: float | None = None,
                        tol: float = DEFAULT_TOL) -> float | None:
    """Scan histogram modes of the transformed values for a limit candidate.

    Returns the first candidate whose density-mode verdict is ``member``,
    or None when no candidate passes (e.g. an alternating sequence leaves
    exceedance density 1/2 around either value).
    """
    eps = params.eps if eps is None else eps
    y = transform_prefix(params.matrix, x, len(x)).values
    width = max(eps, 1e-12)
    bins = np.floor((y - float(y.min())) / width).astype(np.int64)
    uniq, cnt = np.unique(bins, return_counts=True)
    order = np.lexsort((uniq, -cnt))
    for b in uniq[order][:5]:
        candidate = float(np.median(y[bins == b]))
        report = density_membership(x, replace(params, limit=candidate, eps=eps), f, tol)
        if report.verdict == MEMBER:
            return candidate
    return None


@dataclass(frozen=True)
class CauchyReport:
    cauchy: bool
    anchor: int | None
    density: DensityEstimate | None
    trail: tuple  # (anchor, verdict, value) per attempt


def stat_cauchy_check(x: SequencePrefix, params: SpaceParams, f: Modulus,
                      eps: float | None = None,
                      tol: float = DEFAULT_TOL) -> CauchyReport:
    """Search anchor rows N* making {i : |A_i(x) - A_{N*}(x)| > eps} density-null.

    Anchors are tried at geometric checkpoint positions, largest first; the
    first anchor whose exceedance density converges to <= tol wins.
    """
    if not f.unbounded:
        raise ValueError(f"bounded modulus {f.name!r}: the Cauchy check needs an unbounded modulus")
    eps = params.eps if eps is None else eps
    y = transform_prefix(params.matrix, x, len(x)).values
    trail = []
    for anchor in checkpoints(len(y))[::-1]:
        anchor = int(anchor)
        dev = SequencePrefix(np.abs(y - y[anchor - 1]), label=f"dev@{anchor}")
        dens = f_density(exceedance_set(dev, eps), f, len(y), tol)
        trail.append((anchor, dens.verdict, dens.value))
        if dens.converged and dens.value <= tol:
            return CauchyReport(True, anchor, dens, tuple(trail))
    return CauchyReport(False, None, None, tuple(trail))


@dataclass(frozen=True)
class InclusionProbe:
    """Empirical check that count-mode membership implies mean-mode membership
    for bounded sequences when h_r / h_r^alpha stays near 1."""

    hypothesis_met: bool
    reason: str
    count_report: MembershipReport | None
    mean_report: MembershipReport | None
    implication_holds: bool | None


def boundedness_inclusion_probe(x: SequencePrefix, params: SpaceParams,
                                tol: float = DEFAULT_TOL) -> InclusionProbe:
    scheme = params.scheme
    if scheme.k_max > len(x):
        raise TruncationError(
            f"scheme extends to {scheme.k_max}, past the sequence truncation {len(x)}")
    absx = np.abs(x.values[: scheme.k_max])
    maxima = np.maximum.reduceat(absx, scheme.cuts_array[:-1])
    w = math.ceil(scheme.blocks / 3)
    head_max = float(np.max(maxima[:w]))
    tail_max = float(np.max(maxima[-w:]))
    # finite truncation proxy for boundedness: block maxima must not grow
    if tail_max > 2.0 * head_max + 1e-12:
        return InclusionProbe(
            False,
            f"sequence magnitude grows across blocks (early max {head_max:g}, late max {tail_max:g})",
            None, None, None,
        )
    ratio = scheme.h.astype(float) / scheme.h.astype(float) ** params.alpha
    dev = float(np.max(np.abs(ratio[-w:] - 1.0)))
    if dev > tol:
        return InclusionProbe(
            False,
            f"h_r/h_r^alpha deviates from 1 by {dev:g} on the trailing blocks",
            None, None, None,
        )
    count_rep = count_membership(x, params, tol)
    mean_rep = mean_membership(x, params, tol)
    implication = None
    if count_rep.verdict == MEMBER:
        implication = mean_rep.verdict in (MEMBER, INCONCLUSIVE)
    return InclusionProbe(True, "", count_rep, mean_rep, implication)
