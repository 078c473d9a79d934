"""Concrete multilinear symbols and the resonant frequency decomposition.

Notation used throughout: ``m_j = m(|xi_j|)`` is the smoothing multiplier,
``f(r) = m(r)^2 r^2``, and for a frequency quadruple summing to zero

    q(xi)      = 1/4 (-f(|xi_1|) + f(|xi_2|) - f(|xi_3|) + f(|xi_4|)),
    alpha4(xi) = -2 (xi_1 + xi_2) . (xi_1 + xi_4),

so alpha4 coincides with the alternating sum of squared magnitudes on the
zero-sum hyperplane.  When every |xi_j| stays at or below the threshold N,
``q = alpha4 / 4`` identically (m = 1 there), so the ratio ``q / alpha4``
extends continuously to 1/4 across the vanishing of alpha4.

The quadruple set splits by the resonance angle between xi_1+xi_2 and
xi_1+xi_4.  Non-resonant quadruples are those with all frequencies at or
below N, or with |cos| of that angle at least theta0.  The corrected quartic
symbol equals 1/4 on the below-threshold branch, q/alpha4 on the wide-angle
branch, and 0 on the resonant remainder.  Lattice quadruples whose angle is
undefined (xi_12 = 0 or xi_14 = 0) with a frequency above N are classified
resonant; q vanishes identically there by pairwise cancellation of the
radial f, so the classification never moves a nonzero term.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .grid import Field, Spectrum, dealias, forward_transform
from .multilinear import (
    SymbolEvaluator,
    eval_lambda2,
    eval_lambda4_direct,
    eval_lambda4_separable,
    eval_lambda6_substitution,
)
from .multiplier import IMethodParams, multiplier_value

__all__ = [
    "sigma2_pair",
    "sigma4_value",
    "x_sigma2_sym_value",
    "alpha4_value",
    "cos_resonance_angle",
    "in_omega_nr",
    "sigma4_tilde_value",
    "sigma4_symbol",
    "sigma4_tilde_symbol",
    "correction_symbol",
    "resonant_increment_symbol",
    "kinetic_lambda2",
    "quartic_lambda4",
    "modified_energy_tilde",
    "energy_gap",
    "modified_energy_rate_terms",
    "SymbolAuditReport",
    "audit_symbol_bounds",
    "sample_stratified_tuples",
]


def _mag(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    return np.sqrt(xi[..., 0] ** 2 + xi[..., 1] ** 2)


def _magsq(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    return xi[..., 0] ** 2 + xi[..., 1] ** 2


def sigma2_pair(params: IMethodParams):
    """Kinetic pair symbol (xi, -xi) -> 1/2 |xi|^2 m(|xi|)^2."""

    def fn(xi1, xi2):
        r = _mag(xi1)
        m = multiplier_value(r, params)
        return 0.5 * r * r * m * m

    return fn


def sigma4_value(xi1, xi2, xi3, xi4, params: IMethodParams):
    """Product quartic symbol 1/4 m_1 m_2 m_3 m_4."""
    out = 0.25
    for xi in (xi1, xi2, xi3, xi4):
        out = out * multiplier_value(_mag(xi), params)
    return out


def x_sigma2_sym_value(xi1, xi2, xi3, xi4, params: IMethodParams):
    """Alternating kinetic combination 1/4 (-f_1 + f_2 - f_3 + f_4), f = m^2 r^2."""
    total = 0.0
    for j, xi in enumerate((xi1, xi2, xi3, xi4)):
        r2 = _magsq(xi)
        m = multiplier_value(np.sqrt(r2), params)
        term = m * m * r2
        total = total + (term if j % 2 == 1 else -term)
    return 0.25 * total


def alpha4_value(xi1, xi2, xi3, xi4):
    """Resonance function -2 (xi_1 + xi_2) . (xi_1 + xi_4)."""
    a = np.asarray(xi1, dtype=np.float64) + np.asarray(xi2, dtype=np.float64)
    b = np.asarray(xi1, dtype=np.float64) + np.asarray(xi4, dtype=np.float64)
    return -2.0 * (a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1])


def cos_resonance_angle(xi1, xi2, xi3, xi4):
    """Cosine of the angle between xi_1+xi_2 and xi_1+xi_4; NaN when undefined.

    The angle is undefined when either sum vanishes.
    """
    a = np.asarray(xi1, dtype=np.float64) + np.asarray(xi2, dtype=np.float64)
    b = np.asarray(xi1, dtype=np.float64) + np.asarray(xi4, dtype=np.float64)
    asq = a[..., 0] ** 2 + a[..., 1] ** 2
    bsq = b[..., 0] ** 2 + b[..., 1] ** 2
    dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    denom = np.sqrt(asq * bsq)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, dot / np.where(denom > 0, denom, 1.0), np.nan)
    return out


def _region_masks(xi1, xi2, xi3, xi4, params: IMethodParams):
    """(below, nonresonant-angle) masks using the same algebra as the kernels."""
    nsq = params.N * params.N
    below = ((_magsq(xi1) <= nsq) & (_magsq(xi2) <= nsq)
             & (_magsq(xi3) <= nsq) & (_magsq(xi4) <= nsq))
    a = np.asarray(xi1, dtype=np.float64) + np.asarray(xi2, dtype=np.float64)
    b = np.asarray(xi1, dtype=np.float64) + np.asarray(xi4, dtype=np.float64)
    asq = a[..., 0] ** 2 + a[..., 1] ** 2
    bsq = b[..., 0] ** 2 + b[..., 1] ** 2
    dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    wide = (asq > 0) & (bsq > 0) & (dot * dot >= params.theta0 ** 2 * asq * bsq)
    return below, wide


def in_omega_nr(xi1, xi2, xi3, xi4, params: IMethodParams):
    """Membership in the non-resonant quadruple set."""
    below, wide = _region_masks(xi1, xi2, xi3, xi4, params)
    return below | wide


def sigma4_tilde_value(xi1, xi2, xi3, xi4, params: IMethodParams):
    """Corrected quartic symbol: 1/4 below threshold, q/alpha4 on wide angles, else 0."""
    below, wide = _region_masks(xi1, xi2, xi3, xi4, params)
    q = np.asarray(x_sigma2_sym_value(xi1, xi2, xi3, xi4, params), dtype=np.float64)
    alpha = np.asarray(alpha4_value(xi1, xi2, xi3, xi4), dtype=np.float64)
    if np.any(wide & ~below & (alpha == 0.0)):
        raise AssertionError("wide-angle branch reached with vanishing alpha4")
    safe = np.where(alpha != 0.0, alpha, 1.0)
    ratio = q / safe
    return np.where(below, 0.25, np.where(wide, ratio, 0.0))


# ---------------------------------------------------------------------------
# tagged evaluators
# ---------------------------------------------------------------------------

def sigma4_symbol(params: IMethodParams) -> SymbolEvaluator:
    def factor(xi):
        return multiplier_value(_mag(xi), params)

    return SymbolEvaluator(
        k=4,
        fn=lambda *xis: sigma4_value(*xis, params=params),
        name="sigma4",
        is_separable=True,
        factors=(factor, factor, factor, factor),
        scale=0.25,
        kernel=(_kernels.MODE_SIGMA4, False),
        params=params,
    )


def sigma4_tilde_symbol(params: IMethodParams) -> SymbolEvaluator:
    return SymbolEvaluator(
        k=4,
        fn=lambda *xis: sigma4_tilde_value(*xis, params=params),
        name="sigma4_tilde",
        kernel=(_kernels.MODE_SIGMA4_TILDE, False),
        params=params,
    )


def correction_symbol(params: IMethodParams) -> SymbolEvaluator:
    """sigma4_tilde - sigma4; vanishes whenever all |xi_j| <= N."""

    def fn(*xis):
        return (np.asarray(sigma4_tilde_value(*xis, params=params))
                - np.asarray(sigma4_value(*xis, params=params)))

    return SymbolEvaluator(
        k=4,
        fn=fn,
        name="sigma4_tilde - sigma4",
        support_radius=params.N,
        kernel=(_kernels.MODE_CORRECTION, True),
        params=params,
    )


def resonant_increment_symbol(params: IMethodParams) -> SymbolEvaluator:
    """The quadrilinear increment symbol -i q restricted to the resonant set.

    This is the combination (alternating kinetic extension) + i sigma4_tilde
    alpha4 collapsed onto the resonant quadruples, evaluated as a real core
    with a -i prefactor.  Well conditioned: the cancellation between the two
    large terms is performed symbolically, not numerically.
    """

    def fn(*xis):
        below, wide = _region_masks(*xis, params=params)
        a = np.asarray(xis[0], dtype=np.float64) + np.asarray(xis[1], dtype=np.float64)
        b = np.asarray(xis[0], dtype=np.float64) + np.asarray(xis[3], dtype=np.float64)
        defined = ((a[..., 0] ** 2 + a[..., 1] ** 2) > 0) & ((b[..., 0] ** 2 + b[..., 1] ** 2) > 0)
        q = np.asarray(x_sigma2_sym_value(*xis, params=params))
        return np.where(below | wide | ~defined, 0.0, q)

    return SymbolEvaluator(
        k=4,
        fn=fn,
        name="resonant quartic increment",
        prefactor=-1j,
        support_radius=params.N,
        kernel=(_kernels.MODE_RESONANT_Q, True),
        params=params,
    )


# ---------------------------------------------------------------------------
# modified energy
# ---------------------------------------------------------------------------

def kinetic_lambda2(spec: Spectrum, params: IMethodParams) -> float:
    """Lambda_2 with the kinetic pair symbol; equals 1/2 ||grad Iu||^2."""
    return eval_lambda2(sigma2_pair(params), spec)


def quartic_lambda4(spec: Spectrum, params: IMethodParams) -> float:
    """Lambda_4 with the product symbol, via the separable fast path."""
    sym = sigma4_symbol(params)
    return eval_lambda4_separable(sym.factors, spec, scale=sym.scale)


def modified_energy_tilde(u: Field, params: IMethodParams) -> float:
    """The corrected energy: kinetic Lambda_2 plus Lambda_4 of the corrected symbol.

    Split as sigma4 (separable fast path) plus the high-frequency correction
    (direct sum, pruned below the threshold where it vanishes identically).
    """
    spec = dealias(forward_transform(u))
    value = kinetic_lambda2(spec, params)
    value += quartic_lambda4(spec, params)
    value += eval_lambda4_direct(correction_symbol(params), spec)
    return value


def energy_gap(u: Field, params: IMethodParams) -> float:
    """E(Iu) - Etilde(u) = Lambda_4(sigma4 - sigma4_tilde; u), computed directly."""
    spec = dealias(forward_transform(u))
    return -eval_lambda4_direct(correction_symbol(params), spec)


def modified_energy_rate_terms(spec: Spectrum, params: IMethodParams) -> tuple[float, float]:
    """The two terms (q4, q6) with d/dt Etilde = q4 - q6 for the truncated flow.

    q4 is the quadrilinear term (the increment symbol restricted to the
    resonant set), q6 the six-linear merged-slot term with symbol
    4 i X(sigma4_tilde).  Defocusing only: the resonant collapse of the
    quadrilinear combination assumes the defocusing sign.
    """
    if params.sign != 1:
        raise ValueError("rate decomposition is implemented for the defocusing sign")
    q4 = eval_lambda4_direct(resonant_increment_symbol(params), spec)
    sym6 = replace(sigma4_tilde_symbol(params), prefactor=4j)
    q6 = eval_lambda6_substitution(sym6, spec)
    return q4, q6


# ---------------------------------------------------------------------------
# pointwise bound audits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolAuditReport:
    """Sampled pointwise ratios for the kinetic-combination bound.

    ``max_ratio`` tracks |q| / (min(m)^2 |xi_12| |xi_14|); ``tilde_ratio_max``
    tracks |sigma4_tilde| theta0 / min(m)^2.
    """

    samples: int
    max_ratio: float
    argmax_tuple: np.ndarray
    tilde_ratio_max: float
    tilde_ratio_argmax: np.ndarray
    histogram: list[tuple[float, float, int]]
    stratum_max: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "argmax_tuple": np.asarray(self.argmax_tuple).tolist(),
            "tilde_ratio_max": self.tilde_ratio_max,
            "tilde_ratio_argmax": np.asarray(self.tilde_ratio_argmax).tolist(),
            "histogram": [
                {"lo": lo, "hi": hi, "count": int(c)} for lo, hi, c in self.histogram
            ],
            "stratum_max": dict(self.stratum_max),
        }


def sample_stratified_tuples(count: int, rng: np.random.Generator, radius: float,
                             stratum: str) -> np.ndarray:
    """Zero-sum quadruples stratified by the relative sizes of xi_12 and xi_14.

    Strata: 'a' both pair-sums comparable to or larger than |xi_1|;
    'b' xi_12 comparable to |xi_1| with xi_14 much smaller;
    'c' both pair-sums much smaller than |xi_1|.
    """
    r1 = radius * 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    phi1 = rng.uniform(0.0, 2.0 * np.pi, size=count)
    xi1 = np.stack([r1 * np.cos(phi1), r1 * np.sin(phi1)], axis=-1)

    def pair_sum(scale_exp_lo, scale_exp_hi):
        mag = r1 * 10.0 ** rng.uniform(scale_exp_lo, scale_exp_hi, size=count)
        ang = rng.uniform(0.0, 2.0 * np.pi, size=count)
        return np.stack([mag * np.cos(ang), mag * np.sin(ang)], axis=-1)

    if stratum == "a":
        s12 = pair_sum(0.0, 1.0)
        s14 = pair_sum(0.0, 1.0)
    elif stratum == "b":
        s12 = pair_sum(-0.3, 0.3)
        s14 = pair_sum(-5.0, -1.0)
    elif stratum == "c":
        s12 = pair_sum(-5.0, -1.0)
        s14 = pair_sum(-5.0, -1.0)
    else:
        raise ValueError(f"unknown stratum {stratum!r}")

    xi2 = s12 - xi1
    xi4 = s14 - xi1
    xi3 = xi1 - s12 - s14
    return np.stack([xi1, xi2, xi3, xi4], axis=1)


def audit_symbol_bounds(params: IMethodParams, count: int, seed: int = 0,
                        strata: str = "all", radius: float | None = None,
                        histogram_bins: int = 24) -> SymbolAuditReport:
    """Sample the pointwise symbol bounds over stratified zero-sum quadruples.

    Records the ratio of |q| to min(m)^2 |xi_12| |xi_14| and the corrected
    quartic ratio |sigma4_tilde| theta0 / min(m)^2, with max, argmax, and a
    log-spaced histogram of the former.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    names = ["a", "b", "c"] if strata == "all" else [strata]
    radius = params.N if radius is None else radius
    seeds = np.random.SeedSequence(seed).spawn(len(names))

    per = count // len(names)
    counts = [per] * len(names)
    counts[-1] += count - per * len(names)

    edges = np.concatenate([[0.0], np.logspace(-8, 2, histogram_bins)])
    hist = np.zeros(len(edges) - 1, dtype=np.int64)
    max_ratio = -1.0
    argmax = np.zeros((4, 2))
    tilde_max = -1.0
    tilde_argmax = np.zeros((4, 2))
    stratum_max: dict[str, float] = {}
    total = 0

    for name, nsamp, ss in zip(names, counts, seeds):
        if nsamp == 0:
            continue
        rng = np.random.default_rng(ss)
        tuples = sample_stratified_tuples(nsamp, rng, radius, name)
        xis = [tuples[:, j, :] for j in range(4)]
        q = np.abs(np.asarray(x_sigma2_sym_value(*xis, params=params)))
        mmin = np.minimum.reduce([multiplier_value(_mag(x), params) for x in xis])
        s12 = _mag(xis[0] + xis[1])
        s14 = _mag(xis[0] + xis[3])
        ratio = q / (mmin * mmin * s12 * s14)
        tilde_ratio = np.abs(np.asarray(sigma4_tilde_value(*xis, params=params))) * params.theta0 / (mmin * mmin)

        hist += np.histogram(ratio, bins=edges)[0]
        i = int(np.argmax(ratio))
        if ratio[i] > max_ratio:
            max_ratio = float(ratio[i])
            argmax = tuples[i]
        j = int(np.argmax(tilde_ratio))
        if tilde_ratio[j] > tilde_max:
            tilde_max = float(tilde_ratio[j])
            tilde_argmax = tuples[j]
        stratum_max[name] = float(np.max(ratio))
        total += nsamp

    rows = [(float(edges[i]), float(edges[i + 1]), int(hist[i])) for i in range(len(hist))]
    return SymbolAuditReport(samples=total, max_ratio=max_ratio, argmax_tuple=argmax,
                             tilde_ratio_max=tilde_max, tilde_ratio_argmax=tilde_argmax,
                             histogram=rows, stratum_max=stratum_max)
