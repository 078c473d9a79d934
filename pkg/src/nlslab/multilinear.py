"""Exact k-linear functionals on the zero-sum frequency lattice.

For an even number of slots, the functional pairs a symbol M on the
hyperplane ``xi_1 + ... + xi_k = 0`` with alternating copies of the
coefficient functions of ``u`` and of ``conj(u)``:

    Lambda_k(M; u) = L^2 * Re  sum over the hyperplane of
                     M(xi_1, .., xi_k) g_1(xi_1) ... g_k(xi_k),

where odd slots carry ``g(xi) = c(xi)`` and even slots carry
``g(xi) = conj(c(-xi))``.  The box-area normalization makes two identities
exact on the lattice (they anchor every other convention in this package):

* with the kinetic pair symbol, Lambda_2 equals ``1/2 ||grad Iu||_{L^2}^2``;
* with the constant-quarter product symbol, Lambda_4 equals
  ``1/4 ||Iu||_{L^4}^4``.

Six-slot functionals are never enumerated directly: with the first three
slots merged, the inner triple sum is the coefficient function of the
dealiased cubic ``|u|^2 u``, so a six-linear value costs one cubic product
plus one quadrilinear sum.  All quadrilinear enumerations are deterministic
regardless of thread count (tiled compensated summation, fixed tile order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .grid import Field, Grid2D, Spectrum, assert_dealiased, cubic_spectrum, dealias, forward_transform
from .multiplier import IMethodParams, multiplier_value

__all__ = [
    "SymbolEvaluator",
    "alpha_k",
    "symmetrize",
    "extend_X",
    "eval_lambda2",
    "eval_lambda4_direct",
    "eval_lambda4_separable",
    "eval_lambda6_substitution",
    "derivative_identity_residual",
    "random_sigma_tuples",
    "slot_arrays",
    "pair_substitution_sum",
]


@dataclass(frozen=True)
class SymbolEvaluator:
    """A pure symbol on k-tuples of frequencies summing to zero.

    ``fn`` is vectorized: it receives k arrays of shape (..., 2) and returns
    an array of values (complex in general).  The evaluator's value is
    ``prefactor * fn`` with ``fn`` real for every tagged production symbol;
    the complex prefactor is applied once, after the lattice sum.

    ``support_radius`` marks symbols that vanish whenever all |xi_j| lie at
    or below that radius; direct sums may skip such tuples.  ``kernel`` tags
    evaluators with a compiled fast path: ``(mode, prune_below)``.
    """

    k: int
    fn: Callable[..., np.ndarray]
    name: str = "custom"
    prefactor: complex = 1.0 + 0.0j
    is_separable: bool = False
    factors: tuple | None = None
    scale: float = 1.0
    support_radius: float | None = None
    kernel: tuple[int, bool] | None = None
    params: IMethodParams | None = None

    def __call__(self, *xis: np.ndarray) -> np.ndarray:
        return self.prefactor * np.asarray(self.fn(*xis))


def alpha_k(xis: Sequence[np.ndarray]) -> np.ndarray:
    """Alternating sum -|xi_1|^2 + |xi_2|^2 - ... + |xi_k|^2 (k even)."""
    if len(xis) % 2 != 0:
        raise ValueError("alpha_k requires an even number of frequencies")
    total = 0.0
    for j, xi in enumerate(xis):
        xi = np.asarray(xi, dtype=np.float64)
        mag = xi[..., 0] ** 2 + xi[..., 1] ** 2
        total = total + (mag if j % 2 == 1 else -mag)
    return total


def _group_elements(k: int):
    half = k // 2
    perms = list(itertools.permutations(range(half)))
    for odd in perms:
        for even in perms:
            for swapconj in (False, True):
                yield odd, even, swapconj


def symmetrize(sym: SymbolEvaluator) -> SymbolEvaluator:
    """Average over slot permutations and the conjugating odd/even swap.

    The group has order (k/2)! * (k/2)! * 2: permutations of the odd slots,
    permutations of the even slots, and the involution that swaps each
    odd/even pair, reflects every frequency, and conjugates the value.  (The
    reflection is what makes the swap an exact invariance of Lambda_k for
    arbitrary symbols; symbols even under global reflection, which includes
    every radial production symbol here, cannot tell the difference.)  The
    resulting evaluator leaves every Lambda_k value unchanged and is a fixed
    point of this map.
    """
    k = sym.k
    elements = list(_group_elements(k))

    def fn(*xis):
        acc = None
        for odd, even, swapconj in elements:
            args = [None] * k
            for pos, src in enumerate(odd):
                args[2 * pos] = xis[2 * src]
            for pos, src in enumerate(even):
                args[2 * pos + 1] = xis[2 * src + 1]
            if swapconj:
                swapped = []
                for pair in range(k // 2):
                    swapped.append(-np.asarray(args[2 * pair + 1]))
                    swapped.append(-np.asarray(args[2 * pair]))
                val = np.conj(np.asarray(sym(*swapped), dtype=np.complex128))
            else:
                val = np.asarray(sym(*args), dtype=np.complex128)
            acc = val if acc is None else acc + val
        return acc / len(elements)

    return SymbolEvaluator(k=k, fn=fn, name=f"sym[{sym.name}]",
                           support_radius=sym.support_radius, params=sym.params)


def extend_X(sym: SymbolEvaluator) -> SymbolEvaluator:
    """Extend a k-symbol to k+2 slots by merging the first three frequencies."""

    def fn(*xis):
        merged = np.asarray(xis[0]) + np.asarray(xis[1]) + np.asarray(xis[2])
        return sym(merged, *xis[3:])

    return SymbolEvaluator(k=sym.k + 2, fn=fn, name=f"X[{sym.name}]", params=sym.params)


def random_sigma_tuples(k: int, count: int, rng: np.random.Generator,
                        scale: float = 1.0) -> np.ndarray:
    """Seeded sample of (count, k, 2) frequency tuples summing to zero."""
    pts = rng.normal(0.0, scale, size=(count, k, 2))
    pts[:, k - 1, :] = -np.sum(pts[:, : k - 1, :], axis=1)
    return pts


# ---------------------------------------------------------------------------
# slot arrays and table construction
# ---------------------------------------------------------------------------

def slot_arrays(spec: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """(C, V) on the dealiased box: C holds c(k), V holds conj(c(-k)).

    Index [i, j] corresponds to the mode (i - K, j - K).
    """
    c = spec.active_block()
    v = np.conj(c[::-1, ::-1])
    return np.ascontiguousarray(c), np.ascontiguousarray(v)


def _multiplier_tables(grid: Grid2D, params: IMethodParams) -> tuple[np.ndarray, np.ndarray]:
    k = grid.dealias_cutoff
    h = grid.frequency_unit
    km = np.arange(-k, k + 1, dtype=np.float64)
    r = h * np.sqrt(km[:, None] ** 2 + km[None, :] ** 2)
    mtab = multiplier_value(r, params)
    ftab = mtab * mtab * r * r
    return np.ascontiguousarray(mtab), np.ascontiguousarray(ftab)


def _active_points(grid: Grid2D) -> np.ndarray:
    k = grid.dealias_cutoff
    km = np.arange(-k, k + 1, dtype=np.int64)
    pts = np.stack(np.meshgrid(km, km, indexing="ij"), axis=-1)
    return pts.reshape(-1, 2)


def _raw_quadrilinear(sym: SymbolEvaluator, grid: Grid2D,
                      slots: Sequence[np.ndarray],
                      times_alpha4: bool = False,
                      mask: Callable | None = None) -> complex:
    """Raw complex total over the zero-sum quadruples (no prefactor, no L^2)."""
    if sym.kernel is not None and mask is None and _kernels.HAVE_NUMBA:
        mode, prune = sym.kernel
        p = sym.params
        mtab, ftab = _multiplier_tables(grid, p)
        return _kernels.lambda4_tagged_sum(
            grid.dealias_cutoff, grid.frequency_unit, p.N, p.theta0,
            mode, times_alpha4, prune,
            slots[0], slots[1], slots[2], slots[3], mtab, ftab)
    return _generic_quadrilinear(sym, grid, slots, times_alpha4, mask)


def _generic_quadrilinear(sym: SymbolEvaluator, grid: Grid2D,
                          slots: Sequence[np.ndarray],
                          times_alpha4: bool,
                          mask: Callable | None) -> complex:
    kcut = grid.dealias_cutoff
    h = grid.frequency_unit
    n = 2 * kcut + 1
    pts = _active_points(grid)
    npts = pts.shape[0]
    g1 = np.asarray(slots[0]).reshape(-1)
    g2 = np.asarray(slots[1]).reshape(-1)
    g3 = np.asarray(slots[2]).reshape(-1)
    g4 = np.asarray(slots[3]).reshape(-1)

    xi2 = (h * pts.astype(np.float64))[:, None, :]
    xi3 = (h * pts.astype(np.float64))[None, :, :]
    k2 = pts[:, None, :]
    k3 = pts[None, :, :]
    prod23 = g2[:, None] * g3[None, :]

    partial_re = np.zeros(npts)
    partial_im = np.zeros(npts)
    for t in range(npts):
        a1 = g1[t]
        if a1 == 0.0:
            continue
        k1 = pts[t]
        k4 = -(k1[None, None, :] + k2 + k3)
        inbox = (np.abs(k4[..., 0]) <= kcut) & (np.abs(k4[..., 1]) <= kcut)
        idx4 = (k4[..., 0] + kcut) * n + (k4[..., 1] + kcut)
        idx4 = np.where(inbox, idx4, 0)
        xi1 = h * k1.astype(np.float64)
        xi4 = h * k4.astype(np.float64)
        vals = np.asarray(sym.fn(xi1, xi2, xi3, xi4), dtype=np.complex128)
        vals = np.where(inbox, vals, 0.0)
        if times_alpha4:
            a12 = xi1 + xi2
            a14 = xi1 + xi4
            alpha = -2.0 * (a12[..., 0] * a14[..., 0] + a12[..., 1] * a14[..., 1])
            vals = vals * alpha
        if sym.support_radius is not None:
            rad2 = sym.support_radius ** 2
            below = ((np.sum(xi1 ** 2) <= rad2)
                     & (np.sum(xi2 ** 2, axis=-1) <= rad2)
                     & (np.sum(xi3 ** 2, axis=-1) <= rad2)
                     & (np.sum(xi4 ** 2, axis=-1) <= rad2))
            vals = np.where(below, 0.0, vals)
        if mask is not None:
            vals = vals * np.asarray(mask(xi1, xi2, xi3, xi4), dtype=np.float64)
        summand = vals * prod23 * g4[idx4] * a1
        partial_re[t] = float(np.sum(summand.real))
        partial_im[t] = float(np.sum(summand.imag))
    return complex(_kernels.kahan_total(partial_re), _kernels.kahan_total(partial_im))


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------

def eval_lambda2(pair_fn: Callable, spec: Spectrum) -> float:
    """Two-slot functional: L^2 * Re sum_k M(xi_k, -xi_k) |c(k)|^2."""
    k1, k2 = spec.grid.wavenumbers
    xi = np.stack([k1, k2], axis=-1)
    vals = np.asarray(pair_fn(xi, -xi), dtype=np.complex128)
    ls = spec.grid.box_length
    total = np.sum(vals * np.abs(spec.coeffs) ** 2)
    return float(ls * ls * np.real(total))


def eval_lambda4_direct(sym: SymbolEvaluator, spec: Spectrum,
                        mask: Callable | None = None) -> float:
    """Quadrilinear functional by exact enumeration of the zero-sum quadruples.

    The spectrum must be dealiased.  ``mask`` optionally restricts the sum to
    a sub-region (vectorized predicate on the four frequencies); masked sums
    always run on the generic path.
    """
    if sym.k != 4:
        raise ValueError("eval_lambda4_direct requires a 4-slot symbol")
    assert_dealiased(spec)
    c, v = slot_arrays(spec)
    total = _raw_quadrilinear(sym, spec.grid, (c, v, c, v), mask=mask)
    ls = spec.grid.box_length
    return float(np.real(sym.prefactor * total) * ls * ls)


def eval_lambda4_separable(factors: Sequence[Callable], spec: Spectrum,
                           scale: float = 1.0) -> float:
    """Fast path for product symbols M = scale * f1(xi1) f2(xi2) f3(xi3) f4(xi4).

    Each factor is applied as a coefficient multiplier, the four fields are
    multiplied on the zero-padded collocation grid (exact for dealiased
    inputs), and the product is integrated over the box.  Agrees with the
    direct enumeration to roundoff.
    """
    if len(factors) != 4:
        raise ValueError("separable evaluation requires exactly 4 factors")
    assert_dealiased(spec)
    grid = spec.grid
    m = grid.modes_per_axis
    k1, k2 = grid.wavenumbers
    xi = np.stack([k1, k2], axis=-1)
    neg = (-np.arange(m)) % m
    vconj = np.conj(spec.coeffs[np.ix_(neg, neg)])
    from .grid import _padded_values  # shared padding helper

    vals = None
    for slot, f in enumerate(factors):
        coeff = np.asarray(f(xi), dtype=np.complex128) * (spec.coeffs if slot % 2 == 0 else vconj)
        pv = _padded_values(Spectrum(grid, coeff))
        vals = pv if vals is None else vals * pv
    mp = vals.shape[0]
    ls = grid.box_length
    return float(scale * (ls * ls / (mp * mp)) * np.real(np.sum(vals)))


def _check_g4_symmetric(sym: SymbolEvaluator, samples: int = 100,
                        scale: float = 8.0, rtol: float = 1e-8) -> None:
    """Sampled slot-group symmetry check of the core symbol.

    The complex prefactor is excluded: it is applied after the lattice sum,
    and the symmetrization rule makes the functional insensitive to it.
    """
    rng = np.random.default_rng(20250214)
    tuples = random_sigma_tuples(4, samples, rng, scale=scale)
    xis = [tuples[:, j, :] for j in range(4)]
    base = np.asarray(sym.fn(*xis), dtype=np.complex128)
    ref = np.max(np.abs(base)) + 1e-12
    for odd, even, swapconj in _group_elements(4):
        args = [None] * 4
        for pos, src in enumerate(odd):
            args[2 * pos] = xis[2 * src]
        for pos, src in enumerate(even):
            args[2 * pos + 1] = xis[2 * src + 1]
        if swapconj:
            args = [-args[1], -args[0], -args[3], -args[2]]
            val = np.conj(np.asarray(sym.fn(*args), dtype=np.complex128))
        else:
            val = np.asarray(sym.fn(*args), dtype=np.complex128)
        if np.max(np.abs(val - base)) > rtol * ref:
            raise ValueError(f"symbol {sym.name!r} is not symmetric under the slot group")


def eval_lambda6_substitution(sym: SymbolEvaluator, spec: Spectrum) -> float:
    """Six-slot functional of the merged-slot extension of a symmetric 4-symbol.

    Evaluates Lambda_6(X(M); u) for the dealiased dynamics: the first three
    slots are contracted into the truncated coefficient function of
    ``|u|^2 u`` and the remaining quadrilinear sum is enumerated exactly.
    Rejects symbols that fail a sampled slot-group symmetry check.
    """
    if sym.k != 4:
        raise ValueError("the substitution trick extends a 4-slot symbol")
    assert_dealiased(spec)
    _check_g4_symmetric(sym)
    w = cubic_spectrum(spec)
    wblock, _ = slot_arrays(w)
    c, v = slot_arrays(spec)
    total = _raw_quadrilinear(sym, spec.grid, (wblock, v, c, v))
    ls = spec.grid.box_length
    return float(np.real(sym.prefactor * total) * ls * ls)


def pair_substitution_sum(pair_fn: Callable, spec: Spectrum) -> complex:
    """Raw pair sum with the cubic spectrum in the first slot.

    Returns sum_k M(xi_k, -xi_k) w(k) conj(c(k)) over the dealiased box,
    where w is the truncated coefficient function of |u|^2 u.  This is the
    two-slot analogue of the merged-slot substitution and feeds the
    quadrilinear term of the modified-energy time derivative.
    """
    assert_dealiased(spec)
    w = cubic_spectrum(spec)
    k1, k2 = spec.grid.wavenumbers
    xi = np.stack([k1, k2], axis=-1)
    vals = np.asarray(pair_fn(xi, -xi), dtype=np.complex128)
    return complex(np.sum(vals * w.coeffs * np.conj(spec.coeffs)))


def derivative_identity_residual(sym: SymbolEvaluator, u: Field,
                                 params: IMethodParams) -> float:
    """Relative mismatch between two exact forms of d/dt Lambda_4(M; u).

    (a) chain rule: substitute the semi-discrete time derivative of the
        coefficients into each of the four slots;
    (b) the alternating-phase term plus the merged-slot six-linear term:
        Lambda_4(i M alpha_4; u) - sign * Lambda_6(4 i X(M); u).

    Both sides describe the same truncated dynamics, so the identity is
    exact on the lattice and the residual is pure roundoff.  Requires M
    real, slot-group symmetric, and invariant under global negation of the
    frequencies (true for every radial production symbol here).

    The denominator carries a floor of 1e-3 times the pre-cancellation
    magnitude of the constituent sums, so stationary inputs (where both
    sides vanish to roundoff) report a roundoff-sized residual instead of
    the ratio of two noise terms; a zero field returns exactly 0.
    """
    from .solver import rhs

    spec = dealias(forward_transform(u))
    grid = spec.grid
    ls = grid.box_length
    c, v = slot_arrays(spec)
    cdot_spec = rhs(spec, params.sign)
    cd, vd = slot_arrays(cdot_spec)

    total_a = 0.0 + 0.0j
    scale = 0.0
    for slots in ((cd, v, c, v), (c, vd, c, v), (c, v, cd, v), (c, v, c, vd)):
        part = _raw_quadrilinear(sym, grid, slots)
        total_a += part
        scale += abs(part)
    a = float(np.real(sym.prefactor * total_a) * ls * ls)

    alpha_total = _raw_quadrilinear(sym, grid, (c, v, c, v), times_alpha4=True)
    term1 = float(np.real(1j * sym.prefactor * alpha_total) * ls * ls)
    w = cubic_spectrum(spec)
    wblock, _ = slot_arrays(w)
    sub_total = _raw_quadrilinear(sym, grid, (wblock, v, c, v))
    term2 = params.sign * 4.0 * float(np.real(1j * sym.prefactor * sub_total) * ls * ls)
    b = term1 - term2

    scale = scale * ls * ls + abs(term1) + abs(term2)
    return abs(a - b) / (abs(a) + abs(b) + 1e-3 * scale + 1e-300)
