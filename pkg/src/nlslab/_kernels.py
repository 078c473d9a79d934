"""Compiled direct-sum kernels for quadrilinear lattice functionals.

The quadrilinear sums enumerate every frequency quadruple
(xi1, xi2, xi3, xi4) with xi1 + xi2 + xi3 + xi4 = 0 inside the dealiased box
(up to ~1e9-1e10 terms at production grid sizes).  Determinism contract:

* the enumeration is tiled by the flattened xi1 index; each tile accumulates
  its partial sum sequentially with compensated (Kahan) summation;
* tiles are combined in ascending tile order with compensated summation.

Tile partials are written to per-tile slots, so the result is bit-identical
regardless of how many threads execute the tile loop.

All branch tests run on integer lattice coordinates (no square roots), so
set membership (below-threshold region, resonance-angle test) is exact up to
the single rounding of theta0**2.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    # workqueue is available everywhere and plays well with fork-based runners
    numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range

__all__ = [
    "HAVE_NUMBA",
    "resolve_thread_count",
    "set_kernel_threads",
    "MODE_CORRECTION",
    "MODE_SIGMA4_TILDE",
    "MODE_SIGMA4",
    "MODE_RESONANT_Q",
    "lambda4_tagged_sum",
    "kahan_total",
]

MODE_CORRECTION = 0  # sigma4_tilde - sigma4
MODE_SIGMA4_TILDE = 1
MODE_SIGMA4 = 2
MODE_RESONANT_Q = 3  # q * indicator(resonant set); q is the kinetic-difference quarter-sum


def resolve_thread_count() -> int:
    """Thread cap from NLSLAB_THREADS, else the CPU count."""
    env = os.environ.get("NLSLAB_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError(f"NLSLAB_THREADS must be an integer, got {env!r}") from exc
        if n < 1:
            raise ValueError("NLSLAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def set_kernel_threads() -> int:
    """Apply the resolved thread cap to the numba threading layer."""
    n = resolve_thread_count()
    if HAVE_NUMBA:
        limit = numba.config.NUMBA_NUM_THREADS
        numba.set_num_threads(max(1, min(n, limit)))
    return n


@njit(cache=True, parallel=True)
def _l4_tiles(kcut, h2, below_sq, theta0_sq, mode, times_alpha4, prune_below,
              g1, g2, g3, g4, mtab, ftab, out_re, out_im):
    n = 2 * kcut + 1
    ntiles = n * n
    for t in prange(ntiles):
        i1 = t // n
        j1 = t - n * i1
        a1 = g1[i1, j1]
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        if a1 != 0.0:
            k1x = i1 - kcut
            k1y = j1 - kcut
            f1 = ftab[i1, j1]
            m1 = mtab[i1, j1]
            q1 = k1x * k1x + k1y * k1y
            for i2 in range(n):
                k2x = i2 - kcut
                for j2 in range(n):
                    a2 = g2[i2, j2]
                    if a2 == 0.0:
                        continue
                    k2y = j2 - kcut
                    a12 = a1 * a2
                    f2 = ftab[i2, j2]
                    m2 = mtab[i2, j2]
                    q2 = k2x * k2x + k2y * k2y
                    ax = k1x + k2x
                    ay = k1y + k2y
                    asq = ax * ax + ay * ay
                    for i3 in range(n):
                        k3x = i3 - kcut
                        k4x = -(k1x + k2x + k3x)
                        if k4x > kcut or k4x < -kcut:
                            continue
                        i4 = k4x + kcut
                        for j3 in range(n):
                            a3 = g3[i3, j3]
                            if a3 == 0.0:
                                continue
                            k3y = j3 - kcut
                            k4y = -(k1y + k2y + k3y)
                            if k4y > kcut or k4y < -kcut:
                                continue
                            j4 = k4y + kcut
                            a4 = g4[i4, j4]
                            if a4 == 0.0:
                                continue
                            q3 = k3x * k3x + k3y * k3y
                            q4 = k4x * k4x + k4y * k4y
                            below = (q1 <= below_sq and q2 <= below_sq
                                     and q3 <= below_sq and q4 <= below_sq)
                            if prune_below and below:
                                continue
                            bx = k1x + k4x
                            by = k1y + k4y
                            bsq = bx * bx + by * by
                            dot = ax * bx + ay * by

                            sym = 0.0
                            if mode == MODE_SIGMA4:
                                sym = 0.25 * m1 * m2 * mtab[i3, j3] * mtab[i4, j4]
                            else:
                                nonres = (asq > 0 and bsq > 0
                                          and float(dot) * float(dot)
                                          >= theta0_sq * float(asq) * float(bsq))
                                if mode == MODE_RESONANT_Q:
                                    if below or nonres or asq == 0 or bsq == 0:
                                        continue
                                    sym = 0.25 * (-f1 + f2 - ftab[i3, j3] + ftab[i4, j4])
                                else:
                                    if below:
                                        s4t = 0.25
                                    elif nonres:
                                        q = 0.25 * (-f1 + f2 - ftab[i3, j3] + ftab[i4, j4])
                                        s4t = q / (-2.0 * h2 * float(dot))
                                    else:
                                        s4t = 0.0
                                    if mode == MODE_SIGMA4_TILDE:
                                        sym = s4t
                                    else:
                                        sym = s4t - 0.25 * m1 * m2 * mtab[i3, j3] * mtab[i4, j4]
                            if times_alpha4:
                                sym *= -2.0 * h2 * float(dot)
                            if sym == 0.0:
                                continue

                            z = a12 * a3 * a4
                            vr = sym * z.real
                            vi = sym * z.imag
                            # Kahan accumulation, real and imaginary lanes
                            yr = vr - cr
                            tr = sr + yr
                            cr = (tr - sr) - yr
                            sr = tr
                            yi = vi - ci
                            ti = si + yi
                            ci = (ti - si) - yi
                            si = ti
        out_re[t] = sr
        out_im[t] = si


def kahan_total(values: np.ndarray) -> float:
    """Sequential compensated sum in index order."""
    s = 0.0
    c = 0.0
    for v in values:
        y = float(v) - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def lambda4_tagged_sum(kcut: int, h: float, n_threshold: float, theta0: float,
                       mode: int, times_alpha4: bool, prune_below: bool,
                       g1: np.ndarray, g2: np.ndarray, g3: np.ndarray, g4: np.ndarray,
                       mtab: np.ndarray, ftab: np.ndarray) -> complex:
    """Tiled deterministic quadrilinear sum for one of the tagged symbols.

    Returns the raw complex total  sum_{Sigma_4} core(xi) g1 g2 g3 g4
    (no box-area factor, no complex prefactor).
    """
    n = 2 * kcut + 1
    out_re = np.zeros(n * n, dtype=np.float64)
    out_im = np.zeros(n * n, dtype=np.float64)
    set_kernel_threads()
    h2 = h * h
    below_sq = (n_threshold * n_threshold) / h2
    _l4_tiles(kcut, h2, below_sq, theta0 * theta0, mode, times_alpha4, prune_below,
              np.ascontiguousarray(g1), np.ascontiguousarray(g2),
              np.ascontiguousarray(g3), np.ascontiguousarray(g4),
              np.ascontiguousarray(mtab), np.ascontiguousarray(ftab),
              out_re, out_im)
    return complex(kahan_total(out_re), kahan_total(out_im))
