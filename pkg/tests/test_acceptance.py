"""Acceptance gate: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  The sweep criteria share module-scoped runs; the determinism
criterion re-executes them under a different thread count and compares the
emitted CSV bytes.
"""

import contextlib
import os
import time

import numpy as np
import pytest

from nlslab.experiments import ExperimentConfig, run_acl_sweep, run_fixed_time_sweep, \
    run_strichartz_sweep, THRESHOLDS
from nlslab.grid import (
    Grid2D,
    Spectrum,
    dealias,
    forward_transform,
    inverse_transform,
    mass,
    energy,
    quartic_integral,
    sobolev_norm,
)
from nlslab.multilinear import (
    SymbolEvaluator,
    derivative_identity_residual,
    eval_lambda2,
    eval_lambda4_separable,
    eval_lambda6_substitution,
    extend_X,
    random_sigma_tuples,
    symmetrize,
)
from nlslab.multiplier import IMethodParams, apply_I
from nlslab.reporting import emit_report, write_run
from nlslab.solver import SolverState, evolve
from nlslab.symbols import (
    alpha4_value,
    audit_symbol_bounds,
    sigma2_pair,
    sigma4_symbol,
    sigma4_tilde_symbol,
    sigma4_tilde_value,
    x_sigma2_sym_value,
)

from conftest import gaussian_spectrum, plane_wave, random_spectrum
from oracles import lambda6_bruteforce

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def criterion(number: int, name: str):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number} ({name}): FAIL after {time.time() - start:.1f}s")
        raise
    print(f"\nACCEPTANCE {number} ({name}): PASS in {time.time() - start:.1f}s")


# ---------------------------------------------------------------------------
# shared sweep runs (criteria 7-10)
# ---------------------------------------------------------------------------

ACL_DOC = {
    "config_version": 1,
    "experiment": "acl",
    "grid": {"modes_per_axis": 48},
    "imethod": {"s": 0.6, "N_list": [2, 3, 4, 6, 8], "theta0": "one_over_N"},
    "data": {"seeds": [11, 12, 13], "decay_power": 3.0},
    "solver": {"dt": 1e-3, "t0": 0.1, "observer_samples": 3},
}

FIXED_DOC = {
    "config_version": 1,
    "experiment": "fixed_time",
    "grid": {"modes_per_axis": 48},
    "imethod": {"s": 0.6, "N_list": [2, 3, 4, 6, 8], "theta0": "one_over_N"},
    "data": {"seeds": [11], "decay_power": 3.0},
}

STRICH_DOC = {
    "config_version": 1,
    "experiment": "strichartz",
    "strichartz": {"thetas": [1 / 8, 1 / 16, 1 / 32, 1 / 64], "N1": 8, "N2": 8,
                   "resolution": [48, 48]},
}

_RUNNERS = {
    "acl": (ACL_DOC, run_acl_sweep),
    "fixed": (FIXED_DOC, run_fixed_time_sweep),
    "strichartz": (STRICH_DOC, run_strichartz_sweep),
}


def _run_and_emit(kind: str, out_dir) -> tuple:
    doc, runner = _RUNNERS[kind]
    config = ExperimentConfig.from_dict(doc)
    result = runner(config)
    write_run(out_dir, result, doc)
    emit_report(out_dir, force=True)
    csvs = {}
    for name in ("rows.csv", "aggregate.csv"):
        path = out_dir / name
        if path.exists():
            csvs[name] = path.read_bytes()
    return result, csvs


@pytest.fixture(scope="module")
def sweep_runs(tmp_path_factory):
    """Each sweep executed under two thread counts, reports emitted."""
    base = tmp_path_factory.mktemp("acceptance")
    runs = {}
    old = os.environ.get("NLSLAB_THREADS")
    try:
        for threads in (2, 1):
            os.environ["NLSLAB_THREADS"] = str(threads)
            for kind in ("acl", "fixed", "strichartz"):
                out = base / f"{kind}_t{threads}"
                out.mkdir()
                runs[(kind, threads)] = _run_and_emit(kind, out)
    finally:
        if old is None:
            os.environ.pop("NLSLAB_THREADS", None)
        else:
            os.environ["NLSLAB_THREADS"] = old
    return runs


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def test_criterion_1_normalization_anchors():
    with criterion(1, "normalization anchors"):
        g = Grid2D(16)
        p = IMethodParams(N=3.0, s=0.6)
        s4 = sigma4_symbol(p)
        for seed in range(20):
            spec = random_spectrum(g, seed=seed)
            iu = apply_I(spec, p)
            lhs2 = eval_lambda2(sigma2_pair(p), spec)
            rhs2 = 0.5 * sobolev_norm(iu, 1.0, homogeneous=True) ** 2
            assert abs(lhs2 - rhs2) <= 1e-10 * abs(rhs2)
            lhs4 = eval_lambda4_separable(s4.factors, spec, scale=s4.scale)
            rhs4 = 0.25 * quartic_integral(inverse_transform(iu))
            assert abs(lhs4 - rhs4) <= 1e-10 * abs(rhs4)


def test_criterion_2_unit_multiplier_cancellation():
    with criterion(2, "unit-multiplier cancellation"):
        p_unit = IMethodParams(N=1e12, s=0.6)  # m = 1 on every sampled tuple
        rng = np.random.default_rng(202)
        tuples = random_sigma_tuples(4, 100_000, rng, scale=20.0)
        xis = [tuples[:, j, :] for j in range(4)]
        q = np.asarray(x_sigma2_sym_value(*xis, params=p_unit))
        a4 = np.asarray(alpha4_value(*xis))
        scale = 1.0 + sum(np.sum(np.asarray(x) ** 2, axis=-1) for x in xis)
        assert np.max(np.abs(q - 0.25 * a4) / scale) <= 1e-12

        # the six-slot extension of the constant quartic symbol, scaled by 4i,
        # symmetrizes to exactly zero
        const = SymbolEvaluator(
            k=4, fn=lambda *x: np.full(np.asarray(x[0]).shape[:-1], 4j * 0.25))
        ext = extend_X(const)
        sym6 = symmetrize(ext)
        t6 = random_sigma_tuples(6, 1000, rng, scale=10.0)
        vals = np.asarray(sym6.fn(*[t6[:, j, :] for j in range(6)]))
        assert np.max(np.abs(vals)) == 0.0


def test_criterion_3_below_threshold_region():
    with criterion(3, "below-threshold region identities"):
        n_val = 16.0
        p = IMethodParams(N=n_val, s=0.6)
        rng = np.random.default_rng(303)
        # rejection-sample quadruples with every |xi_j| <= N
        kept = []
        while sum(len(t) for t in kept) < 100_000:
            t = random_sigma_tuples(4, 50_000, rng, scale=n_val / 4.0)
            mags = np.max(np.hypot(t[..., 0], t[..., 1]), axis=1)
            kept.append(t[mags <= n_val])
        tuples = np.concatenate(kept)[:100_000]
        xis = [tuples[:, j, :] for j in range(4)]
        q = np.asarray(x_sigma2_sym_value(*xis, params=p))
        a4 = np.asarray(alpha4_value(*xis))
        scale = 1.0 + np.abs(a4)
        assert np.max(np.abs(q - 0.25 * a4) / scale) <= 1e-14
        s4t = np.asarray(sigma4_tilde_value(*xis, params=p))
        assert np.max(np.abs(s4t - 0.25)) <= 1e-14


def test_criterion_4_differentiation_formula():
    with criterion(4, "differentiation formula and merged-slot oracle"):
        g = Grid2D(12)
        p = IMethodParams(N=2.0, s=0.6)
        for seed in (3, 4):
            u = inverse_transform(random_spectrum(g, seed=seed, decay=3.0))
            assert derivative_identity_residual(sigma4_symbol(p), u, p) <= 1e-8
            assert derivative_identity_residual(sigma4_tilde_symbol(p), u, p) <= 1e-8

        g6 = Grid2D(8, dealias_cutoff=2)  # the 25-mode box of a 6-per-axis grid
        p6 = IMethodParams(N=1.5, s=0.6)
        spec = random_spectrum(g6, seed=11)
        for sym in (sigma4_tilde_symbol(p6), sigma4_symbol(p6)):
            fast = eval_lambda6_substitution(sym, spec)
            ref = lambda6_bruteforce(sym.fn, spec, prefactor=sym.prefactor)
            assert abs(fast - ref) <= 1e-10 * (abs(ref) + 1e-30)


def test_criterion_5_symbol_bound_audits():
    with criterion(5, "pointwise symbol-bound audits"):
        p = IMethodParams(N=32.0, s=0.6)
        rep = audit_symbol_bounds(p, count=1_000_000, seed=0)
        assert np.isfinite(rep.max_ratio)
        assert rep.max_ratio <= THRESHOLDS["audit_ratio_max"]
        assert np.isfinite(rep.tilde_ratio_max)
        print(f"  kinetic-combination ratio max = {rep.max_ratio:.4f}, "
              f"corrected-symbol ratio max = {rep.tilde_ratio_max:.4f}")

        p_unit = IMethodParams(N=1e12, s=0.6, theta0=0.01)
        rep_unit = audit_symbol_bounds(p_unit, count=200_000, seed=1, radius=32.0)
        assert rep_unit.max_ratio <= 0.5 * (1 + 1e-9)


def test_criterion_6_solver_conservation():
    with criterion(6, "solver conservation and plane-wave regression"):
        g = Grid2D(64)
        p = IMethodParams(N=4.0, s=0.6)
        spec0 = gaussian_spectrum(g, seed=5, width=3.0)
        spec0 = Spectrum(g, spec0.coeffs / np.sqrt(spec0.norm_sq()))
        u0 = inverse_transform(spec0)
        m0, e0 = mass(u0), energy(u0)
        state = SolverState(spec0, 0.0, p, 1e-3)
        final, _ = evolve(state, 1.0)
        u1 = inverse_transform(final.spectrum)
        assert abs(mass(u1) - m0) / m0 <= 1e-8
        assert abs(energy(u1) - e0) / e0 <= 1e-8

        gp = Grid2D(16)
        state = SolverState(dealias(forward_transform(plane_wave(gp, (1, 0)))),
                            0.0, p, 1e-3)
        final, _ = evolve(state, 1.0)
        x1, x2 = gp.collocation_points()
        exact = np.exp(1j * (x1 - 2.0 * 1.0))  # phase rate |xi|^2 + |amp|^2 = 2
        err = np.max(np.abs(inverse_transform(final.spectrum).values - exact))
        assert err <= 1e-10


def test_criterion_7_almost_conservation_sweep(sweep_runs):
    with criterion(7, "almost-conservation decay in N"):
        result, _ = sweep_runs[("acl", 2)]
        assert result.residual is not None and result.residual < THRESHOLDS["fit_residual_max"]
        assert result.slope is not None and result.slope <= THRESHOLDS["acl_slope_max"]
        assert result.extra["tilde_beats_smoothed_at_largest_N"]
        assert all(r["decomposition_ok"] for r in result.rows)
        print(f"  slope = {result.slope:.3f}, residual = {result.residual:.3f}")


def test_criterion_8_fixed_time_sweep(sweep_runs):
    with criterion(8, "fixed-time gap decay in N"):
        result, _ = sweep_runs[("fixed", 2)]
        assert result.residual is not None and result.residual < THRESHOLDS["fit_residual_max"]
        assert result.slope is not None and result.slope <= THRESHOLDS["fixed_slope_max"]
        print(f"  slope = {result.slope:.3f}, residual = {result.residual:.3f}")


def test_criterion_9_strichartz_sweep(sweep_runs):
    with criterion(9, "angular product-norm scaling"):
        result, _ = sweep_runs[("strichartz", 2)]
        assert result.slope is not None
        assert abs(result.slope - THRESHOLDS["strichartz_slope"]) <= \
            THRESHOLDS["strichartz_slope_tol"]
        worst = max(r["refinement_drift"] for r in result.rows)
        assert worst < THRESHOLDS["strichartz_stability"]
        print(f"  slope = {result.slope:.3f}, worst refinement drift = {worst:.2e}")


def test_criterion_10_determinism(sweep_runs):
    with criterion(10, "byte-identical CSVs across thread counts"):
        for kind in ("acl", "fixed", "strichartz"):
            _, csv2 = sweep_runs[(kind, 2)]
            _, csv1 = sweep_runs[(kind, 1)]
            assert set(csv1) == set(csv2)
            for name in csv1:
                assert csv1[name] == csv2[name], f"{kind}/{name} differs across thread counts"
