import numpy as np
import pytest

from nlslab.grid import Field, Grid2D, Spectrum, inverse_transform


def random_spectrum(grid: Grid2D, seed: int, decay: float = 0.0) -> Spectrum:
    """Seeded spectrum supported on the dealiased box.

    decay > 0 weights mode k by <k>^(-decay); decay = 0 gives flat
    random coefficients.
    """
    rng = np.random.default_rng(seed)
    k = grid.dealias_cutoff
    m = grid.modes_per_axis
    n = 2 * k + 1
    block = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if decay > 0:
        km = np.arange(-k, k + 1, dtype=float)
        block *= (1.0 + km[:, None] ** 2 + km[None, :] ** 2) ** (-decay / 2.0)
    coeffs = np.zeros((m, m), dtype=np.complex128)
    idx = np.arange(-k, k + 1) % m
    coeffs[np.ix_(idx, idx)] = block
    return Spectrum(grid, coeffs)


def random_field(grid: Grid2D, seed: int, decay: float = 0.0) -> Field:
    return inverse_transform(random_spectrum(grid, seed, decay))


def gaussian_spectrum(grid: Grid2D, seed: int, width: float | None = None) -> Spectrum:
    """Seeded spectrum with a Gaussian radial envelope (rapidly decaying tail)."""
    rng = np.random.default_rng(seed)
    k = grid.dealias_cutoff
    m = grid.modes_per_axis
    n = 2 * k + 1
    w = width if width is not None else k / 3.0
    km = np.arange(-k, k + 1, dtype=float)
    envelope = np.exp(-(km[:, None] ** 2 + km[None, :] ** 2) / (2.0 * w * w))
    block = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * envelope
    coeffs = np.zeros((m, m), dtype=np.complex128)
    idx = np.arange(-k, k + 1) % m
    coeffs[np.ix_(idx, idx)] = block
    return Spectrum(grid, coeffs)


def plane_wave(grid: Grid2D, mode=(1, 0), amplitude: complex = 1.0) -> Field:
    m = grid.modes_per_axis
    coeffs = np.zeros((m, m), dtype=np.complex128)
    coeffs[mode[0] % m, mode[1] % m] = amplitude
    return inverse_transform(Spectrum(grid, coeffs))


@pytest.fixture
def grid16() -> Grid2D:
    return Grid2D(16)


@pytest.fixture
def grid12() -> Grid2D:
    return Grid2D(12)
