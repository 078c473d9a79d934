"""Periodic-box spectral infrastructure.

A square box of side ``L`` is sampled on an ``M x M`` collocation grid.  The
frequency lattice consists of the vectors ``xi_k = (2*pi/L) * k`` for integer
``k`` with components in ``[-M/2, M/2)``.  Fourier coefficients follow the
convention

    c(k) = (1/L^2) * integral of u(x) * exp(-i xi_k . x) over the box,

so that Parseval reads ``integral |u|^2 = L^2 * sum |c(k)|^2``.  With the
default ``L = 2*pi`` the frequencies are exactly the integer vectors, which
keeps all symbol arithmetic on the lattice exact.

Nonlinear products honour a hard truncation contract: after any product, all
coefficients with ``|k|_inf > K`` are exactly zero (``K`` defaults to the
2/3-rule cutoff ``floor(M/3)``).  Products themselves are evaluated alias-free
on a zero-padded ``2M`` grid, so the retained coefficients equal the exact
convolution of the inputs; this is what makes the quartic/multilinear
identities in this package hold to roundoff rather than to an aliasing error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid2D",
    "Field",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "dealias",
    "assert_dealiased",
    "mass",
    "energy",
    "sobolev_norm",
    "l2_norm",
    "translate",
    "cubic_spectrum",
    "quartic_integral",
    "save_spectrum",
    "load_spectrum",
    "save_field",
    "load_field",
    "spectrum_to_csv",
    "spectrum_from_csv",
]

_MAGIC = b"NLS2"
_CONTAINER_VERSION = 1


@dataclass(frozen=True)
class Grid2D:
    """Geometry of the periodic box and its integer frequency lattice.

    Parameters
    ----------
    modes_per_axis : int
        Number of collocation points / Fourier modes per axis. Must be even
        and at least 8.
    box_length : float
        Side length of the periodic box.
    dealias_cutoff : int, optional
        Largest retained ``|k|_inf`` after nonlinear products.  Defaults to
        ``floor(modes_per_axis / 3)`` (2/3 rule).
    """

    modes_per_axis: int
    box_length: float = 2.0 * np.pi
    dealias_cutoff: int | None = None

    def __post_init__(self) -> None:
        m = self.modes_per_axis
        if m % 2 != 0 or m < 8:
            raise ValueError("modes_per_axis must be even and >= 8")
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")
        if self.dealias_cutoff is None:
            object.__setattr__(self, "dealias_cutoff", m // 3)
        k = self.dealias_cutoff
        if not 1 <= k <= m // 2 - 1:
            raise ValueError("dealias_cutoff must satisfy 1 <= K <= M/2 - 1")

    @property
    def spacing(self) -> float:
        return self.box_length / self.modes_per_axis

    @property
    def frequency_unit(self) -> float:
        """Lattice spacing 2*pi/L of the frequency lattice."""
        return 2.0 * np.pi / self.box_length

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode numbers along one axis, FFT storage order."""
        m = self.modes_per_axis
        return np.rint(np.fft.fftfreq(m) * m).astype(np.int64)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequency components (xi1, xi2) as M x M arrays, FFT order."""
        k = self.frequency_unit * self.modes
        return np.meshgrid(k, k, indexing="ij")

    @cached_property
    def wavenumber_sq(self) -> np.ndarray:
        k1, k2 = self.wavenumbers
        return k1 * k1 + k2 * k2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        k = np.abs(self.modes)
        return (k[:, None] <= self.dealias_cutoff) & (k[None, :] <= self.dealias_cutoff)

    @cached_property
    def active_modes(self) -> np.ndarray:
        """Sorted integer modes -K..K along one axis."""
        k = self.dealias_cutoff
        return np.arange(-k, k + 1, dtype=np.int64)

    def collocation_points(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.spacing * np.arange(self.modes_per_axis)
        return np.meshgrid(x, x, indexing="ij")

    def rescaled(self, lam: float) -> "Grid2D":
        return Grid2D(self.modes_per_axis, lam * self.box_length, self.dealias_cutoff)


@dataclass
class Field:
    """Complex function on the box, sampled at the collocation points."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        m = self.grid.modes_per_axis
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (m, m):
            raise ValueError(f"values must have shape ({m}, {m})")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


@dataclass
class Spectrum:
    """Fourier coefficients c(k) on the integer lattice, FFT storage order."""

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        m = self.grid.modes_per_axis
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (m, m):
            raise ValueError(f"coeffs must have shape ({m}, {m})")

    def copy(self) -> "Spectrum":
        return Spectrum(self.grid, self.coeffs.copy())

    def coeff(self, k1: int, k2: int) -> complex:
        m = self.grid.modes_per_axis
        return complex(self.coeffs[k1 % m, k2 % m])

    def set_coeff(self, k1: int, k2: int, value: complex) -> None:
        m = self.grid.modes_per_axis
        self.coeffs[k1 % m, k2 % m] = value

    def active_block(self) -> np.ndarray:
        """Coefficients on the dealiased box as a (2K+1, 2K+1) array.

        Index ``[i, j]`` holds the mode ``(i - K, j - K)``.
        """
        k = self.grid.dealias_cutoff
        m = self.grid.modes_per_axis
        idx = (np.arange(-k, k + 1)) % m
        return self.coeffs[np.ix_(idx, idx)]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def forward_transform(field: Field) -> Spectrum:
    """Fourier coefficients of a field; exact inverse of `inverse_transform`."""
    m = field.grid.modes_per_axis
    coeffs = np.fft.fft2(field.values) / (m * m)
    return Spectrum(field.grid, coeffs)


def inverse_transform(spectrum: Spectrum) -> Field:
    m = spectrum.grid.modes_per_axis
    values = np.fft.ifft2(spectrum.coeffs) * (m * m)
    return Field(spectrum.grid, values)


def dealias(spectrum: Spectrum) -> Spectrum:
    """Zero every coefficient with |k|_inf beyond the grid cutoff."""
    out = spectrum.coeffs * spectrum.grid.dealias_mask
    return Spectrum(spectrum.grid, out)


def assert_dealiased(spectrum: Spectrum) -> None:
    tail = spectrum.coeffs[~spectrum.grid.dealias_mask]
    if tail.size and np.any(tail != 0):
        raise ValueError("spectrum is not dealiased: nonzero coefficients beyond |k|_inf <= K")


def mass(u: Field) -> float:
    """L^2 norm of the field over the box."""
    spec = forward_transform(u)
    ls = u.grid.box_length
    return float(np.sqrt(ls * ls * spec.norm_sq()))


def l2_norm(spectrum: Spectrum) -> float:
    ls = spectrum.grid.box_length
    return float(np.sqrt(ls * ls * spectrum.norm_sq()))


def _padded_values(spectrum: Spectrum) -> np.ndarray:
    """Collocation values on the 2M zero-padded grid (alias-free products)."""
    m = spectrum.grid.modes_per_axis
    mp = 2 * m
    padded = np.zeros((mp, mp), dtype=np.complex128)
    idx = np.asarray(spectrum.grid.modes) % mp
    padded[np.ix_(idx, idx)] = spectrum.coeffs
    return np.fft.ifft2(padded) * (mp * mp)


def quartic_integral(u: Field) -> float:
    """Exact integral of |u|^4 over the box for dealiased u.

    Evaluated by collocation quadrature of the product on the zero-padded
    grid, which is exact for the trigonometric polynomial |u|^4 of degree
    at most 4K per axis.
    """
    spec = dealias(forward_transform(u))
    vals = _padded_values(spec)
    mp = vals.shape[0]
    ls = u.grid.box_length
    w = (ls * ls) / (mp * mp)
    return float(w * np.sum(np.abs(vals) ** 4))


def energy(u: Field, sign: int = 1) -> float:
    """Energy 1/2 |grad u|^2 + (sign/4) |u|^4 integrated over the box.

    The gradient term is computed spectrally; the quartic term by exact
    (padded) collocation quadrature.  ``sign=+1`` is the defocusing case,
    ``sign=-1`` the focusing one.
    """
    spec = forward_transform(u)
    ls = u.grid.box_length
    kinetic = 0.5 * ls * ls * float(np.sum(spec.grid.wavenumber_sq * np.abs(spec.coeffs) ** 2))
    return kinetic + 0.25 * sign * quartic_integral(u)


def sobolev_norm(spectrum: Spectrum, s: float, homogeneous: bool = False) -> float:
    """Sobolev norm with weight <xi>^s, or |xi|^s when homogeneous.

    The homogeneous variant drops the k = 0 term.
    """
    ksq = spectrum.grid.wavenumber_sq
    if homogeneous:
        w = np.where(ksq > 0, ksq, 1.0) ** s
        w = np.where(ksq > 0, w, 0.0)
    else:
        w = (1.0 + ksq) ** s
    ls = spectrum.grid.box_length
    total = float(np.sum(w * np.abs(spectrum.coeffs) ** 2))
    return float(np.sqrt(ls * ls * total))


def translate(spectrum: Spectrum, shift: tuple[float, float]) -> Spectrum:
    """Spectrum of x -> u(x - shift); multiplies c(k) by exp(-i xi_k . shift)."""
    k1, k2 = spectrum.grid.wavenumbers
    phase = np.exp(-1j * (k1 * shift[0] + k2 * shift[1]))
    return Spectrum(spectrum.grid, spectrum.coeffs * phase)


def cubic_spectrum(spectrum: Spectrum) -> Spectrum:
    """Truncated coefficients of |u|^2 u, computed alias-free.

    The pointwise cubic product is formed on the zero-padded grid, so the
    returned coefficients on ``|k|_inf <= K`` equal the exact triple
    convolution of the inputs; everything beyond the cutoff is zeroed per
    the dealiasing contract.
    """
    assert_dealiased(spectrum)
    vals = _padded_values(spectrum)
    w = np.abs(vals) ** 2 * vals
    mp = vals.shape[0]
    what = np.fft.fft2(w) / (mp * mp)
    m = spectrum.grid.modes_per_axis
    out = np.zeros((m, m), dtype=np.complex128)
    k = spectrum.grid.dealias_cutoff
    src = np.arange(-k, k + 1) % mp
    dst = np.arange(-k, k + 1) % m
    out[np.ix_(dst, dst)] = what[np.ix_(src, src)]
    return Spectrum(spectrum.grid, out)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _write_container(path, grid: Grid2D, array: np.ndarray) -> None:
    header = _MAGIC + struct.pack(
        "<IIdI", _CONTAINER_VERSION, grid.modes_per_axis, grid.box_length, grid.dealias_cutoff
    )
    flat = np.ascontiguousarray(array, dtype=np.complex128).reshape(-1)
    interleaved = np.empty(2 * flat.size, dtype="<f8")
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def _read_container(path) -> tuple[Grid2D, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad container magic {magic!r}")
        version, m, ls, k = struct.unpack("<IIdI", fh.read(20))
        if version != _CONTAINER_VERSION:
            raise ValueError(f"unsupported container version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != 2 * m * m:
        raise ValueError("container payload size does not match header")
    array = (data[0::2] + 1j * data[1::2]).reshape(m, m)
    return Grid2D(m, ls, k), array


def save_spectrum(path, spectrum: Spectrum) -> None:
    _write_container(path, spectrum.grid, spectrum.coeffs)


def load_spectrum(path) -> Spectrum:
    grid, array = _read_container(path)
    return Spectrum(grid, array)


def save_field(path, field: Field) -> None:
    _write_container(path, field.grid, field.values)


def load_field(path) -> Field:
    grid, array = _read_container(path)
    return Field(grid, array)


def spectrum_to_csv(path, spectrum: Spectrum) -> None:
    """Debug dump: one row (k1, k2, re, im) per mode, k ascending."""
    m = spectrum.grid.modes_per_axis
    order = np.argsort(spectrum.grid.modes, kind="stable")
    with open(path, "w", newline="") as fh:
        fh.write("k1,k2,re,im\r\n")
        for i in order:
            for j in order:
                c = spectrum.coeffs[i, j]
                fh.write(
                    f"{int(spectrum.grid.modes[i])},{int(spectrum.grid.modes[j])},"
                    f"{float(c.real)!r},{float(c.imag)!r}\r\n"
                )


def spectrum_from_csv(path, grid: Grid2D) -> Spectrum:
    coeffs = np.zeros((grid.modes_per_axis, grid.modes_per_axis), dtype=np.complex128)
    with open(path, "r", newline="") as fh:
        header = fh.readline()
        if not header.startswith("k1,k2"):
            raise ValueError("spectrum CSV must start with a k1,k2,re,im header")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            k1, k2, re, im = line.split(",")
            m = grid.modes_per_axis
            coeffs[int(k1) % m, int(k2) % m] = float(re) + 1j * float(im)
    return Spectrum(grid, coeffs)
