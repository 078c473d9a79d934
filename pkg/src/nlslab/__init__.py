"""nlslab: a pseudospectral laboratory for the 2D cubic Schrodinger equation.

Core layers:

* ``grid`` - periodic-box transforms, norms, conserved quantities,
  alias-free products, serialization;
* ``multiplier`` - the low-pass shaped smoothing multiplier, the smoothed
  energy, and the rescaling schedule;
* ``multilinear`` - exact k-linear functionals on the zero-sum frequency
  lattice with deterministic compiled kernels;
* ``symbols`` - the concrete quartic symbols, the resonant decomposition,
  the corrected energy, and pointwise bound audits;
* ``solver`` - integrating-factor RK4 and Strang integrators for the
  truncated flow;
* ``experiments`` / ``strichartz`` - reproducible sweep experiments with
  fitted scaling exponents and report emission.
"""

__version__ = "0.1.0"

from .grid import Field, Grid2D, Spectrum  # noqa: F401
from .multiplier import IMethodParams  # noqa: F401
