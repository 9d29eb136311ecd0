"""Special functions needed by the capacity formulas.

Everything here works in double precision on real parameters.  The numeric
hot loops live in a compiled extension when it is available; the pure-Python
versions in ``_pykernels`` are used otherwise (``BACKEND`` tells which).
"""
from ._backend import BACKEND
from .functions import (GCQuadrature, bessel_k, exp_integral_ei,
                        exp_integral_ei_array, gc_nodes_weights, hyperu,
                        log_gamma_complex, whittaker_w, whittaker_w_scaled)
from .meijer import (DEFAULT_OPTIONS, EvalOptions, MeijerGSpec, ResidueResult,
                     contour_integration, meijer_g, residue_series)

__all__ = [
    "BACKEND", "GCQuadrature", "bessel_k", "exp_integral_ei",
    "exp_integral_ei_array", "gc_nodes_weights", "hyperu", "log_gamma_complex",
    "whittaker_w", "whittaker_w_scaled", "DEFAULT_OPTIONS", "EvalOptions",
    "MeijerGSpec", "ResidueResult", "contour_integration", "meijer_g",
    "residue_series",
]
