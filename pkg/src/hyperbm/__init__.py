"""Brownian motion on rank-one hyperbolic spaces: samplers, limit laws and checks.

The compiled kernels (``hyperbm._ckernels``) are used when built; otherwise a
numpy implementation with identical output is selected at import.
"""

from ._backend import backend_name, compiled_available, set_backend
from .complex_space import (ComplexFreq, ComplexPoint, dist_complex, limit_charfn_complex,
                            poisson_kernel_complex, sample_complex_bm, sample_complex_terminal)
from .core import (ConfigError, PathSample, SimConfig, exp_functionals, levy_area, levy_area_charfn,
                   sample_bm_path, sample_exp_functionals)
from .harness import TestReport, empirical_charfn, ks_one_sample, ks_two_sample, mc_integrate
from .perpetual import (cond_laplace_given_a, cond_laplace_tilde, density_f1, density_f2,
                        hitting_laplace_vz, joint_laplace, sample_dufresne, sample_perpetual)
from .quat_space import (QuatFreq, QuatPoint, SkewBlock, build_skew_block, dist_quat, limit_charfn_quat,
                         poisson_kernel_quat, sample_quat_bm, sample_quat_terminal)
from .real_space import (RealFreq, RealPoint, dist_real, fourier_real, hitting_charfn, poisson_kernel_real,
                         sample_real_bm, sample_real_terminal)
from .special import DomainError, QuadratureError, QuadratureSpec, bessel_k, log_gamma, whittaker_w

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
