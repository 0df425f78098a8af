from .complexfun import Branch, faddeeva_w, plasma_Z, plasma_Z_derivative, plasma_Z_asymptotic
from .spectral import Params, WaveVector, rotation_frame, green_matrix, sigma_closed, sigma_det
from .modes import Label, ModeSet, BranchCurve, find_modes, trace_branch, critical_wavenumber
from .modes import count_roots, refine_root
from .closure import Model, BeyondPolicy, HydroGenerator, ClosureCoefficients
from .closure import spectral_temperature, basis_H, det_H, transport_coefficients, generator
from .oracle import QuadratureGrid, DiscreteOperator, quadrature_sigma, riesz_projector
from .hydrosim import SimConfig, FieldState, assemble, evolve, compare_models, kernel_coefficients
from .version import __version__
from .helper import *
