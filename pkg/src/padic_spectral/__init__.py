"""Finite-resolution p-adic Fourier analysis, Vladimirov spectra and ultrametric Cauchy solvers."""
from __future__ import annotations

from .bases import (BasisElement, BasisSet, analyze, build_f, build_phi, build_wavelet,
                    enumerate_character_basis, enumerate_phi_basis, enumerate_wavelet_basis,
                    omega_expansion, omega_synthesis, synthesize)
from .evolution import (EvolutionRun, KernelOperator, Vladimirov, omega_closed_form, solve_oracle,
                        solve_spectral, survival_series)
from .fourier import (FrequencyGrid, Spectrum, convolve_spectral, dft_forward, dft_inverse,
                      product_spectrum, support_duality)
from .functions import GridFunction, convolve_direct, inner_product, integrate
from .operators import (KernelSpec, OperatorMatrix, gamma_p, kernel_eigenvalue, kernel_matrix,
                        vladimirov_eigenvalue_Br, vladimirov_eigenvalue_Qp, vladimirov_kernel_spec,
                        vladimirov_matrix)
from .padic import (CosetGrid, PAdicRational, PrimeConfig, character, coset_index, enumerate_cosets,
                    frac_part, padic_norm, valuation)
from .scalars import EXACT, FLOAT, QuadArray, QuadScalar, root_of_orthogonality

__version__ = "0.1.0"
