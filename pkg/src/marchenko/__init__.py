"""Algebraic Marchenko inversion of s-wave scattering data.

Typical use::

    from marchenko import (exponential_potential, s_matrix_table, ScatteringData,
                           build_y_evaluator, recover_coefficients, invert)

    table = s_matrix_table(exponential_potential(3.0, 1.5), q_grid)
    y = build_y_evaluator(ScatteringData.from_table(table))
    kernel, solution, potential = invert(recover_coefficients(y, h=0.04, N=100))
"""

from .data import (ScatteringData, ScatteringDataError, YEvaluator, build_y_evaluator,
                   load_scattering_csv, save_scattering_csv, y_at)
from .forward import (BoundState, PhaseShiftTable, Potential, asymptotic_constant,
                      exponential_potential, find_bound_states, integrate_radial,
                      phase_shift, s_matrix_table, square_well, tabulated_potential,
                      zero_potential)
from .kernel import (BandLimitedY, KernelCoefficients, consistency_residual,
                     fourier_moment, recover_coefficients, recover_with_residual)
from .numerics import (DenseSystem, QuadraticSpline, QuadratureError, SingularSystemError,
                       central_difference, fit_quadratic_spline, integrate_oscillatory,
                       solve_dense)
from .solver import (KernelMatrix, PotentialGrid, SolutionMatrix, build_kernel_matrix,
                     extract_potential, invert, marchenko_residual, solve_all,
                     solve_p_system, zeta)

__version__ = "0.1.0"
