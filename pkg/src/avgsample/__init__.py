"""Average-sampling reconstruction of harmonizable processes and its truncation-error bounds."""

from .bounds import (BoundReport, Regime, bandwidth_regime, bound_report, find_n0, fit_power_law,
                     lemma1_bound,
                     regime_check, remark3_bound, thm2_bound, thm3_bound)
from .errors import NotPSDError, NumericalError, QuadratureError, ValidationError
from .kernels import (HoelderPair, SamplingGrid, c_q, dirichlet_lambda, index_window,
                      l0_deterministic, l0_tilde, nearest_index, sinc_term)
from .sampling import (AveragingScheme, asymptotic_mse, avg_truncated, error_coefficients,
                       exact_gap_mse, exact_mse, gap_coefficients, local_average_kernel,
                       local_average_path, wks_tail, wks_truncated)
from .simulate import (MeasureFactor, Realization, evaluate, factorize, monte_carlo_mse,
                       sample_ensemble, sample_path)
from .spectral import (KernelFunction, ProcessModel, SpectralMeasure, b2_sup, constant_model,
                       covariance, covariance_mixed_deriv, load_model, reference_model,
                       save_model, total_variation)

__version__ = "0.1.0"
