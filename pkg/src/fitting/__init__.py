"""
Gradient fitting: standardization, PLS backends, component selection and significance.
"""
from .pls import (
    FitReport,
    Gradient,
    PLSModel,
    StandardizationStats,
    StandardizedDesign,
    closed_form_pls1,
    fit_pls,
    pearson,
    r_squared,
    standardize,
)
from .validation import (
    corrected_t_test,
    cross_validate_components,
    fit_record,
    select_k,
    select_k_with_curve,
)

__all__ = [
    'FitReport', 'Gradient', 'PLSModel', 'StandardizationStats', 'StandardizedDesign',
    'closed_form_pls1', 'corrected_t_test', 'cross_validate_components', 'fit_pls', 'fit_record',
    'pearson', 'r_squared', 'select_k', 'select_k_with_curve', 'standardize',
]
