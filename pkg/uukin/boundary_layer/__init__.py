"""
Boundary-layer rescalings and the truncated correlation hierarchy.
"""

from .scales import (
    BETA_DEFAULT,
    BoundaryLayerScales,
    CorrelationMagnitude,
    correlation_onset_time,
    physical_scales,
    correlation_magnitude,
    time_exponent,
    momentum_exponent,
    amplitude_exponent,
)
from .hierarchy import (
    CLOSURE,
    HierarchyState,
    HierarchyRun,
    WignerForm,
    SourceScaling,
    asymptotic_data,
    bl_rhs_truncated,
    evolve_hierarchy,
    wigner_form,
    inverse_wigner,
    asymptotic_wigner,
    source_scaling_study,
)

__all__ = [
    'BETA_DEFAULT',
    'BoundaryLayerScales',
    'CorrelationMagnitude',
    'correlation_onset_time',
    'physical_scales',
    'correlation_magnitude',
    'time_exponent',
    'momentum_exponent',
    'amplitude_exponent',
    'CLOSURE',
    'HierarchyState',
    'HierarchyRun',
    'WignerForm',
    'SourceScaling',
    'asymptotic_data',
    'bl_rhs_truncated',
    'evolve_hierarchy',
    'wigner_form',
    'inverse_wigner',
    'asymptotic_wigner',
    'source_scaling_study',
]
