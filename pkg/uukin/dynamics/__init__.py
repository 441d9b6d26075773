"""
Time integration to blow-up and self-similar analysis.
"""

from .stepper import StepController, Trajectory, evolve, DEFAULT_ALPHA
from .blowup import (
    BlowupEstimate,
    SelfSimilarFit,
    SelfSimilarProfile,
    CharacteristicEnum,
    detect_blowup,
    characteristic_momentum,
    fit_selfsimilar,
    extract_profile,
    ansatz_trajectory,
    ansatz_profile,
    collapse_warnings,
)

__all__ = [
    'StepController',
    'Trajectory',
    'evolve',
    'DEFAULT_ALPHA',
    'BlowupEstimate',
    'SelfSimilarFit',
    'SelfSimilarProfile',
    'CharacteristicEnum',
    'detect_blowup',
    'characteristic_momentum',
    'fit_selfsimilar',
    'extract_profile',
    'ansatz_trajectory',
    'ansatz_profile',
    'collapse_warnings',
]
