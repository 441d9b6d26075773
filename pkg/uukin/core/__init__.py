"""
Physical parameters, grids, distributions and initial data.
"""

from .params import PhysicalParams, NonDimParams, nondimensionalize, HBAR, K_B
from .grid import RadialGrid, SpacingEnum
from .distribution import DistributionIso
from .interpolation import InterpolationEnum, bracket, reconstruct, entropy_variable
from .initial import ThetaProfile, ThetaEnum, initial_bose
from .workers import worker_count, ordered_map, chunk_ranges, THREADS_ENV

__all__ = [
    'PhysicalParams',
    'NonDimParams',
    'nondimensionalize',
    'HBAR',
    'K_B',
    'RadialGrid',
    'SpacingEnum',
    'DistributionIso',
    'InterpolationEnum',
    'bracket',
    'reconstruct',
    'entropy_variable',
    'ThetaProfile',
    'ThetaEnum',
    'initial_bose',
    'worker_count',
    'ordered_map',
    'chunk_ranges',
    'THREADS_ENV',
]
