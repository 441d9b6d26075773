"""
Configuration, scenario runner and result files.
"""

from .config import RunConfig, parse_config, parse_yaml, load_config, SCHEMA, DEFAULTS
from .config_scenario_enum import ScenarioEnum
from .output import RunRecord, TrajectorySink, emit_snapshot, emit_table, read_snapshot, read_index
from .runner import run, fit_index

__all__ = [
    'RunConfig',
    'parse_config',
    'parse_yaml',
    'load_config',
    'SCHEMA',
    'DEFAULTS',
    'ScenarioEnum',
    'RunRecord',
    'TrajectorySink',
    'emit_snapshot',
    'emit_table',
    'read_snapshot',
    'read_index',
    'run',
    'fit_index',
]
