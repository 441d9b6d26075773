"""
Error handling for uukin: levels, payloads, typed errors and constructors.
"""

from .definition_error import (
    KineticError,
    ErrorStruct,
    ExtensionError,
    ErrorLevel,
    ErrorList,
    ErrorDescriptor,
    Warning,
    DomainError,
    ConfigError,
    NumericalError,
    ResolutionError,
    FitWindowError,
    CapacityError,
    new_error,
    new_warning,
    new_fatal,
    get_errors,
    LEVEL_WARNING,
    LEVEL_FATAL,
    CODE_DOMAIN,
    CODE_CONFIG,
    CODE_NUMERICAL,
    CODE_RESOLUTION,
    CODE_FIT_WINDOW,
    CODE_CAPACITY,
    CODE_WARNING,
    EXIT_CODES,
)

__all__ = [
    'KineticError',
    'ErrorStruct',
    'ExtensionError',
    'ErrorLevel',
    'ErrorList',
    'ErrorDescriptor',
    'Warning',
    'DomainError',
    'ConfigError',
    'NumericalError',
    'ResolutionError',
    'FitWindowError',
    'CapacityError',
    'new_error',
    'new_warning',
    'new_fatal',
    'get_errors',
    'LEVEL_WARNING',
    'LEVEL_FATAL',
    'CODE_DOMAIN',
    'CODE_CONFIG',
    'CODE_NUMERICAL',
    'CODE_RESOLUTION',
    'CODE_FIT_WINDOW',
    'CODE_CAPACITY',
    'CODE_WARNING',
    'EXIT_CODES',
]
