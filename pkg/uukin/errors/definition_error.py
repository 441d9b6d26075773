"""
Error definitions for uukin.

Every failure a scenario can hit is a ``KineticError`` carrying an
``ErrorStruct`` (message, code, extensions) and a level. Fatal errors are
raised; warnings are collected in result objects and reported in run records.
The error code decides the process exit status of the CLI.
"""

from typing import Optional, Dict, Any, List, Union
from dataclasses import dataclass
from enum import IntEnum


class ErrorLevel(IntEnum):
    """Error severity levels"""
    LEVEL_WARNING = 0  # reported, execution continues
    LEVEL_FATAL = 1    # raised, execution stops


LEVEL_WARNING = ErrorLevel.LEVEL_WARNING
LEVEL_FATAL = ErrorLevel.LEVEL_FATAL

ExtensionError = Dict[str, Any]

# Codes and the exit status each one maps to
CODE_DOMAIN = "DOMAIN"
CODE_CONFIG = "CONFIG"
CODE_NUMERICAL = "NUMERICAL"
CODE_RESOLUTION = "RESOLUTION"
CODE_FIT_WINDOW = "FIT_WINDOW"
CODE_CAPACITY = "CAPACITY"
CODE_WARNING = "WARNING"

EXIT_CODES: Dict[str, int] = {
    CODE_DOMAIN: 2,
    CODE_CONFIG: 2,
    CODE_NUMERICAL: 3,
    CODE_RESOLUTION: 3,
    CODE_FIT_WINDOW: 3,
    CODE_CAPACITY: 4,
}


@dataclass
class ErrorStruct:
    """Serializable error payload, written verbatim into run records."""
    message: str
    code: str = CODE_WARNING
    extensions: Optional[ExtensionError] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"message": self.message, "code": self.code}
        if self.extensions:
            result["extensions"] = self.extensions
        return result


class KineticError(Exception):
    """
    Base class for every uukin error.

    Holds the ``ErrorStruct`` and the level so callers can either raise it
    (fatal) or keep it in an ``ErrorList`` (warning). A plain message gets
    the class ``code``, so ``raise FitWindowError("...")`` exits with 3.
    """

    code: str = CODE_DOMAIN

    def __init__(self, error_struct: Union[ErrorStruct, str], level: ErrorLevel = LEVEL_FATAL):
        if isinstance(error_struct, str):
            error_struct = ErrorStruct(error_struct, self.code, _set_extension(None, level, self.code))
        super().__init__(error_struct.message)
        self._error_struct = error_struct
        self._level = level

    def error(self) -> ErrorStruct:
        return self._error_struct

    def error_level(self) -> ErrorLevel:
        return self._level

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self._error_struct.code, 1)

    def __str__(self) -> str:
        return self._error_struct.message

    def __repr__(self) -> str:
        level_name = "WARNING" if self._level == LEVEL_WARNING else "FATAL"
        return f"{level_name}[{self._error_struct.code}]: {self._error_struct.message}"


class Warning(KineticError):
    """Non-fatal condition; collected, never raised by the library."""

    code = CODE_WARNING

    def __init__(self, error_struct: Union[ErrorStruct, str]):
        super().__init__(error_struct, LEVEL_WARNING)


class DomainError(KineticError):
    """Input outside the mathematical domain of an operation."""
    code = CODE_DOMAIN


class ConfigError(DomainError):
    """Invalid run configuration; ``extensions['errors']`` lists every issue."""
    code = CODE_CONFIG

    @property
    def issues(self) -> List[Dict[str, Any]]:
        return (self.error().extensions or {}).get("errors", [])


class NumericalError(KineticError):
    """Integrator or quadrature failure (stiffness, non-finite values)."""
    code = CODE_NUMERICAL


class ResolutionError(NumericalError):
    """A grid or history cannot resolve what was asked of it."""
    code = CODE_RESOLUTION


class FitWindowError(NumericalError):
    """Fit windows are empty or do not overlap."""
    code = CODE_FIT_WINDOW


class CapacityError(KineticError):
    """Requested problem size exceeds the configured memory budget."""
    code = CODE_CAPACITY


ErrorList = List[KineticError]

_BY_CODE = {
    cls.code: cls
    for cls in (DomainError, ConfigError, NumericalError, ResolutionError, FitWindowError, CapacityError)
}


def _set_extension(
    extensions: Optional[ExtensionError],
    err_level: ErrorLevel,
    code: str
) -> ExtensionError:
    if extensions is None:
        extensions = {}
    extensions.setdefault("code", code)
    extensions["level"] = "warning" if err_level == LEVEL_WARNING else "fatal"
    return extensions


@dataclass
class ErrorDescriptor:
    """Describes an error with message, code and level"""
    message: str
    code: str
    level: ErrorLevel


def new_error(
    err: Optional[ErrorDescriptor] = None,
    extensions: Optional[ExtensionError] = None,
    message: Optional[str] = None,
    code: Optional[str] = None,
    level: Optional[ErrorLevel] = None
) -> KineticError:
    """
    Create a typed error.

    Usage:
    1. With ErrorDescriptor: new_error(err=descriptor, extensions={...})
    2. With message and code: new_error(message="...", code=CODE_NUMERICAL)

    Fatal levels pick the subclass registered for ``code``; warnings are
    always ``Warning`` instances.
    """
    if err is not None:
        final_message, final_code, final_level = err.message, err.code, err.level
    else:
        if message is None:
            raise ValueError("Either 'err' or 'message' must be provided")
        final_message = message
        final_code = code or CODE_DOMAIN
        final_level = LEVEL_FATAL if level is None else level

    extensions = _set_extension(extensions, final_level, final_code)
    error_struct = ErrorStruct(message=final_message, code=final_code, extensions=extensions)

    if final_level == LEVEL_WARNING:
        return Warning(error_struct)
    return _BY_CODE.get(final_code, KineticError)(error_struct, LEVEL_FATAL)


def new_warning(
    message: Optional[str] = None,
    extensions: Optional[ExtensionError] = None,
    code: str = CODE_WARNING,
) -> Warning:
    """Create a Warning to be appended to a result's warning list."""
    if message is None:
        raise ValueError("'message' must be provided")
    return new_error(message=message, code=code, extensions=extensions, level=LEVEL_WARNING)


def new_fatal(
    message: Optional[str] = None,
    extensions: Optional[ExtensionError] = None,
    code: str = CODE_DOMAIN,
    err: Optional[ErrorDescriptor] = None,
) -> KineticError:
    """
    Create a fatal error ready to ``raise``.

    Example:
        raise new_fatal("mu must be negative", {"mu": mu})
        raise new_fatal("step size underflow", code=CODE_NUMERICAL)
    """
    if err is not None:
        return new_error(err=err, extensions=extensions)
    if message is None:
        raise ValueError("Either 'err' or 'message' must be provided")
    return new_error(message=message, code=code, extensions=extensions, level=LEVEL_FATAL)


def get_errors(error_list: ErrorList) -> List[Dict[str, Any]]:
    """Convert an error list to plain dicts for JSON records."""
    if not error_list:
        return []
    return [err.error().to_dict() for err in error_list]
