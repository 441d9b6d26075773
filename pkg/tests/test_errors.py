"""
Tests para el sistema de manejo de errores y sus códigos de salida
"""

from uukin.errors import (
    CODE_CAPACITY,
    CODE_CONFIG,
    CODE_FIT_WINDOW,
    CODE_NUMERICAL,
    CODE_RESOLUTION,
    LEVEL_FATAL,
    LEVEL_WARNING,
    CapacityError,
    ConfigError,
    DomainError,
    ErrorDescriptor,
    FitWindowError,
    KineticError,
    NumericalError,
    ResolutionError,
    Warning,
    get_errors,
    new_error,
    new_fatal,
    new_warning,
)


def test_warning_creation():
    print("\n🧪 Testing Warning creation...")

    err = new_warning("grid too coarse")
    assert isinstance(err, Warning)
    assert err.error().message == "grid too coarse"
    assert err.error_level() == LEVEL_WARNING
    assert err.error().extensions["level"] == "warning"
    print("  ✅ PASS: new_warning() works")

    err = new_warning("momentum skipped", {"p1": 3.0})
    assert err.error().extensions["p1"] == 3.0
    assert err.error().extensions["code"] == "WARNING"
    print("  ✅ PASS: new_warning() with extensions works")


def test_fatal_creation():
    print("\n🧪 Testing fatal errors by code...")

    err = new_fatal("mu must be negative", {"mu": 0.1})
    assert isinstance(err, DomainError)
    assert err.error_level() == LEVEL_FATAL
    assert err.error().extensions["level"] == "fatal"
    assert err.error().extensions["mu"] == 0.1
    assert err.exit_code == 2
    print("  ✅ PASS: default code is a DomainError")

    expected = {
        CODE_CONFIG: (ConfigError, 2),
        CODE_NUMERICAL: (NumericalError, 3),
        CODE_RESOLUTION: (ResolutionError, 3),
        CODE_FIT_WINDOW: (FitWindowError, 3),
        CODE_CAPACITY: (CapacityError, 4),
    }
    for code, (cls, exit_code) in expected.items():
        err = new_fatal("failure", code=code)
        assert type(err) is cls
        assert err.exit_code == exit_code
    assert isinstance(new_fatal("x", code=CODE_RESOLUTION), NumericalError)
    assert isinstance(new_fatal("x", code=CODE_CONFIG), DomainError)
    print("  ✅ PASS: codes pick the subclass and the exit status")


def test_class_codes():
    print("\n🧪 Testing errors raised from a plain message...")

    for cls, exit_code in ((DomainError, 2), (ConfigError, 2), (NumericalError, 3),
                           (ResolutionError, 3), (FitWindowError, 3), (CapacityError, 4)):
        err = cls("failure")
        assert err.error().code == cls.code
        assert err.error().extensions == {"code": cls.code, "level": "fatal"}
        assert err.exit_code == exit_code
        assert type(new_fatal("failure", code=cls.code)) is cls
    print("  ✅ PASS: the class code is the default code")

    warning = Warning("grid too coarse")
    assert warning.error_level() == LEVEL_WARNING
    assert warning.error().to_dict() == {
        "message": "grid too coarse",
        "code": "WARNING",
        "extensions": {"code": "WARNING", "level": "warning"},
    }
    print("  ✅ PASS: plain warnings")


def test_error_descriptor():
    print("\n🧪 Testing ErrorDescriptor...")

    descriptor = ErrorDescriptor(message="window too short", code=CODE_FIT_WINDOW, level=LEVEL_WARNING)
    err = new_error(descriptor)
    assert isinstance(err, Warning)
    assert err.error().code == CODE_FIT_WINDOW
    print("  ✅ PASS: warning descriptor")

    descriptor = ErrorDescriptor(message="custom failure", code="CUSTOM", level=LEVEL_FATAL)
    err = new_error(descriptor, {"step": 10})
    assert type(err) is KineticError
    assert err.error().extensions["step"] == 10
    assert err.exit_code == 1
    print("  ✅ PASS: unknown codes fall back to KineticError with exit 1")


def test_config_error_issues():
    print("\n🧪 Testing ConfigError issues...")

    issues = [{"line": 3, "key": "grid.n", "reason": "must be ≥ 2"}]
    err = new_fatal("invalid configuration", {"errors": issues}, code=CODE_CONFIG)
    assert err.issues == issues
    assert new_fatal("no issues", code=CODE_CONFIG).issues == []
    print("  ✅ PASS: issues come from extensions['errors']")


def test_error_list():
    print("\n🧪 Testing get_errors...")

    errors = [new_warning("Warning 1"), new_fatal("Fatal 1", code=CODE_NUMERICAL)]
    dicts = get_errors(errors)
    assert [d["message"] for d in dicts] == ["Warning 1", "Fatal 1"]
    assert dicts[0]["extensions"]["level"] == "warning"
    assert dicts[1]["code"] == CODE_NUMERICAL
    assert get_errors([]) == []
    print("  ✅ PASS: get_errors() works")


def test_str_repr():
    print("\n🧪 Testing __str__ and __repr__...")

    warning = new_warning("Test warning")
    fatal = new_fatal("Test fatal", code=CODE_CAPACITY)
    assert str(warning) == "Test warning"
    assert str(fatal) == "Test fatal"
    assert repr(warning) == "WARNING[WARNING]: Test warning"
    assert repr(fatal) == "FATAL[CAPACITY]: Test fatal"
    print("  ✅ PASS: String representations work")

    try:
        raise new_fatal("step size underflow", code=CODE_NUMERICAL)
    except KineticError as e:
        assert e.exit_code == 3
    print("  ✅ PASS: raised errors are caught as KineticError")


if __name__ == "__main__":
    print("=" * 60)
    print("Testing Error System")
    print("=" * 60)

    test_warning_creation()
    test_fatal_creation()
    test_class_codes()
    test_error_descriptor()
    test_config_error_issues()
    test_error_list()
    test_str_repr()

    print("\n" + "=" * 60)
    print("✅ All error system tests passed!")
    print("=" * 60)
