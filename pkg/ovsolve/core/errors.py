"""
Error taxonomy shared by the numerical core, the CLI and the HTTP routers

Exit codes (CLI):
  2 - ConfigurationError (and pydantic validation / missing files)
  3 - DomainGateError, DomainError
  4 - NumericalError
"""


class OVError(Exception):
    """Base class for every error raised by ovsolve"""
    exit_code = 1


class ConfigurationError(OVError, ValueError):
    """Invalid input data: off-ray poles, duplicate orbit poles, malformed files"""
    exit_code = 2


class DomainGateError(OVError, ValueError):
    """Request outside the modelled regime (t < T_min, the boundary y/t = 0)"""
    exit_code = 3


class DomainError(OVError, ValueError):
    """Argument outside an operation's domain (z = 0, |r| >= 1, z on a cut without a side)"""
    exit_code = 3


class DegenerateDirectionError(DomainError):
    """A pole sits exactly on a critical trajectory Im theta = 0"""


class NumericalError(OVError, ArithmeticError):
    """Numerical failure: singular systems, quadrature or integrator breakdown"""
    exit_code = 4


class NumericalDegeneracyError(NumericalError):
    """Residue linear system is singular or its residual check failed"""


class ReconstructionSingularityError(NumericalError):
    """Vanishing denominator in the x(y, t) reconstruction"""


class SingularProfileError(NumericalError):
    """Vanishing denominator in the closed-form single soliton"""


class CFLViolationError(NumericalError):
    """Time step too large for the explicit integrator"""


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to a CLI exit code

    Args:
        exc: Raised exception

    Returns:
        0 is never returned; 2 validation, 3 domain gate, 4 numerical failure, 1 otherwise
    """
    if isinstance(exc, OVError):
        return exc.exit_code
    # pydantic's ValidationError subclasses ValueError
    if isinstance(exc, (FileNotFoundError, ValueError)):
        return 2
    if isinstance(exc, (ArithmeticError, FloatingPointError)):
        return 4
    return 1
