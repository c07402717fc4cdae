"""Exceptions shared across the package.

Every failure mode that callers are expected to handle gets its own class;
plain ValueError is reserved for programming errors (bad argument shapes,
violated preconditions that no caller should ever hit on purpose).
"""


class EllnetError(Exception):
    """Base class for all package-specific errors."""


class NotOnCurveError(EllnetError):
    """A claimed point does not satisfy the curve equation.

    Carries the nonzero residual of the Weierstrass equation.
    """

    def __init__(self, x, y, residual):
        self.x, self.y, self.residual = x, y, residual
        super().__init__(f"({x}, {y}) is not on the curve (residual {residual})")


class SingularCurveError(EllnetError):
    """An operation that needs a non-singular curve got a singular one."""


class SingularPointError(EllnetError):
    """Group-law input or output is the singular point of a singular cubic."""


class DegenerateSequenceError(EllnetError):
    """Sequence start with W2*W3 = 0 cannot seed a curve construction."""


class NonIntegralModelError(EllnetError):
    """Reduction-theoretic checks need an integral Weierstrass model."""


class DegenerateConfigurationError(EllnetError):
    """Points are dependent, repeated or torsion in a way that kills a net seed."""


class DependentPointsError(DegenerateConfigurationError):
    """A nontrivial integer combination of the points is the identity."""

    def __init__(self, coeffs, msg=None):
        self.coeffs = tuple(coeffs)
        super().__init__(msg or f"points are dependent: {self.coeffs} . P = O")


class TorsionPointError(DegenerateConfigurationError):
    """A point of finite order where infinite order is required."""


class ZeroDivisorError(EllnetError):
    """A net/sequence recurrence needed to divide by a vanishing value."""


class IdentityPointError(EllnetError):
    """The identity point is not a valid input here."""


class IdentityCombinationError(EllnetError):
    """v . P is the identity, so it has no affine denominator."""


class LatticeElementError(EllnetError):
    """The multiplicative parameter lies in q^Z (or on the half-period
    boundary), so it has no normalized representative."""


class PrecisionExhaustedError(EllnetError):
    """A floor/sign guard could not be resolved at the maximum precision."""


class BadProbeError(EllnetError):
    """Calibration probe has an even twist exponent or a zero net value.

    ``suggestion`` holds the next candidate probe vector.
    """

    def __init__(self, probe, reason, suggestion=None):
        self.probe = tuple(probe)
        self.suggestion = tuple(suggestion) if suggestion is not None else None
        msg = f"bad calibration probe {self.probe}: {reason}"
        if suggestion is not None:
            msg += f" (try {self.suggestion})"
        super().__init__(msg)


class HypothesisViolatedError(EllnetError):
    """A construction was requested whose reduction hypothesis fails."""


class FormViolationError(EllnetError):
    """Curve is not of the special (0,0)-anchored shape required here."""


class ModelError(EllnetError):
    """Denominators of a point do not have the (D^2, D^3) shape an
    integral model guarantees; the model is probably not minimal/integral."""


class ParseError(EllnetError):
    """Malformed textual input; carries line and column."""

    def __init__(self, msg, line=None, column=None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(msg + where)
