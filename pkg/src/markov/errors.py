"""
Error Types

Exceptions raised by the chain, spectral, bound and simulation modules.

Two families map onto CLI exit codes:
  - InputError     (exit 1): malformed or out-of-domain input
  - NumericalError (exit 2): the input is well formed but the numerics fail
                             (no spectral gap, singular solve, ...)
"""


class MarkovBoundsError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(MarkovBoundsError):
    """Invalid or out-of-domain input."""

    exit_code = 1


class NumericalError(MarkovBoundsError):
    """A numerical procedure could not produce a trustworthy result."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Input errors
# ---------------------------------------------------------------------------
class NotSquare(InputError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"Transition matrix must be square, got shape {self.shape}")


class NegativeEntry(InputError):
    def __init__(self, row: int, col: int, value: float = None):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"Negative transition probability at ({row}, {col}): {value}")


class RowSumViolation(InputError):
    def __init__(self, row: int, total: float):
        self.row = row
        self.total = total
        super().__init__(f"Row {row} sums to {total!r}, expected 1")


class BoundTooSmall(InputError):
    def __init__(self, c: float, required: float):
        self.c = c
        self.required = required
        super().__init__(f"Declared bound c={c} is below max|f - pi(f)| = {required}")


class OutOfBound(InputError):
    def __init__(self, value: float, c: float):
        self.value = value
        self.c = c
        super().__init__(f"Value {value} exceeds bound c={c}")


class OutOfRange(InputError):
    def __init__(self, t: float, upper: float):
        self.t = t
        self.upper = upper
        super().__init__(f"t={t} outside admissible range [0, {upper})")


class DomainError(InputError):
    pass


class OrderTooHigh(InputError):
    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(f"Kato order {order} exceeds cap {cap}")


class NotReversible(InputError):
    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"Chain is not reversible (detailed-balance defect {defect:.3e})")


class NegativeLambdaPlus(InputError):
    def __init__(self, lambda_plus: float):
        self.lambda_plus = lambda_plus
        super().__init__(f"Requires lambda_plus >= 0, got {lambda_plus}")


class TooLarge(InputError):
    def __init__(self, n_states: int, n: int):
        self.n_states = n_states
        self.n = n
        super().__init__(
            f"Exact enumeration of {n_states}^{n} paths exceeds the work cap"
        )


class ParseError(InputError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{reason}")


class DeclaredStationaryMismatch(InputError):
    def __init__(self, max_diff: float):
        self.max_diff = max_diff
        super().__init__(
            f"Declared pi differs from the computed stationary distribution by {max_diff:.3e}"
        )


# ---------------------------------------------------------------------------
# Numerical errors
# ---------------------------------------------------------------------------
class NonUniqueStationary(NumericalError):
    def __init__(self, dimension: int):
        self.dimension = dimension
        super().__init__(
            f"Stationary distribution is not unique (eigenvalue-1 eigenspace has dimension {dimension})"
        )


class DegenerateSupport(NumericalError):
    def __init__(self, state: int, mass: float):
        self.state = state
        self.mass = mass
        super().__init__(f"Stationary mass at state {state} is {mass:.3e}, below support floor")


class EigensolverFailure(NumericalError):
    pass


class NoGap(NumericalError):
    def __init__(self, gap_param: float):
        self.gap_param = gap_param
        super().__init__(f"No spectral gap (gap parameter {gap_param})")


class SingularSolve(NumericalError):
    pass


class NonConcaveDetected(NumericalError):
    pass
