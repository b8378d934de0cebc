"""Exception and warning types shared across the package."""


class DcfError(Exception):
    """Base class for library errors."""


class TruncationCapExceeded(DcfError):
    """The series tail bound was not met before the hard cap on terms."""

    def __init__(self, alpha_mod, tol, hard_cap, tail):
        self.alpha_mod = alpha_mod
        self.tol = tol
        self.hard_cap = hard_cap
        self.tail = tail
        super().__init__(
            f"|alpha|={alpha_mod}: relative tail {tail:.3e} after {hard_cap} terms "
            f"exceeds tol={tol:.1e}"
        )


class TruncationInsufficient(DcfError):
    """An explicit truncation order is too short for the requested tolerance."""


class GridMismatch(DcfError, ValueError):
    """A sampled profile and a quadrature rule do not share abscissae."""


class SeriesMismatch(DcfError):
    """A closed-form series disagrees with its independent route."""

    def __init__(self, message, deviation, tolerance):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(f"{message}: deviation {deviation:.3e} > {tolerance:.1e}")


class NegativeVariance(DcfError):
    """A computed variance came out negative beyond rounding."""


class NonScalarCommutator(DcfError):
    """A commutator acting on a basis state did not return a multiple of it."""


class GridSupportWarning(UserWarning):
    """More than the allowed fraction of a state's norm lies outside the grid."""
