"""
Exception hierarchy shared by the library and the command line
"""


class MPSError(Exception):
    """Base error; exit_code is what the CLI returns when it escapes"""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ValidationError(MPSError):
    """Invalid user input: shapes, ranges, file contents, flags"""

    exit_code = 2


class NumericalError(MPSError):
    """A well-formed request the numerics cannot honour"""

    exit_code = 3


class NullStateError(NumericalError):
    """The MPS vanishes (Z = 0 or an all-zero dense vector)"""


class DefectiveSpectrumError(NumericalError):
    """Spectral formulas requested on a non-diagonalizable transfer matrix"""


class SingularMatrixError(NumericalError):
    """A matrix that must be invertible is singular"""


class WitnessInconsistencyError(NumericalError):
    """A null basis is not closed under the symmetry it should carry"""
