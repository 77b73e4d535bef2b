"""Exception hierarchy for the numerical pipeline.

Validation errors (bad inputs) derive from InputError; failures detected
during a computation (singular systems, unstable clusterings, rejected
spectral data) derive from NumericalError.  The CLI maps InputError to
exit code 1 and NumericalError to exit code 2.
"""


class DiracInvError(Exception):
    """Base class for all library errors."""


class InputError(DiracInvError, ValueError):
    """Invalid argument or malformed input data."""


class NumericalError(DiracInvError, RuntimeError):
    """A computation failed or an input was rejected on numerical grounds."""


class NotUnitary(InputError):
    """Matrix is not unitary within tolerance."""


class DegenerateClustering(NumericalError):
    """Two eigenphase clusters are too close to be separated reliably."""


class AmbiguousRank(NumericalError):
    """An eigenvalue sits in the ambiguous band around 1/2 when rounding to a projector."""


class Singular(NumericalError):
    """Matrix is numerically singular."""


class NotEigenvalue(NumericalError):
    """The boundary-condition matrix has trivial kernel at the given point."""


class SingularAtEigenvalue(NumericalError):
    """The characteristic matrix is singular; the Weyl function has a pole here."""


class ScanTooCoarse(NumericalError):
    """Two refined roots collapsed although they came from distinct scan minima."""


class ContourTouchesPole(NumericalError):
    """The residue contour passes too close to a pole of the Weyl function."""


class AsymmetricGrid(InputError):
    """A symmetric grid around 0 was required."""


class NoConsistentSign(NumericalError):
    """Neither sign choice reproduces the reference spectra; implementation bug."""


class AntiCommutationViolated(NumericalError):
    """Reconstructed potential has nonzero diagonal blocks; data is not in the reducible class."""


class NotAccelerant(NumericalError):
    """The kernel fails the accelerant criterion; the integral equation is not uniquely solvable."""


class WindowUnderflow(InputError):
    """Spectral data does not cover all windows requested for the truncated sums."""


class ClusterInstability(NumericalError):
    """Eigenvalue clusters modulo pi are too noisy to estimate the boundary matrix."""


class CrossCheckFailed(NumericalError):
    """Independent recomputation disagrees beyond the allowed tolerance."""
