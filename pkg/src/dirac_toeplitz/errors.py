"""Exception hierarchy shared by every module."""


class DiracToeplitzError(Exception):
    """Base class for all library errors."""


class ValidationError(DiracToeplitzError):
    """Input data violates a mathematical precondition."""


class NumericalError(DiracToeplitzError):
    """A computation broke down numerically (singular pivot, lost positivity)."""


class IllConditionedWarning(UserWarning):
    """Emitted when an operation touches a matrix with very large condition number."""


class ProximityWarning(UserWarning):
    """Emitted when an argument sits close to an excluded point (e.g. zeta = 2i)."""


# numkernel
class NotHermitian(ValidationError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"matrix is not Hermitian (relative residual {residual:.3e})")


class NotPositiveDefinite(ValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-positive pivot at index {index}")


class Singular(NumericalError):
    def __init__(self, msg="matrix is numerically singular"):
        super().__init__(msg)


class NonFiniteEntries(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


# dirac
class NotPD(ValidationError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"C_{k} is not Hermitian positive definite")


class JUnitarityBroken(ValidationError):
    def __init__(self, k, residual):
        self.k = k
        self.residual = residual
        super().__init__(f"C_{k} j C_{k} != j (relative residual {residual:.3e})")


class LambdaZero(ValidationError):
    def __init__(self):
        super().__init__("spectral parameter lambda must be nonzero")


class LambdaAtSingularity(ValidationError):
    def __init__(self, lam):
        self.lam = lam
        super().__init__(f"lambda = {lam} lies in the singular set {{0, i, -i}}")


class LambdaNotInLowerHalfPlane(ValidationError):
    def __init__(self, lam):
        super().__init__(f"lambda = {lam} must satisfy Im(lambda) < 0")


# gbdt
class IdentityResidualTooLarge(ValidationError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"A S0 - S0 A* != i Pi0 j Pi0* (relative residual {residual:.3e})")


class SingularA(ValidationError):
    def __init__(self):
        super().__init__("matrix A of the triple is singular")


class S0NotPD(ValidationError):
    def __init__(self):
        super().__init__("S0 is not Hermitian positive definite")


class LambdaInSpectrum(ValidationError):
    def __init__(self, lam):
        super().__init__(f"lambda = {lam} is (numerically) an eigenvalue of A-tilde")


class CayleySingular(ValidationError):
    def __init__(self):
        super().__init__("i is (numerically) an eigenvalue of A-tilde; the Cayley transform is singular")


# toeplitz / inverse
class InsufficientMoments(ValidationError):
    def __init__(self, needed, available):
        self.needed = needed
        self.available = available
        super().__init__(f"need moments s_0..s_-{needed}, only s_0..s_-{available} available")


class LambdaAtHalfI(ValidationError):
    def __init__(self):
        super().__init__("lambda = i/2 is the eigenvalue of A(N)")


class LambdaMinusI(ValidationError):
    def __init__(self):
        super().__init__("lambda = -i maps onto the eigenvalue of A(N)")


class ResolventSingular(NumericalError):
    def __init__(self, arg):
        self.arg = arg
        super().__init__(f"resolvent is singular at argument {arg}")


class SingularW(NumericalError):
    def __init__(self, k, lam):
        self.k = k
        self.lam = lam
        super().__init__(f"W_{k}({lam}) is numerically singular")


class EvaluatorFailure(NumericalError):
    pass


class AliasingDetected(NumericalError):
    def __init__(self, disagreement):
        self.disagreement = disagreement
        super().__init__(f"two-radius Taylor coefficients disagree by {disagreement:.3e}")


# kernels
class DegeneratePair(ValidationError):
    def __init__(self, lam, mu):
        super().__init__(f"1 + lambda*mu vanishes for lambda={lam}, mu={mu}")


class EqualArguments(ValidationError):
    def __init__(self):
        super().__init__("lambda and mu must differ")


class NotInUpperHalfPlane(ValidationError):
    def __init__(self, z):
        super().__init__(f"argument {z} must lie in the open upper half-plane")


# szego
class RealPole(NumericalError):
    def __init__(self, t):
        super().__init__(f"evaluator is not finite at real point t={t}")


class QuadratureDivergence(NumericalError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"Szego integral diverges (value {value:.3e})")


class DensityNotPositive(ValidationError):
    def __init__(self, t):
        super().__init__(f"density is not strictly positive near t={t}")


class GridTooCoarse(NumericalError):
    def __init__(self, err):
        self.err = err
        super().__init__(f"boundary factorization error {err:.3e} exceeds tolerance; refine the grid")


class QuadratureNotConverged(NumericalError):
    def __init__(self, change):
        self.change = change
        super().__init__(f"grid doubling changed the result by {change:.3e}")


# io
class FormatError(DiracToeplitzError):
    """A data file could not be read or does not follow its documented layout."""
