"""Exception hierarchy.

Every error raised on invalid input derives from :class:`OpExtError`, which
is itself a ``ValueError``; the CLI maps all of them to exit code 2.
"""


class OpExtError(ValueError):
    """Base class for all input-validation failures."""


class NonHermitian(OpExtError):
    pass


class NotPSD(OpExtError):
    pass


class NotPD(OpExtError):
    pass


class NotContraction(OpExtError):
    pass


class SingularShift(OpExtError):
    """-1 is (numerically) an eigenvalue, so I + A is not invertible."""


class DimensionMismatch(OpExtError):
    pass


class Infeasible(OpExtError):
    pass


class KernelMismatch(OpExtError):
    pass


class InconsistentHole(OpExtError):
    pass


class NotDualPairContractions(OpExtError):
    pass


class FactorInconsistent(OpExtError):
    pass


class BlockMismatch(OpExtError):
    pass


class NotSymmetricPair(OpExtError):
    pass


class NotProperPair(OpExtError):
    pass


class NotSymmetricColumn(OpExtError):
    pass


class BelowCriticalAngle(OpExtError):
    pass


class InconsistentQ(OpExtError):
    """Q = D_{V*}^+ (I - VU) D_U^+ does not reproduce I - VU (unbounded Q_0)."""


class NotInPhiZeroClass(OpExtError):
    pass


class NotInLoone(OpExtError):
    pass


class NotInCphi(OpExtError):
    pass


class NotInClass(OpExtError):
    pass


class H11NotPSD(OpExtError):
    pass


class RangeViolation(OpExtError):
    pass


class FactorsInconsistent(OpExtError):
    pass
