"""Exception hierarchy shared by all modules."""


class LimTowerError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(LimTowerError, ValueError):
    pass


class HomError(LimTowerError, ValueError):
    """A matrix does not define a homomorphism between the given groups."""


class ElementError(LimTowerError, ValueError):
    pass


class TooLarge(LimTowerError):
    """An enumeration would exceed its configured size bound."""


class TowerError(LimTowerError, ValueError):
    pass


class Unsupported(LimTowerError):
    pass


class DegreeError(LimTowerError, ValueError):
    pass


class NotACycle(LimTowerError, ValueError):
    pass


class LevelError(LimTowerError, IndexError):
    pass


class NoLift(LimTowerError):
    """A chain has no preimage under a structure map."""


class NotCompatible(LimTowerError, ValueError):
    pass


class NotInKernel(LimTowerError, ValueError):
    """Some level of a cycle recipe is not a boundary."""


class WitnessInvalid(LimTowerError, ValueError):
    pass


class NotEquivalence(LimTowerError, ValueError):
    pass


class HypothesisViolated(LimTowerError):
    """A tower map is not degreewise surjective where a fibration is required."""


class FormatError(LimTowerError, ValueError):
    """A tower or data document is malformed; the message locates the problem."""
