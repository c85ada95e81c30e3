"""Exception hierarchy for the package."""


class CVEntanglementError(ValueError):
    """Base class for all errors raised by :mod:`cventangle`."""


class NonSymmetricError(CVEntanglementError):
    pass


class NotPositiveDefiniteError(CVEntanglementError):
    pass


class SingularMatrixError(CVEntanglementError):
    pass


class UnsupportedLossPatternError(CVEntanglementError):
    pass


class EfficiencyOutOfRangeError(CVEntanglementError):
    pass


class WeightOutOfRangeError(CVEntanglementError):
    pass


class EmptySubsetError(CVEntanglementError):
    pass


class IndexOutOfRangeError(CVEntanglementError):
    pass


class InvalidElementError(CVEntanglementError):
    pass


class TooManyModesError(CVEntanglementError):
    pass


class PartitionMismatchError(CVEntanglementError):
    pass


class NotABipartitionError(CVEntanglementError):
    """PPT only applies to partitions into exactly two subsystems."""


class DegenerateHError(CVEntanglementError):
    pass


class OptimizationDidNotConvergeError(CVEntanglementError):
    pass


class NegativeVarianceError(CVEntanglementError):
    pass


class InconsistentPairError(CVEntanglementError):
    pass


class ShapeMismatchError(CVEntanglementError):
    pass


class IncompleteScopeError(CVEntanglementError):
    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(":".join(str(k) for k in key) for key in self.missing[:10])
        super().__init__(f"{len(self.missing)} summary row(s) missing: {shown}")


class ConfigError(CVEntanglementError):
    """Malformed configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None, line=None):
        self.message = message
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
