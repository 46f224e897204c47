"""Exception types raised across the package."""


class LatticeError(ValueError):
    """Invalid lattice size or index."""


class IncompatibleElongations(ValueError):
    """Elongations violate the hexagonal equations."""

    def __init__(self, message, node=None, residual=None):
        super().__init__(message)
        self.node = node
        self.residual = residual


class DegenerateTriangle(ValueError):
    pass


class OverlappingLongEdges(ValueError):
    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class TargetOutsideD(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


class NoRealRotation(ValueError):
    pass


class FractionSumError(ValueError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
