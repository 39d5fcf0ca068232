"""Exception hierarchy shared by all cmcsurf modules."""


class CMCError(Exception):
    """Base class for every numerical failure raised by cmcsurf."""


class NoPeriodicSolution(CMCError):
    """The energy constant does not admit a nondegenerate periodic profile."""


class BelowThreshold(NoPeriodicSolution):
    """A closed-form routine was called below its existence threshold."""


class HyperbolicUnbounded(NoPeriodicSolution):
    """Hyperbolic profiles with H <= 1 are not periodic."""


class QuadratureFailure(CMCError):
    pass


class Infeasible(CMCError):
    """The requested rotation number lies outside the attainable range."""


class NoCrossing(CMCError):
    pass


class EmptyInterval(CMCError):
    pass


class NoRoot(CMCError):
    pass


class NotClosed(CMCError):
    pass


class PoleCollision(CMCError):
    pass


class NotMinimal(CMCError):
    pass
