"""Exception hierarchy shared by all modules."""


class YaoWalkError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(YaoWalkError, ValueError):
    pass


class AlphaOutOfRange(YaoWalkError, ValueError):
    """2 * m**alpha reaches n, so the pair-counting term is meaningless."""


class EmptyAlphaRange(YaoWalkError, ValueError):
    pass


class OddSteps(YaoWalkError, ValueError):
    """b == B is unreachable when the walk has an odd number of steps."""


class ValueNotInSupport(YaoWalkError, ValueError):
    pass


class NoConditioningEvents(YaoWalkError, RuntimeError):
    """No trial produced A < B, so the conditional estimate is undefined."""


class ProtocolOrder(YaoWalkError, RuntimeError):
    pass


class ConfigMismatch(YaoWalkError):
    pass


class ChannelClosed(YaoWalkError, ConnectionError):
    pass


class MalformedFrame(YaoWalkError, ValueError):
    pass


class UnknownKind(YaoWalkError, ValueError):
    pass


class VersionMismatch(YaoWalkError, ValueError):
    pass
