"""Exception hierarchy shared by every quadlink module."""


class QuadlinkError(Exception):
    """Base class for all errors raised by this package."""


# vehicle model
class NegativeThrust(QuadlinkError):
    pass


class GimbalLock(QuadlinkError):
    pass


class Degenerate(QuadlinkError):
    """Y-X-Z angle extraction near |roll| = pi/2."""


# trim
class NoRoot(QuadlinkError):
    pass


class RankDeficient(QuadlinkError):
    pass


class Infeasible(QuadlinkError):
    pass


class ScheduleError(QuadlinkError):
    pass


# control synthesis / allocation
class NonFinite(QuadlinkError):
    pass


class NotStabilizable(QuadlinkError):
    pass


class Singular(QuadlinkError):
    pass


class NoConvergence(QuadlinkError):
    pass


class AllocationError(QuadlinkError):
    """Wrench request that the selected allocation mode cannot represent."""


# simulation
class Diverged(QuadlinkError):
    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


class OutOfRange(QuadlinkError):
    pass


# configuration
class ParseError(QuadlinkError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class ValidationError(QuadlinkError):
    """Aggregates every violated invariant of a configuration."""

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        lines = [f"{key}: {msg}" for key, msg in self.violations]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))

    @property
    def keys(self) -> list[str]:
        return [key for key, _ in self.violations]
