"""Exception hierarchy shared by all fatgraph modules."""


class FatgraphError(Exception):
    """Base class for every error raised by this package."""


class UsageError(FatgraphError):
    """Bad input that a caller can fix (maps to CLI exit code 2)."""


class VerificationError(FatgraphError):
    """A checked invariant failed (maps to CLI exit code 3)."""


class ResourceLimitError(FatgraphError):
    """A sweep or cap was exceeded (maps to CLI exit code 4)."""


# -- parameter validation ---------------------------------------------------

class RejectP(UsageError):
    """Base weight p must lie strictly between 0 and 1."""


class RejectParity(UsageError):
    """Every stage length must be an odd integer >= 3."""


class RejectHeight(UsageError):
    """The rectangle-height recursion became non-positive."""


class RejectEps(UsageError):
    """Planner tolerance must be positive."""


# -- geometry / construction ------------------------------------------------

class LevelMismatch(UsageError):
    """Adjacency and divergence require equal-level cells."""


class OutOfRange(UsageError):
    """Step index outside the configured stages."""


class DepthExceeded(ResourceLimitError):
    """Query goes deeper than the configured stages resolve."""


class Straddle(VerificationError):
    """A cell interior overlaps two region classes.

    Impossible when alignment preconditions hold; raising it means the
    construction itself is broken, which is what the alignment tests probe.
    """


class Unaligned(VerificationError):
    """A weight is not constant on the queried cell (construction bug)."""


class UnalignedRect(UsageError):
    """Exact rectangle mass requires 4-adic aligned corners."""


class SweepTooLarge(ResourceLimitError):
    """Exhaustive sweep would exceed the configured cell limit."""


class CapTooCoarse(ResourceLimitError):
    """Mass enclosure at the given level cap is wider than the tolerance."""


class ResolutionMismatch(UsageError):
    """Heatmap pixel count must divide the 4-adic grid size."""
