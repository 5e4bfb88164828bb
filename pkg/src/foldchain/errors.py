"""Domain error taxonomy shared across the package.

Every error raised on purpose by foldchain derives from FoldchainError so
callers can catch the whole family at once.  The CLI maps these onto its
exit-code table; the HTTP service mirrors the same codes in its error body.
"""


class FoldchainError(Exception):
    """Base class for all foldchain domain errors."""


# ----------------------------------------------------------------- geometry

class SelfIntersection(FoldchainError):
    """A polyline crosses or touches itself."""


class EmptyStrip(FoldchainError):
    """An operation that needs at least one strip element got none."""


class OutOfWorkArea(FoldchainError):
    """A walk left the configured rectangular work area."""


# ------------------------------------------------------------------ planner

class NotCoTriangular(FoldchainError):
    """Two lattice edges do not border one common triangle."""


class EmptyPlan(FoldchainError):
    """The curve crosses fewer than two lattice edges; nothing to fold."""


class ChainTooShort(FoldchainError):
    """The plan needs more particles than the bound chain provides."""


class AnchorMismatch(FoldchainError):
    """An explicit anchor disagrees with the first planned triangle."""


# ---------------------------------------------------------------------- bus

class BusInPowerMode(FoldchainError):
    """Communication attempted while the commutator supplies power."""


class MasterDesynced(FoldchainError):
    """The master lost slave synchronization and has not reset yet."""


class NoSuchNode(FoldchainError):
    """A ROM id is not attached to the bus (or the node is dead)."""


class OvervoltageDamage(FoldchainError):
    """Supply exceeded the absolute maximum; affected nodes are dead."""


class NotAChain(FoldchainError):
    """Localization cannot order the nodes into one unbroken chain."""


class NoSuchParticle(FoldchainError):
    """A particle index is outside the localized chain."""


class PolarityConflict(FoldchainError):
    """Simultaneous strap selections demand both polarities of one node."""


class NotLocalized(FoldchainError):
    """A chain-level operation ran before localization fixed the order."""


# ------------------------------------------------------------------ control

class UnbalancedChains(FoldchainError):
    """Multi-chain schedule cannot keep deforming counts equal per round."""


# -------------------------------------------------------------------- files

class SchemaError(FoldchainError):
    """An input document does not match its expected JSON shape."""
