"""Exception types raised across the package."""


class ConflictNetError(Exception):
    """Base class for all conflictnet errors."""


class MalformedHeader(ConflictNetError):
    """A mapped CSV column is absent from the file header."""


class EmptyName(ConflictNetError):
    """An actor name is empty after trimming."""


class MissingPrincipal(ConflictNetError):
    """An event lacks an attacker or a target, so no ties can be read off it."""


class DegenerateGraph(ConflictNetError):
    """The layer has too few participating nodes for the requested metric."""


class NoConvergence(ConflictNetError):
    """Power iteration exceeded its iteration cap before meeting tolerance."""


class NoTies(ConflictNetError):
    """The selected layer contains no ties."""


class EmptyAfterIsolateRemoval(ConflictNetError):
    """Every node was an isolate; no matrix is left to decompose."""


class DimensionTooLarge(ConflictNetError):
    """Requested embedding dimension exceeds what the spectrum provides."""


class EigFailure(ConflictNetError):
    """Eigendecomposition residual exceeded tolerance."""


class MissingNode(ConflictNetError):
    """A non-isolate node of the graph has no coordinates in the embedding."""


class EmptyBorderSet(ConflictNetError):
    """Border geometry is required but contains no polylines."""


class ChainTooShort(ConflictNetError):
    """Scenario classification needs at least three located events."""


class EmptyChain(ConflictNetError):
    """GeoJSON export needs at least one located event."""


class SchemaMismatch(ConflictNetError):
    """An input document declares an unsupported schema_version."""
