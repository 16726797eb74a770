"""Exception hierarchy shared by all semcom modules."""


class SemcomError(Exception):
    """Base class for every library error."""


class InvalidParameter(SemcomError):
    """A value is outside its documented domain."""


class ConfigError(SemcomError):
    """An experiment or CLI configuration is malformed."""


# --- space -----------------------------------------------------------------

class PartitionViolation(SemcomError):
    """An element is doubly assigned or unassigned within a category."""


class ProbabilityViolation(SemcomError):
    """Probability mass is negative or does not sum to one."""


class UnknownAttribute(SemcomError):
    """An attribute (or category) name is not declared."""


class DimensionMismatch(SemcomError):
    """Two entities specify different category subsets."""


class NonPositiveThreshold(SemcomError):
    """A similarity threshold must be strictly positive."""


class ZeroMassCondition(SemcomError):
    """Conditioning event has zero probability."""


# --- entropy ---------------------------------------------------------------

class InvalidDistribution(SemcomError):
    """A probability vector fails validation."""


class EmptySpace(SemcomError):
    """A semantic space has no entities."""


class DepthExceeded(SemcomError):
    """Message length exceeds the knowledge-base depth."""


class InconsistentKB(SemcomError):
    """A KB conditional disagrees with the ensemble joint."""


# --- kb --------------------------------------------------------------------

class MissingConditional(SemcomError):
    """The KB lacks a required conditional or substitution entry."""


class PartitionMismatch(SemcomError):
    """A synonym partition does not cover the given support."""


class OverlappingBalls(SemcomError):
    """Similarity balls of a scaling are not pairwise disjoint."""


class UncoveredAttribute(SemcomError):
    """A scaling leaves some source attribute outside every ball."""


class NonPositiveEpsilon(SemcomError):
    """A similarity radius must be strictly positive."""


class AbsolutelyDiscontinuous(SemcomError):
    """A conditional puts mass where the reference marginal has none."""


class GainSingularity(SemcomError):
    """KB information equals source entropy; the gain ratio diverges."""


# --- coding ----------------------------------------------------------------

class UnknownSymbol(SemcomError):
    """Symbol not present in the codebook."""


class UnreachableContext(SemcomError):
    """No conditional sub-book exists for this context path."""


class DecodeFailure(SemcomError):
    """Bits exhausted (or diverged) without completing a codeword."""


class ParityFailure(SemcomError):
    """Parity check detected corruption in a received codeword."""


class SemanticAmbiguityWarning(UserWarning):
    """Merged entities disagree on a specified attribute slot."""
