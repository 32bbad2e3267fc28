"""Exception types shared across the toolkit."""


class SketchlabError(Exception):
    """Base class for all toolkit errors."""


class CyclicPresentation(SketchlabError):
    """Acyclic presentation mode was requested but the generator graph has a cycle."""


class InconsistentTables(SketchlabError):
    """Explicit category tables violate identity or associativity laws."""


class RelationTypeMismatch(SketchlabError):
    """A relation equates two paths with different endpoints."""


class SizeBudgetExceeded(SketchlabError):
    """An enumeration or constructed object grew past the configured budget."""


class DomainMismatch(SketchlabError):
    """Functor composition with non-matching domain/codomain."""


class FrameMismatch(SketchlabError):
    """Natural transformations whose functors do not share dom/cod frames."""


class NonEnumerableDomain(SketchlabError):
    """A check requires enumerating a generated (intensional) spec family."""


class NonEnumerableSource(SketchlabError):
    """A minimal-structure source carries a non-enumerable spec family."""


class NotACone(SketchlabError):
    """The supplied legs do not commute with the diagram."""


class NotIdempotent(SketchlabError):
    """Splitting was requested for a non-idempotent endomorphism."""


class NotEquivalence(SketchlabError):
    """The 2-cell supplied with an idempotent is not an invertible equivalence datum."""


class NotLex(SketchlabError):
    """site construction: the supplied cones are not finite-limit cones."""


class ParseError(SketchlabError):
    """Sketch DSL syntax error, with position information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ResolutionError(SketchlabError):
    """A name in a sketch document does not resolve."""


class IsoFailure(SketchlabError):
    """A claimed isomorphism of hom-categories failed to verify."""
