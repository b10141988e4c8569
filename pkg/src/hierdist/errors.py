"""Exception types shared across the toolkit.

Graph construction raises eagerly and carries a witness (offending edge,
cycle path, line number) so diagnostics point at the bad input rather
than at the traversal that tripped over it later.
"""

from __future__ import annotations


class HierdistError(Exception):
    """Base class for all toolkit errors."""


class GraphValidationError(HierdistError):
    """Base class for errors raised while validating a hierarchy graph."""


class CycleDetected(GraphValidationError):
    def __init__(self, path: list[int]):
        self.path = path
        chain = " -> ".join(str(c) for c in path)
        super().__init__(f"subsumption edges form a cycle: {chain}")


class SelfEdge(GraphValidationError):
    def __init__(self, concept: int):
        self.concept = concept
        super().__init__(f"concept {concept} lists itself as a parent")


class DanglingEdge(GraphValidationError):
    def __init__(self, edge: tuple[int, int], missing: int):
        self.edge = edge
        self.missing = missing
        super().__init__(
            f"edge {edge[0]} -> {edge[1]} references unknown concept {missing}"
        )


class UnknownConcept(HierdistError):
    def __init__(self, concept: int):
        self.concept = concept
        super().__init__(f"concept {concept} is not in the graph")


class OutOfFocus(HierdistError):
    def __init__(self, concept: int, focus_root: int):
        self.concept = concept
        self.focus_root = focus_root
        super().__init__(
            f"concept {concept} is not in the focus subhierarchy rooted at {focus_root}"
        )


class NoCommonAncestor(HierdistError):
    """Two in-focus concepts share no ancestor inside the focus view.

    Unreachable when the view includes its root; possible for strict
    (root-exclusive) views, where paths through the root are forbidden.
    """

    def __init__(self, x: int, y: int):
        self.x = x
        self.y = y
        super().__init__(f"concepts {x} and {y} have no common ancestor in focus")


class MalformedLine(HierdistError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class DuplicateRecord(HierdistError):
    def __init__(self, example_id: str, coder_id: str):
        self.example_id = example_id
        self.coder_id = coder_id
        super().__init__(
            f"duplicate annotation for example {example_id!r} by coder {coder_id!r}"
        )


class UnknownCoder(HierdistError):
    def __init__(self, coder_id: str):
        self.coder_id = coder_id
        super().__init__(f"coder {coder_id!r} does not appear in the annotation set")


class MissingRating(HierdistError):
    def __init__(self, example_id: str, coder_id: str | None = None):
        self.example_id = example_id
        self.coder_id = coder_id
        suffix = f" for coder {coder_id!r}" if coder_id else ""
        super().__init__(f"example {example_id!r} has no rating{suffix}")


class InvalidThresholds(HierdistError):
    def __init__(self, reason: str):
        super().__init__(f"invalid distance-band thresholds: {reason}")


class IngestIOError(HierdistError):
    def __init__(self, path: str, cause: OSError):
        self.path = path
        self.cause = cause
        super().__init__(f"cannot read {path}: {cause}")


class ConfigError(HierdistError):
    """Raised when a report run configuration is missing or inconsistent."""
