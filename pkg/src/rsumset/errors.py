"""Exception hierarchy shared across the package."""

from __future__ import annotations


class RsumsetError(Exception):
    """Base class for all library errors."""


class GroupDefinitionError(RsumsetError, ValueError):
    """A table or document does not define a group.

    ``kind`` is one of parse, shape, range, latin, identity, inverse,
    associativity; ``witness`` is an index triple pinpointing the failure.
    """

    def __init__(self, message: str, *, kind: str, witness: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class OrderCapError(RsumsetError, ValueError):
    """Construction or enumeration would exceed a configured size cap."""


class GroupMismatchError(RsumsetError, ValueError):
    """Operands belong to different groups."""


class NotASubgroupError(RsumsetError, ValueError):
    """A subset passed as a (normal) subgroup is not one."""


class NotAnAutomorphismError(RsumsetError, ValueError):
    pass


class PreconditionError(RsumsetError, ValueError):
    """A theorem or lemma hypothesis required by the caller does not hold."""


class SearchFailure(RsumsetError, RuntimeError):
    """A search that is guaranteed to succeed came back empty (indicates a bug)."""
