"""Exception hierarchy shared by all blockflow modules."""

from __future__ import annotations


class BlockflowError(Exception):
    """Base class for every error raised by this package."""


class InvalidNetwork(BlockflowError):
    """Network is structurally malformed or violates a solver precondition."""


class DisconnectedNetwork(InvalidNetwork):
    pass


class PartitionError(BlockflowError):
    """A block/cut partition is invalid for the network it describes."""


class SlacksSpanBlocks(BlockflowError):
    """Slack junctions are spread over more than one generalized block."""


class DimensionMismatch(BlockflowError):
    pass


class InconsistentBlock(BlockflowError):
    pass


class SingularJacobian(BlockflowError):
    pass


class NonConvergence(BlockflowError):
    """Newton iteration hit ``max_iter`` without meeting the tolerance.

    ``trace`` holds the scaled residual inf-norm at every iterate.
    ``block_id`` and ``level`` are filled in by the hierarchical driver.
    """

    def __init__(self, message, trace=(), residual=float("nan"), block_id=None, level=None):
        super().__init__(message)
        self.trace = list(trace)
        self.residual = residual
        self.block_id = block_id
        self.level = level

    def __str__(self):
        msg = super().__str__()
        where = []
        if self.block_id is not None:
            where.append(f"block {self.block_id}")
        if self.level is not None:
            where.append(f"level {self.level}")
        if where:
            msg = f"{msg} ({', '.join(where)})"
        return msg


class DocumentError(BlockflowError):
    """Parse error in an input document; ``location`` names the field or line."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
