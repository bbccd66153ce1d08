"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates the documented preconditions of an operation."""


class NotFaithfulError(InvalidInputError):
    """A reference state is not invertible (minimum eigenvalue below the floor)."""


class ConsistencyError(RuntimeError):
    """An internal identity that must hold by construction was violated."""


class ReplicationFailure(RuntimeError):
    """A reproduced sign claim failed; ``value`` carries the offending number."""

    def __init__(self, claim: str, value: float):
        super().__init__(f"{claim}: got {value!r}")
        self.claim = claim
        self.value = value
