"""Exception taxonomy shared across the package."""


class QkanError(Exception):
    """Base class for all package errors."""


class ContractViolationError(QkanError, ValueError):
    """An operation was called with incompatible operands (dimension or register mismatch)."""


class DomainError(QkanError, ValueError):
    """A numeric argument is outside its admissible domain (e.g. entries beyond [-1, 1])."""


class ResourceLimitError(QkanError, RuntimeError):
    """A construction would exceed the configured qubit or dense-materialization budget."""

    def __init__(self, message: str, required_qubits: int | None = None):
        super().__init__(message)
        self.required_qubits = required_qubits


class DegenerateOutputError(QkanError, RuntimeError):
    """Post-selection success probability is numerically zero (all activations vanish)."""


class DivergenceError(QkanError, RuntimeError):
    """Training loss exceeded the divergence threshold for too many consecutive iterations."""
