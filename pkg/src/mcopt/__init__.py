"""Exact multicalibration auditing and loss-minimization experiments at desk scale."""
from .errors import (
    ContractViolationError,
    DomainMismatchError,
    InvalidArgumentError,
    McoptError,
    ResourceLimitError,
    TheoremCheckError,
)

__version__ = "0.1.0"
