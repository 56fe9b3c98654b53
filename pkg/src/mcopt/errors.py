"""Exception hierarchy.

The CLI maps these onto exit codes: theorem failures exit 1, bad input
exits 2 and resource limits exit 3.
"""


class McoptError(Exception):
    exit_code = 2


class InvalidArgumentError(McoptError, ValueError):
    exit_code = 2


class DomainMismatchError(McoptError, ValueError):
    """A predictor or auditor is not defined on some support point."""

    exit_code = 2


class ContractViolationError(McoptError, ValueError):
    """A value left its declared range (e.g. a DAG predictor outside [0, 1])."""

    exit_code = 2


class ResourceLimitError(McoptError):
    exit_code = 3


class TheoremCheckError(McoptError, AssertionError):
    """An inequality that must hold by construction failed.

    Raising this always indicates an implementation bug.
    """

    exit_code = 1
