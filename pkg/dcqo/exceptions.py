"""dcqo exceptions"""


class DcqoError(Exception):
    """Base class for every domain error raised by dcqo."""


class InvalidProblem(DcqoError, ValueError):
    """
    Raised when a QUBO, Ising model or TSP instance is ill-formed (asymmetric
    matrix, duplicate entries, negative distances, ...).
    """


class LengthMismatch(DcqoError, ValueError):
    """Raised when a bitstring, state or circuit width doesn't match."""


class ProblemTooLarge(DcqoError, ValueError):
    """
    Raised when an exponential-cost operation (brute force, dense oracle,
    statevector allocation) is asked for more qubits than its guard allows.
    """


class DegenerateModel(DcqoError, ValueError):
    """Raised when the CD coefficient is requested for an all-zero model."""


class InvalidSchedule(DcqoError, ValueError):
    """Raised for times outside [0, T], non-positive T or bad step indices."""


class InvalidGate(DcqoError, ValueError):
    """Raised when a gate has an unknown kind, bad qubits or bad params."""


class UnlowerableGate(DcqoError, ValueError):
    """Raised when a lowering pass meets a gate kind it can't rewrite."""


class ParameterMismatch(DcqoError, ValueError):
    """
    Raised when the number of circuit parameters doesn't match the ansatz
    (see :class:`dcqo.builders.AnsatzSpec`) or the QAOA depth.
    """


class UndefinedMetric(DcqoError, ArithmeticError):
    """
    Raised when the approximation ratio is requested for a model whose
    ground-state energy is zero. Report the average energy instead.
    """


class OptimizationError(DcqoError, RuntimeError):
    """Raised when the cost function returns a non-finite value."""


class InvalidConfig(DcqoError, ValueError):
    """Raised when an optimizer or experiment configuration is invalid."""
