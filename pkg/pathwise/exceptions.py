"""
Exception hierarchy shared by every PathWise app.

Library code raises these; management commands turn them into CommandError.
"""


class PathwiseError(Exception):
    """Base class for all PathWise errors."""


# Graph
class GraphError(PathwiseError):
    """Invalid network topology."""


class InvalidArc(GraphError):
    """Arc endpoint out of range or self-loop."""


class EmptyGraph(GraphError):
    """A graph needs at least two nodes."""


# Resources
class ResourceError(PathwiseError):
    """Invalid resource definition or value."""


class InfeasibleAtSource(ResourceError):
    """The initial value of a resource already violates its bounds."""


# Problems and parsers
class ProblemError(PathwiseError):
    """Invalid problem instance."""


class ParseError(ProblemError):
    """Malformed instance file."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        location = ''
        if path:
            location += f'{path}:'
        if line is not None:
            location += f'{line}:'
            if column is not None:
                location += f'{column}:'
        super().__init__(f'{location} {message}' if location else message)


class InconsistentData(ProblemError):
    """Well-formed file whose content contradicts itself."""


class UnknownNode(ProblemError):
    """A node id outside the graph."""


# Relaxations
class RelaxationError(PathwiseError):
    """Invalid relaxation setup."""


class InvalidNgSize(RelaxationError):
    """Neighbourhood size outside [1, n]."""


class NonTerminating(RelaxationError):
    """The relaxation loop exceeded its iteration guard."""


# Solver
class SolverError(PathwiseError):
    """Internal solver failure."""


class DecodeMismatch(SolverError):
    """A decoded path disagrees with the labels it was decoded from."""


class TimeLimitReached(SolverError):
    """Raised inside a pass when the wall-clock budget is spent."""


# Configuration
class ConfigError(PathwiseError):
    """Invalid configuration key, value or combination."""

    def __init__(self, message, key=None, line=None):
        self.message = message
        self.key = key
        self.line = line
        prefix = ''
        if line is not None:
            prefix = f'line {line}: '
        if key is not None:
            prefix += f'{key}: '
        super().__init__(f'{prefix}{message}')


# Oracle
class OracleError(PathwiseError):
    """Oracle misuse."""


class TooLarge(OracleError):
    """Instance too large for exhaustive enumeration."""
