# edgeworth/errors.py
"""Exceptions raised by the expansion engine.

Each class carries the exit code the command line reports for it.
"""


class EdgeworthError(Exception):
    exit_code = 1


class ConfigError(EdgeworthError):
    exit_code = 2


class ResourceError(ConfigError): ...


class ResolutionError(EdgeworthError):
    exit_code = 3


class InvalidModelError(ResolutionError): ...


class UnsupportedOrderError(EdgeworthError, ValueError): ...


class NumericalError(EdgeworthError):
    exit_code = 4


class NonFiniteInputError(NumericalError, ValueError): ...


class ModelEvaluationError(NumericalError): ...


class PathEvaluationError(NumericalError): ...


class DegenerateModelError(NumericalError): ...
