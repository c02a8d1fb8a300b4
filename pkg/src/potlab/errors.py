"""Semantic exception types shared across the package.

Every error raised by library code derives from :class:`PotlabError` so that
callers (in particular the CLI) can distinguish input/contract violations from
genuine numerical failures.
"""

from __future__ import annotations


class PotlabError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(PotlabError, ValueError):
    """A constructor or operation received parameters outside its contract."""


class DomainError(PotlabError, ValueError):
    """An evaluation point lies outside the represented domain."""


class RangeError(PotlabError, ValueError):
    """An inversion target lies outside the attainable range."""


class ValidationError(PotlabError, ValueError):
    """A structural precondition (mesh/ball/config consistency) failed.

    ``field_path`` optionally records the dotted path of the offending field
    for configuration errors surfaced through the CLI.
    """

    def __init__(self, message: str, field_path: str | None = None):
        super().__init__(message)
        self.field_path = field_path


class ConvergenceError(PotlabError, RuntimeError):
    """An iterative procedure exhausted its budget; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class HypothesisViolation(PotlabError, ValueError):
    """Sampled data falsified the hypothesis of an iteration lemma.

    ``witness`` holds the offending sample (pair of radii and values) so the
    failure is reproducible.
    """

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = dict(witness or {})
