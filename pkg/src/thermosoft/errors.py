"""Error taxonomy shared across the toolkit.

Two families matter at the CLI boundary: validation failures (bad inputs,
bad files, violated invariants -> exit code 1) and numerical failures
(non-convergence, rank deficiency, overflow -> exit code 2).
"""


class ValidationFailure(Exception):
    """Input, configuration, or schema is invalid."""


class NumericalFailure(Exception):
    """A numerical procedure failed on otherwise valid inputs."""
