"""Exception hierarchy. Fatal errors carry the process exit code the CLI uses."""


class ReviewgramError(Exception):
    exit_code = 1


class UsageError(ReviewgramError):
    exit_code = 2


class InputError(ReviewgramError):
    """Input file missing or unreadable."""

    exit_code = 3


class EmptyCorpusError(ReviewgramError):
    exit_code = 4


class ConfigError(ReviewgramError):
    """Bad dictionary, mapping, stop list or run configuration."""

    exit_code = 5


class ConsistencyError(ReviewgramError):
    """Internal invariant broken, e.g. a sentence whose review is not in the corpus."""


class UndefinedModelError(ReviewgramError, ValueError):
    """Probability requested from an empty table."""


class UnseenHistoryError(ReviewgramError, LookupError):
    """Conditional probability requested for a history with no continuations.

    Distinct from a seen history with an unseen continuation, which is simply 0.
    """

    def __init__(self, history, position=None):
        self.history = tuple(history)
        self.position = position
        msg = f"history {' '.join(self.history)!r} has no continuations"
        if position is not None:
            msg += f" (sequence position {position})"
        super().__init__(msg)


class PipelineError(ReviewgramError):
    """Wraps a fatal error with the pipeline stage it came from."""

    def __init__(self, stage: str, cause: ReviewgramError):
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"[{stage}] {cause}")
