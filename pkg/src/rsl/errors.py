"""Exception hierarchy shared across modules; the CLI maps these to exit codes."""


class DataError(Exception):
    """Bad or missing input data (maps to exit code 2)."""


class NumericFailure(ArithmeticError):
    """Non-finite value produced during a computation (maps to exit code 3)."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer


class TrainingFailure(NumericFailure):
    """Training diverged; ``epoch`` is 1-based."""

    def __init__(self, message, epoch):
        super().__init__(message)
        self.epoch = epoch
