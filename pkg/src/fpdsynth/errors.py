class NumericError(ArithmeticError):
    """A linear solve failed; ``frequency`` names the offending point (Hz)."""

    def __init__(self, message, frequency=None):
        super().__init__(message)
        self.frequency = frequency
