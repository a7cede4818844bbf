class DocaSimError(Exception):
    exit_code: int = 1
    detail: str = "An error occurred"

    def __init__(self, message: str | None = None):
        self.message = message or self.detail
        super().__init__(self.message)

    def to_error_line(self) -> str:
        message = self.message.replace('"', "'").replace("\n", " ")
        return f'error={type(self).__name__} code={self.exit_code} detail="{message}"'


class UsageError(DocaSimError):
    exit_code = 2
    detail = "Invalid command-line usage"


class InvalidOverrideError(UsageError):
    detail = "Unknown configuration key"

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"Unknown configuration key: {key}")


class ConfigError(DocaSimError):
    exit_code = 2
    detail = "Invalid configuration"


class InvalidTbError(DocaSimError, ValueError):
    detail = "Transmission block id out of range"


class ShapeMismatchError(DocaSimError, ValueError):
    detail = "Input shape does not match the network input shape"


class SimulationStateError(DocaSimError):
    detail = "Simulation is not in a state that allows this operation"


class NoTransmissionsError(DocaSimError):
    detail = "No transmissions in the reward window"


class TrainingDivergenceError(DocaSimError):
    exit_code = 4
    detail = "Training diverged (non-finite values)"

    def __init__(self, message: str | None = None, last_good=None):
        self.last_good = last_good
        super().__init__(message)


class CheckpointError(DocaSimError):
    exit_code = 3
    detail = "Checkpoint could not be read"


class CheckpointMismatchError(CheckpointError):
    detail = "Checkpoint architecture does not match the requested network"
