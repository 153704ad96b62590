"""Exception hierarchy. Each subclass names the pipeline stage that raised it."""


class MaintlmError(ValueError):
    module = "maintlm"

    def __str__(self) -> str:
        return f"{self.module}: {super().__str__()}"


class IngestError(MaintlmError):
    module = "ingest"


class DatasetError(MaintlmError):
    module = "dataset"


class MlpError(MaintlmError):
    module = "mlp"


class ModelFormatError(MlpError):
    pass


class TrainError(MaintlmError):
    module = "trainer"


class SingularStepError(TrainError):
    """The damped normal equations could not be factorised at this damping."""

    def __init__(self, mu: float):
        super().__init__(f"damped normal matrix not positive definite at mu={mu!r}")
        self.mu = mu


class StatsError(MaintlmError):
    module = "stats"


class LengthMismatchError(StatsError):
    pass


class InsufficientDataError(StatsError):
    pass


class ZeroVarianceError(StatsError):
    pass


class ConstantPredictorError(StatsError):
    pass


class ReportError(MaintlmError):
    module = "report"


class SynthError(MaintlmError):
    module = "synth"


class CliError(MaintlmError):
    module = "cli"
