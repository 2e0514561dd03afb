class DispatchError(ValueError):
    """Base class for every error raised by the dispatch services."""


class ConfigError(DispatchError):
    pass


class InvalidLocationError(DispatchError):
    pass


class MetricSpaceMismatchError(DispatchError):
    pass


class CostVariantError(DispatchError):
    """A pickup/dropoff computation met a request without a dropoff (or the reverse)."""


class CapacityViolationError(DispatchError):
    """A window solution gives an agent more requests than the window capacity."""


class IngestError(DispatchError):
    pass


class ScenarioFormatError(DispatchError):
    pass


class InstanceTooLargeError(DispatchError):
    pass
