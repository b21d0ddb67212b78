"""Error types shared across the package."""


class ConfigError(ValueError):
    """A configuration value is out of its valid domain."""


class TrainingCollisionError(ConfigError):
    """The scripted training drive hit a wall; the route is unusable."""


class StateError(RuntimeError):
    """An operation was called on an object in the wrong state."""
