class ConfigurationError(ValueError):
    """Invalid user-facing configuration: CLI flags, config files, presets."""
