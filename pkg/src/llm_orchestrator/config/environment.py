"""Config directory discovery and PS_ environment overrides."""

import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import yaml

ENV_PREFIX = "PS_"
CONFIG_DIR_VARIABLE = "PS_CONFIG_DIR"
NESTING_SEPARATOR = "__"


def get_config_base_path() -> Path:
    """
    Get the base path for configuration files.

    ``PS_CONFIG_DIR`` wins; otherwise ``config/`` at the project root.

    Returns:
        Path: Base configuration directory path
    """
    override = os.getenv(CONFIG_DIR_VARIABLE)
    if override:
        return Path(override)
    current_file = Path(__file__)
    project_root = current_file.parent.parent.parent.parent
    return project_root / "config"


def get_config_path(config_path: Path | None = None) -> Path:
    """
    Resolve and check the configuration directory.

    Raises:
        FileNotFoundError: If the directory does not exist
    """
    base_path = config_path or get_config_base_path()
    if not base_path.exists():
        raise FileNotFoundError(f"Configuration directory not found: {base_path}")
    return base_path


def env_overrides(
    environ: Mapping[str, str] | None = None, prefix: str = ENV_PREFIX
) -> dict[str, Any]:
    """
    Collect ``PS_*`` variables as a nested dict.

    ``PS_POLICY__COOLDOWN=30`` becomes ``{"policy": {"cooldown": 30}}``.
    Values are parsed as YAML scalars, so numbers and booleans keep their type.
    """
    environ = os.environ if environ is None else environ
    overrides: dict[str, Any] = {}
    for name, raw in environ.items():
        if not name.startswith(prefix) or name == CONFIG_DIR_VARIABLE:
            continue
        path = [part.lower() for part in name[len(prefix) :].split(NESTING_SEPARATOR) if part]
        if not path:
            continue
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw
        node = overrides
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = value
    return overrides


def merge_overrides(data: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Deep-merge ``overrides`` into a copy of ``data``."""
    merged = dict(data)
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = value
    return merged
