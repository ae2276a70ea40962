"""YAML configuration loader."""

from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from llm_orchestrator.config.environment import env_overrides, get_config_path, merge_overrides
from llm_orchestrator.config.models import (
    GatewayConfig,
    MatrixConfig,
    ProfilesConfig,
    ScenarioConfig,
)
from llm_orchestrator.routing.types import KeywordRuleSet


class ConfigLoader:
    """Loads and parses YAML configuration files."""

    def __init__(self, config_path: Path | None = None) -> None:
        """
        Initialize configuration loader.

        Args:
            config_path: Configuration directory (defaults to PS_CONFIG_DIR or ./config)
        """
        self.config_path = get_config_path(config_path)

    @staticmethod
    def _load_yaml(file_path: Path) -> dict[str, Any]:
        """
        Load YAML file.

        Args:
            file_path: Path to YAML file

        Returns:
            Parsed YAML content

        Raises:
            FileNotFoundError: If file doesn't exist
            yaml.YAMLError: If YAML is invalid
        """
        if not file_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {file_path}")

        with open(file_path) as f:
            try:
                return yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise yaml.YAMLError(f"Error parsing YAML file {file_path}: {e}") from e

    @staticmethod
    def _strip_prefix(filename: str, prefix: str) -> str:
        return filename[len(prefix) :] if filename.startswith(prefix) else filename

    def load_matrix_config(self, filename: str) -> MatrixConfig:
        """
        Load a service matrix definition.

        Args:
            filename: Name of the matrix file (with or without matrices/ prefix)

        Returns:
            MatrixConfig: Validated matrix configuration

        Raises:
            ValueError: If configuration is invalid
        """
        filename = self._strip_prefix(filename, "matrices/")
        data = self._load_yaml(self.config_path / "matrices" / filename)
        try:
            return MatrixConfig(**data.get("matrix", {}))
        except ValidationError as e:
            raise ValueError(f"Invalid matrix configuration in {filename}: {e}") from e

    def load_scenario_config(self, filename: str) -> ScenarioConfig:
        """
        Load a simulation scenario.

        Args:
            filename: Name of the scenario file (with or without scenarios/ prefix)

        Returns:
            ScenarioConfig: Validated scenario configuration

        Raises:
            ValueError: If configuration is invalid
        """
        filename = self._strip_prefix(filename, "scenarios/")
        data = self._load_yaml(self.config_path / "scenarios" / filename)
        try:
            return ScenarioConfig(**data.get("scenario", {}))
        except ValidationError as e:
            raise ValueError(f"Invalid scenario configuration in {filename}: {e}") from e

    def load_gateway_config(self, filename: str, apply_env: bool = True) -> GatewayConfig:
        """
        Load gateway configuration, applying PS_ environment overrides.

        Args:
            filename: Name of the gateway file (with or without gateway/ prefix)
            apply_env: Whether to merge PS_* environment variables

        Returns:
            GatewayConfig: Validated gateway configuration

        Raises:
            ValueError: If configuration is invalid
        """
        filename = self._strip_prefix(filename, "gateway/")
        data = self._load_yaml(self.config_path / "gateway" / filename).get("gateway", {})
        if apply_env:
            data = merge_overrides(data, env_overrides())
        try:
            return GatewayConfig(**data)
        except ValidationError as e:
            raise ValueError(f"Invalid gateway configuration in {filename}: {e}") from e

    def load_profiles(self, filename: str = "profiles.yaml") -> ProfilesConfig:
        """
        Load operator weight profiles.

        Raises:
            ValueError: If a profile is invalid
        """
        data = self._load_yaml(self.config_path / filename)
        try:
            return ProfilesConfig(**data)
        except ValidationError as e:
            raise ValueError(f"Invalid profiles in {filename}: {e}") from e

    def load_keyword_rules(self, filename: str) -> KeywordRuleSet:
        """
        Load a keyword rule file with ``low_keywords`` and ``high_keywords`` lists.

        Raises:
            ValueError: If the sets overlap or contain empty keywords
        """
        filename = self._strip_prefix(filename, "routing/")
        data = self._load_yaml(self.config_path / "routing" / filename)
        try:
            return KeywordRuleSet(
                low_keywords=frozenset(data.get("low_keywords", [])),
                high_keywords=frozenset(data.get("high_keywords", [])),
            )
        except ValidationError as e:
            raise ValueError(f"Invalid keyword rules in {filename}: {e}") from e

    def _list_files(self, subdir: str) -> list[str]:
        directory = self.config_path / subdir
        if not directory.exists():
            return []
        return sorted(f.name for f in directory.glob("*.yaml"))

    def get_matrix_files(self) -> list[str]:
        return self._list_files("matrices")

    def get_scenario_files(self) -> list[str]:
        return self._list_files("scenarios")

    def get_gateway_files(self) -> list[str]:
        return self._list_files("gateway")

    def load_all_matrices(self) -> dict[str, MatrixConfig]:
        """
        Load all matrix configurations.

        Returns:
            Dictionary of matrix configs keyed by file name
        """
        return {name: self.load_matrix_config(name) for name in self.get_matrix_files()}

    def load_all_scenarios(self) -> dict[str, ScenarioConfig]:
        """
        Load all scenario configurations.

        Returns:
            Dictionary of scenario configs keyed by file name
        """
        return {name: self.load_scenario_config(name) for name in self.get_scenario_files()}

    def load_all_gateways(self) -> dict[str, GatewayConfig]:
        return {
            name: self.load_gateway_config(name, apply_env=False)
            for name in self.get_gateway_files()
        }

    def discover_all_configs(self) -> dict[str, list[str]]:
        """
        List every configuration file by kind.

        Returns:
            Dictionary of file names keyed by config kind
        """
        return {
            "matrices": self.get_matrix_files(),
            "scenarios": self.get_scenario_files(),
            "gateway": self.get_gateway_files(),
            "routing": self._list_files("routing"),
        }
