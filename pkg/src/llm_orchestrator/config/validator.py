"""Configuration validation utilities."""

from collections import Counter

from pydantic import ValidationError

from llm_orchestrator.config.models import (
    GatewayConfig,
    GatewayMode,
    MatrixConfig,
    ProfilesConfig,
    RoutingConfig,
    ScenarioConfig,
)
from llm_orchestrator.orchestration.scaling import ScalingPolicy
from llm_orchestrator.routing.types import KeywordRuleSet, RelevanceTable


class ConfigValidator:
    """Validates configuration files and their relationships."""

    @staticmethod
    def validate_matrix_config(config: MatrixConfig) -> list[str]:
        """
        Validate a service matrix.

        Args:
            config: Matrix configuration to validate

        Returns:
            List of validation errors (empty if valid)
        """
        errors: list[str] = []

        for kind, ids in (
            ("model", [m.id for m in config.models]),
            ("backend", [b.id for b in config.backends]),
        ):
            duplicates = sorted(i for i, n in Counter(ids).items() if n > 1)
            if duplicates:
                errors.append(f"Duplicate {kind} ids: {duplicates}")

        model_ids = {m.id for m in config.models}
        backend_ids = {b.id for b in config.backends}
        seen: set[tuple[str, str]] = set()
        for cell in config.cells:
            if cell.model not in model_ids:
                errors.append(f"Cell {cell.model}/{cell.backend}: unknown model '{cell.model}'")
            if cell.backend not in backend_ids:
                errors.append(
                    f"Cell {cell.model}/{cell.backend}: unknown backend '{cell.backend}'"
                )
            pair = (cell.model, cell.backend)
            if pair in seen:
                errors.append(f"Cell {cell.model}/{cell.backend} is declared twice")
            seen.add(pair)

        return errors

    @staticmethod
    def validate_policy(policy: ScalingPolicy, matrix: MatrixConfig) -> list[str]:
        """
        Check per-model warm floor overrides against the policy cap.

        Args:
            policy: Scaling policy
            matrix: Matrix the policy will drive

        Returns:
            List of validation errors (empty if valid)
        """
        errors: list[str] = []
        for model in matrix.models:
            if (
                model.warm_pool_floor is not None
                and model.warm_pool_floor > policy.max_replicas_per_model
            ):
                errors.append(
                    f"Model '{model.id}': warm_pool_floor {model.warm_pool_floor} exceeds "
                    f"max_replicas_per_model {policy.max_replicas_per_model}"
                )
        return errors

    @staticmethod
    def validate_routing_config(config: RoutingConfig) -> list[str]:
        """
        Validate keyword sets and the relevance table.

        Args:
            config: Routing configuration

        Returns:
            List of validation errors (empty if valid)
        """
        errors: list[str] = []
        if config.keywords_file is None:
            try:
                KeywordRuleSet(
                    low_keywords=frozenset(config.low_keywords),
                    high_keywords=frozenset(config.high_keywords),
                )
            except ValidationError as e:
                errors.append(f"Keyword rules: {e.errors()[0]['msg']}")
        entries = config.relevance.entries()
        if entries is not None:
            try:
                RelevanceTable(entries=entries)
            except ValidationError as e:
                errors.append(f"Relevance table: {e.errors()[0]['msg']}")
        return errors

    @staticmethod
    def validate_scenario_config(
        config: ScenarioConfig,
        matrices: dict[str, MatrixConfig],
        profiles: ProfilesConfig | None = None,
    ) -> list[str]:
        """
        Validate a scenario against the matrices and profiles it references.

        Args:
            config: Scenario configuration
            matrices: Known matrices keyed by file name
            profiles: Known profiles

        Returns:
            List of validation errors (empty if valid)
        """
        errors: list[str] = []
        matrix = matrices.get(config.matrix)
        if matrix is None:
            errors.append(f"Scenario '{config.name}': matrix '{config.matrix}' not found")
        else:
            errors.extend(ConfigValidator.validate_policy(config.policy, matrix))
            if config.static_replicas > config.policy.max_replicas_per_model:
                errors.append(
                    f"Scenario '{config.name}': static_replicas {config.static_replicas} "
                    f"exceeds max_replicas_per_model {config.policy.max_replicas_per_model}"
                )
        if profiles is not None and config.selection.profile not in profiles.as_mapping():
            errors.append(
                f"Scenario '{config.name}': unknown profile '{config.selection.profile}'"
            )
        errors.extend(ConfigValidator.validate_routing_config(config.routing))
        return errors

    @staticmethod
    def validate_gateway_config(
        config: GatewayConfig,
        matrices: dict[str, MatrixConfig],
        profiles: ProfilesConfig | None = None,
    ) -> list[str]:
        """
        Validate a gateway config against its matrix and profiles.

        Args:
            config: Gateway configuration
            matrices: Known matrices keyed by file name
            profiles: Known profiles

        Returns:
            List of validation errors (empty if valid)
        """
        errors: list[str] = []
        matrix = matrices.get(config.matrix)
        if matrix is None:
            errors.append(f"Gateway: matrix '{config.matrix}' not found")
        else:
            errors.extend(ConfigValidator.validate_policy(config.policy, matrix))
            if config.mode == GatewayMode.PROXY:
                missing = [c.service_id for c in matrix.resolve() if not c.endpoint]
                if missing:
                    errors.append(f"Gateway: proxy mode but no endpoint for {missing}")
        if profiles is not None and config.selection.profile not in profiles.as_mapping():
            errors.append(f"Gateway: unknown profile '{config.selection.profile}'")
        errors.extend(ConfigValidator.validate_routing_config(config.routing))
        return errors

    @staticmethod
    def validate_all(
        matrices: dict[str, MatrixConfig],
        scenarios: dict[str, ScenarioConfig],
        gateways: dict[str, GatewayConfig],
        profiles: ProfilesConfig | None = None,
    ) -> dict[str, list[str]]:
        """
        Validate all configurations together.

        Returns:
            Dictionary of validation errors keyed by config file
        """
        results: dict[str, list[str]] = {}
        for name, matrix in matrices.items():
            results[f"matrices/{name}"] = ConfigValidator.validate_matrix_config(matrix)
        for name, scenario in scenarios.items():
            results[f"scenarios/{name}"] = ConfigValidator.validate_scenario_config(
                scenario, matrices, profiles
            )
        for name, gateway in gateways.items():
            results[f"gateway/{name}"] = ConfigValidator.validate_gateway_config(
                gateway, matrices, profiles
            )
        return results

    @staticmethod
    def has_errors(validation_results: dict[str, list[str]]) -> bool:
        """
        Check if validation results contain any errors.

        Args:
            validation_results: Results from validate_all()

        Returns:
            True if any errors exist
        """
        return any(len(errors) > 0 for errors in validation_results.values())
