import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from app.core.exceptions import ConfigError
from app.schemas.config_schema import (
    FixedHorizon,
    FractionCapacity,
    GAParams,
    GenerationsBudget,
    SimConfig,
    UnboundedCapacity,
    VariableHorizon,
    WallClockBudget,
)
from app.schemas.scenario_schema import SyntheticSpec

logger = logging.getLogger(__name__)

# Config-file keys; each maps to the flat setting of the same lowercase name.
CONFIG_KEYS = frozenset({
    "DELTA",
    "TOTAL_WINDOWS",
    "ALPHA",
    "HORIZON",
    "MAX_K",
    "CAPACITY",
    "METRIC_SPACE",
    "RNG_SEED",
    "POPULATION_SIZE",
    "P_MUTA",
    "P_SWAP",
    "EPSILON",
    "BUDGET",
    "GENERATIONS",
    "AGENTS",
    "TASKS_PER_WINDOW",
    "WORLD_SIZE",
    "VELOCITY",
    "TRAVEL_BUDGET",
})

UNBOUNDED = {"unbounded", "inf", "infinite", "none"}


class ResolvedConfig(BaseModel):
    model_config = {"frozen": True}

    sim: SimConfig
    synthetic: SyntheticSpec


def _is_set(value: Any) -> bool:
    return value is not None and not (isinstance(value, str) and not value.strip())


class ConfigService:
    """Config files and flag overrides resolved into SimConfig + SyntheticSpec."""

    @staticmethod
    def read_file(path: Path) -> dict[str, str]:
        """Read a `KEY=value` config file into flat lowercase settings.

        Raises:
            ConfigError: missing file, unknown key or key without a value
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")

        raw = dotenv_values(path)
        unknown = sorted(k for k in raw if k.upper() not in CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys in {path.name}: {', '.join(unknown)}")
        empty = sorted(k for k, v in raw.items() if v is None)
        if empty:
            raise ConfigError(f"config keys without a value in {path.name}: {', '.join(empty)}")
        return {k.lower(): v.strip() for k, v in raw.items()}

    @staticmethod
    def merge(*layers: Optional[dict[str, Any]]) -> dict[str, Any]:
        """Later layers win; unset (None/blank) values never override."""
        merged: dict[str, Any] = {}
        for layer in layers:
            for key, value in (layer or {}).items():
                if _is_set(value):
                    merged[key] = value
        return merged

    @staticmethod
    def parse_horizon(value: Any, max_k: Any = None):
        text = str(value).strip().lower()
        if text in {"v", "variable"}:
            return VariableHorizon(max_k=max_k) if _is_set(max_k) else VariableHorizon()
        try:
            return FixedHorizon(k=int(text))
        except ValueError:
            raise ConfigError(f"horizon must be an integer k or 'variable', got {value!r}") from None

    @staticmethod
    def parse_capacity(value: Any):
        text = str(value).strip().lower()
        if text in UNBOUNDED:
            return UnboundedCapacity()
        try:
            fraction = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"capacity must be 'unbounded' or a fraction like 1/3, got {value!r}") from None
        return FractionCapacity(fraction=float(fraction))

    @staticmethod
    def parse_budget(value: Any, generations: Any = None):
        text = str(value).strip().lower().replace("-", "_")
        if text == "wall_clock":
            return WallClockBudget()
        if text == "generations":
            return GenerationsBudget(generations=generations) if _is_set(generations) else GenerationsBudget()
        raise ConfigError(f"budget must be 'wall_clock' or 'generations', got {value!r}")

    @staticmethod
    def build(settings: dict[str, Any]) -> ResolvedConfig:
        """Turn flat settings into validated config models.

        Args:
            settings: Lowercase config keys to raw values (strings or numbers)

        Returns:
            The simulation config and the synthetic scenario spec, sharing
            delta, total_windows and the seed

        Raises:
            ConfigError: any value fails to parse or validate
        """
        s = settings

        def pick(*keys: str) -> dict[str, Any]:
            return {k: s[k] for k in keys if _is_set(s.get(k))}

        try:
            ga_fields = pick("population_size", "p_muta", "p_swap", "epsilon")
            if str(ga_fields.get("epsilon", "")).strip().lower() in {"none", "off"}:
                ga_fields["epsilon"] = None
            if _is_set(s.get("budget")):
                ga_fields["budget"] = ConfigService.parse_budget(s["budget"], s.get("generations"))
            elif _is_set(s.get("generations")):
                ga_fields["budget"] = GenerationsBudget(generations=s["generations"])
            ga = GAParams(**ga_fields)

            sim_fields = pick("delta", "total_windows", "alpha", "metric_space", "rng_seed")
            if _is_set(s.get("horizon")):
                sim_fields["horizon"] = ConfigService.parse_horizon(s["horizon"], s.get("max_k"))
            if _is_set(s.get("capacity")):
                sim_fields["capacity"] = ConfigService.parse_capacity(s["capacity"])
            sim = SimConfig(ga=ga, **sim_fields)

            spec_fields = {
                "n_agents": s.get("agents"),
                "tasks_per_window": s.get("tasks_per_window"),
                "world_size": s.get("world_size"),
                "velocity": s.get("velocity"),
            }
            spec_fields = {k: v for k, v in spec_fields.items() if _is_set(v)}
            if _is_set(s.get("travel_budget")):
                budget = str(s["travel_budget"]).strip().lower()
                spec_fields["travel_budget"] = None if budget in UNBOUNDED else budget
            synthetic = SyntheticSpec(
                delta=sim.delta,
                total_windows=sim.total_windows,
                rng_seed=sim.rng_seed,
                **spec_fields,
            )
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"]) or "config"
            raise ConfigError(f"invalid {where}: {first['msg']}") from exc

        logger.debug("resolved config: %s", sim.model_dump_json())
        return ResolvedConfig(sim=sim, synthetic=synthetic)
