import logging
from pathlib import Path
from typing import Optional

import numpy as np

from app.core.exceptions import ScenarioFormatError
from app.core.logging_config import kv
from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Agent, Request
from app.schemas.scenario_schema import Scenario, SyntheticSpec
from app.services.request_service import IdSource, RequestService

logger = logging.getLogger(__name__)

FORMAT_HEADER = "# horizon-dispatch scenario v1"


def _num(value: float) -> str:
    return repr(float(value))


class ScenarioService:
    """Synthetic benchmark generation and the line-oriented scenario file format.

    File layout, one record per line::

        # horizon-dispatch scenario v1
        # space=planar variant=reach_only
        agent <id> <x> <y> <velocity> <budget|inf>
        <id> <t> <x> <y> [<dropoff x> <dropoff y>]
    """

    @staticmethod
    def generate(spec: SyntheticSpec, rng: Optional[np.random.Generator] = None) -> Scenario:
        """Uniform agents and uniform tasks on a square world, `tasks_per_window` per window.

        Requests are stamped at their window's start, tau * delta.
        """
        rng = rng or np.random.default_rng(spec.rng_seed)
        size = spec.world_size

        agent_xy = rng.uniform(0.0, size, size=(spec.n_agents, 2))
        agents = [
            Agent(
                id=i,
                position=Location(x=x, y=y),
                velocity=spec.velocity,
                travel_budget=spec.travel_budget,
            )
            for i, (x, y) in enumerate(agent_xy.tolist())
        ]

        ids = IdSource()
        requests: list[Request] = []
        for window in range(spec.total_windows):
            task_xy = rng.uniform(0.0, size, size=(spec.tasks_per_window, 2))
            for x, y in task_xy.tolist():
                requests.append(
                    RequestService.new_request(
                        pickup=Location(x=x, y=y),
                        dropoff=None,
                        registered_at=window * spec.delta,
                        id_source=ids,
                        delta=spec.delta,
                    )
                )

        logger.debug(kv(agents=len(agents), requests=len(requests), seed=spec.rng_seed))
        return Scenario(space=MetricSpace.PLANAR, variant=CostVariant.REACH_ONLY, agents=agents, requests=requests)

    @staticmethod
    def dumps(scenario: Scenario) -> str:
        lines = [
            FORMAT_HEADER,
            f"# space={scenario.space.value} variant={scenario.variant.value}",
        ]
        for agent in scenario.agents:
            budget = "inf" if agent.travel_budget is None else _num(agent.travel_budget)
            lines.append(
                f"agent {agent.id} {_num(agent.position.x)} {_num(agent.position.y)} {_num(agent.velocity)} {budget}"
            )
        for request in sorted(scenario.requests, key=lambda r: (r.registered_at, r.id)):
            fields = [str(request.id), _num(request.registered_at), _num(request.pickup.x), _num(request.pickup.y)]
            if request.dropoff is not None:
                fields += [_num(request.dropoff.x), _num(request.dropoff.y)]
            lines.append(" ".join(fields))
        return "\n".join(lines) + "\n"

    @staticmethod
    def write(scenario: Scenario, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(ScenarioService.dumps(scenario), encoding="utf-8")
        return path

    @staticmethod
    def loads(text: str, delta: float) -> Scenario:
        """Parse a scenario file; `delta` derives each request's registration window."""
        space, variant = MetricSpace.PLANAR, CostVariant.REACH_ONLY
        agents: list[Agent] = []
        requests: list[Request] = []

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, _, value = token.partition("=")
                    try:
                        if key == "space":
                            space = MetricSpace(value)
                        elif key == "variant":
                            variant = CostVariant(value)
                    except ValueError as exc:
                        raise ScenarioFormatError(f"line {lineno}: {exc}") from exc
                continue

            parts = line.split()
            try:
                if parts[0] == "agent":
                    if len(parts) != 6:
                        raise ScenarioFormatError(f"line {lineno}: agent lines have 6 fields")
                    agents.append(
                        Agent(
                            id=int(parts[1]),
                            position=Location(x=float(parts[2]), y=float(parts[3]), space=space),
                            velocity=float(parts[4]),
                            travel_budget=None if parts[5] == "inf" else float(parts[5]),
                        )
                    )
                    continue

                if len(parts) not in (4, 6):
                    raise ScenarioFormatError(f"line {lineno}: request lines have 4 or 6 fields")
                registered_at = float(parts[1])
                dropoff = None
                if len(parts) == 6:
                    dropoff = Location(x=float(parts[4]), y=float(parts[5]), space=space)
                requests.append(
                    Request(
                        id=int(parts[0]),
                        pickup=Location(x=float(parts[2]), y=float(parts[3]), space=space),
                        dropoff=dropoff,
                        registered_at=registered_at,
                        registered_window=RequestService.window_of(registered_at, delta),
                    )
                )
            except ScenarioFormatError:
                raise
            except ValueError as exc:
                raise ScenarioFormatError(f"line {lineno}: {exc}") from exc

        try:
            return Scenario(space=space, variant=variant, agents=agents, requests=requests)
        except ValueError as exc:
            raise ScenarioFormatError(str(exc)) from exc

    @staticmethod
    def read(path: Path, delta: float) -> Scenario:
        path = Path(path)
        if not path.exists():
            raise ScenarioFormatError(f"scenario file not found: {path}")
        return ScenarioService.loads(path.read_text(encoding="utf-8"), delta)
