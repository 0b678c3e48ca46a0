"""Scenario documents: flat ``dotted.key = value`` text with ``#`` comments.

Values are parsed as booleans (``true``/``false``/``on``/``off``), numbers,
comma-separated number lists, or bare strings. Every key has a default, so a
document naming only ``variant`` is complete.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from ..control import AdrcVariant, FeedbackConfig, TdConfig
from ..observers import LesoConfig, NestedConfig
from ..ode import IntegratorConfig
from ..plants import PlantParams, SignalSpec


class ScenarioError(ValueError):
    """Bad scenario document; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class NoiseSpec:
    enabled: bool = False
    variance: float = 1e-4
    seed: int = 42
    hold: float = 0.0  # sample-and-hold period in seconds; 0 means one sample per step

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("noise.variance must be >= 0")
        if self.hold < 0:
            raise ValueError("noise.hold must be >= 0")


@dataclass(frozen=True)
class Scenario:
    name: str = "benchmark"
    plant: PlantParams = field(default_factory=PlantParams)
    x0: tuple = (0.0, 0.0)
    reference: SignalSpec = field(default_factory=SignalSpec)
    variant: AdrcVariant = field(default_factory=AdrcVariant)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    horizon: float = 20.0
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    output_grid_step: float = 1e-3

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not self.output_grid_step > 0:
            raise ValueError("output.grid_step must be positive")
        if self.horizon < self.output_grid_step:
            raise ValueError("horizon is shorter than one output grid step")
        if len(self.x0) != 2:
            raise ValueError("plant.x0 needs two values")
        if self.integrator.method == "fixed-rk4":
            ratio = self.output_grid_step / self.integrator.step
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError("output.grid_step must be a multiple of integrator.step")

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def with_variant(self, kind: str) -> "Scenario":
        return self.replace(variant=dataclasses.replace(self.variant, kind=kind))

    def with_noise(self, enabled: bool, seed: int | None = None) -> "Scenario":
        noise = dataclasses.replace(
            self.noise, enabled=enabled, seed=self.noise.seed if seed is None else seed
        )
        return self.replace(noise=noise)

    def with_inner_bandwidth(self, omega0: float) -> "Scenario":
        obs = self.variant.observers
        inner = dataclasses.replace(obs.inner, omega0=omega0)
        observers = NestedConfig(inner=inner, outer=obs.outer)
        return self.replace(variant=dataclasses.replace(self.variant, observers=observers))


# key -> (type, default). The order here is the serialisation order.
SCHEMA: dict[str, tuple[type, object]] = {
    "name": (str, "benchmark"),
    "variant": (str, "conventional"),
    "horizon": (float, 20.0),
    "output.grid_step": (float, 1e-3),
    "plant.a1": (float, 0.2),
    "plant.a2": (float, 0.1),
    "plant.a3": (float, 0.2),
    "plant.disturbance": (bool, True),
    "plant.x0": (list, [0.0, 0.0]),
    "reference.kind": (str, "cosine"),
    "reference.amplitude": (float, 1.0),
    "reference.frequency": (float, 0.5),
    "reference.offset": (float, 0.0),
    "observer.inner.omega0": (float, 3.0),
    "observer.outer.omega0": (float, 10.0),
    "feedback.law": (str, "linear-pd"),
    "feedback.k1": (float, 25.0),
    "feedback.k2": (float, 10.0),
    "feedback.alpha1": (float, 1.0),
    "feedback.alpha2": (float, 1.0),
    "feedback.delta": (float, 0.1),
    "td.R": (float, 10.0),
    "integrator.method": (str, "fixed-rk4"),
    "integrator.step": (float, 1e-3),
    "integrator.abs_tol": (float, 1e-8),
    "integrator.rel_tol": (float, 1e-8),
    "integrator.max_step": (float, 0.05),
    "integrator.max_steps": (int, 1_000_000),
    "noise.enabled": (bool, False),
    "noise.variance": (float, 1e-4),
    "noise.seed": (int, 42),
    "noise.hold": (float, 0.0),
}

_TRUE = {"true", "on", "yes"}
_FALSE = {"false", "off", "no"}


def _convert(key: str, raw: str):
    kind = SCHEMA[key][0]
    try:
        if kind is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"expected a boolean, got {raw!r}")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is list:
            return [float(p) for p in raw.split(",") if p.strip()]
    except ValueError as exc:
        raise ScenarioError(key, f"type mismatch: {exc}") from None
    if not raw:
        raise ScenarioError(key, "empty value")
    return raw


def parse_values(text: str) -> dict:
    """Read ``key = value`` lines into a dict of typed values (no defaults)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ScenarioError(key, "unknown key")
        if key in values:
            raise ScenarioError(key, "duplicate key")
        values[key] = _convert(key, raw)
    return values


# Which key each invariant failure is blamed on, tried in order.
_BUILDERS = [
    ("plant", lambda v: PlantParams(
        a1=v["plant.a1"], a2=v["plant.a2"], a3=v["plant.a3"],
        disturbance_on=v["plant.disturbance"])),
    ("reference", lambda v: SignalSpec(
        kind=v["reference.kind"], amplitude=v["reference.amplitude"],
        frequency=v["reference.frequency"], offset=v["reference.offset"])),
    ("observer", lambda v: NestedConfig(
        inner=LesoConfig(n=2, omega0=v["observer.inner.omega0"]),
        outer=LesoConfig(n=2, omega0=v["observer.outer.omega0"]))),
    ("feedback", lambda v: FeedbackConfig(
        law=v["feedback.law"], k1=v["feedback.k1"], k2=v["feedback.k2"],
        alpha1=v["feedback.alpha1"], alpha2=v["feedback.alpha2"],
        delta=v["feedback.delta"])),
    ("td", lambda v: TdConfig(R=v["td.R"])),
    ("integrator", lambda v: IntegratorConfig(
        method=v["integrator.method"], step=v["integrator.step"],
        abs_tol=v["integrator.abs_tol"], rel_tol=v["integrator.rel_tol"],
        max_step=v["integrator.max_step"], max_steps=v["integrator.max_steps"])),
    ("noise", lambda v: NoiseSpec(
        enabled=v["noise.enabled"], variance=v["noise.variance"], seed=v["noise.seed"],
        hold=v["noise.hold"])),
]


def _blame(prefix: str, exc: Exception, given: dict) -> str:
    msg = str(exc)
    for key in SCHEMA:
        if key.startswith(prefix) and key.split(".")[-1] in msg:
            return key
    for key in given:
        if key.startswith(prefix):
            return key
    return prefix


def scenario_from_values(values: dict) -> Scenario:
    v = {key: default for key, (_, default) in SCHEMA.items()}
    v.update(values)
    parts = {}
    for prefix, build in _BUILDERS:
        try:
            parts[prefix] = build(v)
        except ValueError as exc:
            raise ScenarioError(_blame(prefix, exc, values), str(exc)) from None
    try:
        variant = AdrcVariant(
            kind=v["variant"], observers=parts["observer"],
            feedback=parts["feedback"], td=parts["td"])
    except ValueError as exc:
        raise ScenarioError("variant", str(exc)) from None
    try:
        return Scenario(
            name=v["name"], plant=parts["plant"], x0=tuple(v["plant.x0"]),
            reference=parts["reference"], variant=variant,
            integrator=parts["integrator"], horizon=v["horizon"],
            noise=parts["noise"], output_grid_step=v["output.grid_step"])
    except ValueError as exc:
        msg = str(exc)
        key = ("plant.x0" if "x0" in msg else "output.grid_step" if "grid_step" in msg
               else "horizon")
        raise ScenarioError(key, msg) from None


def parse_scenario(text: str) -> Scenario:
    return scenario_from_values(parse_values(text))


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def scenario_values(s: Scenario) -> dict:
    var = s.variant
    return {
        "name": s.name,
        "variant": var.kind,
        "horizon": s.horizon,
        "output.grid_step": s.output_grid_step,
        "plant.a1": s.plant.a1,
        "plant.a2": s.plant.a2,
        "plant.a3": s.plant.a3,
        "plant.disturbance": s.plant.disturbance_on,
        "plant.x0": list(s.x0),
        "reference.kind": s.reference.kind,
        "reference.amplitude": s.reference.amplitude,
        "reference.frequency": s.reference.frequency,
        "reference.offset": s.reference.offset,
        "observer.inner.omega0": var.observers.inner.omega0,
        "observer.outer.omega0": var.observers.outer.omega0,
        "feedback.law": var.feedback.law,
        "feedback.k1": var.feedback.k1,
        "feedback.k2": var.feedback.k2,
        "feedback.alpha1": var.feedback.alpha1,
        "feedback.alpha2": var.feedback.alpha2,
        "feedback.delta": var.feedback.delta,
        "td.R": var.td.R,
        "integrator.method": s.integrator.method,
        "integrator.step": s.integrator.step,
        "integrator.abs_tol": s.integrator.abs_tol,
        "integrator.rel_tol": s.integrator.rel_tol,
        "integrator.max_step": s.integrator.max_step,
        "integrator.max_steps": s.integrator.max_steps,
        "noise.enabled": s.noise.enabled,
        "noise.variance": s.noise.variance,
        "noise.seed": s.noise.seed,
        "noise.hold": s.noise.hold,
    }


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(repr(float(x)) for x in value)
    return str(value)


def serialize_scenario(s: Scenario) -> str:
    return "".join(f"{key} = {_fmt(val)}\n" for key, val in scenario_values(s).items())
