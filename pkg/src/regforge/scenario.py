"""Flat key-value scenario and parameter files.

The on-disk format is deliberately primitive so that any tooling can read
and write it without a parser dependency: one ``key = value`` pair per
line, dotted section keys, ``#`` comments. Vectors are whitespace- or
comma-separated numbers; matrices separate rows with ``;``.

Parameter file keys (for ``plant --params``)::

    turbine.tau_t = 2
    generator.k1 = 4
    generator.n = 4
    generator.l_f = 3
    generator.r_f = 2
    generator.l_a = 4
    generator.r_a = 4
    generator.r_l = 8

Scenario file keys::

    name = paper-lqr
    plant.preset = exact            # or paper-rounded
    # ... or inline plant.turbine.* / plant.generator.* physical keys,
    # or plant.tf.num / plant.tf.den, or plant.ss.a/b/c/d
    controller.type = lqr           # none | lqr | observer | ss
    controller.q_diag = 3 3
    controller.r = 5
    controller.h = 2 -0.5           # observer only
    controller.convention = standard-luenberger
    reference = 220                 # closed loop only
    sim.dt = 0.001
    sim.duration = 15
    sim.amplitude = 5               # open-loop input level
    outputs = csv report            # any of csv svg report
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .lti import StateSpaceModel, TransferFunction, ss_to_tf, tf_to_ss
from .observer import CONVENTIONS
from .plant import (
    GeneratorParams,
    PlantParams,
    PRESETS,
    REFERENCE_PARAMS,
    TurbineParams,
    plant_tf as physical_plant_tf,
    preset_tf,
)
from .sim import SimConfig

__all__ = [
    "parse_kv_file",
    "parse_plant_params",
    "load_plant_params",
    "ControllerSpec",
    "Scenario",
    "load_scenario",
]

OUTPUT_KINDS = ("csv", "svg", "report")

PARAM_KEYS = (
    "turbine.tau_t",
    "generator.k1",
    "generator.n",
    "generator.l_f",
    "generator.r_f",
    "generator.l_a",
    "generator.r_a",
    "generator.r_l",
)


def parse_kv_file(path) -> dict[str, str]:
    """Read a flat key-value file into an ordered mapping of strings."""
    path = Path(path)
    mapping: dict[str, str] = {}
    text = path.read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ValidationError(f"{path}:{lineno}: empty key or value")
        if key in mapping:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ValidationError(f"{key}: expected a number, got {value!r}") from exc


def _parse_vector(key: str, value: str) -> np.ndarray:
    items = value.replace(",", " ").split()
    if not items:
        raise ValidationError(f"{key}: expected at least one number")
    try:
        return np.array([float(v) for v in items])
    except ValueError as exc:
        raise ValidationError(f"{key}: expected numbers, got {value!r}") from exc


def _parse_matrix(key: str, value: str) -> np.ndarray:
    rows = [r for r in value.split(";")]
    parsed = [_parse_vector(key, r) for r in rows]
    width = len(parsed[0])
    if any(len(r) != width for r in parsed):
        raise ValidationError(f"{key}: rows have unequal lengths")
    return np.vstack(parsed)


def parse_plant_params(mapping: dict[str, str], prefix: str = "") -> PlantParams:
    """Build PlantParams from dotted keys, naming any missing field."""
    values = {}
    for key in PARAM_KEYS:
        full = prefix + key
        if full not in mapping:
            raise ValidationError(f"missing required parameter {key}")
        values[key] = _parse_float(full, mapping[full])
    turbine = TurbineParams(tau_t=values["turbine.tau_t"])
    generator = GeneratorParams(
        k1=values["generator.k1"],
        n=values["generator.n"],
        l_f=values["generator.l_f"],
        r_f=values["generator.r_f"],
        l_a=values["generator.l_a"],
        r_a=values["generator.r_a"],
        r_l=values["generator.r_l"],
    )
    return PlantParams(turbine=turbine, generator=generator)


def load_plant_params(path) -> PlantParams:
    mapping = parse_kv_file(path)
    unknown = set(mapping) - set(PARAM_KEYS)
    if unknown:
        raise ValidationError(f"unknown parameter keys: {', '.join(sorted(unknown))}")
    return parse_plant_params(mapping)


@dataclass(frozen=True, eq=False)
class ControllerSpec:
    """Controller block of a scenario; fields depend on kind."""

    kind: str = "none"
    q_diag: np.ndarray | None = None
    r: float | None = None
    h: np.ndarray | None = None
    convention: str = "standard-luenberger"
    model: StateSpaceModel | None = None


@dataclass(frozen=True, eq=False)
class Scenario:
    """Fully resolved run description."""

    name: str
    plant_model: StateSpaceModel
    plant_tf: TransferFunction
    plant_params: PlantParams | None
    preset: str | None
    controller: ControllerSpec
    sim: SimConfig
    reference: float | None
    outputs: tuple[str, ...]


def _resolve_plant(mapping, used: set[str]):
    sources = []
    if "plant.preset" in mapping:
        sources.append("preset")
    if any(k.startswith("plant.turbine.") or k.startswith("plant.generator.") for k in mapping):
        sources.append("params")
    if "plant.tf.num" in mapping or "plant.tf.den" in mapping:
        sources.append("tf")
    if any(k.startswith("plant.ss.") for k in mapping):
        sources.append("ss")
    if len(sources) > 1:
        raise ValidationError(f"plant specified more than once: {', '.join(sources)}")

    if "preset" in sources:
        used.add("plant.preset")
        name = mapping["plant.preset"]
        if name not in PRESETS:
            raise ValidationError(f"plant.preset: unknown preset {name!r}; choose one of {PRESETS}")
        tf = preset_tf(name)
        # Both presets describe the same physical machine, so the
        # electrical report always uses the reference parameters.
        return tf_to_ss(tf), tf, REFERENCE_PARAMS, name
    if "params" in sources:
        for key in PARAM_KEYS:
            used.add("plant." + key)
        params = parse_plant_params(mapping, prefix="plant.")
        tf = physical_plant_tf(params)
        return tf_to_ss(tf), tf, params, None
    if "tf" in sources:
        for key in ("plant.tf.num", "plant.tf.den"):
            if key not in mapping:
                raise ValidationError(f"missing required parameter {key}")
            used.add(key)
        tf = TransferFunction(
            _parse_vector("plant.tf.num", mapping["plant.tf.num"]),
            _parse_vector("plant.tf.den", mapping["plant.tf.den"]),
        )
        return tf_to_ss(tf), tf, None, None
    if "ss" in sources:
        mats = {}
        for name in ("a", "b", "c"):
            key = f"plant.ss.{name}"
            if key not in mapping:
                raise ValidationError(f"missing required parameter {key}")
            used.add(key)
            mats[name] = _parse_matrix(key, mapping[key])
        d = None
        if "plant.ss.d" in mapping:
            used.add("plant.ss.d")
            d = _parse_matrix("plant.ss.d", mapping["plant.ss.d"])
        model = StateSpaceModel(mats["a"], mats["b"], mats["c"], d)
        return model, ss_to_tf(model), None, None
    raise ValidationError("scenario does not specify a plant (plant.preset, plant.*, plant.tf.*, or plant.ss.*)")


def _resolve_controller(mapping, used: set[str]) -> ControllerSpec:
    kind = mapping.get("controller.type", "none")
    used.add("controller.type")
    if kind == "none":
        return ControllerSpec(kind="none")
    if kind in ("lqr", "observer"):
        for key in ("controller.q_diag", "controller.r"):
            if key not in mapping:
                raise ValidationError(f"missing required parameter {key}")
        used.update(("controller.q_diag", "controller.r"))
        q_diag = _parse_vector("controller.q_diag", mapping["controller.q_diag"])
        r = _parse_float("controller.r", mapping["controller.r"])
        if kind == "lqr":
            return ControllerSpec(kind="lqr", q_diag=q_diag, r=r)
        if "controller.h" not in mapping:
            raise ValidationError("missing required parameter controller.h")
        used.add("controller.h")
        h = _parse_vector("controller.h", mapping["controller.h"])
        convention = mapping.get("controller.convention", "standard-luenberger")
        used.add("controller.convention")
        if convention not in CONVENTIONS:
            raise ValidationError(
                f"controller.convention: unknown convention {convention!r}; choose one of {CONVENTIONS}"
            )
        return ControllerSpec(kind="observer", q_diag=q_diag, r=r, h=h, convention=convention)
    if kind == "ss":
        mats = {}
        for name in ("a", "b", "c"):
            key = f"controller.{name}"
            if key not in mapping:
                raise ValidationError(f"missing required parameter {key}")
            used.add(key)
            mats[name] = _parse_matrix(key, mapping[key])
        d = None
        if "controller.d" in mapping:
            used.add("controller.d")
            d = _parse_matrix("controller.d", mapping["controller.d"])
        return ControllerSpec(kind="ss", model=StateSpaceModel(mats["a"], mats["b"], mats["c"], d))
    raise ValidationError(f"controller.type: unknown kind {kind!r}; choose none, lqr, observer, or ss")


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file into a resolved Scenario."""
    mapping = parse_kv_file(path)
    used: set[str] = set()

    name = mapping.get("name", Path(path).stem)
    used.add("name")

    plant_model, plant_tf, plant_params, preset = _resolve_plant(mapping, used)
    controller = _resolve_controller(mapping, used)

    reference = None
    if "reference" in mapping:
        used.add("reference")
        reference = _parse_float("reference", mapping["reference"])
    if reference is not None and controller.kind == "none":
        raise ValidationError("reference requires a controller block")

    default_duration = 15.0 if controller.kind != "none" else 20.0
    sim = SimConfig(
        dt=_parse_float("sim.dt", mapping["sim.dt"]) if "sim.dt" in mapping else 1e-3,
        duration=(
            _parse_float("sim.duration", mapping["sim.duration"])
            if "sim.duration" in mapping
            else default_duration
        ),
        input_kind=mapping.get("sim.input_kind", "step"),
        input_amplitude=(
            _parse_float("sim.amplitude", mapping["sim.amplitude"])
            if "sim.amplitude" in mapping
            else 1.0
        ),
    )
    used.update(("sim.dt", "sim.duration", "sim.input_kind", "sim.amplitude"))

    outputs = tuple(mapping.get("outputs", "csv report").replace(",", " ").split())
    used.add("outputs")
    for out in outputs:
        if out not in OUTPUT_KINDS:
            raise ValidationError(f"outputs: unknown artifact {out!r}; choose from {OUTPUT_KINDS}")

    unknown = set(mapping) - used
    if unknown:
        raise ValidationError(f"unknown scenario keys: {', '.join(sorted(unknown))}")

    return Scenario(
        name=name,
        plant_model=plant_model,
        plant_tf=plant_tf,
        plant_params=plant_params,
        preset=preset,
        controller=controller,
        sim=sim,
        reference=reference,
        outputs=outputs,
    )
