"""Scenario files: strict JSON schema with explicit defaults.

A scenario is a single JSON object.  Validation is strict (unknown keys
are rejected, naming the offending dotted path) and returns a normalized
copy with every applied default made explicit, so a validated config
re-serializes to an equivalent config.

Top-level blocks::

    system      dimer parameters or a general site list
    noise       uniform dephasing rate or a full rate matrix
    pulses      three pulse events (required for witness runs)
    experiment  kind "scan" or "witness" plus its parameters
    scan        uniform delay grids t1/t2/t3 (scan and spectrum runs)
    output      file names and output directory
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .dynamics import DephasingModel
from .models import ClassicalMixture, DimerParams, ExcitonModel, build_dimer, build_general, gibbs_populations
from .response import PulseEvent
from .witness import ProtocolConfig


class ConfigError(ValueError):
    """A scenario file failed validation; ``path`` names the field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(obj: dict, path: str, allowed: set[str]) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise ConfigError(where, "unknown key")


def _number(obj: dict, path: str, key: str, default=None, minimum=None, allow_none=False):
    if key not in obj:
        if default is ... :
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    value = obj[key]
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    value = float(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _integer(obj: dict, path: str, key: str, default=None, minimum=None):
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{key}", f"must be >= {minimum}, got {value}")
    return int(value)


def _string(obj: dict, path: str, key: str, default=None, choices=None):
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    value = obj[key]
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(f"{path}.{key}", f"expected one of {sorted(choices)}, got {value!r}")
    return value


def _boolean(obj: dict, path: str, key: str, default=None):
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    value = obj[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}", f"expected true/false, got {value!r}")
    return value


def _number_list(value, path: str, length: Optional[int] = None) -> list[float]:
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise ConfigError(path, "expected a list of numbers")
    out = [float(v) for v in value]
    if length is not None and len(out) != length:
        raise ConfigError(path, f"expected {length} entries, got {len(out)}")
    return out


def _validate_system(raw: dict) -> tuple[dict, int]:
    if "system" not in raw:
        raise ConfigError("system", "missing required block")
    sys_block = _require_mapping(raw["system"], "system")
    kind = _string(sys_block, "system", "type", default=..., choices={"dimer", "sites"})
    if kind == "dimer":
        _reject_unknown(
            sys_block, "system", {"type", "omega_a", "omega_b", "j_coupling", "mu_a", "mu_b"}
        )
        out = {
            "type": "dimer",
            "omega_a": _number(sys_block, "system", "omega_a", default=...),
            "omega_b": _number(sys_block, "system", "omega_b", default=...),
            "j_coupling": _number(sys_block, "system", "j_coupling", default=...),
            "mu_a": _number(sys_block, "system", "mu_a", default=1.0),
            "mu_b": _number(sys_block, "system", "mu_b", default=1.0),
        }
        if out["omega_a"] <= 0:
            raise ConfigError("system.omega_a", "must be positive")
        if out["omega_b"] <= 0:
            raise ConfigError("system.omega_b", "must be positive")
        return out, 4
    _reject_unknown(sys_block, "system", {"type", "energies", "couplings", "dipoles", "two_exciton"})
    if "energies" not in sys_block:
        raise ConfigError("system.energies", "missing required value")
    energies = _number_list(sys_block["energies"], "system.energies")
    n = len(energies)
    if n == 0:
        raise ConfigError("system.energies", "needs at least one site")
    if min(energies) <= 0:
        raise ConfigError("system.energies", "site energies must be positive")
    couplings_raw = sys_block.get("couplings")
    if couplings_raw is None:
        couplings = [[0.0] * n for _ in range(n)]
    else:
        if not isinstance(couplings_raw, list) or len(couplings_raw) != n:
            raise ConfigError("system.couplings", f"expected an {n}x{n} matrix")
        couplings = [_number_list(row, f"system.couplings[{i}]", n) for i, row in enumerate(couplings_raw)]
    dipoles_raw = sys_block.get("dipoles")
    dipoles = [1.0] * n if dipoles_raw is None else _number_list(dipoles_raw, "system.dipoles", n)
    two_exciton = _boolean(sys_block, "system", "two_exciton", default=(n == 2))
    if two_exciton and n != 2:
        raise ConfigError("system.two_exciton", "only supported for two sites")
    out = {
        "type": "sites",
        "energies": energies,
        "couplings": couplings,
        "dipoles": dipoles,
        "two_exciton": two_exciton,
    }
    return out, 1 + n + (1 if two_exciton else 0)


def _validate_noise(raw: dict, dim: int) -> dict:
    block = _require_mapping(raw.get("noise", {"gamma": 0.0}), "noise")
    _reject_unknown(block, "noise", {"gamma", "gamma_matrix", "allow_population_decay"})
    allow = _boolean(block, "noise", "allow_population_decay", default=False)
    if "gamma_matrix" in block:
        if "gamma" in block:
            raise ConfigError("noise", "give either gamma or gamma_matrix, not both")
        matrix_raw = block["gamma_matrix"]
        if not isinstance(matrix_raw, list) or len(matrix_raw) != dim:
            raise ConfigError("noise.gamma_matrix", f"expected a {dim}x{dim} matrix")
        matrix = [_number_list(row, f"noise.gamma_matrix[{i}]", dim) for i, row in enumerate(matrix_raw)]
        if min(min(row) for row in matrix) < 0:
            raise ConfigError("noise.gamma_matrix", "rates must be non-negative")
        return {"gamma_matrix": matrix, "allow_population_decay": allow}
    gamma = _number(block, "noise", "gamma", default=0.0)
    if gamma < 0:
        raise ConfigError("noise.gamma", "must be >= 0")
    return {"gamma": gamma, "allow_population_decay": allow}


def _validate_pulse(raw, path: str) -> dict:
    block = _require_mapping(raw, path)
    _reject_unknown(block, path, {"arrival", "area", "carrier", "mode", "width", "k_sign"})
    mode = _string(block, path, "mode", default="impulsive", choices={"impulsive", "finite"})
    width = _number(block, path, "width", default=None, allow_none=True)
    if mode == "finite" and (width is None or width <= 0):
        raise ConfigError(f"{path}.width", "finite pulses need width > 0")
    k_sign = _integer(block, path, "k_sign", default=1)
    if k_sign not in (-1, 1):
        raise ConfigError(f"{path}.k_sign", "must be +1 or -1")
    return {
        "arrival": _number(block, path, "arrival", default=...),
        "area": _number(block, path, "area", default=1.0),
        "carrier": _number(block, path, "carrier", default=0.0),
        "mode": mode,
        "width": width,
        "k_sign": k_sign,
    }


def _validate_pulses(raw: dict) -> Optional[list[dict]]:
    if "pulses" not in raw:
        return None
    pulses_raw = raw["pulses"]
    if not isinstance(pulses_raw, list) or len(pulses_raw) != 3:
        raise ConfigError("pulses", "expected a list of exactly three pulses")
    pulses = [_validate_pulse(p, f"pulses[{i}]") for i, p in enumerate(pulses_raw)]
    arrivals = [p["arrival"] for p in pulses]
    if any(b <= a for a, b in zip(arrivals, arrivals[1:])):
        raise ConfigError("pulses", "arrival times must be strictly increasing")
    return pulses


def _validate_input(block: dict, path: str, dim: int):
    if "input" not in block:
        return "g"
    value = block["input"]
    if isinstance(value, str):
        return value
    obj = _require_mapping(value, f"{path}.input")
    _reject_unknown(obj, f"{path}.input", {"gibbs_beta", "populations"})
    if ("gibbs_beta" in obj) == ("populations" in obj):
        raise ConfigError(f"{path}.input", "give exactly one of gibbs_beta or populations")
    if "gibbs_beta" in obj:
        beta = _number(obj, f"{path}.input", "gibbs_beta", default=..., minimum=0.0)
        return {"gibbs_beta": beta}
    pops = _number_list(obj["populations"], f"{path}.input.populations", dim)
    if min(pops) < 0:
        raise ConfigError(f"{path}.input.populations", "must be non-negative")
    if abs(sum(pops) - 1.0) > 1e-8:
        raise ConfigError(f"{path}.input.populations", "must sum to 1")
    return {"populations": pops}


def _validate_pattern(block: dict, path: str, default: list[int]) -> list[int]:
    if "pattern" not in block:
        return list(default)
    value = block["pattern"]
    if (
        not isinstance(value, list)
        or len(value) != 3
        or any(isinstance(v, bool) or v not in (-1, 1) for v in value)
    ):
        raise ConfigError(f"{path}.pattern", "expected three entries from {-1, +1}")
    return [int(v) for v in value]


def _validate_axis(raw, path: str) -> dict:
    block = _require_mapping(raw, path)
    _reject_unknown(block, path, {"start", "stop", "num"})
    start = _number(block, path, "start", default=...)
    stop = _number(block, path, "stop", default=...)
    num = _integer(block, path, "num", default=..., minimum=1)
    if start < 0:
        raise ConfigError(f"{path}.start", "delays must be non-negative")
    if stop < start:
        raise ConfigError(f"{path}.stop", "must be >= start")
    if num == 1 and stop != start:
        raise ConfigError(f"{path}.num", "num == 1 requires stop == start")
    return {"start": start, "stop": stop, "num": num}


def _validate_scan(raw: dict) -> Optional[dict]:
    if "scan" not in raw:
        return None
    block = _require_mapping(raw["scan"], "scan")
    _reject_unknown(block, "scan", {"t1", "t2", "t3"})
    out = {}
    for key in ("t1", "t2", "t3"):
        if key not in block:
            raise ConfigError(f"scan.{key}", "missing required grid")
        out[key] = _validate_axis(block[key], f"scan.{key}")
    return out


def _validate_experiment(raw: dict, dim: int, pulses: Optional[list[dict]]) -> dict:
    if "experiment" not in raw:
        raise ConfigError("experiment", "missing required block")
    block = _require_mapping(raw["experiment"], "experiment")
    kind = _string(block, "experiment", "kind", default=..., choices={"scan", "witness"})
    default_pattern = [p["k_sign"] for p in pulses] if pulses else [-1, 1, 1]
    if kind == "scan":
        _reject_unknown(block, "experiment", {"kind", "order", "pattern", "input", "areas"})
        order = _integer(block, "experiment", "order", default=3)
        if order not in (1, 2, 3):
            raise ConfigError("experiment.order", "must be 1, 2 or 3")
        areas = _number_list(block.get("areas", [1.0, 1.0, 1.0]), "experiment.areas", 3)
        return {
            "kind": "scan",
            "order": order,
            "pattern": _validate_pattern(block, "experiment", default_pattern),
            "input": _validate_input(block, "experiment", dim),
            "areas": areas,
        }
    _reject_unknown(
        block,
        "experiment",
        {
            "kind", "detect_time", "pattern", "input", "controls", "detection",
            "mode", "semi_impulsive", "bypass_first", "quad_step", "tolerance",
        },
    )
    if pulses is None:
        raise ConfigError("pulses", "witness experiments require the pulses block")
    detect_time = _number(block, "experiment", "detect_time", default=...)
    if detect_time < pulses[-1]["arrival"]:
        raise ConfigError("experiment.detect_time", "must not precede the last pulse")
    controls = block.get("controls", "eigenstates")
    if isinstance(controls, str):
        if controls != "eigenstates":
            raise ConfigError("experiment.controls", "expected 'eigenstates' or {gibbs_betas: [...]}")
        controls_norm = "eigenstates"
    else:
        obj = _require_mapping(controls, "experiment.controls")
        _reject_unknown(obj, "experiment.controls", {"gibbs_betas"})
        betas = _number_list(obj.get("gibbs_betas", []), "experiment.controls.gibbs_betas")
        if len(betas) < dim:
            raise ConfigError(
                "experiment.controls.gibbs_betas", f"need at least {dim} temperatures"
            )
        if min(betas) < 0:
            raise ConfigError("experiment.controls.gibbs_betas", "betas must be >= 0")
        controls_norm = {"gibbs_betas": betas}
    mode = _string(block, "experiment", "mode", default="impulsive", choices={"impulsive", "convolved"})
    expected_pulse_mode = "impulsive" if mode == "impulsive" else "finite"
    if any(p["mode"] != expected_pulse_mode for p in pulses):
        raise ConfigError("pulses", f"{mode} witness runs require {expected_pulse_mode} pulses")
    return {
        "kind": "witness",
        "detect_time": detect_time,
        "pattern": _validate_pattern(block, "experiment", default_pattern),
        "input": _validate_input(block, "experiment", dim),
        "controls": controls_norm,
        "detection": _string(block, "experiment", "detection", default="strict",
                             choices={"strict", "per_branch"}),
        "mode": mode,
        "semi_impulsive": _boolean(block, "experiment", "semi_impulsive", default=False),
        "bypass_first": _boolean(block, "experiment", "bypass_first", default=False),
        "quad_step": _number(block, "experiment", "quad_step", default=None,
                             allow_none=True),
        "tolerance": _number(block, "experiment", "tolerance", default=1e-9, minimum=0.0),
    }


def _validate_output(raw: dict) -> dict:
    block = _require_mapping(raw.get("output", {}), "output")
    _reject_unknown(block, "output", {"directory", "scan_csv", "witness_json", "spectrum_csv"})
    return {
        "directory": _string(block, "output", "directory", default="."),
        "scan_csv": _string(block, "output", "scan_csv", default="scan.csv"),
        "witness_json": _string(block, "output", "witness_json", default="witness.json"),
        "spectrum_csv": _string(block, "output", "spectrum_csv", default="spectrum.csv"),
    }


def validate_config(raw: dict) -> dict:
    """Validate a parsed scenario and return it with defaults made explicit."""
    raw = _require_mapping(raw, "")
    _reject_unknown(
        raw, "", {"schema_version", "system", "noise", "pulses", "experiment", "scan", "output"}
    )
    version = _string(raw, "", "schema_version", default="1")
    if version != "1":
        raise ConfigError("schema_version", f"unsupported version {version!r}")
    system, dim = _validate_system(raw)
    pulses = _validate_pulses(raw)
    experiment = _validate_experiment(raw, dim, pulses)
    scan = _validate_scan(raw)
    if experiment["kind"] == "scan" and scan is None:
        raise ConfigError("scan", "scan experiments require the scan block")
    normalized = {
        "schema_version": "1",
        "system": system,
        "noise": _validate_noise(raw, dim),
        "experiment": experiment,
        "output": _validate_output(raw),
    }
    if pulses is not None:
        normalized["pulses"] = pulses
    if scan is not None:
        normalized["scan"] = scan
    return normalized


def load_config(path) -> dict:
    """Parse and validate a scenario file; parse errors keep line info."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("", f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from err
    return validate_config(raw)


# --- builders from a normalized config -------------------------------------


def build_model(config: dict) -> ExcitonModel:
    system = config["system"]
    if system["type"] == "dimer":
        return build_dimer(
            DimerParams(
                omega_a=system["omega_a"],
                omega_b=system["omega_b"],
                j_coupling=system["j_coupling"],
                mu_a=system["mu_a"],
                mu_b=system["mu_b"],
            )
        )
    return build_general(
        system["energies"],
        np.array(system["couplings"]),
        system["dipoles"],
        two_exciton=system["two_exciton"],
    )


def build_noise(config: dict, dim: int) -> DephasingModel:
    noise = config["noise"]
    if "gamma_matrix" in noise:
        return DephasingModel(
            np.array(noise["gamma_matrix"]),
            allow_population_decay=noise["allow_population_decay"],
        )
    return DephasingModel.uniform(dim, noise["gamma"])


def build_pulses(config: dict) -> tuple[PulseEvent, ...]:
    return tuple(
        PulseEvent(
            arrival=p["arrival"], area=p["area"], carrier=p["carrier"],
            mode=p["mode"], width=p["width"], k_sign=p["k_sign"],
        )
        for p in config["pulses"]
    )


def build_input(config: dict, model: ExcitonModel):
    spec = config["experiment"]["input"]
    if isinstance(spec, str):
        model.level_index(spec)  # fail early on unknown labels
        return spec
    if "gibbs_beta" in spec:
        return gibbs_populations(model, spec["gibbs_beta"])
    return ClassicalMixture(np.array(spec["populations"]))


def build_protocol(config: dict) -> ProtocolConfig:
    experiment = config["experiment"]
    if experiment["kind"] != "witness":
        raise ConfigError("experiment.kind", "witness runs need kind == 'witness'")
    model = build_model(config)
    controls = experiment["controls"]
    return ProtocolConfig(
        model=model,
        noise=build_noise(config, model.dim),
        pulses=build_pulses(config),
        detect_time=experiment["detect_time"],
        input_state=build_input(config, model),
        pattern=tuple(experiment["pattern"]),
        control_strategy="eigenstates" if controls == "eigenstates" else controls["gibbs_betas"],
        detection=experiment["detection"],
        mode=experiment["mode"],
        semi_impulsive=experiment["semi_impulsive"],
        bypass_first=experiment["bypass_first"],
        quad_step=experiment["quad_step"],
        tol=experiment["tolerance"],
    )


def grid_axis(axis: dict) -> np.ndarray:
    return np.linspace(axis["start"], axis["stop"], axis["num"])
