"""Command-line front end: validate | scan | witness | spectrum.

All commands take ``--config <path>`` (a scenario JSON file), plus
``--output <dir>`` to redirect artifacts and ``--threads <n>`` to fan
grid points out to a worker pool.  Outputs are byte-deterministic:
floats are written with 17 significant digits in lowercase scientific
notation and rows are emitted in a fixed order (t1 outer, t3 inner).

Exit codes: 0 success, 2 configuration error, 3 computation error.
A witness violation is data, not an error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import (
    ConfigError,
    build_input,
    build_model,
    build_noise,
    build_protocol,
    grid_axis,
    load_config,
)
from .models import ClassicalMixture, eigenstate
from .response import select_phase_matched, spectrum_2d
from .witness import run_protocol

_SCAN_SLOTS = {3: (0, 1, 2), 2: (0, 2), 1: (2,)}


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _resolve_input_state(config: dict, model):
    state = build_input(config, model)
    if isinstance(state, str):
        return eigenstate(model, state)
    return state


def _scan_value(order, pattern, areas, delays, model, noise, state) -> complex:
    slots = _SCAN_SLOTS[order]
    sub_pattern = tuple(pattern[i] for i in slots)
    scale = math.prod(areas[i] for i in slots)
    if isinstance(state, ClassicalMixture):
        # Mixtures average *amplitudes* here: a scan row reports the
        # polarization component itself, not a detected intensity.
        total = 0.0 + 0.0j
        for j, p in enumerate(state.populations):
            if p == 0.0:
                continue
            total += p * select_phase_matched(
                order, sub_pattern, delays, model, noise, eigenstate(model, j)
            )
        return scale * total
    return scale * select_phase_matched(order, sub_pattern, delays, model, noise, state)


def _scan_delays(order: int, t1: float, t2: float, t3: float) -> tuple[float, ...]:
    # Delays follow the witness timeline: pulses at 0, t1, t1+t2 with
    # detection t3 after the last pulse.  Reduced orders drop pulses from
    # that schedule (order 2 drops the middle pulse, order 1 keeps only
    # the final one).
    if order == 3:
        return (t1, t2, t3)
    if order == 2:
        return (t1 + t2, t3)
    return (t3,)


def run_scan(config: dict, threads: int = 1) -> list[str]:
    """Compute the scan table; returns CSV lines (header first)."""
    experiment = config["experiment"]
    if experiment["kind"] != "scan":
        raise ConfigError("experiment.kind", "scan runs need kind == 'scan'")
    model = build_model(config)
    noise = build_noise(config, model.dim)
    state = _resolve_input_state(config, model)
    order = experiment["order"]
    pattern = tuple(experiment["pattern"])
    areas = list(experiment["areas"])
    axis1 = grid_axis(config["scan"]["t1"])
    axis2 = grid_axis(config["scan"]["t2"])
    axis3 = grid_axis(config["scan"]["t3"])

    points = [
        (t1, t2, t3)
        for t1 in axis1
        for t2 in axis2
        for t3 in axis3
    ]

    def evaluate(point):
        t1, t2, t3 = point
        value = _scan_value(
            order, pattern, areas, _scan_delays(order, t1, t2, t3), model, noise, state
        )
        return value

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, points))
    else:
        values = [evaluate(point) for point in points]

    lines = ["t1,t2,t3,re_p,im_p,abs2_p,order"]
    for (t1, t2, t3), value in zip(points, values):
        lines.append(
            ",".join(
                [
                    _fmt(t1), _fmt(t2), _fmt(t3),
                    _fmt(value.real), _fmt(value.imag), _fmt(abs(value) ** 2),
                    str(order),
                ]
            )
        )
    return lines


def run_witness(config: dict) -> dict:
    """Run the witness protocol; returns the JSON-ready report object."""
    report = run_protocol(build_protocol(config))
    payload = {"schema_version": "1"}
    payload.update(report.to_dict())
    return payload


def emit_spectrum(config: dict, threads: int = 1) -> list[str]:
    """Scan (t1, t3) at fixed t2, Fourier transform, return CSV lines."""
    experiment = config["experiment"]
    if experiment["kind"] != "scan":
        raise ConfigError("experiment.kind", "spectrum runs need kind == 'scan'")
    if experiment["order"] != 3:
        raise ConfigError("experiment.order", "2D spectra use order 3")
    model = build_model(config)
    noise = build_noise(config, model.dim)
    state = _resolve_input_state(config, model)
    pattern = tuple(experiment["pattern"])
    areas = list(experiment["areas"])
    axis1 = grid_axis(config["scan"]["t1"])
    axis3 = grid_axis(config["scan"]["t3"])
    t2 = float(grid_axis(config["scan"]["t2"])[0])

    points = [(t1, t3) for t1 in axis1 for t3 in axis3]

    def evaluate(point):
        t1, t3 = point
        return _scan_value(3, pattern, areas, (t1, t2, t3), model, noise, state)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(evaluate, points))
    else:
        flat = [evaluate(point) for point in points]

    import numpy as np

    values = np.array(flat, dtype=complex).reshape(axis1.size, axis3.size)
    omega1, omega3, spec = spectrum_2d(axis1, axis3, values)
    lines = ["omega1,omega3,re,im,abs"]
    for i, w1 in enumerate(omega1):
        for k, w3 in enumerate(omega3):
            z = spec[i, k]
            lines.append(
                ",".join([_fmt(w1), _fmt(w3), _fmt(z.real), _fmt(z.imag), _fmt(abs(z))])
            )
    return lines


def _write_text(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def _outdir(config: dict, override) -> Path:
    return Path(override) if override else Path(config["output"]["directory"])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="excitonspec",
        description="Nonlinear response scans and the invasiveness witness protocol.",
    )
    parser.add_argument("command", choices=["validate", "scan", "witness", "spectrum"])
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--output", default=None, help="output directory override")
    parser.add_argument("--threads", type=int, default=1, help="worker pool size for grids")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    try:
        if args.command == "validate":
            print(json.dumps(config, indent=2, sort_keys=True))
            return 0
        outdir = _outdir(config, args.output)
        if args.command == "scan":
            lines = run_scan(config, threads=max(1, args.threads))
            target = outdir / config["output"]["scan_csv"]
            _write_text(target, lines)
            print(f"wrote {target}")
            return 0
        if args.command == "witness":
            payload = run_witness(config)
            target = outdir / config["output"]["witness_json"]
            _write_json(target, payload)
            print(f"wrote {target}")
            return 0
        lines = emit_spectrum(config, threads=max(1, args.threads))
        target = outdir / config["output"]["spectrum_csv"]
        _write_text(target, lines)
        print(f"wrote {target}")
        return 0
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # computation failure: report and signal distinctly
        print(f"computation error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
