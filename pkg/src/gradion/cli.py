"""Command-line front end.

One subcommand per invocation:

    modes      vibrational frequencies and mode vectors of a layout
    couplings  full coupling report (J, J13, eps, qubit frequencies)
    spectrum   conditional carrier-transition table
    table1     constrained search for the largest J at trap spacing d
    table3     constrained search for the largest J at ion spacing h
    cnot       CNOT pulse schedule, duration, and gate-fidelity check
    teleport   one teleportation run, reported as JSON
    verify     run the numeric invariant suite

Physical parameters come from a preset (``--preset table1-d4``), a config
file (``key = value`` lines, ``#`` comments), and command flags, in that
order of increasing precedence. Exit codes: 0 success, 1 computation
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .constants import TWO_PI, DEFAULT_CONSTANTS, PhysicalConstants
from .couplings import (FieldConfig, carrier_spectrum, compute_couplings,
                        neighbor_resonance_shift)
from .operators import cnot_matrix, deviation_up_to_phase
from .presets import PRESETS
from .pulses import (FreeEvolution, INTERACTION, LAB, build_cnot,
                     schedule_unitary, serialize_schedule)
from .search import SearchSpace, maximize_J_linear, maximize_J_multitrap
from .teleport import ProtocolConfig, run_teleport
from .trap import TrapLayout, linear_frequency_for_spacing, normal_modes, solve_equilibrium
from . import verify as verify_mod

CONFIG_KEYS = {
    "preset": str,
    "mode": str,
    "d_um": float,
    "h_um": float,
    "w1_2pi_mhz": float,
    "w2_2pi_mhz": float,
    "w_2pi_mhz": float,
    "gradient_t_per_m": float,
    "b0_t": float,
    "eta": float,
    "mass_amu": float,
    "hyperfine_2pi_ghz": float,
    "g_factor": float,
    "rabi_2pi_mhz": float,
    "t_m_us": float,
    "eps_ceiling": float,
    "seed": int,
}


def load_config(path: str) -> dict:
    """Parse a ``key = value`` config file; unknown keys and bad values fail
    with the offending line number."""
    settings: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                settings[key] = CONFIG_KEYS[key](value)
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: malformed value {value!r} for {key!r}")
    return settings


def _merge_settings(args) -> dict:
    settings: dict = {}
    if getattr(args, "config", None):
        settings.update(load_config(args.config))
    if getattr(args, "preset", None):
        settings["preset"] = args.preset
    if "preset" in settings:
        name = settings["preset"]
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        merged = dict(PRESETS[name])
        merged.update({k: v for k, v in settings.items() if k != "preset"})
        merged["preset"] = name
        settings = merged
    return settings


def _constants(settings: dict) -> PhysicalConstants:
    constants = DEFAULT_CONSTANTS
    if "mass_amu" in settings:
        constants = constants.with_mass_amu(settings["mass_amu"])
    if "hyperfine_2pi_ghz" in settings or "g_factor" in settings:
        constants = PhysicalConstants(
            charge=constants.charge, epsilon0=constants.epsilon0,
            hbar=constants.hbar, mu_b=constants.mu_b, amu=constants.amu,
            mass=constants.mass,
            g_factor=settings.get("g_factor", constants.g_factor),
            hyperfine=TWO_PI * settings["hyperfine_2pi_ghz"] * 1e9
            if "hyperfine_2pi_ghz" in settings else constants.hyperfine)
    return constants


def _layout_field(settings: dict, constants: PhysicalConstants):
    mode = settings.get("mode")
    if mode is None:
        raise ValueError("no layout given; pass --preset, or mode/... in a config")
    gradient = settings.get("gradient_t_per_m")
    if gradient is None:
        raise ValueError("no field gradient given (gradient_t_per_m)")
    field = FieldConfig(gradient=gradient, b0=settings.get("b0_t", 1.0),
                        eta=settings.get("eta", 1e-6))
    if mode == "multi":
        for key in ("d_um", "w1_2pi_mhz", "w2_2pi_mhz"):
            if key not in settings:
                raise ValueError(f"multi-trap layout needs {key}")
        layout = TrapLayout.multi_trap(settings["d_um"] * 1e-6,
                                       TWO_PI * settings["w1_2pi_mhz"] * 1e6,
                                       TWO_PI * settings["w2_2pi_mhz"] * 1e6,
                                       constants)
    elif mode == "linear":
        if "w_2pi_mhz" in settings:
            w = TWO_PI * settings["w_2pi_mhz"] * 1e6
        elif "h_um" in settings:
            w = linear_frequency_for_spacing(settings["h_um"] * 1e-6, constants)
        else:
            raise ValueError("linear layout needs w_2pi_mhz or h_um")
        layout = TrapLayout.linear(w, constants)
    else:
        raise ValueError(f"unknown layout mode {mode!r}")
    return layout, field


def _pipeline(settings: dict):
    constants = _constants(settings)
    layout, field = _layout_field(settings, constants)
    eq = solve_equilibrium(layout)
    modes = normal_modes(layout, eq)
    couplings = compute_couplings(modes, field, eq, constants)
    return constants, layout, field, eq, modes, couplings


def _plain(value):
    """Coerce numpy scalars and arrays to plain Python types for rendering."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    return value


def _emit(args, payload: dict, csv_rows: list[dict] | None = None) -> None:
    payload = _plain(payload)
    csv_rows = None if csv_rows is None else [_plain(r) for r in csv_rows]
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif args.format == "csv":
        rows = csv_rows if csv_rows is not None else [payload]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})
        text = buf.getvalue()
    else:
        lines = []

        def table(prefix, rows):
            cols = list(rows[0].keys())
            cells = [[str(row[c]) for c in cols] for row in rows]
            widths = [max(len(c), *(len(r[i]) for r in cells))
                      for i, c in enumerate(cols)]
            lines.append(prefix + "  ".join(c.ljust(w) for c, w in zip(cols, widths)))
            for r in cells:
                lines.append(prefix + "  ".join(v.ljust(w) for v, w in zip(r, widths)))

        def walk(prefix, obj):
            for k, v in obj.items():
                if isinstance(v, dict):
                    walk(f"{prefix}{k}.", v)
                elif isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
                    lines.append(f"{prefix}{k}:")
                    table("  ", v)
                else:
                    lines.append(f"{prefix}{k} = {v}")

        walk("", payload)
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _couplings_payload(settings, layout, field, eq, modes, couplings) -> dict:
    payload = {
        "preset": settings.get("preset"),
        "mode": layout.mode,
        "gradient_t_per_m": field.gradient,
        "delta_um": eq.delta * 1e6,
        "h_um": eq.h * 1e6,
        "eps_max": couplings.eps_max,
        "j_2pi_khz": couplings.J / (TWO_PI * 1e3),
        "j13_2pi_khz": couplings.J13 / (TWO_PI * 1e3),
        "nu_2pi_mhz": [nu / (TWO_PI * 1e6) for nu in modes.nu],
        "raw_rad_s": {
            "j": couplings.J,
            "j13": couplings.J13,
            "nu": list(modes.nu),
            "w": list(couplings.w),
            "dwdz_rad_per_s_m": couplings.dwdz,
        },
    }
    if layout.mode == "multi":
        payload["d_um"] = layout.d * 1e6
        payload["w1_2pi_mhz"] = layout.frequencies[0] / (TWO_PI * 1e6)
        payload["w2_2pi_mhz"] = layout.frequencies[1] / (TWO_PI * 1e6)
    else:
        payload["w_2pi_mhz"] = layout.frequencies[0] / (TWO_PI * 1e6)
    return payload


def _couplings_csv(payload: dict) -> list[dict]:
    if payload["mode"] == "multi":
        cols = ["d_um", "w1_2pi_mhz", "w2_2pi_mhz", "gradient_t_per_m",
                "delta_um", "eps_max", "h_um", "j_2pi_khz", "j13_2pi_khz"]
    else:
        cols = ["h_um", "w_2pi_mhz", "gradient_t_per_m", "eps_max",
                "j_2pi_khz", "j13_2pi_khz"]
    return [{c: payload[c] for c in cols}]


# -- subcommand handlers ------------------------------------------------------

def cmd_modes(args) -> int:
    settings = _merge_settings(args)
    _, layout, field, eq, modes, _ = _pipeline(settings)
    payload = {
        "preset": settings.get("preset"),
        "mode": layout.mode,
        "positions_um": [z * 1e6 for z in eq.positions],
        "nu_2pi_mhz": [nu / (TWO_PI * 1e6) for nu in modes.nu],
        "mode_matrix": [[float(x) for x in row] for row in modes.D],
        "raw_rad_s": {"nu": list(modes.nu)},
    }
    _emit(args, payload)
    return 0


def cmd_couplings(args) -> int:
    settings = _merge_settings(args)
    _, layout, field, eq, modes, couplings = _pipeline(settings)
    payload = _couplings_payload(settings, layout, field, eq, modes, couplings)
    _emit(args, payload, _couplings_csv(payload))
    return 0


def cmd_spectrum(args) -> int:
    settings = _merge_settings(args)
    constants, layout, field, eq, modes, couplings = _pipeline(settings)
    spec = carrier_spectrum(couplings)
    rows = []
    for ion in range(3):
        others = [o for o in (1, 2, 3) if o != ion + 1]
        for k in range(4):
            label = f"{(k >> 1) & 1}{k & 1}"
            rows.append({
                "ion": ion + 1,
                "others": f"ion{others[0]}ion{others[1]}={label}",
                "frequency_rad_s": spec.transitions[ion, k],
                "offset_2pi_khz": (spec.transitions[ion, k] - couplings.w[ion])
                / (TWO_PI * 1e3),
            })
    payload = {
        "preset": settings.get("preset"),
        "neighbor_shift_2pi_mhz": neighbor_resonance_shift(field, eq.h, constants)
        / (TWO_PI * 1e6),
        "spreads_2pi_khz": [s / (TWO_PI * 1e3) for s in spec.spreads],
        "transitions": rows,
    }
    _emit(args, payload, rows)
    return 0


def _search_space(settings: dict) -> SearchSpace:
    return SearchSpace(eps_ceiling=settings.get("eps_ceiling", 0.05),
                       b0=settings.get("b0_t", 1.0),
                       eta=settings.get("eta", 1e-6))


def cmd_table1(args) -> int:
    settings = _merge_settings(args)
    constants = _constants(settings)
    result = maximize_J_multitrap(args.d * 1e-6, _search_space(settings), constants)
    if not result.feasible:
        print("no feasible point found", file=sys.stderr)
        return 1
    payload = {
        "d_um": args.d,
        "w1_2pi_mhz": result.params.w1 / (TWO_PI * 1e6),
        "w2_2pi_mhz": result.params.w2 / (TWO_PI * 1e6),
        "gradient_t_per_m": result.params.gradient,
        "delta_um": result.delta * 1e6,
        "eps_max": result.eps_max,
        "h_um": result.h * 1e6,
        "j_2pi_khz": result.J / (TWO_PI * 1e3),
        "j13_2pi_khz": result.J13 / (TWO_PI * 1e3),
        "evaluations": result.evaluations,
    }
    cols = ["d_um", "w1_2pi_mhz", "w2_2pi_mhz", "gradient_t_per_m", "delta_um",
            "eps_max", "h_um", "j_2pi_khz", "j13_2pi_khz"]
    _emit(args, payload, [{c: payload[c] for c in cols}])
    return 0


def cmd_table3(args) -> int:
    settings = _merge_settings(args)
    constants = _constants(settings)
    result = maximize_J_linear(args.h * 1e-6, _search_space(settings), constants)
    if not result.feasible:
        print("no feasible point found", file=sys.stderr)
        return 1
    payload = {
        "h_um": args.h,
        "w_2pi_mhz": result.params.w / (TWO_PI * 1e6),
        "gradient_t_per_m": result.params.gradient,
        "eps_max": result.eps_max,
        "j_2pi_khz": result.J / (TWO_PI * 1e3),
        "j13_2pi_khz": result.J13 / (TWO_PI * 1e3),
        "evaluations": result.evaluations,
    }
    cols = ["h_um", "w_2pi_mhz", "gradient_t_per_m", "eps_max", "j_2pi_khz",
            "j13_2pi_khz"]
    _emit(args, payload, [{c: payload[c] for c in cols}])
    return 0


def cmd_cnot(args) -> int:
    settings = _merge_settings(args)
    if "preset" not in settings and "mode" not in settings:
        settings = {**PRESETS["table1-d4"], "preset": "table1-d4", **settings}
    _, layout, field, eq, modes, couplings = _pipeline(settings)
    control, target = (int(x) for x in args.pair.split(","))
    frame = LAB if args.frame == "lab" else INTERACTION
    t_m = settings.get("t_m_us", 2.5) * 1e-6
    rabi = TWO_PI * settings.get("rabi_2pi_mhz", 1.0) * 1e6
    schedule = build_cnot(control, target, couplings, t_m=t_m, frame=frame,
                          rabi=rabi, commensurate=(frame == LAB))
    deviation = deviation_up_to_phase(schedule_unitary(schedule, couplings),
                                      cnot_matrix(control, target))
    t_zz = sum(item.duration for item in schedule.items
               if isinstance(item, FreeEvolution))
    payload = {
        "preset": settings.get("preset"),
        "pair": [control, target],
        "frame": frame,
        "zz_time_ms": t_zz * 1e3,
        "total_duration_ms": schedule.total_duration * 1e3,
        "pulse_count": sum(1 for _ in schedule.pulses()),
        "gate_deviation_from_cnot": deviation,
    }
    if frame == LAB:
        payload["max_commensuration_residual_rad"] = max(
            max(abs(r) for r in p.residuals) for p in schedule.pulses())
    if args.emit_schedule:
        with open(args.emit_schedule, "w", encoding="utf-8") as fh:
            fh.write(serialize_schedule(schedule))
        payload["schedule_file"] = args.emit_schedule
    _emit(args, payload)
    return 0


def cmd_teleport(args) -> int:
    settings = _merge_settings(args)
    couplings = None
    if args.mode != "ideal":
        if "preset" not in settings and "mode" not in settings:
            settings = {**PRESETS["table1-d4"], "preset": "table1-d4", **settings}
        couplings = _pipeline(settings)[5]
    rates = (args.dephasing_rate_hz,) * 3 if args.dephasing_rate_hz else (0.0,) * 3
    config = ProtocolConfig(
        alpha=complex(args.alpha), beta=complex(args.beta), gate_mode=args.mode,
        seed=args.seed if args.seed is not None else settings.get("seed"),
        couplings=couplings, dephasing=rates,
        t_m=settings.get("t_m_us", 2.5) * 1e-6,
        rabi=TWO_PI * settings.get("rabi_2pi_mhz", 1.0) * 1e6)
    record = run_teleport(config)
    text = record.to_json() + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    checks = verify_mod.run_all()
    width = max(len(name) for name, _, _ in checks)
    failed = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name:<{width}}  {detail}")
        failed += 0 if ok else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradion",
        description="Three trapped ions in a magnetic field gradient.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, presets=True):
        p.add_argument("--config", help="key=value config file")
        if presets:
            p.add_argument("--preset", help=f"one of {', '.join(sorted(PRESETS))}")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--output", help="write the report here instead of stdout")

    for name, fn in (("modes", cmd_modes), ("couplings", cmd_couplings),
                     ("spectrum", cmd_spectrum)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(handler=fn)

    p = sub.add_parser("table1", help="largest-J search for a micro-trap spacing")
    common(p)
    p.add_argument("--d", type=float, default=4.0, help="trap spacing in um")
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser("table3", help="largest-J search for a linear-trap spacing")
    common(p)
    p.add_argument("--h", type=float, default=4.0, help="ion spacing in um")
    p.set_defaults(handler=cmd_table3)

    p = sub.add_parser("cnot")
    common(p)
    p.add_argument("--pair", default="2,3", help="control,target (adjacent ions)")
    p.add_argument("--frame", choices=("interaction", "lab"), default="interaction")
    p.add_argument("--emit-schedule", help="write the pulse schedule to this file")
    p.set_defaults(handler=cmd_cnot)

    p = sub.add_parser("teleport")
    common(p)
    p.add_argument("--alpha", default="1", help="complex amplitude of |0>")
    p.add_argument("--beta", default="0", help="complex amplitude of |1>")
    p.add_argument("--mode", choices=("ideal", "scheduled", "integrated"),
                   default="ideal")
    p.add_argument("--seed", type=int)
    p.add_argument("--dephasing-rate-hz", type=float, default=0.0,
                   help="phase-damping rate applied to every qubit (1/s)")
    p.set_defaults(handler=cmd_teleport)

    p = sub.add_parser("verify", help="run the numeric invariant suite")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
