"""Command-line front end: plan, simulate, render, analyze, bus-demo, serve.

The byte-producing core functions here are shared with the HTTP service,
which is what guarantees the two front ends emit identical documents for
identical inputs.  Exit codes: 2 unreadable/invalid input, 3 empty plan,
4 plan/chain mismatch, 5 I/O failure, 6 invalid parameter values.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from typing import Any, Optional, Sequence

from . import bus as bus_mod
from . import control, files, mechanics, render
from .errors import (
    AnchorMismatch,
    ChainTooShort,
    EmptyPlan,
    SchemaError,
    SelfIntersection,
    UnbalancedChains,
)
from .geometry import AnchorPose, approximation_error, strip_from_plan
from .planner import TruncatedBranchWarning, plan_curve

EXIT_PARSE = 2
EXIT_EMPTY_PLAN = 3
EXIT_CHAIN_MISMATCH = 4
EXIT_IO = 5
EXIT_PARAMS = 6

_EXIT_CODES: list[tuple[type, int]] = [
    (SchemaError, EXIT_PARSE),
    (SelfIntersection, EXIT_PARSE),
    (EmptyPlan, EXIT_EMPTY_PLAN),
    (ChainTooShort, EXIT_CHAIN_MISMATCH),
    (AnchorMismatch, EXIT_PARAMS),
    (UnbalancedChains, EXIT_PARAMS),
    (OSError, EXIT_IO),
    (ValueError, EXIT_PARAMS),
]


def exit_code_for(ex: BaseException) -> Optional[int]:
    for exc_type, code in _EXIT_CODES:
        if isinstance(ex, exc_type):
            return code
    return None


def _fmt_ms(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


# ----------------------------------------------------------------- timing

def resolve_timing(
    arg: Optional[str], allow_file: bool = True
) -> control.TimingParams:
    """Preset name, then environment, then the measured preset.

    A non-preset value names a timing JSON file when files are allowed.
    """
    name = arg or os.environ.get("FOLDCHAIN_TIMING_PRESET") or "measured"
    preset = control.TIMING_PRESETS.get(name)
    if preset is not None:
        return preset()
    if allow_file:
        return files.timing_from_obj(files.read_json_file(name))
    raise SchemaError(f"unknown timing preset {name!r}")


def parse_n_range(text: str) -> range:
    """``a:b[:step]`` with both ends included."""
    parts = text.split(":")
    if len(parts) not in (2, 3) or not all(p.lstrip("-").isdigit() for p in parts):
        raise SchemaError(f"range must be a:b[:step], got {text!r}")
    a, b = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step < 1 or a < 0 or b < a:
        raise SchemaError(f"range needs 0 <= a <= b and step >= 1, got {text!r}")
    return range(a, b + 1, step)


DEFAULT_N_RANGE = "10:180:10"


# ------------------------------------------------------- core byte emitters

def plan_bytes(
    curve_obj: Any,
    anchor: str = "auto",
    chain: Optional[int] = None,
) -> tuple[bytes, list[str]]:
    """PlanFile bytes plus human-readable warnings."""
    curve, pitch = files.curve_from_obj(curve_obj)
    if anchor == "auto":
        anchor_pose = "auto"
    elif anchor == "canonical":
        anchor_pose = AnchorPose.canonical()
    else:
        raise SchemaError(f"anchor must be 'auto' or 'canonical', got {anchor!r}")
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncatedBranchWarning)
        result = plan_curve(curve, pitch, anchor=anchor_pose)
    notes += [str(w.message) for w in caught if issubclass(w.category, TruncatedBranchWarning)]
    if chain is not None and chain < len(result.plan):
        notes.append(
            f"plan folds {len(result.plan)} particles but the chain has only {chain}"
        )
    metrics = approximation_error(result.strip, curve, pitch=pitch)
    doc = files.plan_to_obj(result.plan, result.strip, pitch, metrics=metrics)
    return files.dumps_canonical(doc).encode(), notes


def simulate_bytes(
    plan_obj: Any,
    timing: control.TimingParams,
    group: str = "one",
    seed: int = 0,
    chain: Optional[int] = None,
) -> bytes:
    """Timeline JSON followed by the ``total_ms=`` summary line."""
    plan, _pitch = files.plan_from_obj(plan_obj)
    grouping = {"one": "one-per-round", "batch": "batch"}.get(group)
    if grouping is None:
        raise SchemaError(f"group must be 'one' or 'batch', got {group!r}")
    n_particles = len(plan) if chain is None else chain
    chain_bus = bus_mod.make_chain_bus(n_particles, seed=0)
    result = control.fold_sequence(
        plan, chain_bus, t=timing, grouping=grouping, seed=seed
    )
    body = files.dumps_canonical(result.timeline.to_json_obj())
    return (body + f"total_ms={_fmt_ms(result.timeline.total_ms)}\n").encode()


# reference evaluation with the rounded figures the design is usually
# quoted with: advantage 12.5, strap force 2.59 kgf, particle weight 4.5 gf
_PRINTED_ADVANTAGE = 12.5
_PRINTED_FS_KGF = 2.59
_PRINTED_WP_GF = 4.5
QUOTED_DESIGN_LIMIT = 84


def analyze_report(mech: mechanics.MechParams, n_values: Sequence[int]) -> dict:
    f_s_available = mechanics.sma_lateral_force(mech)
    printed = 2.0 * math.sqrt(
        _PRINTED_ADVANTAGE
        * mechanics.kgf_to_n(_PRINTED_FS_KGF)
        / mechanics.gf_to_n(_PRINTED_WP_GF)
    )
    table = []
    for n in n_values:
        rep = mechanics.feasibility_report(n, mech)
        table.append(
            {
                "n": n,
                "thread_force_N": rep.thread_force_n,
                "unlock_required_N": rep.unlock_required_n,
                "unlock_available_N": rep.unlock_available_n,
                "feasible": rep.feasible,
            }
        )
    return {
        "advantage": mechanics.mechanical_advantage(mech),
        "F_s_available_N": f_s_available,
        "F_s_available_kgf": mechanics.n_to_kgf(f_s_available),
        "max_particles": mechanics.max_particles(f_s_available, mech),
        "max_particles_printed": printed,
        "quoted_design_limit": QUOTED_DESIGN_LIMIT,
        "note": (
            f"the commonly quoted worst-case limit of {QUOTED_DESIGN_LIMIT} "
            "particles equals the printed expression without its leading "
            "factor 2; max_particles_printed evaluates that expression with "
            "the rounded reference inputs (advantage 12.5, 2.59 kgf, 4.5 gf)"
        ),
        "feasibility": table,
    }


def analyze_bytes(mech_obj: Any, n_range: str = DEFAULT_N_RANGE) -> bytes:
    mech = files.mech_from_obj(mech_obj if mech_obj is not None else {})
    report = analyze_report(mech, list(parse_n_range(n_range)))
    return files.dumps_canonical(report).encode()


def render_bytes(plan_obj: Any, curve_obj: Any = None) -> bytes:
    plan, pitch = files.plan_from_obj(plan_obj)
    strip = strip_from_plan(plan)
    curve = None
    if curve_obj is not None:
        curve, _curve_pitch = files.curve_from_obj(curve_obj)
    return render.render_svg(strip, plan.directions, pitch, curve=curve).encode()


def bus_demo_bytes(nodes: int = 6, seed: int = 0) -> bytes:
    """Discovery plus localization on a freshly wired random chain."""
    if nodes < 1:
        raise ValueError("need at least one node")
    demo_bus = bus_mod.make_chain_bus(nodes - 1, seed=seed, localized=False)
    found = demo_bus.search_rom()
    order = demo_bus.localize_chain(sorted(found))
    demo_bus.mark_localized(order)
    lines = list(demo_bus.trace)
    lines.append(f"nodes={len(found)} particles={demo_bus.particle_count}")
    return ("\n".join(lines) + "\n").encode()


# -------------------------------------------------------------- CLI wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foldchain",
        description="Plan, simulate and analyze force-guided folding chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="compute a fold plan for a curve file")
    p.add_argument("curve", help="curve JSON file")
    p.add_argument("--anchor", default="auto", choices=("auto", "canonical"))
    p.add_argument("--chain", type=int, default=None, help="warn if the plan needs more particles")
    p.add_argument("-o", "--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("simulate", help="run the folding sequencer on a plan file")
    p.add_argument("plan", help="plan JSON file")
    p.add_argument("--timing", default=None, help="measured|nominal|timing JSON file")
    p.add_argument("--group", default="one", choices=("one", "batch"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chain", type=int, default=None, help="particle count (default: plan length)")
    p.add_argument("-o", "--out", default=None)

    p = sub.add_parser("render", help="draw a plan (and optional curve) as SVG")
    p.add_argument("plan", help="plan JSON file")
    p.add_argument("--curve", default=None, help="curve JSON file to overlay")
    p.add_argument("--svg", required=True, help="output SVG path")

    p = sub.add_parser("analyze", help="mechanical scaling report")
    p.add_argument("params", nargs="?", default=None, help="mechanics JSON file (defaults built in)")
    p.add_argument("--N", dest="n_range", default=DEFAULT_N_RANGE, help="feasibility range a:b[:step]")
    p.add_argument("-o", "--out", default=None)

    p = sub.add_parser("bus-demo", help="discovery and localization trace on a random chain")
    p.add_argument("--nodes", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8032)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _emit(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)

    try:
        if args.command == "plan":
            data, notes = plan_bytes(
                files.read_json_file(args.curve), anchor=args.anchor, chain=args.chain
            )
            for note in notes:
                print(f"warning: {note}", file=sys.stderr)
            _emit(data, args.out)
        elif args.command == "simulate":
            timing = resolve_timing(args.timing)
            data = simulate_bytes(
                files.read_json_file(args.plan),
                timing,
                group=args.group,
                seed=args.seed,
                chain=args.chain,
            )
            _emit(data, args.out)
        elif args.command == "render":
            curve_obj = files.read_json_file(args.curve) if args.curve else None
            data = render_bytes(files.read_json_file(args.plan), curve_obj)
            _emit(data, args.svg)
        elif args.command == "analyze":
            mech_obj = files.read_json_file(args.params) if args.params else None
            data = analyze_bytes(mech_obj, n_range=args.n_range)
            _emit(data, args.out)
        elif args.command == "bus-demo":
            _emit(bus_demo_bytes(nodes=args.nodes, seed=args.seed), None)
        elif args.command == "serve":
            from .service import serve

            serve(host=args.host, port=args.port)
        else:  # pragma: no cover - argparse enforces the choices
            return EXIT_PARSE
    except Exception as ex:
        code = exit_code_for(ex)
        if code is None:
            raise
        print(f"error: {ex}", file=sys.stderr)
        return code
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
