"""Command-line front door.

Subcommands: ``optimize`` (state search), ``derive`` (chain from a state or
fixture), ``lhv`` (classical certificates by enumeration), ``simulate``
(coincidence twin), and ``report tables`` (recompute the two headline scans
against the published columns).

Exit codes: 0 success, 1 computation failure, 2 usage error.  All outputs
are JSON/CSV with stable key order; ``--no-meta`` drops timestamps so
repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .chains import (
    Scenario,
    StateMatrix,
    build_chain,
    cabello_fraction,
)
from .errors import CnaError
from .experiment import (
    dataset_to_csv,
    estimate,
    simulate_coincidences,
    to_schmidt_frame,
)
from .fixtures import fixture_names, load_fixture
from .lhv import (
    assignments_total,
    classical_fraction_bound,
    joint_event_impossible,
    logical_bell_classical_max,
)
from .optimize import OptimizerConfig, maximize_cabello, maximize_hardy, scan_j
from .reference import load_reference

SCHEMA_VERSION = 1
SEED_ENV = "CNA_SEED"


# ---------------------------------------------------------------- helpers

def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _matrix_payload(arr: np.ndarray):
    a = np.asarray(arr)
    if np.max(np.abs(a.imag)) < 1e-15:
        return [[float(x) for x in row] for row in a.real]
    return {
        "real": [[float(x) for x in row] for row in a.real],
        "imag": [[float(x) for x in row] for row in a.imag],
    }


def _write_json(path: str, payload: dict, no_meta: bool) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **payload}
    if not no_meta:
        doc["meta"] = {
            "created_at": datetime.now(timezone.utc).isoformat(),
            "tool": f"cna {__version__}",
        }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _edge_key(edge: tuple[int, int]) -> str:
    return f"{edge[0]}-{edge[1]}"


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


def _merged(args: argparse.Namespace, config: dict, key: str, fallback):
    """Flag value if given, else config-file value, else fallback."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return fallback


def _parse_state_spec(spec: str, d_hint: int | None) -> StateMatrix:
    if spec.startswith("diag:"):
        values = [float(x) for x in spec[len("diag:"):].split(",")]
        return StateMatrix.from_unnormalized(np.diag(values))
    with open(spec, "r", encoding="utf-8") as f:
        doc = json.load(f)
    matrix = doc["matrix"] if isinstance(doc, dict) else doc
    arr = np.array(matrix, dtype=np.complex128)
    if d_hint is not None and arr.shape[0] != d_hint:
        raise ValueError(f"state file dimension {arr.shape[0]} does not match --d {d_hint}")
    return StateMatrix.from_unnormalized(arr)


def _scenario_from_args(parser, args, config) -> Scenario:
    k = _merged(args, config, "k", None)
    d = _merged(args, config, "d", None)
    j = _merged(args, config, "J", 1)
    if k is None or d is None:
        parser.error("--k and --d are required")
    try:
        return Scenario(k=int(k), d=int(d), j=int(j))
    except ValueError as exc:
        parser.error(str(exc))


# ---------------------------------------------------------------- optimize

def cmd_optimize(parser, args) -> int:
    config = _load_config_file(args.config)
    scenario = _scenario_from_args(parser, args, config)
    seed = int(_merged(args, config, "seed", _default_seed()))
    restarts = int(_merged(args, config, "restarts", 64))
    max_iterations = int(_merged(args, config, "max_iterations", 6000))
    try:
        cfg = OptimizerConfig(restarts=restarts, max_iterations=max_iterations,
                              seed=seed, allow_complex=bool(args.complex_states))
    except ValueError as exc:
        parser.error(str(exc))
    reference = load_reference()

    if args.scan_J:
        results = scan_j(scenario.k, scenario.d, cfg)
        published = reference.j_scan(scenario.k, scenario.d)
        rows = []
        for idx, (j, value) in enumerate(results):
            ref = published[idx] if published and idx < len(published) else None
            rows.append({
                "j": j,
                "fraction": value,
                "published": ref,
                "delta": None if ref is None else value - ref,
            })
            line = f"j={j}: fraction={value:.6f}"
            if ref is not None:
                line += f" (published {ref:.6f}, delta {value - ref:+.2e})"
            print(line)
        payload = {
            "command": "optimize",
            "mode": "scan-j",
            "scenario": {"k": scenario.k, "d": scenario.d},
            "config": {"restarts": cfg.restarts, "max_iterations": cfg.max_iterations,
                       "seed": cfg.seed, "allow_complex": cfg.allow_complex},
            "scan": rows,
        }
        _write_json(args.out, payload, args.no_meta)
        return 0

    if args.hardy:
        result = maximize_hardy(scenario.k, scenario.d, cfg)
        published = reference.hardy_fraction(scenario.k, scenario.d)
    else:
        result = maximize_cabello(scenario, cfg)
        published = reference.cabello_fraction(scenario.k, scenario.d, scenario.j)

    line = f"{scenario.label()} {result.objective}: fraction={result.best_fraction:.6f}"
    if published is not None:
        line += f" (published {published:.6f}, delta {result.best_fraction - published:+.2e})"
    print(line)

    payload = {
        "command": "optimize",
        "mode": result.objective,
        "scenario": {"k": scenario.k, "d": scenario.d, "j": scenario.j},
        "config": {"restarts": cfg.restarts, "max_iterations": cfg.max_iterations,
                   "seed": cfg.seed, "allow_complex": cfg.allow_complex},
        "best_fraction": result.best_fraction,
        "best_state": _matrix_payload(result.best_state.h),
        "per_restart_values": result.per_restart_values,
        "iterations_used": result.iterations_used,
        "wall_time_seconds": None if args.no_meta else result.wall_time,
        "published": published,
        "delta": None if published is None else result.best_fraction - published,
    }
    _write_json(args.out, payload, args.no_meta)
    return 0


# ---------------------------------------------------------------- derive

def cmd_derive(parser, args) -> int:
    config = _load_config_file(args.config)
    if args.fixture:
        if args.fixture not in fixture_names():
            parser.error(f"unknown fixture {args.fixture!r}; available: {', '.join(fixture_names())}")
        scenario, state = load_fixture(args.fixture)
    elif args.state:
        scenario = _scenario_from_args(parser, args, config)
        try:
            state = _parse_state_spec(args.state, scenario.d)
        except (OSError, ValueError, KeyError) as exc:
            parser.error(f"cannot parse --state: {exc}")
    else:
        parser.error("either --fixture or --state is required")

    chain = build_chain(scenario, state)
    report = cabello_fraction(chain)
    residuals = chain.zero_edge_residuals()

    payload = {
        "command": "derive",
        "fixture": args.fixture,
        "scenario": {"k": scenario.k, "d": scenario.d, "j": scenario.j},
        "state": _matrix_payload(state.h),
        "bases": [
            {"chain_index": b.chain_index, "party": b.party, "rows": _matrix_payload(b.rows)}
            for b in chain.bases
        ],
        "edge_probabilities": {_edge_key(e): p for e, p in report.edge_probabilities.items()},
        "p1": report.p1,
        "p2": report.p2,
        "fraction": report.fraction,
        "s_ideal": report.s_ideal,
        "max_zero_edge_residual": max(residuals.values()),
    }

    if args.schmidt:
        frame = to_schmidt_frame(chain)
        payload["schmidt"] = {
            "lambdas": [float(x) for x in frame.lambdas],
            "oam_labels": list(frame.oam_labels),
            "bases": [
                {"chain_index": b.chain_index, "party": b.party, "rows": _matrix_payload(b.rows)}
                for b in frame.bases
            ],
        }
        print(f"{scenario.label()}: fraction={report.fraction:.6f} "
              f"lambdas={np.array2string(frame.lambdas, precision=6)}")
    else:
        print(f"{scenario.label()}: fraction={report.fraction:.6f} s_ideal={report.s_ideal:.6f}")

    _write_json(args.out, payload, args.no_meta)
    return 0


# ---------------------------------------------------------------- lhv

def cmd_lhv(parser, args) -> int:
    config = _load_config_file(args.config)
    scenario = _scenario_from_args(parser, args, config)
    total = assignments_total(scenario)  # raises CapacityError above the cap
    payload = {
        "command": "lhv",
        "scenario": {"k": scenario.k, "d": scenario.d, "j": scenario.j},
        "joint_event_impossible": joint_event_impossible(scenario),
        "classical_fraction_bound": classical_fraction_bound(scenario),
        "logical_bell_classical_max": logical_bell_classical_max(scenario),
        "assignments_checked": total,
    }
    print(f"{scenario.label()}: bound={payload['classical_fraction_bound']:g} "
          f"bell_max={payload['logical_bell_classical_max']} "
          f"({total} assignments)")
    _write_json(args.out, payload, args.no_meta)
    return 0


# ---------------------------------------------------------------- simulate

def cmd_simulate(parser, args) -> int:
    config = _load_config_file(args.config)
    pairs = int(_merged(args, config, "pairs", 0))
    if pairs < 1:
        parser.error(f"--pairs must be >= 1, got {pairs}")
    seed = int(_merged(args, config, "seed", _default_seed()))

    if args.fixture:
        if args.fixture not in fixture_names():
            parser.error(f"unknown fixture {args.fixture!r}; available: {', '.join(fixture_names())}")
        scenario, state = load_fixture(args.fixture)
    elif args.state:
        scenario = _scenario_from_args(parser, args, config)
        try:
            state = _parse_state_spec(args.state, scenario.d)
        except (OSError, ValueError, KeyError) as exc:
            parser.error(f"cannot parse --state: {exc}")
    else:
        parser.error("either --fixture or --state is required")

    chain = build_chain(scenario, state)
    ideal = cabello_fraction(chain)
    frame = to_schmidt_frame(chain)
    dataset = simulate_coincidences(frame, pairs, seed)
    report = estimate(dataset, scenario)

    dataset_to_csv(dataset, args.out_csv)

    reference = load_reference()
    ref_fraction = reference.experimental_fraction(scenario.k, scenario.d, scenario.j)
    ref_s = reference.experimental_bell_s(scenario.k, scenario.d, scenario.j)
    payload = {
        "command": "simulate",
        "fixture": args.fixture,
        "scenario": {"k": scenario.k, "d": scenario.d, "j": scenario.j},
        "pairs_per_setting": pairs,
        "seed": seed,
        "edges": {
            _edge_key(e): {"p_gt": v[0], "stderr": v[1]}
            for e, v in report.edges.items()
        },
        "fraction": {"estimate": report.fraction, "stderr": report.fraction_stderr,
                     "ideal": ideal.fraction},
        "bell_s": {"estimate": report.bell_s, "stderr": report.bell_s_stderr,
                   "ideal": ideal.s_ideal},
        "error_method": report.error_method,
        "reference": {
            "lab_fraction": None if ref_fraction is None else
                {"value": ref_fraction[0], "stderr": ref_fraction[1]},
            "lab_bell_s": None if ref_s is None else
                {"value": ref_s[0], "stderr": ref_s[1]},
            "note": load_reference().notes,
        },
    }
    line = (f"{scenario.label()}: fraction={report.fraction:.4f}+-{report.fraction_stderr:.4f} "
            f"(ideal {ideal.fraction:.6f})")
    if args.emit_s:
        line += f" S={report.bell_s:.4f}+-{report.bell_s_stderr:.4f}"
    print(line)
    _write_json(args.out_json, payload, args.no_meta)
    return 0


# ---------------------------------------------------------------- report

_TABLE_CELLS = {
    "table1": [(k, 2) for k in (3, 4, 5, 6)],
    "table2": [(2, d) for d in (2, 3, 4)],
}


def cmd_report(parser, args) -> int:
    if args.what != "tables":
        parser.error(f"unknown report {args.what!r}; available: tables")
    config = _load_config_file(args.config)
    seed = int(_merged(args, config, "seed", _default_seed()))
    restarts = int(_merged(args, config, "restarts", 64))
    max_iterations = int(_merged(args, config, "max_iterations", 6000))
    cfg = OptimizerConfig(restarts=restarts, max_iterations=max_iterations, seed=seed)
    reference = load_reference()

    kinds = [args.only] if args.only else ["cabello", "hardy", "increase"]
    rows = []
    failures = 0
    start = time.perf_counter()
    for table, cells in _TABLE_CELLS.items():
        for (k, d) in cells:
            if args.k is not None and k != args.k:
                continue
            if args.d is not None and d != args.d:
                continue
            computed: dict[str, float | None] = {}
            errors: dict[str, str] = {}
            if "cabello" in kinds or "increase" in kinds:
                try:
                    computed["cabello"] = maximize_cabello(Scenario(k=k, d=d, j=1), cfg).best_fraction
                except CnaError as exc:
                    errors["cabello"] = str(exc)
            if "hardy" in kinds or "increase" in kinds:
                try:
                    computed["hardy"] = maximize_hardy(k, d, cfg).best_fraction
                except CnaError as exc:
                    errors["hardy"] = str(exc)
            if computed.get("cabello") is not None and computed.get("hardy") is not None:
                computed["increase"] = computed["cabello"] - computed["hardy"]
            published_by_kind = {
                "cabello": reference.cabello_fraction(k, d, 1),
                "hardy": reference.hardy_fraction(k, d),
                "increase": reference.increase(k, d),
            }
            for kind in kinds:
                value = computed.get(kind)
                published = published_by_kind[kind]
                if value is None:
                    reason = errors.get(kind) or "; ".join(errors.values()) or "unavailable"
                    rows.append({
                        "table": table, "k": k, "d": d, "j": 1, "kind": kind,
                        "computed": None, "published": published, "delta": None,
                        "status": f"error: {reason}",
                    })
                    failures += 1
                    print(f"{table} ({k},{d},1) {kind}: error: {reason}")
                    continue
                delta = None if published is None else value - published
                rows.append({
                    "table": table, "k": k, "d": d, "j": 1, "kind": kind,
                    "computed": value, "published": published, "delta": delta,
                    "status": "ok",
                })
                line = f"{table} ({k},{d},1) {kind}: computed={value:.6f}"
                if published is not None:
                    line += f" published={published:.6f} delta={delta:+.2e}"
                print(line)

    if not rows:
        parser.error("filters selected no table cells")

    elapsed = time.perf_counter() - start
    payload = {
        "command": "report-tables",
        "config": {"restarts": cfg.restarts, "max_iterations": cfg.max_iterations, "seed": cfg.seed},
        "cells": rows,
        "wall_time_seconds": None if args.no_meta else elapsed,
    }
    _write_json(args.out_json, payload, args.no_meta)

    with open(args.out_csv, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["table", "k", "d", "j", "kind", "computed", "published", "delta", "status"])
        for row in rows:
            writer.writerow([
                row["table"], row["k"], row["d"], row["j"], row["kind"],
                "" if row["computed"] is None else f"{row['computed']:.6f}",
                "" if row["published"] is None else f"{row['published']:.6f}",
                "" if row["delta"] is None else f"{row['delta']:.2e}",
                row["status"],
            ])
    return 1 if failures else 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cna",
        description="Chained nonlocality arguments for multisetting qudit systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags take precedence")
        p.add_argument("--no-meta", action="store_true",
                       help="omit timestamps so outputs are byte-reproducible")

    p_opt = sub.add_parser("optimize", help="maximize the success fraction over states")
    p_opt.add_argument("--k", type=int)
    p_opt.add_argument("--d", type=int)
    p_opt.add_argument("--J", type=int, dest="J")
    p_opt.add_argument("--restarts", type=int)
    p_opt.add_argument("--max-iterations", type=int, dest="max_iterations")
    p_opt.add_argument("--seed", type=int)
    p_opt.add_argument("--hardy", action="store_true", help="all-zero-edges baseline instead")
    p_opt.add_argument("--scan-J", action="store_true", dest="scan_J",
                       help="scan the break index j = 1..k")
    p_opt.add_argument("--complex-states", action="store_true")
    p_opt.add_argument("--out", default="cna_optimize.json")
    common(p_opt)

    p_der = sub.add_parser("derive", help="build the measurement chain for a state")
    p_der.add_argument("--fixture", help="fixture name, e.g. H_2_2_1")
    p_der.add_argument("--state", help="diag:v1,v2,... or a JSON matrix file")
    p_der.add_argument("--k", type=int)
    p_der.add_argument("--d", type=int)
    p_der.add_argument("--J", type=int, dest="J")
    p_der.add_argument("--schmidt", action="store_true", help="include the Schmidt frame")
    p_der.add_argument("--out", default="cna_chain.json")
    common(p_der)

    p_lhv = sub.add_parser("lhv", help="classical certificates by exhaustive enumeration")
    p_lhv.add_argument("--k", type=int)
    p_lhv.add_argument("--d", type=int)
    p_lhv.add_argument("--J", type=int, dest="J")
    p_lhv.add_argument("--out", default="cna_lhv.json")
    common(p_lhv)

    p_sim = sub.add_parser("simulate", help="coincidence-counting twin with shot noise")
    p_sim.add_argument("--fixture")
    p_sim.add_argument("--state")
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--d", type=int)
    p_sim.add_argument("--J", type=int, dest="J")
    p_sim.add_argument("--pairs", type=int, help="expected photon pairs per setting")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--emit-s", action="store_true", dest="emit_s",
                       help="print the logical-Bell estimate as well")
    p_sim.add_argument("--out-csv", default="cna_dataset.csv")
    p_sim.add_argument("--out-json", default="cna_estimate.json")
    common(p_sim)

    p_rep = sub.add_parser("report", help="recompute published tables")
    p_rep.add_argument("what", help="what to report (tables)")
    p_rep.add_argument("--only", choices=["cabello", "hardy", "increase"])
    p_rep.add_argument("--k", type=int)
    p_rep.add_argument("--d", type=int)
    p_rep.add_argument("--restarts", type=int)
    p_rep.add_argument("--max-iterations", type=int, dest="max_iterations")
    p_rep.add_argument("--seed", type=int)
    p_rep.add_argument("--out-csv", default="cna_tables.csv")
    p_rep.add_argument("--out-json", default="cna_tables.json")
    common(p_rep)

    return parser


_DISPATCH = {
    "optimize": cmd_optimize,
    "derive": cmd_derive,
    "lhv": cmd_lhv,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](parser, args)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except CnaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
