"""Command line runner: scenario ingestion, tasks, reports, goldens.

Each task checks its own contract thresholds; a run exits 0 when every
task met its contract, 2 when a residual exceeded a threshold, and 3 on
input errors (unparseable scenario, degenerate space, missing task
prerequisites).  Reports are JSON with sorted keys so that repeated runs
are byte-identical apart from the timing block.
"""

import argparse
import glob
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import DualbandError
from .scenario import (TASK_NAMES, build_space, check_prerequisites,
                       parse_scenario)
from .dual_band import (cm_symmetry_residual, dualband_matrix,
                        is_zero_operator, unitary_equiv_check)
from .shift_spectra import point_spectrum
from .extension import kernel_lift, kernel_project
from .factorization import (canonical_factors, hminus_split,
                            meromorphic_factors, resolvent_apply,
                            verify_factorization)
from .hankel import hankel_norm

CONTRACTS = {
    "validate": 1e-10,
    "spectrum": 1e-7,
    "kernel": 1e-8,
    "factorize_identity": 1e-10,
    "factorize_tail": 1e-9,
    "factorize_det": 1e-9,
    "resolvent": 1e-6,
    "norm": 1e-8,
}

RESOLVENT_SEED = 20260819


def _limit(opts, key):
    # a tol override replaces every module threshold at once
    if opts.get("tol") is not None:
        return opts["tol"]
    return CONTRACTS[key]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    return repr(obj)


# ---------------------------------------------------------------------------
# tasks

def _task_validate(space, scn, opts):
    lim = _limit(opts, "validate")
    G = opts.get("grid")
    assembly = unitary_equiv_check(space, scn.g, G=G)
    cm = cm_symmetry_residual(space, scn.g, G=G)
    zero, block_norms = is_zero_operator(space, scn.g)
    tnorm = float(np.linalg.norm(dualband_matrix(space, scn.g, G=G).entries,
                                 2))
    zero_by_norm = tnorm <= 2 * space.n * 1e-10
    violations = []
    if assembly > lim:
        violations.append(f"block assembly residual {assembly:.3e} exceeds "
                          f"{lim:.3e}")
    if cm > lim:
        violations.append(f"conjugation symmetry residual {cm:.3e} exceeds "
                          f"{lim:.3e}")
    if zero != zero_by_norm:
        violations.append("block zero test disagrees with the operator norm")
    return {
        "ok": not violations, "violations": violations,
        "block_assembly_residual": assembly,
        "cm_symmetry_residual": cm,
        "operator_norm": tnorm,
        "is_zero_operator": zero,
        "block_norms": block_norms,
        "space_report": dict(space.report),
    }


def _task_spectrum(space, scn, opts):
    lim = _limit(opts, "spectrum")
    rep = point_spectrum(space, G=opts.get("grid"))
    points = []
    violations = []
    for p in rep.points:
        points.append({
            "re": float(p.lam.real), "im": float(p.lam.imag),
            "ker_dim": int(p.kernel_dim), "residual": float(p.residual),
            "region": p.region, "det_value": p.det_value,
        })
        if p.residual > lim:
            violations.append(f"eigenvector residual {p.residual:.3e} at "
                              f"{p.lam} exceeds {lim:.3e}")
    if not rep.cross_check.get("agrees", True):
        violations.append("matrix eigensolver disagrees with the root "
                          "finder")
    return {
        "ok": not violations, "violations": violations, "points": points,
        "constants": dict(rep.constants), "regime": rep.regime,
        "cross_check": rep.cross_check,
    }


def _task_kernel(space, scn, opts):
    lim = _limit(opts, "kernel")
    rep = point_spectrum(space, cross_check=False, G=opts.get("grid"))
    n_ext = opts.get("cutoff") or 128
    entries = []
    violations = []
    for p in rep.points:
        for row in np.atleast_2d(p.coords):
            vec = kernel_lift(space, row, lam=p.lam, n_ext=n_ext)
            back = kernel_project(space, vec, lam=p.lam)
            scale = float(np.linalg.norm(row))
            roundtrip = float(np.linalg.norm(back - row)) / scale
            rh = float(vec.meta["rh_residual"]) / max(vec.norm(), 1e-300)
            entries.append({"lambda": p.lam, "roundtrip": roundtrip,
                            "rh_residual": rh, "window": vec.n_ext})
            if roundtrip > lim:
                violations.append(f"kernel roundtrip {roundtrip:.3e} at "
                                  f"{p.lam} exceeds {lim:.3e}")
            if rh > lim:
                violations.append(f"extension residual {rh:.3e} at "
                                  f"{p.lam} exceeds {lim:.3e}")
    out = {"ok": not violations, "violations": violations,
           "lifts": entries}
    if not rep.points:
        out["note"] = "empty point spectrum, nothing to lift"
    return out


def _task_factorize(space, scn, opts):
    ilim = _limit(opts, "factorize_identity")
    tlim = _limit(opts, "factorize_tail")
    dlim = _limit(opts, "factorize_det")
    violations = []
    canonical = []
    for lam in scn.lambdas:
        res = canonical_factors(space, lam, G=opts.get("grid"))
        chk = verify_factorization(res)
        canonical.append({"lambda": lam, "kind": res.kind,
                          "region": res.extras["region"],
                          "warnings": list(res.warnings), **chk})
        for key in ("identity_residual", "reconstruction_residual"):
            if chk[key] > ilim:
                violations.append(f"{key} {chk[key]:.3e} at {lam} exceeds "
                                  f"{ilim:.3e}")
        for key in ("plus_tail", "minus_tail"):
            if chk[key] > tlim:
                violations.append(f"{key} {chk[key]:.3e} at {lam} exceeds "
                                  f"{tlim:.3e}")
        for key in ("det_minus_dev", "det_plus_inverse_dev"):
            if chk[key] > dlim:
                violations.append(f"{key} {chk[key]:.3e} at {lam} exceeds "
                                  f"{dlim:.3e}")
    meromorphic = []
    for R in scn.rfactors:
        res = meromorphic_factors(space, R, G=opts.get("grid"))
        chk = verify_factorization(res)
        _, _, split_res = hminus_split(space, R, G=opts.get("grid"))
        meromorphic.append({"r": repr(R), "kind": res.kind,
                            "split_residual": split_res, **chk})
        if chk["identity_residual"] > ilim:
            violations.append(f"meromorphic identity {chk['identity_residual']:.3e} "
                              f"exceeds {ilim:.3e}")
        if split_res > ilim:
            violations.append(f"split residual {split_res:.3e} exceeds "
                              f"{ilim:.3e}")
    return {"ok": not violations, "violations": violations,
            "canonical": canonical, "meromorphic": meromorphic}


def _task_resolvent(space, scn, opts):
    lim = _limit(opts, "resolvent")
    rng = np.random.default_rng(RESOLVENT_SEED)
    h = rng.standard_normal(2 * space.n) + \
        1j * rng.standard_normal(2 * space.n)
    violations = []
    solves = []
    for lam in scn.lambdas:
        _, diag = resolvent_apply(space, lam, h, G=opts.get("grid"))
        solves.append({"lambda": lam, "residual": diag["residual"],
                       "cond_minus": diag["cond_minus"],
                       "kind": diag["kind"], "region": diag["region"]})
        if diag["residual"] > lim:
            violations.append(f"resolvent residual {diag['residual']:.3e} "
                              f"at {lam} exceeds {lim:.3e}")
    return {"ok": not violations, "violations": violations,
            "solves": solves}


def _task_norm(space, scn, opts):
    lim = _limit(opts, "norm")
    rep = hankel_norm(space, scn.g)
    tnorm = float(np.linalg.norm(dualband_matrix(space, scn.g).entries, 2))
    values = (rep.norm, rep.matrix_norm, tnorm)
    spread = max(values) - min(values)
    violations = []
    if spread > lim:
        violations.append(f"norm spread {spread:.3e} exceeds {lim:.3e}")
    return {"ok": not violations, "violations": violations,
            "hankel_norm": rep.norm, "block_matrix_norm": rep.matrix_norm,
            "compression_norm": tnorm, "spread": spread,
            "hankel_block_shape": list(rep.block.shape)}


_TASKS = {
    "validate": _task_validate,
    "spectrum": _task_spectrum,
    "kernel": _task_kernel,
    "factorize": _task_factorize,
    "resolvent": _task_resolvent,
    "norm": _task_norm,
}


# ---------------------------------------------------------------------------
# orchestration

def _worker_count(n_tasks):
    raw = os.environ.get("DUALBAND_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        workers = 1
    return max(1, min(workers, n_tasks))


def run_scenario(scn, opts, fail_fast=False):
    """Run a scenario's tasks; returns (report dict, exit code)."""
    tasks = opts.get("tasks") or scn.tasks
    check_prerequisites(scn, tasks)
    t_start = time.perf_counter()
    space = build_space(scn, grid=opts.get("grid"))

    results = {}
    timings = {}

    def run_one(name):
        t0 = time.perf_counter()
        try:
            res = _TASKS[name](space, scn, opts)
        except DualbandError as exc:
            res = {"ok": False, "input_error": True,
                   "error": f"{type(exc).__name__}: {exc}",
                   "violations": []}
        return name, res, time.perf_counter() - t0

    workers = 1 if fail_fast else _worker_count(len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for name, res, dt in pool.map(run_one, tasks):
                results[name] = res
                timings[name] = dt
    else:
        for task in tasks:
            name, res, dt = run_one(task)
            results[name] = res
            timings[name] = dt
            if fail_fast and not res["ok"]:
                break

    timings["total"] = time.perf_counter() - t_start
    report = {
        "schema": 1,
        "name": scn.name,
        "digest": scn.digest,
        "version": __version__,
        "tasks": {k: results[k] for k in sorted(results)},
        "timings": timings,
    }
    if any(r.get("input_error") for r in results.values()):
        code = 3
    elif any(not r["ok"] for r in results.values()):
        code = 2
    else:
        code = 0
    return report, code


def write_artifacts(report, out_dir, fmt="both"):
    os.makedirs(out_dir, exist_ok=True)
    name = report["name"]
    paths = []
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, f"{name}.report.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(report), fh, sort_keys=True, indent=2)
            fh.write("\n")
        paths.append(path)
    spectrum = report["tasks"].get("spectrum")
    if fmt in ("csv", "both") and spectrum and "points" in spectrum:
        path = os.path.join(out_dir, f"{name}.eigs.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("re,im,ker_dim,residual\n")
            for p in spectrum["points"]:
                fh.write(f"{p['re']!r},{p['im']!r},{p['ker_dim']},"
                         f"{p['residual']!r}\n")
        paths.append(path)
    return paths


def golden_bytes(report):
    """Report serialization with the timing block removed."""
    body = {k: v for k, v in report.items() if k != "timings"}
    return (json.dumps(_jsonable(body), sort_keys=True, indent=2) +
            "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# argument handling

def _add_common(p, with_tasks=False):
    p.add_argument("--scenario", required=True, help="path to a .scn file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--grid", type=int, default=None,
                   help="override the sampling grid size")
    p.add_argument("--tol", type=float, default=None,
                   help="replace every contract threshold")
    p.add_argument("--cutoff", type=int, default=None,
                   help="starting coefficient window for extension lifts")
    p.add_argument("--format", choices=("json", "csv", "both"),
                   default="both")
    p.add_argument("--fail-fast", action="store_true",
                   help="stop at the first failing task")
    if with_tasks:
        p.add_argument("--tasks", default=None,
                       help="comma list overriding the scenario task list")


def _opts_from_args(args, forced_tasks=None):
    tasks = forced_tasks
    if tasks is None and getattr(args, "tasks", None):
        tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
        bad = [t for t in tasks if t not in TASK_NAMES and t != "all"]
        if bad:
            raise DualbandError(f"unknown tasks: {', '.join(bad)}")
        if "all" in tasks:
            tasks = TASK_NAMES
    return {"grid": args.grid, "tol": args.tol, "cutoff": args.cutoff,
            "tasks": tasks}


def _cmd_run(args, forced_tasks=None):
    try:
        scn = parse_scenario(args.scenario)
        if scn.tol is not None and args.tol is None:
            args.tol = scn.tol
        if scn.cutoff is not None and args.cutoff is None:
            args.cutoff = scn.cutoff
        opts = _opts_from_args(args, forced_tasks)
        report, code = run_scenario(scn, opts, fail_fast=args.fail_fast)
    except (DualbandError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    write_artifacts(report, args.out, args.format)
    for name in sorted(report["tasks"]):
        res = report["tasks"][name]
        status = "ok" if res["ok"] else "FAIL"
        line = f"{report['name']}:{name}: {status}"
        if res.get("error"):
            line += f" ({res['error']})"
        for v in res.get("violations", []):
            line += f"\n  {v}"
        print(line)
    return code


def _cmd_regold(args):
    paths = sorted(glob.glob(os.path.join(args.directory, "*.scn")))
    if not paths:
        print(f"error: no scenarios under {args.directory}",
              file=sys.stderr)
        return 3
    out_dir = args.out or args.directory
    goldens = {}
    failures = []
    worst = 0
    for path in paths:
        try:
            scn = parse_scenario(path)
            opts = {"grid": None, "tol": scn.tol, "cutoff": scn.cutoff,
                    "tasks": None}
            report, code = run_scenario(scn, opts)
        except (DualbandError, OSError) as exc:
            failures.append(f"{path}: {exc}")
            worst = 3
            continue
        if code != 0:
            failing = [t for t, r in report["tasks"].items() if not r["ok"]]
            failures.append(f"{path}: tasks failed: {', '.join(failing)}")
            worst = max(worst, code)
            continue
        goldens[os.path.join(out_dir, f"{scn.name}.golden.json")] = \
            golden_bytes(report)
    if failures:
        print("refusing to regold, failing scenarios:", file=sys.stderr)
        for f in failures:
            print(f"  {f}", file=sys.stderr)
        return worst
    os.makedirs(out_dir, exist_ok=True)
    for path, blob in goldens.items():
        with open(path, "wb") as fh:
            fh.write(blob)
        print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dualband",
        description="dual-band Toeplitz verification runner")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    run_p = sub.add_parser("run", help="run a scenario's task list")
    _add_common(run_p, with_tasks=True)

    for name in TASK_NAMES:
        task_p = sub.add_parser(name, help=f"run only the {name} task")
        _add_common(task_p)

    regold_p = sub.add_parser(
        "regold", help="rebuild golden reports for a scenario directory")
    regold_p.add_argument("directory")
    regold_p.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "regold":
        return _cmd_regold(args)
    return _cmd_run(args, forced_tasks=(args.command,))


if __name__ == "__main__":
    sys.exit(main())
