"""Command line front-end: ``speedup-lab <command> --config job.json``.

Reports are JSON on stdout (or ``--output``).  Exit status is 0 for a
definitive verdict, 2 for INCONCLUSIVE and 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__
from .analysis import (DIVERGENT, INCONCLUSIVE, entropy_estimates, entropy_summary,
                       exammeas_build, exammeas_check, find_s_coboundary, odometer_s_trace,
                       odometer_scob, odometer_t_trace, s_coboundary_trace, scob_verify,
                       t_coboundary_trace)
from .odometer import (OdometerJumpSpec, OdometerSpec, check_jump_function,
                       construct_speedup, odometer_permutation_tower, tower_level_from_scratch,
                       verify_sameodom)
from .speedup import (LabelingError, is_minimal_speedup,
                      orbit_number_by_labels, orbit_number_by_reachability, perm_str,
                      self_induce_map, sigma_sequence, symbol_label_sequence)
from .subshift import HorizonError, JumpFunction, UnsupportedInputError
from .symbols import (DomainError, Substitution, complexity, is_primitive, is_proper,
                      parse_word, word_str)

OK, ERROR, UNDECIDED = 0, 1, 2


class ConfigError(ValueError):
    pass


# --- config ----------------------------------------------------------------------

def find_config(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("speedup_lab") / "data" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config {name!r} not found (also looked in bundled examples)")


def load_config(name: str) -> dict:
    try:
        doc = json.loads(find_config(name).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {name!r} is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("field 'kind' is required (substitution | odometer | exammeas)")
    return doc


def _field(doc, key, kind=None):
    if key not in doc:
        raise ConfigError(f"field {key!r} is required" + (f" for kind {kind!r}" if kind else ""))
    return doc[key]


def parse_jump(doc: dict, theta: Substitution) -> JumpFunction:
    try:
        if "constant" in doc:
            return JumpFunction.constant(int(doc["constant"]))
        if "cylinders" in doc:
            cyl = [(int(off), parse_word(w) if isinstance(w, str) else tuple(w), int(v))
                   for off, w, v in doc["cylinders"]]
            return JumpFunction.from_cylinders(theta.size, cyl, doc.get("default"))
        return JumpFunction.from_dict(doc)
    except (TypeError, KeyError, ValueError) as e:
        raise ConfigError(f"field 'jump' is malformed: {e}") from e


def substitution_job(doc):
    if doc["kind"] != "substitution":
        raise ConfigError(f"this command needs kind 'substitution', got {doc['kind']!r}")
    try:
        theta = Substitution.from_dict(_field(doc, "substitution", "substitution"))
    except (TypeError, KeyError, ValueError) as e:
        raise ConfigError(f"field 'substitution' is malformed: {e}") from e
    return theta, parse_jump(_field(doc, "jump", "substitution"), theta)


def odometer_job(doc, need_jump=True):
    if doc["kind"] != "odometer":
        raise ConfigError(f"this command needs kind 'odometer', got {doc['kind']!r}")
    try:
        spec = OdometerSpec.from_dict(_field(doc, "odometer", "odometer"))
    except (TypeError, KeyError, ValueError) as e:
        raise ConfigError(f"field 'odometer' is malformed: {e}") from e
    if not need_jump:
        return spec, None
    try:
        jump = OdometerJumpSpec.from_dict(_field(doc, "jump", "odometer"))
    except (TypeError, KeyError, ValueError) as e:
        raise ConfigError(f"field 'jump' is malformed: {e}") from e
    return spec, jump


def param(args, doc, name, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return doc.get("params", {}).get(name, default)


# --- substitution commands ---------------------------------------------------------

def sub_analyze(doc, args):
    theta, p = substitution_job(doc)
    prim = is_primitive(theta)
    pr = is_proper(theta)
    report = {"substitution": theta.to_dict(), "primitive": bool(prim),
              "primitivity_power": prim.power, "proper": bool(pr), "proper_power": pr.power,
              "jump_window": [-p.left, p.right], "max_jump": p.max_value}
    horizon = param(args, doc, "horizon", 4000)
    report["orbit_number"] = {"labels": orbit_number_by_labels(theta, p),
                              "reachability": orbit_number_by_reachability(theta, p, horizon)}
    a = is_minimal_speedup(theta, p)
    report["normalized_level"] = a.normalized.level
    report["labeling"] = [{"column": i, "height": h, "label": ell, "jump": q}
                          for i, h, ell, q in a.labeling.rows()]
    report["permutations"] = [perm_str(x) for x in a.permutations]
    report["stable_permutations"] = [perm_str(x) for x in a.stable_permutations]
    report["iteration"] = {"preperiod": a.iteration.preperiod, "period": a.iteration.period}
    report["sigma_table"] = a.sigma.render()
    report["verdict"] = "MINIMAL" if a.minimal else "NOT_MINIMAL"
    return report, OK


def sub_minimal(doc, args):
    theta, p = substitution_job(doc)
    a = is_minimal_speedup(theta, p)
    report = {"c": a.c, "sigma_table": a.sigma.render(),
              "sigma_primitive": bool(a.primitivity),
              "aperiodicity": a.aperiodicity.verdict,
              "verdict": "MINIMAL" if a.minimal else "NOT_MINIMAL"}
    if not a.minimal:
        report["witness"] = list(a.primitivity.failure)
    return report, OK


def sub_sigma(doc, args):
    theta, p = substitution_job(doc)
    a = is_minimal_speedup(theta, p)
    return {"sigma": a.sigma.to_dict(), "sigma_table": a.sigma.render(),
            "sigma_level": a.sigma_level}, OK


def sub_selfinduce(doc, args):
    theta, p = substitution_job(doc)
    steps = param(args, doc, "steps", 200)
    fm = self_induce_map(theta, p, steps)
    return {"mapping": [{"floor": list(k), "image": list(v)} for k, v in
                        sorted(fm.mapping.items())],
            "cut_heights": [list(c) for c in fm.cut_heights], "steps": steps,
            "intertwining": fm.ok,
            "verdict": "VERIFIED" if fm.ok else "FAILED"}, OK if fm.ok else ERROR


# --- odometer commands ----------------------------------------------------------------

def odo_check(doc, args):
    spec, jump = odometer_job(doc)
    v = check_jump_function(spec, jump)
    return {"odometer": str(spec), "jump": jump.to_dict(), "verdict": str(v),
            "witness": v.witness}, OK


def odo_construct(doc, args):
    spec, _ = odometer_job(doc, need_jump=False)
    c = param(args, doc, "c", None)
    if c is None:
        raise ConfigError("field 'c' (or --c) is required for odo construct")
    con = construct_speedup(spec, int(c))
    report = {"odometer": str(spec), "c": con.c, "possible": con.possible}
    if con.possible:
        report.update(jump=con.jump.to_dict(), verdict=str(con.verdict),
                      reblocked=str(con.reblocked))
    else:
        report.update(verdict="IMPOSSIBLE", certificate=con.certificate)
    return report, OK


def odo_tower(doc, args):
    spec, jump = odometer_job(doc)
    depth = param(args, doc, "depth", 4)
    tower = odometer_permutation_tower(spec, jump, depth)
    rows = []
    for lv in tower.levels:
        rows.append({"level": lv.level, "perm": perm_str(lv.perm), "cyclic": lv.cyclic,
                     "from_scratch": perm_str(tower_level_from_scratch(spec, jump, lv.level))})
    return {"odometer": str(spec), "c": tower.c, "levels": rows,
            "minimal_forever": tower.minimal_forever}, OK


def odo_verify(doc, args):
    spec, jump = odometer_job(doc)
    rep = verify_sameodom(spec, jump, param(args, doc, "levels", 5),
                          param(args, doc, "horizon", 10 ** 4))
    rep["cycles_floors"] = {str(k): v for k, v in rep.get("cycles_floors", {}).items()}
    return rep, OK if rep["ok"] else ERROR


# --- analysis commands -------------------------------------------------------------

def _checkpoints(value):
    if value in (None, "auto"):
        return "auto"
    if value == "none":
        return []
    if isinstance(value, list):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",")]


def cobound(doc, args):
    side = param(args, doc, "side", "T")
    horizon = param(args, doc, "horizon", 10 ** 4)
    if doc["kind"] == "substitution":
        theta, p = substitution_job(doc)
        c = doc.get("c") or orbit_number_by_labels(theta, p)
        if side == "T":
            trace = t_coboundary_trace(theta, p, c, horizon)
        else:
            trace = s_coboundary_trace(theta, p, c, horizon,
                                       _checkpoints(param(args, doc, "checkpoints", "auto")))
    elif doc["kind"] == "odometer":
        spec, jump = odometer_job(doc)
        v = check_jump_function(spec, jump)
        if v.c is None:
            raise ConfigError(f"jump vector has no integer orbit number: {v.witness}")
        c = v.c
        trace = (odometer_t_trace if side == "T" else odometer_s_trace)(jump, c, horizon)
    else:
        raise ConfigError(f"cobound needs kind substitution or odometer, got {doc['kind']!r}")
    report = {"side": side, "c": c, **trace.summary()}
    if getattr(args, "csv", None):
        Path(args.csv).write_text("\n".join(trace.csv_lines()) + "\n")
        report["csv"] = args.csv
    if side == "S" and doc["kind"] == "substitution" and trace.verdict == DIVERGENT:
        scan = find_s_coboundary(theta, p, c)
        report["transfer_function"] = {k: v for k, v in scan.items() if k != "g"}
    elif side == "S" and doc["kind"] == "substitution":
        scan = find_s_coboundary(theta, p, c)
        entry = {k: v for k, v in scan.items() if k != "g"}
        if scan["found"]:
            entry["check"] = scob_verify(theta, p, c, scan["g"])
        report["transfer_function"] = entry
    elif side == "S":
        report["transfer_function"] = odometer_scob(spec, jump, c)
    return report, UNDECIDED if trace.verdict == INCONCLUSIVE else OK


def entropy(doc, args):
    nmax = param(args, doc, "nmax", 40)
    theta, p = substitution_job(doc)
    report = {"nmax": nmax, "log": "natural"}
    counts = complexity(theta, nmax)
    report["theta"] = {"counts": counts, **entropy_summary(counts)}
    a = is_minimal_speedup(theta, p)
    sc = complexity(a.sigma.substitution, nmax)
    report["sigma"] = {"counts": sc, **entropy_summary(sc)}
    return report, OK


def exammeas(doc, args):
    if doc["kind"] != "exammeas":
        raise ConfigError(f"exammeas needs kind 'exammeas', got {doc['kind']!r}")
    n = _field(doc, "n_sequence", "exammeas")
    system = exammeas_build(n, param(args, doc, "levels", None))
    rep = exammeas_check(system)
    rep["n_sequence"] = list(system.n_sequence)
    rep["w1"] = [word_str(system.words0[0]), word_str(system.words1[0])]
    return rep, OK


# --- regression table ----------------------------------------------------------------

def _bundled(name):
    return load_config(name)


def _sub(name):
    return substitution_job(_bundled(name))


def _row_sigma(name, expected):
    from . import systems
    theta, p = _sub(name)
    got = is_minimal_speedup(theta, p).sigma.render()
    want = list(getattr(systems, expected))
    return got == want, {"lines": got}


def _row_perms(name):
    theta, p = _sub(name)
    got = [perm_str(x) for x in is_minimal_speedup(theta, p).permutations]
    return got == ["id", "(0 1)"], {"permutations": got}


def _row_orbit(name):
    theta, p = _sub(name)
    a, b = orbit_number_by_labels(theta, p), orbit_number_by_reachability(theta, p)
    return a == b == 2, {"labels": a, "reachability": b}


def _row_minimal(name, jump=None, want=True):
    theta, p = _sub(name)
    if jump is not None:
        p = JumpFunction.constant(jump)
    try:
        got = is_minimal_speedup(theta, p).minimal
    except (LabelingError, DomainError, UnsupportedInputError) as e:
        got, note = False, str(e)
    else:
        note = None
    return got == want, {"minimal": got, "note": note}


def _row_crossings(name):
    from .analysis import block_checkpoints
    theta, p = _sub(name)
    got = block_checkpoints(theta, p, 3)
    return got == [2, 9, 40], {"l": got}


def _row_s_sums(name, horizon):
    theta, p = _sub(name)
    tr = s_coboundary_trace(theta, p, 2, horizon, "auto")
    sums = list(tr.checkpoints.values())
    if tr.verdict == INCONCLUSIVE:
        return None, {"verdict": tr.verdict, "sums": sums}
    ok = tr.verdict == DIVERGENT and sums == [3 ** k for k in range(len(sums))]
    return ok, {"verdict": tr.verdict, "sums": sums}


def _row_trace_bounded(name, side, horizon):
    theta, p = _sub(name)
    tr = (t_coboundary_trace(theta, p, 2, horizon) if side == "T"
          else s_coboundary_trace(theta, p, 2, horizon, []))
    if tr.verdict == INCONCLUSIVE:
        return None, {"verdict": tr.verdict, "max_abs": tr.max_abs}
    return tr.verdict == "BOUNDED", {"verdict": tr.verdict, "max_abs": tr.max_abs,
                                     "bound": tr.bound}


def _row_odo(pre, cyc, q, want, level=1):
    v = check_jump_function(OdometerSpec(tuple(pre), tuple(cyc)),
                            OdometerJumpSpec(level, tuple(q)))
    return str(v) == want, {"verdict": str(v)}


def _row_sameodom(horizon):
    doc = _bundled("remex.json")
    spec, jump = odometer_job(doc)
    rep = verify_sameodom(spec, jump, 5, horizon)
    return rep["ok"] and rep["partial_sums"]["max_abs"] <= 6, {
        "conjugate": rep["conjugate"], "partial_sums": rep["partial_sums"]}


def _row_no_speedup():
    spec = OdometerSpec((), (6,))
    out = {}
    ok = True
    for c in (2, 3, 4, 6, 8, 9, 10, 12):
        con = construct_speedup(spec, c)
        prime = con.certificate.get("prime")
        ok &= (not con.possible) and c % prime == 0 and 6 % prime == 0
        out[c] = prime
    return ok, {"prime_witness": out}


def _row_construct(cyc, cs):
    out = {}
    ok = True
    for c in cs:
        con = construct_speedup(OdometerSpec((), (cyc,)), c)
        ok &= con.possible and con.verdict.minimal and con.verdict.c == c
        out[c] = str(con.verdict)
    return ok, out


def _row_exammeas():
    rep = exammeas_check(exammeas_build((10, 20, 40), 4))
    first = rep["levels"][0]
    ok = (first["s_sim"], first["sum_sim"], first["average"]) == (2, 6, 3.0) and \
        rep["ok"] and rep["all_above_2"]
    return ok, {"averages": [r["average"] for r in rep["levels"]]}


def _row_entropy(name):
    theta, p = _sub(name)
    est = entropy_estimates(complexity(theta, 40))
    sig = entropy_estimates(complexity(is_minimal_speedup(theta, p).sigma.substitution, 40))
    ok = all(b < a for a, b in zip(est[9:], est[10:])) and all(b < a for a, b in
                                                               zip(sig[9:], sig[10:]))
    return ok, {"theta_n40": est[-1], "sigma_n40": sig[-1]}


def _row_selfinduce(name):
    theta, p = _sub(name)
    return self_induce_map(theta, p, 200).ok, {}


def _row_sequence(name):
    theta, p = _sub(name)
    a = is_minimal_speedup(theta, p)
    ok = symbol_label_sequence(a, 1000) == sigma_sequence(a, 1000)
    return ok, {"blocks": 1000}


def regression_rows(horizon=10 ** 4):
    """(key, function, args) in canonical order."""
    rows = []
    for tag, name, table in (("parity", "ex431.json", "PARITY_SIGMA_TABLE"),
                             ("divergent", "ex44.json", "COBOUNDARY_SIGMA_TABLE")):
        rows += [
            (f"{tag}/sigma-table", _row_sigma, (name, table)),
            (f"{tag}/column-permutations", _row_perms, (name,)),
            (f"{tag}/orbit-number", _row_orbit, (name,)),
            (f"{tag}/minimal", _row_minimal, (name,)),
            (f"{tag}/T-sums-bounded", _row_trace_bounded, (name, "T", horizon)),
            (f"{tag}/self-induced-map", _row_selfinduce, (name,)),
            (f"{tag}/sigma-vs-simulation", _row_sequence, (name,)),
            (f"{tag}/entropy-decreasing", _row_entropy, (name,)),
        ]
    rows += [
        ("parity/constant-jump-2-not-minimal", _row_minimal, ("ex431.json", 2, False)),
        ("parity/S-sums-bounded", _row_trace_bounded, ("ex431.json", "S", horizon)),
        ("divergent/block-crossings", _row_crossings, ("ex44.json",)),
        ("divergent/S-sums-divergent", _row_s_sums, ("ex44.json", horizon)),
        ("odometer-433/minimal", _row_odo, ((4,), (3,), (2, 2, 3, 1), "MINIMAL(c=2)")),
        ("odometer-433/no-floor-cycle", _row_odo, ((4,), (3,), (2, 2, 2, 2), "FAILS(2)")),
        ("odometer-dyadic/even-c", _row_odo, ((), (2,), (1, 1, 1, 5), "FAILS(3)", 2)),
        ("odometer-433/same-odometer", _row_sameodom, (horizon,)),
        ("odometer-6/no-speedup", _row_no_speedup, ()),
        ("odometer-3/construct-c2", _row_construct, (3, (2,))),
        ("odometer-5/construct", _row_construct, (5, (2, 3, 4, 6))),
        ("average-above-2/recursions", _row_exammeas, ()),
    ]
    return rows


def _run_row(row):
    key, fn, fargs = row
    try:
        ok, detail = fn(*fargs)
    except Exception as e:  # a crashing row is a failing row
        return key, "FAIL", {"error": f"{type(e).__name__}: {e}"}
    status = "INCONCLUSIVE" if ok is None else ("PASS" if ok else "FAIL")
    return key, status, detail


def reproduce_paper(horizon=10 ** 4, jobs=1):
    rows = regression_rows(horizon)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_run_row, rows))
    else:
        results = [_run_row(r) for r in rows]
    statuses = [s for _, s, _ in results]
    code = ERROR if "FAIL" in statuses else (UNDECIDED if INCONCLUSIVE in statuses else OK)
    table = [{"key": k, "status": s, "detail": d} for k, s, d in results]
    return {"rows": table, "passed": statuses.count("PASS"), "total": len(statuses)}, code


def cmd_reproduce(doc, args):
    return reproduce_paper(args.horizon or 10 ** 4, args.jobs)


# --- entry point ----------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def build_parser():
    ap = argparse.ArgumentParser(prog="speedup-lab",
                                 description="Bounded speedups of substitution subshifts "
                                             "and odometers.")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="job document (path or bundled example name)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--no-meta", action="store_true",
                        help="omit version and timing so reports are byte-identical")
    common.add_argument("--horizon", type=int)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sub", help="substitution speedups")
    s_sub = s.add_subparsers(dest="action", required=True)
    for name, fn in (("analyze", sub_analyze), ("minimal", sub_minimal),
                     ("sigma", sub_sigma), ("selfinduce", sub_selfinduce)):
        q = s_sub.add_parser(name, parents=[common])
        q.set_defaults(func=fn)
        if name == "selfinduce":
            q.add_argument("--steps", type=int)

    o = sub.add_parser("odo", help="odometer speedups")
    o_sub = o.add_subparsers(dest="action", required=True)
    for name, fn in (("check", odo_check), ("construct", odo_construct),
                     ("tower", odo_tower), ("verify-sameodom", odo_verify)):
        q = o_sub.add_parser(name, parents=[common])
        q.set_defaults(func=fn)
        if name == "construct":
            q.add_argument("--c", type=int)
        if name == "tower":
            q.add_argument("--depth", type=int)
        if name == "verify-sameodom":
            q.add_argument("--levels", type=int)

    q = sub.add_parser("cobound", parents=[common], help="finite-horizon coboundary traces")
    q.add_argument("--side", choices=["S", "T"])
    q.add_argument("--checkpoints", help="'auto', 'none' or comma-separated times")
    q.add_argument("--csv", help="also write the trace as CSV (n,sum)")
    q.set_defaults(func=cobound)

    q = sub.add_parser("entropy", parents=[common], help="word-count entropy estimates")
    q.add_argument("--nmax", type=int)
    q.set_defaults(func=entropy)

    q = sub.add_parser("exammeas", parents=[common],
                       help="hand-built system: simulation against recursions")
    q.add_argument("--levels", type=int)
    q.set_defaults(func=exammeas)

    q = sub.add_parser("reproduce-paper", parents=[common],
                       help="run every bundled worked example")
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=cmd_reproduce)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.func is cmd_reproduce:
            doc = {}
        elif not args.config:
            raise ConfigError("--config is required")
        else:
            doc = load_config(args.config)
        report, code = args.func(doc, args)
    except ConfigError as e:
        print(f"speedup-lab: config error: {e}", file=sys.stderr)
        return ERROR
    except HorizonError as e:
        print(f"speedup-lab: horizon exhausted: {e}; raise --horizon or "
              f"SPEEDUPLAB_MAX_PREFIX", file=sys.stderr)
        return ERROR
    except (DomainError, UnsupportedInputError, LabelingError, ValueError) as e:
        print(f"speedup-lab: {type(e).__name__}: {e}", file=sys.stderr)
        return ERROR
    report = {"command": " ".join(filter(None, [args.command, getattr(args, "action", None)])),
              **report}
    if not args.no_meta:
        report["meta"] = {"version": __version__,
                          "seconds": round(time.perf_counter() - start, 3)}
    text = json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
