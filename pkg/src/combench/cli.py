"""Command-line entry point: generate, check, convert, solve, stats, report.

Exit codes: 0 success or Feasible, 1 Infeasible, 2 usage or input error,
3 internal error. Verdicts go to stdout as STATUS / OBJECTIVE / VIOLATION /
WARNING lines (or JSON with ``--format json``); diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from . import (birkhoff, labs, marketsplit, mis, model as mdl, network, portfolio, routing, solvers, sports,
               steiner, topology)
from .core import (ObjectiveSense, ReportError, RunRecord, SuccessPolicy, Verdict, Violation, count_successes,
                   parse_report)

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

CLASSES = ("marketsplit", "labs", "birkhoff", "steiner", "sports", "portfolio", "mis", "network", "routing",
           "topology")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: Optional[str]):
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def _render_verdict(v: Verdict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({
            "status": v.status.value, "objective": _jsonable(v.objective),
            "violations": [{"id": x.constraint_id, "detail": x.detail, "magnitude": x.magnitude}
                           for x in v.violations],
            "warnings": list(v.warnings), "info": _jsonable(dict(v.info)),
        }) + "\n"
    return "\n".join(v.lines()) + "\n"


# --- check ----------------------------------------------------------------------

def _bits(text: str) -> list[int]:
    body = "".join(text.split())
    if not body or set(body) - {"0", "1"}:
        raise UsageError("expected a 0/1 vector")
    return [int(c) for c in body]


def _sports_instance(text: str) -> sports.SportsInstance:
    s = text.strip()
    if s.startswith("<"):
        return sports.parse_robinx(s)
    return sports.SportsInstance(int(s))


def _sports_timetable(text: str, n: int) -> sports.Timetable:
    s = text.strip()
    if s.startswith("<"):
        return sports.parse_robinx_solution(s, n)
    return sports.read_timetable(s, n)


def check_files(cls: str, args: Sequence[str], opts) -> Verdict:
    """Run the checker of ``cls`` on the given input paths."""
    def need(k):
        if len(args) != k:
            raise UsageError(f"check {cls} expects {k} input path(s), got {len(args)}")

    if cls == "marketsplit":
        if len(args) not in (0, 1):
            raise UsageError("check marketsplit takes an instance path (or '-') and --solution")
        inst = marketsplit.read_instance(_read(args[0] if args else "-"))
        if opts.solution is None:
            raise UsageError("--solution is required (a path or 'planted')")
        x = marketsplit.planted_solution(inst) if opts.solution == "planted" else _bits(_read(opts.solution))
        return marketsplit.check(inst, x)
    if cls == "labs":
        need(1)
        return labs.check(labs.read_sequence(_read(args[0])))
    if cls == "birkhoff":
        need(2)
        D = birkhoff.read_matrix(_read(args[0]))
        dec = birkhoff.read_decomposition(_read(args[1]))
        length, residual = birkhoff.verify(D, dec)
        viol = []
        if residual:
            viol.append(Violation("residual", f"largest residual entry {residual}", residual))
        if dec.total_weight != D.s:
            viol.append(Violation("weight", f"weights sum to {dec.total_weight}, not {D.s}",
                                  abs(dec.total_weight - D.s)))
        return Verdict.from_violations(viol, objective=length, sense=ObjectiveSense.MINIMIZE)
    if cls == "steiner":
        need(2)
        return steiner.check(steiner.read_stp(_read(args[0])), steiner.read_solution(_read(args[1])))
    if cls == "sports":
        need(2)
        inst = _sports_instance(_read(args[0]))
        return sports.validate(_sports_timetable(_read(args[1]), inst.n), inst)
    if cls == "portfolio":
        need(2)
        inst = portfolio.read_instance(_read(args[0]))
        return portfolio.evaluate(inst, portfolio.read_solution(_read(args[1])))
    if cls == "mis":
        need(2)
        return mis.check(mis.read_gph(_read(args[0])), mis.read_vertex_set(_read(args[1])))
    if cls == "network":
        need(2)
        T = network.read_demands(_read(args[0]))
        return network.check(T.n, opts.p, T, network.read_solution(_read(args[1])))
    if cls == "routing":
        need(2)
        inst = routing.parse_cvrplib(_read(args[0]))
        rs, stated = routing.read_solution(_read(args[1]))
        v = routing.check(inst, rs)
        if stated is not None and v.feasible and stated != v.objective:
            v = Verdict.from_violations([], objective=v.objective, warnings=[f"stated cost {stated} differs"])
        return v
    if cls == "topology":
        need(4)
        n, d, k = (int(a) for a in args[:3])
        return topology.check(topology.OdpInstance(n, d, k), topology.read_edge_list(_read(args[3])), k)
    raise UsageError(f"unknown problem class {cls!r}")


def cmd_check(opts) -> int:
    if opts.batch:
        jobs = [ln.split() for ln in _read(opts.batch).splitlines() if ln.strip() and not ln.startswith("#")]

        def one(paths):
            try:
                return check_files(opts.cls, paths, opts), None
            except Exception as exc:  # per-file failure must not abort the batch
                return None, exc

        with ThreadPoolExecutor(max_workers=max(1, opts.threads)) as pool:
            results = list(pool.map(one, jobs))
        code = EXIT_OK
        for paths, (v, exc) in zip(jobs, results):
            sys.stdout.write(f"FILE {' '.join(paths)}\n")
            if exc is not None:
                sys.stdout.write(f"ERROR {exc}\n")
                code = max(code, EXIT_USAGE)
            else:
                sys.stdout.write(_render_verdict(v, opts.format))
                code = max(code, EXIT_OK if v.feasible else EXIT_INFEASIBLE)
        return code
    v = check_files(opts.cls, opts.inputs, opts)
    sys.stdout.write(_render_verdict(v, opts.format))
    return EXIT_OK if v.feasible else EXIT_INFEASIBLE


def cmd_check_topology(opts) -> int:
    opts.cls, opts.inputs, opts.batch = "topology", [opts.n, opts.d, opts.k, opts.file], None
    return cmd_check(opts)


# --- generate -------------------------------------------------------------------

def cmd_generate(opts) -> int:
    cls, seed = opts.cls, opts.seed
    if cls == "marketsplit":
        text = marketsplit.write_instance(marketsplit.generate(opts.m, opts.D, seed))
    elif cls == "labs":
        row = labs.KNOWN_OPTIMA.get(opts.n)
        seq = labs.decode_runlength(row[0]) if row else labs.exhaustive(opts.n)[1]
        text = labs.write_sequence(seq)
    elif cls == "birkhoff":
        D, dec = birkhoff.generate(opts.n, opts.density, seed, opts.digits)
        text = birkhoff.write_matrix(D)
        if opts.witness:
            _emit(birkhoff.write_decomposition(dec), opts.witness)
    elif cls == "steiner":
        inst, edges = steiner.generate(opts.S, opts.L, opts.T, opts.H, seed)
        text = steiner.write_stp(inst)
        if opts.witness:
            _emit(steiner.write_solution(edges), opts.witness)
    elif cls == "sports":
        text = sports.write_timetable(sports.circle_method(opts.n))
    elif cls == "portfolio":
        text = portfolio.write_instance(portfolio.generate(opts.n, opts.m, seed, k=opts.k))
    elif cls == "mis":
        import networkx as nx
        g = mis.Graph.from_networkx(nx.gnp_random_graph(opts.n, opts.density_p, seed=seed))
        text = mis.write_gph(g)
    elif cls == "network":
        if not opts.demands:
            raise UsageError("network has no instance generator; pass --demands FILE to emit the circulant solution")
        T = network.read_demands(_read(opts.demands))
        text = network.write_solution(network.trivial_solution(T.n, opts.p, T))
    elif cls == "routing":
        text = routing.write_cvrplib(routing.generate_tight(opts.n, opts.K, seed, opts.Q))
    elif cls == "topology":
        text = topology.write_edge_list(topology.construct(opts.n, opts.d, seed, opts.budget))
    else:
        raise UsageError(f"unknown problem class {cls!r}")
    _emit(text, opts.output)
    return EXIT_OK


# --- convert / solve / stats ------------------------------------------------------

def to_qubo(model: mdl.Model) -> mdl.Hubo:
    """Slack inequalities, binarize integers, penalize equalities, then quadratize."""
    binary, _ = mdl.binarize_integers(mdl.add_slack(model))
    h = mdl.penalty_unconstrain(binary).hubo
    return mdl.quadratize(h)[0] if h.degree() > 2 else h


def _class_model(opts):
    cls = opts.cls
    if cls == "labs":
        return labs.to_hubo(opts.n)
    if opts.input is None:
        raise UsageError(f"convert {cls} needs an instance path")
    text = _read(opts.input)
    if cls == "marketsplit":
        return marketsplit.to_objective(marketsplit.read_instance(text), marketsplit.Norm(opts.norm))
    if cls == "mis":
        g = mis.read_gph(text)
        return mis.build_qubo(g, opts.lam) if opts.to == "qubo" else mis.build_blp(g)
    if cls == "portfolio":
        return portfolio.build_bqp(portfolio.read_instance(text))
    if cls == "network":
        T = network.read_demands(text)
        return network.build_mip(T.n, opts.p, T)[0]
    if cls == "routing":
        return routing.build_mtz(routing.parse_cvrplib(text))[0]
    if cls == "model":
        return mdl.read_model(text)
    raise UsageError(f"no model builder for {cls!r}")


def cmd_convert(opts) -> int:
    m = _class_model(opts)
    if opts.to == "model":
        if isinstance(m, mdl.Hubo):
            raise UsageError("this class converts to a binary form directly; use --to qubo")
        text = mdl.write_model(m)
    else:
        h = m if isinstance(m, mdl.Hubo) else to_qubo(m)
        if opts.to == "qubo" and h.degree() > 2:
            h = mdl.quadratize(h)[0]
        text = mdl.write_hubo(h)
    _emit(text, opts.output)
    return EXIT_OK


def _load_problem(path: str):
    text = _read(path)
    head = text.lstrip().split(None, 1)[0] if text.strip() else ""
    return mdl.read_hubo(text) if head in ("QUBO", "HUBO") else mdl.read_model(text)


def cmd_solve(opts) -> int:
    prob = _load_problem(opts.input)
    if opts.method == "milp":
        if not isinstance(prob, mdl.Model):
            raise UsageError("milp needs a model file")
        out = solvers.milp_solve(prob, opts.time_limit_s)
    elif opts.method == "anneal":
        h = prob if isinstance(prob, mdl.Hubo) else to_qubo(prob)
        sched = solvers.AnnealSchedule(opts.sweeps, restarts=opts.restarts, seed=opts.seed)
        out = solvers.simulated_annealing(h, sched)
    else:
        out = solvers.brute_force(prob)
    value = out.best_energy
    if isinstance(prob, mdl.Model) and prob.objective_scale != 1:
        value = Fraction(value, prob.objective_scale)
    sys.stdout.write(f"OBJECTIVE {value}\nX {' '.join(map(str, out.best_x))}\n")
    return EXIT_OK


def cmd_stats(opts) -> int:
    s = mdl.model_stats(_load_problem(opts.input))
    sys.stdout.write(f"VARIABLES {s.n_vars}\nCONSTRAINTS {s.n_constraints}\nNONZEROS {s.n_nonzeros}\n"
                     f"COEFFICIENTS [{s.coeff_min}, {s.coeff_max}]\nDENSITY {s.density_class.value}\n")
    return EXIT_OK


# --- report ------------------------------------------------------------------------

def cmd_report(opts) -> int:
    text = _read(opts.input)
    if opts.action == "validate":
        try:
            parse_report(text)
        except ReportError as exc:
            raise UsageError(str(exc)) from exc
        sys.stdout.write("REPORT valid\n")
        return EXIT_OK
    runs = []
    for ln in text.splitlines():
        tok = ln.split()
        if not tok or tok[0].startswith("#"):
            continue
        feasible = tok[0] in ("1", "yes", "true", "Feasible")
        runs.append(RunRecord(feasible, Fraction(tok[1]) if feasible else None))
    sense = {"min": ObjectiveSense.MINIMIZE, "max": ObjectiveSense.MAXIMIZE,
             "feas": ObjectiveSense.FEASIBILITY}[opts.sense]
    n_feas, n_ok, best = count_successes(runs, SuccessPolicy(Fraction(opts.epsilon), sense))
    sys.stdout.write(f"RUNS {len(runs)}\nFEASIBLE {n_feas}\nSUCCESSFUL {n_ok}\nBEST {best}\n")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--time-limit-s", type=float, default=None)
    common.add_argument("--epsilon", default="0")
    common.add_argument("-o", "--output", default=None)

    p = argparse.ArgumentParser(prog="combench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="emit a random instance")
    g.add_argument("cls", choices=CLASSES)
    g.add_argument("--m", type=int, default=3)
    g.add_argument("--D", type=int, default=100)
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--k", type=int, default=portfolio.UNITS_PER_ASSET)
    g.add_argument("--K", type=int, default=2)
    g.add_argument("--Q", type=int, default=100)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--S", type=int, default=10)
    g.add_argument("--L", type=int, default=2)
    g.add_argument("--T", type=int, default=3)
    g.add_argument("--H", type=int, default=0)
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--budget", type=int, default=3000)
    g.add_argument("--density", choices=("sparse", "dense"), default="sparse")
    g.add_argument("--density-p", type=float, default=0.3, help="edge probability for random graphs")
    g.add_argument("--digits", type=int, default=None)
    g.add_argument("--demands", default=None)
    g.add_argument("--witness", default=None, help="also write the planted solution here")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", parents=[common], help="verify a solution")
    c.add_argument("cls", choices=CLASSES)
    c.add_argument("inputs", nargs="*")
    c.add_argument("--solution", default=None)
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--batch", default=None, help="file listing one set of input paths per line")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("check-topology", parents=[common], help="check an order/degree certificate")
    for name in ("n", "d", "k"):
        t.add_argument(name)
    t.add_argument("file")
    t.set_defaults(func=cmd_check_topology)

    v = sub.add_parser("convert", parents=[common], help="build a model or QUBO from an instance")
    v.add_argument("cls", choices=("marketsplit", "labs", "mis", "portfolio", "network", "routing", "model"))
    v.add_argument("input", nargs="?")
    v.add_argument("--to", choices=("model", "qubo", "hubo"), default="model")
    v.add_argument("--n", type=int, default=10)
    v.add_argument("--p", type=int, default=2)
    v.add_argument("--lam", type=int, default=2)
    v.add_argument("--norm", choices=("l2", "linf"), default="l2")
    v.set_defaults(func=cmd_convert)

    s = sub.add_parser("solve", parents=[common], help="solve a model or QUBO file")
    s.add_argument("input")
    s.add_argument("--method", choices=("brute", "anneal", "milp"), default="brute")
    s.add_argument("--sweeps", type=int, default=1000)
    s.add_argument("--restarts", type=int, default=1)
    s.set_defaults(func=cmd_solve)

    st = sub.add_parser("stats", parents=[common], help="size, coefficient and density statistics")
    st.add_argument("input")
    st.set_defaults(func=cmd_stats)

    r = sub.add_parser("report", parents=[common], help="submission reports and success counting")
    r.add_argument("action", choices=("validate", "success"))
    r.add_argument("input")
    r.add_argument("--sense", choices=("min", "max", "feas"), default="min")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return opts.func(opts)
    except (UsageError, ValueError, KeyError, solvers.NoFeasiblePoint) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
