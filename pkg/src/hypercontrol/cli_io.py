"""JSON spec files, report serialization and the ``hypercontrol`` command line."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

import numpy as np

from . import analyzer
from .analyzer import (BruteForceResult, ControlAlgebra, ControllabilityReport, CrossValidation,
                       Verdict)
from .errors import InputError, ResourceError
from .hypergraph import InfectionSequence, find_infection_sequence, fmt_set, minimal_infecting_sets
from .lie_closure import AlgebraKind
from .operators import OperatorTerm, SubsystemLayout
from .propagation import EdgeRecord, PropagationReport, SubsetCheck, check_drift_propagation
from .system import SUBSET_MODES, DriftEdge, Options, SystemSpec

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_INCONSISTENT = 0, 1, 2, 3


# ---------------------------------------------------------------- spec files

def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise InputError(f"expected {name}, got {type(obj).__name__}", path=path)
    return obj


def _no_extra(obj: dict, allowed, path):
    for key in obj:
        if key not in allowed:
            raise InputError(f"unknown field {key!r}", path=path)


def _int(v, path):
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"expected integer, got {v!r}", path=path)
    return v


def _node_list(v, path):
    _expect(v, list, path)
    return [_int(x, f"{path}[{k}]") for k, x in enumerate(v)]


def _parse_matrix(m, path):
    _expect(m, dict, path)
    _no_extra(m, {"re", "im"}, path)
    if "re" not in m:
        raise InputError("missing field 're'", path=path)
    try:
        re = np.array(m["re"], dtype=float)
        im = np.array(m.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError):
        raise InputError("matrix entries must be numbers in 2-D arrays", path=path) from None
    if re.ndim != 2 or re.shape != im.shape:
        raise InputError(f"re/im must be equal-shape 2-D arrays, got {re.shape} and {im.shape}", path=path)
    return re + 1j * im


def _parse_term(t, default_support, path):
    _expect(t, dict, path)
    _no_extra(t, {"pauli", "matrix", "coeff", "support"}, path)
    coeff = t.get("coeff", 1.0)
    if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
        raise InputError(f"coeff must be a real number, got {coeff!r}", path=f"{path}.coeff")
    try:
        if "pauli" in t:
            if "matrix" in t:
                raise InputError("give either 'pauli' or 'matrix', not both")
            p = _expect(t["pauli"], dict, f"{path}.pauli")
            letters = {}
            for key, letter in p.items():
                try:
                    letters[int(key)] = letter
                except ValueError:
                    raise InputError(f"node key {key!r} is not an integer", path=f"{path}.pauli") from None
            return OperatorTerm(frozenset(letters), pauli=letters, coeff=coeff)
        if "matrix" in t:
            support = t.get("support", default_support)
            support = _node_list(support, f"{path}.support")
            return OperatorTerm(frozenset(support), matrix=_parse_matrix(t["matrix"], f"{path}.matrix"),
                                coeff=coeff)
    except InputError as exc:
        if exc.path:
            raise
        raise InputError(str(exc), path=path) from None
    raise InputError("term needs 'pauli' or 'matrix'", path=path)


def _parse_options(o, path="options") -> Options:
    _expect(o, dict, path)
    _no_extra(o, {"subset_mode", "brute_force", "tol", "budgets", "allow_su_controls"}, path)
    kw = {}
    if "subset_mode" in o:
        kw["subset_mode"] = o["subset_mode"]
    for key in ("brute_force", "allow_su_controls"):
        if key in o:
            kw[key] = bool(_expect(o[key], bool, f"{path}.{key}"))
    if "tol" in o:
        kw["tol"] = float(_expect(o["tol"], (int, float), f"{path}.tol"))
    if "budgets" in o:
        b = _expect(o["budgets"], dict, f"{path}.budgets")
        _no_extra(b, {"closure", "max_dim", "edge_max_dim"}, f"{path}.budgets")
        if b.get("closure") is not None:
            kw["budget"] = _int(b["closure"], f"{path}.budgets.closure")
        for key in ("max_dim", "edge_max_dim"):
            if key in b:
                kw[key] = _int(b[key], f"{path}.budgets.{key}")
    return Options(**kw)


def spec_from_dict(doc: Any) -> SystemSpec:
    _expect(doc, dict, "$")
    _no_extra(doc, {"subsystems", "drift", "controls", "options"}, "$")
    for key in ("subsystems", "drift", "controls"):
        if key not in doc:
            raise InputError(f"missing field {key!r}", path="$")
    subs = []
    for k, s in enumerate(_expect(doc["subsystems"], list, "subsystems")):
        path = f"subsystems[{k}]"
        _expect(s, dict, path)
        _no_extra(s, {"id", "dim"}, path)
        subs.append((_int(s.get("id"), f"{path}.id"), _int(s.get("dim"), f"{path}.dim")))
    try:
        layout = SubsystemLayout(tuple(subs))
    except InputError as exc:
        raise InputError(str(exc), path="subsystems") from None
    ids = set(layout.ids)

    drift = _expect(doc["drift"], dict, "drift")
    _no_extra(drift, {"edges"}, "drift")
    edges = []
    for k, e in enumerate(_expect(drift.get("edges"), list, "drift.edges")):
        path = f"drift.edges[{k}]"
        _expect(e, dict, path)
        _no_extra(e, {"nodes", "terms"}, path)
        nodes = _node_list(e.get("nodes"), f"{path}.nodes")
        for x in nodes:
            if x not in ids:
                raise InputError(f"unknown node {x}", path=path)
        terms = [_parse_term(t, nodes, f"{path}.terms[{j}]")
                 for j, t in enumerate(_expect(e.get("terms", []), list, f"{path}.terms"))]
        edges.append(DriftEdge(frozenset(nodes), tuple(terms)))

    ctrl = _expect(doc["controls"], dict, "controls")
    _no_extra(ctrl, {"set", "assume_full", "terms"}, "controls")
    cset = _node_list(ctrl.get("set", []), "controls.set")
    assume_full = bool(_expect(ctrl.get("assume_full", False), bool, "controls.assume_full"))
    cterms = [_parse_term(t, cset, f"controls.terms[{j}]")
              for j, t in enumerate(_expect(ctrl.get("terms", []), list, "controls.terms"))]
    options = _parse_options(doc.get("options", {}))
    return SystemSpec(layout, tuple(edges), frozenset(cset), tuple(cterms), assume_full, options)


def parse_system_spec(text: str) -> SystemSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"JSON syntax error: {exc.msg}", path=f"line {exc.lineno} column {exc.colno}") from None
    return spec_from_dict(doc)


def _term_to_dict(t: OperatorTerm) -> dict:
    out = {}
    if t.pauli is not None:
        out["pauli"] = {str(k): v for k, v in sorted(t.pauli.items())}
    else:
        out["support"] = sorted(t.support)
        out["matrix"] = {"re": t.matrix.real.tolist(), "im": t.matrix.imag.tolist()}
    out["coeff"] = t.coeff
    return out


def spec_to_dict(spec: SystemSpec) -> dict:
    o = spec.options
    return {
        "subsystems": [{"id": i, "dim": d} for i, d in spec.layout.subsystems],
        "drift": {"edges": [
            {"nodes": sorted(e.nodes), "terms": [_term_to_dict(t) for t in e.terms]}
            for e in spec.drift_edges
        ]},
        "controls": {
            "set": sorted(spec.control_set),
            "assume_full": spec.assume_full,
            "terms": [_term_to_dict(t) for t in spec.control_terms],
        },
        "options": {
            "subset_mode": o.subset_mode,
            "brute_force": o.brute_force,
            "allow_su_controls": o.allow_su_controls,
            "tol": o.tol,
            "budgets": {"closure": o.budget, "max_dim": o.max_dim, "edge_max_dim": o.edge_max_dim},
        },
    }


def dump_spec(spec: SystemSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


# ---------------------------------------------------------------- reports

def _sorted(s):
    return sorted(s)


def infection_to_dict(seq: Optional[InfectionSequence]):
    if seq is None:
        return None
    return {
        "chain": [_sorted(p) for p in seq.sets],
        "steps": [{"edge": _sorted(e), "increment": _sorted(b)} for e, b in seq.steps],
    }


def infection_from_dict(d) -> Optional[InfectionSequence]:
    if d is None:
        return None
    return InfectionSequence(
        tuple(frozenset(p) for p in d["chain"]),
        tuple((frozenset(s["edge"]), frozenset(s["increment"])) for s in d["steps"]),
    )


def propagation_to_dict(rep: Optional[PropagationReport]):
    if rep is None:
        return None
    return {
        "mode": rep.mode,
        "status": rep.status,
        "edges": [{
            "nodes": _sorted(r.nodes),
            "dim": r.dim,
            "status": r.status,
            "checks": [{
                "subset": _sorted(c.subset), "achieved": c.achieved, "target": c.target,
                "complete": c.complete, "commutators": c.commutators, "status": c.status,
            } for c in r.checks],
        } for r in rep.edges],
    }


def propagation_from_dict(d) -> Optional[PropagationReport]:
    if d is None:
        return None
    return PropagationReport(d["mode"], tuple(
        EdgeRecord(frozenset(r["nodes"]), r["dim"], tuple(
            SubsetCheck(frozenset(c["subset"]), c["achieved"], c["target"], c["complete"],
                        c["commutators"]) for c in r["checks"]))
        for r in d["edges"]))


def report_to_dict(rep: ControllabilityReport) -> dict:
    bf = rep.brute_force
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "controllability_report",
        "verdict": rep.verdict.value,
        "failing_stage": rep.failing_stage,
        "control_set": _sorted(rep.control_set),
        "control_algebra": rep.control_algebra.value if rep.control_algebra else None,
        "propagation": propagation_to_dict(rep.propagation),
        "infection": infection_to_dict(rep.infection),
        "brute_force": None if bf is None else {
            "class": bf.kind.value if bf.kind else None,
            "dimension": bf.dimension, "dim_space": bf.dim_space, "complete": bf.complete,
            "commutators": bf.commutators,
            "operator_controllable": bf.operator_controllable,
            "state_controllable": bf.state_controllable,
        },
        "notes": list(rep.notes),
    }


def report_from_dict(d: dict) -> ControllabilityReport:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {d.get('schema_version')!r}", path="schema_version")
    bf = d.get("brute_force")
    return ControllabilityReport(
        verdict=Verdict(d["verdict"]),
        failing_stage=d.get("failing_stage"),
        control_algebra=ControlAlgebra(d["control_algebra"]) if d.get("control_algebra") else None,
        propagation=propagation_from_dict(d.get("propagation")),
        infection=infection_from_dict(d.get("infection")),
        brute_force=None if bf is None else BruteForceResult(
            AlgebraKind(bf["class"]) if bf["class"] else None, bf["dimension"], bf["dim_space"],
            bf["complete"], bf["commutators"], bf["operator_controllable"], bf["state_controllable"]),
        notes=tuple(d.get("notes", ())),
        control_set=frozenset(d.get("control_set", ())),
    )


def cross_to_dict(cv: CrossValidation) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cross_validation",
        "status": cv.status,
        "local": report_to_dict(cv.local),
        "brute_force": report_to_dict(cv.brute),
        "chain_inclusions": [{"set": _sorted(p), "contained": ok} for p, ok in cv.chain_inclusions],
    }


def _human_propagation(rep: PropagationReport) -> list:
    lines = [f"propagation ({rep.mode}): {rep.status}"]
    for r in rep.edges:
        parts = [f"{fmt_set(c.subset)} -> {c.achieved}/{c.target} {c.status}" for c in r.checks]
        lines.append(f"  edge {fmt_set(r.nodes)} (d={r.dim}): {r.status}; " + "; ".join(parts))
    return lines


def emit_report(rep: ControllabilityReport, fmt: str = "human") -> str:
    if fmt in ("json", "machine"):
        return json.dumps(report_to_dict(rep), indent=2, sort_keys=True, ensure_ascii=False)
    head = f"verdict: {rep.verdict.value}"
    if rep.failing_stage:
        head += f" (failing stage: {rep.failing_stage})"
    lines = [head]
    if rep.control_set:
        lines.append(f"control set: {fmt_set(rep.control_set)}")
    if rep.control_algebra:
        lines.append(f"control algebra: {rep.control_algebra.value}")
    if rep.propagation is not None:
        lines += _human_propagation(rep.propagation)
    if rep.infection is not None:
        lines.append(f"infection: {rep.infection.render()}")
        for e, b in rep.infection.steps:
            lines.append(f"  via edge {fmt_set(e)} infect {fmt_set(b)}")
    bf = rep.brute_force
    if bf is not None:
        kind = bf.kind.value if bf.kind else "unknown (budget exhausted)"
        lines.append(f"brute force: {kind}, dim {bf.dimension} of {bf.dim_space ** 2} "
                     f"(operator controllable: {bf.operator_controllable}, "
                     f"state controllable: {bf.state_controllable})")
    lines += [f"note: {n}" for n in rep.notes]
    return "\n".join(lines)


def _dump(doc: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **doc}, indent=2, sort_keys=True,
                      ensure_ascii=False)


# ---------------------------------------------------------------- command line

def _node_arg(text: str) -> frozenset:
    try:
        return frozenset(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="spec file path, or - for stdin")
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-dim", type=int, dest="max_dim")
    common.add_argument("--budget", type=int, help="commutator budget per closure")

    p = argparse.ArgumentParser(prog="hypercontrol",
                                description="Controllability of multipartite quantum systems.")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("validate", parents=[common], help="parse and validate a spec")
    s = sub.add_parser("infect", parents=[common], help="infection witness from a control set")
    s.add_argument("--control", type=_node_arg)
    s.add_argument("--greedy", action="store_true")
    s = sub.add_parser("min-infect", parents=[common], help="smallest infecting sets")
    s.add_argument("--max-size", type=int, default=2, dest="max_size")
    s.add_argument("--all", action="store_true", dest="find_all")
    s = sub.add_parser("propagation", parents=[common], help="propagation property of the drift")
    s.add_argument("--subsets", choices=("singletons", "all"))
    s = sub.add_parser("lie", parents=[common], help="brute-force Lie closure on the full space")
    s.add_argument("--control", type=_node_arg)
    s.add_argument("--assume-full", action="store_true", dest="assume_full")
    s = sub.add_parser("check", parents=[common], help="local controllability pipeline")
    s.add_argument("--control", type=_node_arg)
    s.add_argument("--assume-full", action="store_true", dest="assume_full")
    s.add_argument("--subsets", choices=SUBSET_MODES)
    s.add_argument("--cross-validate", action="store_true", dest="cross_validate")
    return p


def load_spec(args) -> SystemSpec:
    if args.spec == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read spec: {exc.strerror}", path=args.spec) from None
    spec = parse_system_spec(text)
    overrides = {}
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.max_dim is not None:
        overrides["max_dim"] = args.max_dim
    if args.budget is not None:
        overrides["budget"] = args.budget
    if getattr(args, "subsets", None):
        overrides["subset_mode"] = args.subsets
    if overrides:
        spec = spec.with_options(**overrides)
    control = getattr(args, "control", None)
    assume = getattr(args, "assume_full", False)
    if control is not None or assume:
        spec = spec.with_control(control if control is not None else spec.control_set,
                                 assume_full=assume or spec.assume_full)
    return spec


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)

    def say(text):
        print(text, file=out)

    try:
        spec = load_spec(args)
        human = args.format == "human"
        if args.verb == "validate":
            h = spec.hypergraph
            if human:
                say(f"ok: {len(spec.layout.ids)} subsystems, N={spec.layout.total_dim}, "
                    f"{len(h.edges)} edges, control set {fmt_set(spec.control_set)}")
            else:
                say(_dump({"kind": "validation", "ok": True, "total_dim": spec.layout.total_dim,
                           "edges": [_sorted(e) for e in h.edges]}))
        elif args.verb == "infect":
            mode = "greedy" if args.greedy else "exact"
            seq = find_infection_sequence(spec.hypergraph, spec.control_set, mode)
            if human:
                if seq is None:
                    say(f"{fmt_set(spec.control_set)} is not infecting ({mode} search)")
                else:
                    say(f"infecting: {seq.render()}")
                    for e, b in seq.steps:
                        say(f"  via edge {fmt_set(e)} infect {fmt_set(b)}")
            else:
                say(_dump({"kind": "infection", "control_set": _sorted(spec.control_set),
                           "mode": mode, "infecting": seq is not None,
                           "sequence": infection_to_dict(seq)}))
        elif args.verb == "min-infect":
            try:
                sets = minimal_infecting_sets(spec.hypergraph, args.max_size, args.find_all)
            except ResourceError as exc:
                partial = exc.partial or []
                say(_dump({"kind": "min_infect", "complete": False,
                           "sets": [_sorted(s) for s in partial]}) if not human else
                    f"partial: {', '.join(fmt_set(s) for s in partial) or 'none'}")
                raise
            if human:
                say(("minimal infecting sets: " + ", ".join(fmt_set(s) for s in sets)) if sets
                    else f"no infecting set of size <= {args.max_size}")
            else:
                say(_dump({"kind": "min_infect", "complete": True, "max_size": args.max_size,
                           "sets": [_sorted(s) for s in sets]}))
        elif args.verb == "propagation":
            rep = check_drift_propagation(spec)
            if human:
                say("\n".join(_human_propagation(rep)))
            else:
                say(_dump({"kind": "propagation", **propagation_to_dict(rep)}))
        elif args.verb == "lie":
            say(emit_report(analyzer.brute_force_controllability(spec), args.format))
        elif args.verb == "check":
            if args.cross_validate or spec.options.brute_force:
                cv = analyzer.cross_validate(spec)
                if human:
                    say(emit_report(cv.local))
                    say("--- brute force")
                    say(emit_report(cv.brute))
                    say(f"cross-validation: {cv.status}")
                    for p, ok in cv.chain_inclusions:
                        say(f"  u({fmt_set(p)}) inside generated algebra: {ok}")
                else:
                    say(json.dumps(cross_to_dict(cv), indent=2, sort_keys=True, ensure_ascii=False))
                if cv.status == "inconsistent":
                    return EXIT_INCONSISTENT
            else:
                say(emit_report(analyzer.check_local_controllability(spec), args.format))
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
