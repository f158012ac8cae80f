"""Command-line entry point: ``corewidth <command> ...``.

Exit codes: 0 SAT/success, 1 UNSAT, 2 implicationally hard, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import corpus
from .core import BinaryCore, is_liberal, max_bound
from .impgraph import GraphError, build_graph, cycle_arcs, find_cycle, graph_to_dot, graph_to_json
from .io import (
    FORMAT_VERSION,
    LoadError,
    core_from_json,
    dumps,
    instance_from_json,
    instance_to_json,
    language_from_json,
    orbit_to_json,
    read_json,
    relation_to_json,
    trace_to_jsonl,
)
from .minimality import Instance, establish_minimality
from .orbits import count_bound, enumerate_orbits
from .relalg.implications import Arrow, CompositionError, classify_implication, describe
from .relalg.relation import Relation
from .solver import Status, brute_force_solve, minimize_and_merge, solve

INPUT_ERROR = 3


@dataclass
class Workspace:
    core: BinaryCore
    language: dict = field(default_factory=dict)
    instance: Optional[Instance] = None
    names: Optional[list] = None


def _load_core(spec: str) -> BinaryCore:
    p = Path(spec)
    if not p.exists() and spec in corpus.CORES:
        return corpus.load_core(spec)
    return core_from_json(read_json(p), where=str(p))


def load_workspace(core: str, language: Optional[str] = None,
                   instance: Optional[str] = None) -> Workspace:
    """Load and validate a core, an optional language and an optional instance.

    ``core`` and ``language`` may name a bundled corpus entry instead of a file.
    """
    lang: dict = {}
    if language is not None:
        lp = Path(language)
        if not lp.exists() and language in corpus.LANGUAGES:
            c, lang = corpus.load_language(language)
            ws_core = c if core is None else _load_core(core)
            if ws_core != c:
                raise LoadError(f"language {language!r} is declared over core {c.name!r}")
        else:
            doc = read_json(lp)
            if core is None:
                if "core" not in doc:
                    raise LoadError(f"{lp}: no core given and none declared")
                ws_core = _load_core(doc["core"])
            else:
                ws_core = _load_core(core)
            lang = language_from_json(doc, ws_core, where=str(lp))
    else:
        if core is None:
            raise LoadError("a core is required")
        ws_core = _load_core(core)
    ws = Workspace(ws_core, lang)
    if instance is not None:
        ip = Path(instance)
        ws.instance = instance_from_json(read_json(ip), ws_core, lang, where=str(ip))
        ws.names = list(ws.instance.names) if ws.instance.names else None
    return ws


def _emit(doc: dict, out: Optional[str]) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rng(args) -> Optional[random.Random]:
    return random.Random(args.seed) if args.seed is not None else None


def _need_instance(ws: Workspace) -> Instance:
    if ws.instance is None:
        raise LoadError("--instance is required for this command")
    return ws.instance


# commands ------------------------------------------------------------------

def cmd_validate(args, ws: Workspace) -> int:
    doc = {"format_version": FORMAT_VERSION, "ok": True, "core": ws.core.name,
           "orbitals": len(ws.core.signature.orbitals), "liberal": is_liberal(ws.core),
           "max_bound": max_bound(ws.core), "relations": sorted(ws.language)}
    if ws.instance is not None:
        doc["instance"] = {"variables": len(ws.instance.variables),
                           "constraints": len(ws.instance.constraints)}
    _emit(doc, args.output)
    return 0


def cmd_orbits(args, ws: Workspace) -> int:
    orbs = enumerate_orbits(ws.core, args.arity)
    doc = {"format_version": FORMAT_VERSION, "arity": args.arity, "count": len(orbs),
           "unbounded_count": count_bound(ws.core, args.arity)}
    if not args.count_only:
        doc["orbits"] = [orbit_to_json(o, ws.core) for o in orbs]
    _emit(doc, args.output)
    return 0


def cmd_minimize(args, ws: Workspace) -> int:
    inst = _need_instance(ws)
    l = args.l if args.l is not None else max_bound(ws.core)
    m = establish_minimality(inst, l, core=ws.core, rng=_rng(args))
    if args.trace:
        Path(args.trace).write_text(trace_to_jsonl(m.trace, ws.core))
    doc = {"format_version": FORMAT_VERSION, "l": l, "trivial": m.trivial,
           "removed": len(m.trace), "instance": instance_to_json(m.instance)}
    _emit(doc, args.output)
    return 1 if m.trivial else 0


def _certificate_json(cert, core) -> dict:
    sig = core.signature
    n = cert.labeling.n
    return {"classes": [list(c) for c in cert.classes],
            "labels": [[sig.name(cert.labeling.label(a, b)) for b in range(n)] for a in range(n)]}


def cmd_solve(args, ws: Workspace) -> int:
    inst = _need_instance(ws)
    res = solve(inst, ws.core, oracle=args.oracle)
    if args.trace:
        Path(args.trace).write_text("".join(trace_to_jsonl(t, ws.core) for t in res.removals))
    doc = {"format_version": FORMAT_VERSION, "status": res.status.value,
           "events": res.events, "notes": res.notes}
    if res.certificate is not None:
        doc["certificate"] = _certificate_json(res.certificate, ws.core)
    if res.status is Status.IMPLICATIONALLY_HARD:
        sig = ws.core.signature
        doc["cycle"] = [{"pair": list(v.pair), "C": sorted(sig.name(c) for c in v.labels)}
                        for v in res.cycle]
        doc["cycle_witnesses"] = [{"constraint": w.constraint, "variables": list(w.variables),
                                   "L": w.L.ascii, "P": w.P.ascii} for w in res.cycle_witnesses]
    _emit(doc, args.output)
    return res.exit_code


def cmd_oracle(args, ws: Workspace) -> int:
    inst = _need_instance(ws)
    cert = brute_force_solve(inst, ws.core)
    doc = {"format_version": FORMAT_VERSION, "status": "SAT" if cert else "UNSAT"}
    if cert is not None:
        doc["certificate"] = _certificate_json(cert, ws.core)
    _emit(doc, args.output)
    return 0 if cert else 1


def cmd_impgraph(args, ws: Workspace) -> int:
    inst = _need_instance(ws)
    mm = minimize_and_merge(inst, ws.core)
    if mm is None:
        _emit({"format_version": FORMAT_VERSION, "trivial": True}, args.output)
        return 1
    g = build_graph(mm[0])
    cyc = find_cycle(g)
    sig = ws.core.signature
    doc = {"format_version": FORMAT_VERSION, "trivial": False, "graph": graph_to_json(g, sig),
           "acyclic": cyc is None}
    if cyc is not None:
        doc["cycle"] = [{"pair": list(v.pair), "C": sorted(sig.name(c) for c in v.labels)}
                        for v in cyc]
        doc["cycle_witnesses"] = [{"constraint": w.constraint, "variables": list(w.variables),
                                   "L": w.L.ascii, "P": w.P.ascii} for w in cycle_arcs(g, cyc)]
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(g, sig))
    _emit(doc, args.output)
    return 2 if cyc is not None else 0


def cmd_analyze(args, ws: Workspace) -> int:
    from .analyzer import analyze_language
    if not ws.language:
        raise LoadError("--language is required for analyze")
    rep = analyze_language(ws.language, ws.core, max_vars=args.max_vars,
                           max_constraints=args.max_constraints, budget=args.budget)
    if args.emit_witness and rep.witness is not None:
        doc = {"format_version": FORMAT_VERSION, **rep.witness.to_json()}
        Path(args.emit_witness).write_text(dumps(doc))
    _emit(rep.to_json(), args.output)
    return 2 if rep.witness is not None or "hard" in rep.verdict else 0


def _arrows(text: Optional[str]):
    if text is None:
        return None
    table = {"->": Arrow.FWD, "<-": Arrow.BWD, "→": Arrow.FWD, "←": Arrow.BWD}
    try:
        a, b = (table[t.strip()] for t in text.split(","))
    except (KeyError, ValueError):
        raise LoadError(f"bad arrows {text!r}; expected e.g. '->,<-'") from None
    return a, b


def _codes(ws: Workspace, text: str) -> Relation:
    try:
        return Relation.binary(ws.core, [ws.core.signature.code(t.strip()) for t in text.split(",")])
    except KeyError as e:
        raise LoadError(f"unknown orbital {e.args[0]!r}") from None


def _pick(ws, name, C1, D1, arrows):
    if name not in ws.language:
        raise LoadError(f"undeclared relation {name!r}")
    R = ws.language[name]
    if arrows is not None:
        return describe(R, C1, D1, *arrows)
    for d in classify_implication(R):
        if d.C1 == C1 and d.D1 == D1:
            return d
    raise CompositionError(f"{name} is not a ({C1}, {D1})-implication for any arrows")


def cmd_compose(args, ws: Workspace) -> int:
    from .analyzer.bipartite import compose
    c1, mid, d1 = _codes(ws, args.c1), _codes(ws, args.mid), _codes(ws, args.d1)
    a = _pick(ws, args.first, c1, mid, _arrows(args.arrows1))
    b = _pick(ws, args.second, mid, d1, _arrows(args.arrows2))
    d, _ = compose(a, b)
    doc = {"format_version": FORMAT_VERSION, "first": a.summary(), "second": b.summary(),
           "result": d.summary(), "relation": relation_to_json(d.relation, "composed")}
    _emit(doc, args.output)
    return 0


COMMANDS = {
    "validate": cmd_validate, "orbits": cmd_orbits, "minimize": cmd_minimize,
    "solve": cmd_solve, "oracle": cmd_oracle, "impgraph": cmd_impgraph,
    "analyze": cmd_analyze, "compose": cmd_compose,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--core", help="core JSON file or bundled core name")
    common.add_argument("--language", help="language JSON file or bundled language name")
    common.add_argument("--instance", help="instance JSON file")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, help="seed for every randomized choice")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; work runs sequentially")

    p = argparse.ArgumentParser(prog="corewidth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="load and check inputs")
    s = sub.add_parser("orbits", parents=[common], help="list orbits of a given arity")
    s.add_argument("--arity", type=int, required=True)
    s.add_argument("--count-only", action="store_true")
    s = sub.add_parser("minimize", parents=[common], help="establish (2, l)-minimality")
    s.add_argument("-l", type=int, help="defaults to MaxBound of the core")
    s.add_argument("--trace", help="write removals as JSON lines")
    s = sub.add_parser("solve", parents=[common], help="decide an instance")
    s.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    s.add_argument("--trace", help="write removals as JSON lines")
    sub.add_parser("oracle", parents=[common], help="brute-force decision")
    s = sub.add_parser("impgraph", parents=[common], help="implication graph of the minimal instance")
    s.add_argument("--dot", help="also write Graphviz DOT here")
    s = sub.add_parser("analyze", parents=[common], help="search a language for hardness")
    s.add_argument("--max-vars", type=int, default=4)
    s.add_argument("--max-constraints", type=int, default=2)
    s.add_argument("--budget", type=int, help="maximum number of instances to analyze")
    s.add_argument("--emit-witness", help="write the critical ternary witness here")
    s = sub.add_parser("compose", parents=[common], help="compose two implications")
    s.add_argument("--first", required=True)
    s.add_argument("--second", required=True)
    s.add_argument("--c1", required=True, help="comma-separated orbitals")
    s.add_argument("--mid", required=True, help="consequent of the first, premise of the second")
    s.add_argument("--d1", required=True)
    s.add_argument("--arrows1", help="e.g. '->,<-'")
    s.add_argument("--arrows2")
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ws = load_workspace(args.core, args.language, args.instance)
        return COMMANDS[args.command](args, ws)
    except (LoadError, GraphError, CompositionError, ValueError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        print(f"corewidth: error: {msg}", file=sys.stderr)
        return INPUT_ERROR
    except json.JSONDecodeError as e:  # pragma: no cover - read_json wraps these
        print(f"corewidth: error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
