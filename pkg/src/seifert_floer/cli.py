"""Command line front end: ``seifert-floer <command> <manifold> [options]``."""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import Optional, Sequence

from .contact import (
    classify,
    default_window,
    ghiggini_massot,
    group_realised,
    realised_vectors,
    twisting_numbers_via_heights,
)
from .corpus import random_seifert
from .errors import ConsistencyError, ContractError, DomainError, ParseError, SeifertFloerError, UnsupportedError
from .lattice import (
    alexander,
    box_classes,
    canonical_vector,
    enumerate_basis,
    form_of,
    full_path,
    height,
    indefinite_orientation,
    is_initial,
    is_l_space,
    maslov,
    spin_c_label,
    tau,
)
from .numtheory import format_rational
from .plumbing import (
    Definiteness,
    decomposition_labels,
    dual,
    euler_number,
    parse_manifold,
    s3_subgraph,
    standard_graph,
    type_AB,
)
from .report import to_csv, to_json, to_table

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_CONSISTENCY = 0, 2, 3, 4
_NEGATED = re.compile(r"^-\s*[A-Za-z]\w*\(")


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _rat(x) -> str:
    return "-" if x is None else format_rational(x)


def _emit(args, payload: dict, text: str) -> str:
    if args.format == "json":
        return json.dumps(payload, indent=2) + "\n"
    return text


# --------------------------------------------------------------------------
# commands


def cmd_classify(args) -> str:
    s, desc = parse_manifold(args.manifold)
    report = classify(s, window=args.window, descriptor=desc)
    if args.format == "json":
        return to_json(report)
    if args.format == "csv":
        return to_csv(report)
    return to_table(report)


def _basis_rows(g, args):
    if form_of(g).det == 0 and args.box:
        rows = []
        for b in box_classes(g):
            rows.append({
                "representative": list(b.representative),
                "terminal": None,
                "loop": b.has_loop,
                "maslov": _rat(b.maslov),
                "alexander": None,
                "spinc": str(spin_c_label(g, b.representative)),
            })
        return rows
    basis = enumerate_basis(g, parallel=args.parallel)
    rows = []
    for b in basis:
        if args.spinc and str(b.spinc) != args.spinc:
            continue
        rows.append({
            "representative": list(b.path.representative),
            "terminal": None if b.path.terminal is None else list(b.path.terminal),
            "loop": b.path.has_loop,
            "maslov": _rat(b.maslov),
            "alexander": None if b.alex_range is None else [_rat(x) for x in b.alex_range],
            "spinc": str(b.spinc),
        })
    return rows


def cmd_hf(args) -> str:
    s, desc = parse_manifold(args.manifold)
    g = standard_graph(s)
    rows = _basis_rows(g, args)
    lines = [f"{s}  graph {g}", f"full paths ending correctly: {len(rows)}"]
    for k, r in enumerate(rows):
        f = "" if r["alexander"] is None else f"  F {r['alexander'][0]}..{r['alexander'][1]}"
        loop = "  loop" if r["loop"] else ""
        lines.append(f"  [{k}] {_vec(r['representative'])}  M {r['maslov']}{f}  Spin^c {r['spinc']}{loop}")
    payload = {"manifold": str(s), "descriptor": desc, "graph": list(g.framings), "classes": rows}
    return _emit(args, payload, "\n".join(lines) + "\n")


def cmd_twist(args) -> str:
    s, desc = parse_manifold(args.manifold)
    ts = ghiggini_massot(s, window=args.window)
    lines = [f"{s}"]
    if not ts.values:
        lines.append("no negative twisting numbers (L-space)")
    else:
        tail = f" ... (infinite family, first {ts.window} shown)" if ts.infinite else ""
        lines.append("twisting numbers: " + ", ".join(str(t) for t in ts.values) + tail)
    if -1 in ts.values and s.e0 <= -2:
        lines.append("  -1: e0 <= -2")
    for q, ps in sorted(ts.certificates.items()):
        lines.append(f"  -{q}: best upper approximations p = {list(ps)}, sum {sum(ps)} = {-s.e0}*{q} + {s.n - 2}")
    payload = {
        "manifold": str(s),
        "descriptor": desc,
        "twisting_set": list(ts.values),
        "infinite": ts.infinite,
        "window": ts.window,
        "certificates": [[q, list(ps)] for q, ps in sorted(ts.certificates.items())],
    }
    return _emit(args, payload, "\n".join(lines) + "\n")


def cmd_lspace(args) -> str:
    s, desc = parse_manifold(args.manifold)
    verdict = is_l_space(s)
    t = indefinite_orientation(s)
    lines = [f"{s}", f"L-space: {'yes' if verdict else 'no'}"]
    payload = {"manifold": str(s), "descriptor": desc, "l_space": verdict}
    if t is None:
        lines.append("e(M) = 0: b1 = 1, not an L-space")
    elif t.e0 >= 0:
        lines.append(f"indefinite orientation {t} has e0 >= 0")
    else:
        g = standard_graph(t)
        p = full_path(g, canonical_vector(g))
        lines.append(f"indefinite orientation {t}, graph {g}")
        lines.append(f"V_can {_vec(p.initial)}: {'ends correctly' if p.ends_correctly else 'leaves the box'} "
                     f"after {p.visited_count - 1} steps ({p.center_steps} at the centre)")
        payload.update(v_can=list(p.initial), ends_correctly=p.ends_correctly, steps=p.visited_count - 1)
    return _emit(args, payload, "\n".join(lines) + "\n")


def cmd_graph(args) -> str:
    s, desc = parse_manifold(args.manifold)
    g = standard_graph(s)
    f = form_of(g)
    e = euler_number(s)
    lines = [
        f"{s}  e(M) = {format_rational(e)}",
        f"standard graph {g}  ({f.definiteness.value}, det {f.det})",
        f"dual {dual(s)}  graph {standard_graph(dual(s))}",
    ]
    payload = {
        "manifold": str(s),
        "descriptor": desc,
        "euler": format_rational(e),
        "framings": list(g.framings),
        "legend": [list(x) for x in g.legend],
        "definiteness": f.definiteness.value,
        "det": f.det,
        "dual": str(dual(s)),
    }
    if f.definiteness is not Definiteness.NEGATIVE_DEFINITE:
        sub = s3_subgraph(g)
        labels = decomposition_labels(g, sub)
        ab, model = type_AB(g)
        lines.append(f"S^3 subgraph: {sorted(sub.members) or 'empty'}  kind {sub.kind.value}  d1 {sub.d1}  d2 {sub.d2}")
        lines.append(f"G'' {sorted(labels.Gpp)}  G''1 {labels.Gpp1}  G''2 {labels.Gpp2}  T {labels.T}")
        lines.append(f"blow-down shifts {list(labels.shift)}")
        if f.definiteness is Definiteness.INDEFINITE:
            lines.append(f"type {ab}" + (f" (contains {model})" if model else ""))
        lines.extend(f"warning: {w}" for w in labels.warnings)
        payload.update(
            s3_members=sorted(sub.members),
            d1=sub.d1,
            d2=sub.d2,
            shifts=list(labels.shift),
            type=ab if f.definiteness is Definiteness.INDEFINITE else None,
            model=model,
            warnings=list(labels.warnings),
        )
    return _emit(args, payload, "\n".join(lines) + "\n")


def cmd_tau(args) -> str:
    s, desc = parse_manifold(args.manifold)
    g = standard_graph(s)
    if form_of(g).det == 0:
        raise UnsupportedError("tau needs an invertible intersection form")
    if args.vector:
        V = tuple(int(x) for x in args.vector.split(","))
        if not is_initial(g, V):
            raise ContractError(f"{_vec(V)} is not an initial vector of {g}")
        p = full_path(g, V)
        if not p.ends_correctly:
            raise ContractError(f"{_vec(V)} does not end correctly")
    else:
        basis = enumerate_basis(g)
        if not 0 <= args.index < len(basis):
            raise ContractError(f"class index {args.index} out of range (0..{len(basis) - 1})")
        p = basis[args.index].path
    t_graph = tau(g, [p], "graph")
    t_dual = tau(g, [p], "dual")
    lines = [
        f"{s}  class {_vec(p.initial)}",
        f"M {format_rational(maslov(g, p.initial))}  F {format_rational(alexander(g, p.initial))}..{format_rational(alexander(g, p.terminal))}",
        f"tau (graph side) {format_rational(t_graph)}",
        f"tau (dual functional) {format_rational(t_dual)}",
        f"height {height(g, [p])}",
    ]
    payload = {
        "manifold": str(s),
        "descriptor": desc,
        "class": list(p.initial),
        "tau_graph": format_rational(t_graph),
        "tau_dual": format_rational(t_dual),
    }
    return _emit(args, payload, "\n".join(lines) + "\n")


def cmd_check(args) -> str:
    """Seeded self-check: classify a corpus and rerun walks in random push order."""
    rng = random.Random(args.seed)
    failures = []
    counts = {}
    done = 0
    attempts = 0
    while done < args.cases and attempts < 50 * args.cases:
        attempts += 1
        s = random_seifert(rng, max_box=args.max_box)
        if is_l_space(s):
            continue
        done += 1
        try:
            report = classify(s, window=args.window)
            counts[report.type] = counts.get(report.type, 0) + 1
            g = report.graph
            for rv in report.realised[:5]:
                walk = full_path(g, rv.vector, rng=random.Random(rng.getrandbits(32)))
                if (walk.ends_correctly, walk.terminal) != (rv.path.ends_correctly, rv.path.terminal):
                    failures.append((str(s), "push order changed the terminal vector"))
            if report.type in ("TypeA", "TypeB"):
                groups = group_realised(realised_vectors(g))
                if twisting_numbers_via_heights(g, report.realised, groups) != set(report.twisting.values):
                    failures.append((str(s), "two algorithms disagree"))
        except ConsistencyError as exc:
            failures.append((str(s), str(exc)))
    lines = [f"check: {done} manifolds (seed {args.seed})", "types: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))]
    lines.extend(f"FAIL {m}: {msg}" for m, msg in failures)
    lines.append("all checks passed" if not failures else f"{len(failures)} failures")
    if failures:
        sys.stdout.write("\n".join(lines) + "\n")
        raise ConsistencyError("self-check failed", failures=len(failures))
    return "\n".join(lines) + "\n"


COMMANDS = {
    "classify": cmd_classify,
    "hf": cmd_hf,
    "twist": cmd_twist,
    "lspace": cmd_lspace,
    "graph": cmd_graph,
    "tau": cmd_tau,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seifert-floer",
        description="Full-path Heegaard Floer computations and negative-twisting contact structures on Seifert manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, manifold=True, formats=("table", "json")):
        p = sub.add_parser(name, help=help_text)
        if manifold:
            p.add_argument("manifold", help="M(e0; a/b, ...) | Sigma(a, ...) | -Sigma(a, ...) | Surgery(T(d2, [-]d1), p/q)")
        p.add_argument("--format", choices=formats, default="table")
        p.add_argument("--window", type=int, default=None, help="cap on infinite twisting families")
        p.add_argument("--parallel", type=int, default=None, help="worker processes for path enumeration")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--spinc", default=None, help="restrict to one Spin^c label, e.g. (0,0,0,1,0,0)")
        return p

    add("classify", "enumerate negative-twisting contact structures", formats=("table", "json", "csv"))
    hf = add("hf", "full paths that end correctly")
    hf.add_argument("--box", action="store_true", help="singular graphs: partition the whole box, reaching loop classes")
    add("twist", "twisting numbers with best-upper-approximation certificates")
    add("lspace", "L-space test")
    add("graph", "standard graph, dual, S^3 subgraph and type")
    t = add("tau", "tau invariant of a basis class")
    t.add_argument("--class", dest="index", type=int, default=0, help="index in the hf listing")
    t.add_argument("--vector", default=None, help="initial vector, comma separated")
    c = add("check", "seeded self-check over a random corpus", manifold=False)
    c.add_argument("--cases", type=int, default=30)
    c.add_argument("--max-box", type=int, default=100_000)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # argparse reads "-Sigma(...)" as an option; a leading space keeps it
    # positional and parse_manifold strips it again.
    argv = [" " + a if _NEGATED.match(a) else a for a in argv]
    args = parser.parse_args(argv)
    if args.window is None:
        try:
            args.window = default_window()
        except ContractError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    try:
        out = COMMANDS[args.command](args)
    except (ParseError, DomainError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except SeifertFloerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
