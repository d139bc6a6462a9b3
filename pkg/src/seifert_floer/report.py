"""Tables, JSON and CSV renderings of a classification, plus reference fixtures."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .contact import ClassificationReport
from .errors import ParseError
from .lattice import height
from .numtheory import format_rational

SCHEMA_VERSION = "1"
CSV_HEADER = ("manifold", "spinc", "d3", "tw", "kind", "coords", "flags")


class SchemaVersionError(ParseError):
    """A serialized report was written with a different schema version."""


def _rat(x) -> Optional[str]:
    return None if x is None else format_rational(Fraction(x))


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _kind_text(kind: list) -> str:
    name, *args = kind
    if name == "BlowDown":
        return "BlowDown"
    if name == "PairA":
        return "PairA"
    i, j, k = args
    return f"Pyramid({i},{j};{k})"


@dataclass
class ReportDocument:
    """Plain-data form of a :class:`ClassificationReport`; rationals are ``"p/q"`` strings."""

    manifold: str
    descriptor: str
    seifert: dict
    graph: dict
    type: str
    model: Optional[str]
    tw_bar: Optional[int]
    spinc_count: Optional[int]
    spinc_classes: list
    realised: list
    groups: list
    structures: list
    twisting_set: list
    twisting_infinite: bool
    twisting_window: Optional[int]
    certificates: list
    counts: list
    checks: list
    notes: list
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_report(cls, r: ClassificationReport) -> "ReportDocument":
        g = r.graph
        realised = [
            {
                "vector": list(rv.vector),
                "spinc": str(rv.spinc),
                "d3": _rat(rv.maslov),
                "alex": _rat(rv.alex),
                "conj_partner": rv.conj_partner,
            }
            for rv in r.realised
        ]
        groups = []
        for gr in r.groups:
            ends = [r.realised[gr.members[0]].path, r.realised[gr.members[-1]].path]
            combined = None
            if r.realised[gr.members[0]].alex is not None:
                combined = height(g, ends if len(gr.members) > 1 else ends[:1])
            tws = sorted({s.tw for s in r.structures if set(s.cplus_coords) <= set(gr.members)}, reverse=True)
            groups.append({
                "spinc": str(gr.spinc),
                "d3": _rat(gr.d3),
                "members": list(gr.members),
                "combined_height": combined,
                "tw": tws,
            })
        structures = [
            {
                "spinc": str(s.spinc),
                "d3": _rat(s.d3),
                "tw": s.tw,
                "kind": [s.kind[0], *s.kind[1:]],
                "coords": list(s.cplus_coords),
                "flags": list(s.flags.names()),
            }
            for s in r.structures
        ]
        checks = [
            {"name": name, "passed": ok, "details": {k: str(v) for k, v in sorted(details.items())}}
            for name, ok, details in r.checks
        ]
        return cls(
            manifold=str(r.manifold),
            descriptor=r.descriptor,
            seifert={"e0": r.manifold.e0, "r": [format_rational(x) for x in r.manifold.r]},
            graph={
                "framings": list(g.framings),
                "legs": [list(leg) for leg in g.legs],
                "legend": [list(x) for x in g.legend],
            },
            type=r.type,
            model=r.model,
            tw_bar=r.tw_bar,
            spinc_count=r.spinc_count,
            spinc_classes=list(dict.fromkeys(str(gr.spinc) for gr in r.groups)),
            realised=realised,
            groups=groups,
            structures=structures,
            twisting_set=list(r.twisting.values),
            twisting_infinite=r.twisting.infinite,
            twisting_window=r.twisting.window,
            certificates=[[q, list(ps)] for q, ps in sorted(r.twisting.certificates.items())],
            counts=[[tw, n] for tw, n in r.counts_by_tw.items()],
            checks=checks,
            notes=list(r.notes),
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ReportDocument":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(f"unsupported report schema version {version!r}, expected {SCHEMA_VERSION!r}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ParseError(f"malformed report document: {exc}") from exc


Reportish = Union[ClassificationReport, ReportDocument]


def _doc(report: Reportish) -> ReportDocument:
    return report if isinstance(report, ReportDocument) else ReportDocument.from_report(report)


def to_json(report: Reportish) -> str:
    return json.dumps(_doc(report).to_dict(), indent=2) + "\n"


def from_json(text: str) -> ReportDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("a report document must be a JSON object")
    return ReportDocument.from_dict(data)


def to_csv(report: Reportish) -> str:
    doc = _doc(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in doc.structures:
        coords = ";".join(_vec(doc.realised[k]["vector"]) for k in s["coords"])
        w.writerow([doc.manifold, s["spinc"], s["d3"], s["tw"], _kind_text(s["kind"]), coords, "|".join(s["flags"])])
    return buf.getvalue()


def to_table(report: Reportish) -> str:
    doc = _doc(report)
    lines = [f"{doc.manifold}  graph {_graph_text(doc)}  type {doc.type}" + (f" ({doc.model})" if doc.model else "")]
    if doc.type == "LSpace":
        lines.append("L-space: no negative-twisting contact structures")
        return "\n".join(lines) + "\n"
    tw = ", ".join(str(t) for t in doc.twisting_set)
    if doc.twisting_infinite:
        tw += f", ... (infinite family, first {doc.twisting_window} shown)"
    lines.append(f"twisting numbers: {tw}")
    if doc.spinc_count is not None:
        lines.append(f"Spin^c structures: {doc.spinc_count}, with realised vectors: {len(doc.spinc_classes)}")
    for label in doc.spinc_classes:
        lines.append("")
        lines.append(f"Spin^c {label}")
        rows = [("d3", "realised", "height", "tw")]
        for gr in (x for x in doc.groups if x["spinc"] == label):
            vecs = [_vec(doc.realised[k]["vector"]) for k in gr["members"]]
            h = "" if gr["combined_height"] is None else str(gr["combined_height"])
            tws = ", ".join(str(t) for t in gr["tw"])
            rows.append((gr["d3"] or "?", vecs[0], h, tws))
            rows.extend(("", v, "", "") for v in vecs[1:])
        widths = [max(len(r[c]) for r in rows) for c in range(4)]
        for r in rows:
            lines.append("  " + "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    lines.append("")
    counts = ", ".join(f"tw {tw}: {n}" for tw, n in doc.counts)
    lines.append(f"structures: {len(doc.structures)} ({counts})")
    failed = [c["name"] for c in doc.checks if not c["passed"]]
    lines.append(f"checks: {len(doc.checks) - len(failed)}/{len(doc.checks)} passed" + (f"; failed: {failed}" if failed else ""))
    lines.extend(f"note: {n}" for n in doc.notes)
    return "\n".join(lines) + "\n"


def _graph_text(doc: ReportDocument) -> str:
    legs = "; ".join("[" + ",".join(str(m) for m in leg) + "]" for leg in doc.graph["legs"])
    return f"({doc.graph['framings'][0]}; {legs})"


# --------------------------------------------------------------------------
# reference data


def golden_fixtures() -> dict:
    """Reference values for a handful of manifolds.

    Vectors are in canonical vertex order (centre first, then each leg from
    the centre outwards).  ``four_legs`` lists only the two free coordinates, on
    the vertices framed -4 and -6; every other coordinate is 0.
    """
    t1 = [
        (19, [(-10, -2), (-2, 2)], 222, [-7, -223]),
        (15, [(-10, 0), (-2, 0)], 198, [-7]),
        (11, [(-10, 2), (-2, -2)], 174, [-7]),
        (5, [(-8, -2), (-4, 2)], 126, [-7]),
        (3, [(-8, 0), (-4, 0)], 102, [-7]),
        (1, [(-8, 2), (-4, -2)], 78, [-7]),
        (-1, [(-6, -2), (-6, 0), (-6, 2)], 30, [-7]),
    ]
    sigma347 = {
        "manifold": "-Sigma(3,4,47)",
        "also": "Surgery(T(3,4),1/4)",
        "rows": [
            {"d3": Fraction(d3), "vectors": [(1, 0, 0, -2, x, y) for x, y in vs], "height": h, "tw": tw}
            for d3, vs, h, tw in t1
        ],
        "structures": 16,
        "tw_counts": {-7: 15, -223: 1},
    }
    t2 = [
        ("s_can", "5/36", [(-2, -4), (0, -2), (2, 0)], 4, [-1, -3, -5]),
        ("conj s_can", "5/36", [(-2, 0), (0, 2), (2, 4)], 4, [-1, -3, -5]),
        ("s_1", "1/4", [(-2, -2), (0, 0), (2, 2)], 4, [-1, -3, -5]),
        ("s_2", "-7/36", [(-2, 2), (0, 4)], 2, [-1, -3]),
        ("conj s_2", "-7/36", [(0, -4), (2, -2)], 2, [-1, -3]),
        ("s_3", "-3/4", [(-2, 4)], 0, [-1]),
        ("conj s_3", "-3/4", [(2, -4)], 0, [-1]),
    ]
    four_legs = {
        "manifold": "M(-2;1/2,1/2,4/7,6/11)",
        "free_framings": (-4, -6),
        "rows": [
            {"spinc": name, "d3": Fraction(d3), "free": vs, "height": h, "tw": tw} for name, d3, vs, h, tw in t2
        ],
        "det": 36,
        "structures": 26,
        "q_counts": {1: 15, 3: 8, 5: 3},
        "pyramid_sizes": (3, 3, 3, 2, 2, 1, 1),
    }
    homology = {
        "M(-1;1/2,1/3,1/6)": [((1, 0, -1, -4), Fraction(-1, 2))],
        "M(-2;1/2,2/3,5/6)": [((0,) * 9, Fraction(3, 2))],
        "M(-1;1/2,1/4,1/4)": [((1, 0, -2, -2), Fraction(-1, 4)), ((-1, 0, 0, 4), Fraction(-3, 4))],
        "M(-2;1/2,3/4,3/4)": [((0,) * 8, Fraction(5, 4)), ((-2, 0, 0, 0, 2, 2, 0, 0), Fraction(-1, 4))],
        "M(-1;1/3,1/3,1/3)": [
            ((1, -1, -1, -1), Fraction(0)),
            ((-1, 3, 1, -1), Fraction(-2, 3)),
            ((-1, 3, -1, 1), Fraction(-2, 3)),
        ],
        "M(-2;2/3,2/3,2/3)": [
            ((0,) * 7, Fraction(1)),
            ((-2, 0, 0, 0, 2, 2, 0), Fraction(-1, 3)),
            ((-2, 0, 2, 0, 0, 2, 0), Fraction(-1, 3)),
        ],
        "M(-2;1/2,1/2,1/2,1/2)": [
            ((0,) * 5, Fraction(1, 2)),
            ((-2, 2, 2, 0, 0), Fraction(-1, 2)),
            ((-2, 2, 0, 2, 0), Fraction(-1, 2)),
            ((-2, 2, 0, 0, 2), Fraction(-1, 2)),
        ],
    }
    # Ranks of the hat group per grading, as (grading, rank) pairs.
    hat_ranks = {
        "M(-1;1/2,1/3,1/6)": [("-1/2", 1), ("-3/2", 1)],
        "M(-2;1/2,2/3,5/6)": [("3/2", 1), ("1/2", 1)],
        "M(-1;1/2,1/4,1/4)": [("1/4", 1), ("-1/4", 1), ("-3/4", 1), ("-5/4", 1)],
        "M(-2;1/2,3/4,3/4)": [("5/4", 1), ("3/4", 1), ("1/4", 1), ("-1/4", 1)],
        "M(-1;1/3,1/3,1/3)": [("1/3", 2), ("0", 1), ("-2/3", 2), ("-1", 1)],
        "M(-2;2/3,2/3,2/3)": [("1", 1), ("2/3", 2), ("0", 1), ("-1/3", 2)],
        "M(-2;1/2,1/2,1/2,1/2)": [("1/2", 4), ("-1/2", 4)],
    }
    pyramid_2323 = {
        "manifold": "-Sigma(2,3,23)",
        "realised": [(1, 0, -1, -4, -4 + 2 * i) for i in (1, 2, 3)],
        "tw_multiset": {-5: 3, -11: 2, -17: 1},
        "xi13": ((1, 0, -1, -4, -2), (1, 0, -1, -4, 2)),
    }
    approximations = {
        "manifold": "-Sigma(3,4,47)",
        "r": (Fraction(2, 3), Fraction(1, 4), Fraction(4, 47)),
        "certificates": {7: (5, 2, 1), 223: (149, 56, 19)},
        "count_factors": {7: (1, 1, 15), 223: (1, 1, 1)},
    }
    counts = {
        ("-Sigma(3,4,47)", 7): 15,
        ("-Sigma(3,4,47)", 223): 1,
        ("M(-2;1/2,1/2,4/7,6/11)", 3): 8,
        ("M(-2;1/2,1/2,4/7,6/11)", 1): 15,
    }
    return {
        "sigma_3_4_47": sigma347,
        "four_legs": four_legs,
        "homology": homology,
        "hat_ranks": hat_ranks,
        "2323": pyramid_2323,
        "approximations": approximations,
        "counts": counts,
    }
