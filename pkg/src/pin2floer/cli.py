"""Command-line front end (installed as ``p2f``).

Subcommands::

    p2f gysin solve --tower 0 --box -1:2 [--pad N] [--json]
    p2f knot correction --alexander "-1;1" --signature -2 --surgery +1
    p2f knot batch --csv knots.csv [--jobs 4] [--json]
    p2f homalg triangle --file bundle.json [--json]
    p2f homalg ss --file filtered.json [--r-max N] [--json]
    p2f blowup -k 3 [--json]
    p2f catalog Poincare | p2f catalog --list
    p2f verify paper [--jobs 4] [--json]

Exit codes: 0 on success (WARN included), 1 on usage errors, 2 on
validation failures or verification FAILs. ``--json`` switches any
subcommand to canonical JSON (sorted keys) on stdout. The Gysin window
padding honors the P2F_WINDOW_PAD environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import (
    NotAcyclic,
    check_exact_triangle,
    filtered_from_json,
    filtered_pages,
    triangle_bundle_from_json,
    triangle_detect,
)
from .gf2 import ContractError
from .gysin import GysinError, oracle_solve
from .modules import (
    StructuredModule,
    T_plus,
    F_box,
    WindowError,
    correction_terms_of,
    format_grading,
    module_to_json,
)
from .surgery import (
    KnotData,
    KnotError,
    PipelineMismatch,
    catalog,
    catalog_names,
    blowup_coefficient,
    correction_terms,
    hm_plus_one_surgery,
    seifert_obstruction,
    validate_knot,
)
from .verify import run_verify

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures remapped to exit code 1.

    The negative-number matcher is widened so values like ``-1;1``
    (Alexander lists) and ``-1:2`` (box specs) pass as option arguments
    instead of being mistaken for flags.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(
            r"^-\d+$|^-\d*\.\d+$|^-\d+(?:[:;]-?\d+)+$"
        )

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _frac_json(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else format_grading(x)


def _ct_json(ct) -> dict:
    return {
        "alpha": _frac_json(ct.alpha),
        "beta": _frac_json(ct.beta),
        "gamma": _frac_json(ct.gamma),
    }


def _module_text(m: StructuredModule) -> str:
    parts = []
    for t in m.towers:
        parts.append(f"T^+({format_grading(t.base)}, step {t.step})")
    for b in sorted(m.boxes, key=lambda b: b.deg):
        tag = ", qsplit" if b.qsplit else ""
        parts.append(f"F^{b.dim}<{format_grading(b.deg)}{tag}>")
    body = " + ".join(parts) if parts else "0"
    if m.links:
        body += "  [Q-links: " + ", ".join(f"{i}->{j}" for i, j in m.links) + "]"
    return body


def _candidate_text(standard, boxes) -> str:
    s = f"S{correction_terms_of(standard)}"
    for b in sorted(boxes, key=lambda b: b.deg):
        s += f" + F^{b.dim}<{format_grading(b.deg)}>"
    return s


# --- gysin ------------------------------------------------------------------


def _parse_box(spec: str):
    try:
        deg_s, dim_s = spec.split(":")
        return int(deg_s), int(dim_s)
    except ValueError:
        raise KnotError(
            f"box spec must look like DEG:DIM (e.g. -1:2), got {spec!r}"
        ) from None


def _cmd_gysin_solve(args) -> int:
    m = T_plus(args.tower)
    for spec in args.box or ():
        deg, dim = _parse_box(spec)
        m = m + F_box(dim, deg)
    sol = oracle_solve(m, pad=args.pad, max_solutions=args.max_solutions)
    if args.json:
        _emit_json(
            {
                "input": module_to_json(m),
                "window": list(sol.window),
                "unique": sol.unique,
                "candidates": [
                    {
                        "towers": _ct_json(correction_terms_of(c.standard)),
                        "boxes": [
                            {"deg": _frac_json(b.deg), "dim": b.dim}
                            for b in sorted(c.boxes, key=lambda b: b.deg)
                        ],
                        "module": module_to_json(c.module),
                    }
                    for c in sol.candidates
                ],
            }
        )
        return 0
    print(f"input: {_module_text(m)}")
    print(f"window: [{sol.window[0]}, {sol.window[1]}]")
    for c in sol.candidates:
        print(_candidate_text(c.standard, c.boxes))
    print(f"unique: {'yes' if sol.unique else 'no'}")
    return 0


# --- knot -------------------------------------------------------------------


def _parse_alexander(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x.strip()) for x in text.split(";") if x.strip() != "")
    except ValueError:
        raise KnotError(
            f"Alexander coefficients must be integers joined by ';', got {text!r}"
        ) from None


def _knot_report(kd: KnotData, slope: int) -> dict:
    res = correction_terms(kd, slope)
    return {
        "name": kd.name,
        "sigma": kd.signature,
        "arf": kd.arf,
        "mirrored": kd.mirrored,
        "surgery": slope,
        "hm_plus_one": module_to_json(hm_plus_one_surgery(kd)),
        "hs_towers": _ct_json(res.ct),
        "table": _ct_json(res.table),
        "agree": res.agree,
        "obstructed": seifert_obstruction(res.ct).obstructed,
    }


def _ct_line(ct) -> str:
    return (
        f"alpha={format_grading(ct.alpha)} "
        f"beta={format_grading(ct.beta)} "
        f"gamma={format_grading(ct.gamma)}"
    )


def _cmd_knot_correction(args) -> int:
    kd = validate_knot(
        args.name, args.signature, _parse_alexander(args.alexander), arf=args.arf
    )
    if args.surgery not in (1, -1):
        raise KnotError(f"surgery slope must be +1 or -1, got {args.surgery}")
    if args.json:
        _emit_json(_knot_report(kd, args.surgery))
        return 0
    res = correction_terms(kd, args.surgery)
    print(_ct_line(res.ct))
    return 0


def _read_knot_rows(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise KnotError(f"no knot rows in {path}")
    need = {"name", "signature", "alexander", "surgery"}
    missing = need - set(rows[0].keys())
    if missing:
        raise KnotError(f"CSV is missing columns: {sorted(missing)}")
    return rows


def _batch_one(row: dict) -> dict:
    name = row["name"].strip()
    try:
        arf_raw = (row.get("arf") or "").strip()
        kd = validate_knot(
            name,
            int(row["signature"]),
            _parse_alexander(row["alexander"]),
            arf=int(arf_raw) if arf_raw else None,
        )
        slope = int(row["surgery"])
        if slope not in (1, -1):
            raise KnotError(f"surgery slope must be +1 or -1, got {slope}")
        return _knot_report(kd, slope)
    except (KnotError, GysinError, ValueError) as e:
        raise KnotError(f"knot {name!r}: {e}") from None


def _cmd_knot_batch(args) -> int:
    rows = _read_knot_rows(args.csv)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_batch_one, rows))
    else:
        reports = [_batch_one(r) for r in rows]
    if args.json:
        _emit_json({"knots": reports})
        return 0
    for rep in reports:
        flags = []
        if rep["mirrored"]:
            flags.append("mirrored")
        if rep["obstructed"]:
            flags.append("obstructed")
        tail = f"  ({', '.join(flags)})" if flags else ""
        h = rep["hs_towers"]
        print(
            f"{rep['name']}: sigma={rep['sigma']} arf={rep['arf']} "
            f"surgery={rep['surgery']:+d} -> alpha={h['alpha']} "
            f"beta={h['beta']} gamma={h['gamma']}{tail}"
        )
    return 0


# --- homalg -----------------------------------------------------------------


def _cmd_homalg_triangle(args) -> int:
    with open(args.file) as fh:
        data = json.load(fh)
    f1, f2, h1 = triangle_bundle_from_json(data)
    res = triangle_detect(f1, f2, h1)
    if isinstance(res, NotAcyclic):
        if args.json:
            _emit_json(
                {
                    "acyclic": False,
                    "cone_homology": {str(k): n for k, n in sorted(res.homology_dims.items())},
                }
            )
        else:
            print("acyclic: no")
            print(
                "cone homology: "
                + " ".join(f"{k}:{n}" for k, n in sorted(res.homology_dims.items()))
            )
        return 0
    report = check_exact_triangle(res.f1_star, res.f2_star, res.f3)
    if args.json:
        _emit_json(
            {
                "acyclic": True,
                "exact": report.ok,
                "failures": [
                    {"vertex": v, "degree": str(k), "reason": msg}
                    for v, k, msg in report.failures
                ],
            }
        )
    else:
        print("acyclic: yes")
        print(f"triangle exact: {'yes' if report.ok else 'NO'}")
        for v, k, msg in report.failures:
            print(f"  vertex {v} degree {k}: {msg}")
    return 0 if report.ok else 2


def _cmd_homalg_ss(args) -> int:
    with open(args.file) as fh:
        data = json.load(fh)
    fc = filtered_from_json(data)
    pages = filtered_pages(fc, r_max=args.r_max)

    def page_entries(page: dict) -> list:
        return [[p, k, n] for (p, k), n in sorted(page.items())]

    if args.json:
        _emit_json(
            {
                "pages": [
                    {"r": r, "entries": page_entries(pg)}
                    for r, pg in enumerate(pages.pages)
                ],
                "stable_r": pages.stable_r,
                "einf": page_entries(pages.einf),
            }
        )
        return 0
    for r, pg in enumerate(pages.pages):
        cells = " ".join(f"({p},{k}):{n}" for (p, k), n in sorted(pg.items()))
        print(f"E^{r}: {cells if cells else '0'}")
    print(f"stable from r={pages.stable_r}")
    cells = " ".join(f"({p},{k}):{n}" for (p, k), n in sorted(pages.einf.items()))
    print(f"E^inf: {cells if cells else '0'}")
    return 0


# --- blowup / catalog / verify ----------------------------------------------


def _cmd_blowup(args) -> int:
    coeff = blowup_coefficient(args.k)
    if args.json:
        _emit_json({"k": args.k, "coefficient": str(coeff), "zero": coeff.is_zero()})
        return 0
    print(str(coeff))
    return 0


def _cmd_catalog(args) -> int:
    if args.list or args.name is None:
        if args.json:
            _emit_json({"names": list(catalog_names())})
        else:
            for n in catalog_names():
                print(n)
        return 0
    entry = catalog(args.name)
    if args.json:
        _emit_json(
            {
                "name": entry.name,
                "hs": module_to_json(entry.hs),
                "hm": module_to_json(entry.hm) if entry.hm is not None else None,
                "ct": _ct_json(entry.ct) if entry.ct is not None else None,
                "hm_reversed": entry.hm_reversed,
                "boxes_undefined": entry.boxes_undefined,
            }
        )
        return 0
    print(f"name: {entry.name}")
    print(f"hs: {_module_text(entry.hs)}")
    if entry.hm is not None:
        rev = "  (for the reversed orientation)" if entry.hm_reversed else ""
        print(f"hm: {_module_text(entry.hm)}{rev}")
    if entry.ct is not None:
        print(f"correction terms: {_ct_line(entry.ct)}")
    if entry.boxes_undefined:
        print("note: finite part omitted (not determined by reversal alone)")
    return 0


def _cmd_verify_paper(args) -> int:
    report = run_verify(jobs=args.jobs)
    if args.json:
        _emit_json(report.to_json())
        return 0 if report.ok else 2
    c = report.counts
    print(
        f"PASS: {c.get('PASS', 0)}  WARN: {c.get('WARN', 0)}  "
        f"FAIL: {c.get('FAIL', 0)}  elapsed: {report.elapsed_s:.2f}s"
    )
    for r in report.rows:
        if r.status == "WARN":
            print(f"WARN [{r.anchor}] {r.id}: {r.got}")
    for r in report.rows:
        if r.status == "FAIL":
            print(f"FAIL {r.id}: expected {r.expected}, got {r.got}")
    print(f"verdict: {'PASS' if report.ok else 'FAIL'}")
    return 0 if report.ok else 2


# --- parser -----------------------------------------------------------------


def _build_parser() -> _Parser:
    top = _Parser(prog="p2f", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gysin", help="abstract Gysin-sequence solvers")
    gsub = g.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    gs = gsub.add_parser("solve", help="find all standard-module partners")
    gs.add_argument("--tower", type=int, required=True, help="base of the step-2 tower")
    gs.add_argument(
        "--box",
        action="append",
        metavar="DEG:DIM",
        help="finite summand, repeatable (e.g. --box -1:2)",
    )
    gs.add_argument("--pad", type=int, default=None, help="window padding override")
    gs.add_argument("--max-solutions", type=int, default=64)
    gs.add_argument("--json", action="store_true")
    gs.set_defaults(func=_cmd_gysin_solve)

    k = sub.add_parser("knot", help="alternating-knot surgery computations")
    ksub = k.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    kc = ksub.add_parser("correction", help="correction terms of one knot")
    kc.add_argument("--alexander", required=True, help='coefficients "a0;a1;..."')
    kc.add_argument("--signature", type=int, required=True)
    kc.add_argument("--surgery", type=int, required=True, help="+1 or -1")
    kc.add_argument("--name", default="knot")
    kc.add_argument("--arf", type=int, default=None)
    kc.add_argument("--json", action="store_true")
    kc.set_defaults(func=_cmd_knot_correction)
    kb = ksub.add_parser("batch", help="process a CSV of knots")
    kb.add_argument("--csv", required=True, help="columns: name,signature,alexander,arf,surgery")
    kb.add_argument("--jobs", type=int, default=1)
    kb.add_argument("--json", action="store_true")
    kb.set_defaults(func=_cmd_knot_batch)

    h = sub.add_parser("homalg", help="homological-algebra utilities")
    hsub = h.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    ht = hsub.add_parser("triangle", help="detect an exact triangle from (f1, f2, H1)")
    ht.add_argument("--file", required=True, help="JSON bundle with c1,c2,c3,f1,f2,h1")
    ht.add_argument("--json", action="store_true")
    ht.set_defaults(func=_cmd_homalg_triangle)
    hs = hsub.add_parser("ss", help="spectral sequence of a filtered complex")
    hs.add_argument("--file", required=True, help="JSON filtered complex")
    hs.add_argument("--r-max", type=int, default=None)
    hs.add_argument("--json", action="store_true")
    hs.set_defaults(func=_cmd_homalg_ss)

    b = sub.add_parser("blowup", help="blow-up coefficient of a generator")
    b.add_argument("-k", type=int, required=True)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=_cmd_blowup)

    c = sub.add_parser("catalog", help="known model spaces")
    c.add_argument("name", nargs="?", default=None)
    c.add_argument("--list", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=_cmd_catalog)

    v = sub.add_parser("verify", help="verification sweeps")
    vsub = v.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    vp = vsub.add_parser("paper", help="run every deterministic check group")
    vp.add_argument("--jobs", type=int, default=1)
    vp.add_argument("--json", action="store_true")
    vp.set_defaults(func=_cmd_verify_paper)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (PipelineMismatch, AssertionError) as e:
        print(f"error: mismatch: {e}", file=sys.stderr)
        return 2
    except (KnotError, GysinError, WindowError, ContractError) as e:
        print(f"error: validation: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as e:
        print(f"error: validation: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: io: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
