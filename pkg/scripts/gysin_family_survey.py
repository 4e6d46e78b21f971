#!/usr/bin/env python3
"""Survey the one-box-degree families: oracle vs stated vs corrected forms.

For each family label and box count the table prints the certified closed
form, whether the oracle search found it uniquely, and any place the
stated case table disagrees. Useful for eyeballing where the two
documented warning classes come from.

    python3 scripts/gysin_family_survey.py --families -1 0 1 2 --n-max 7
"""

from __future__ import annotations

import argparse
import sys

from pin2floer.gysin import (
    closed_form_corrected,
    closed_form_stated,
    oracle_solve,
    stated_corrected_diffs,
)
from pin2floer.modules import Box, StructuredModule, T_plus, correction_terms_of


def survey_row(family: int, n: int) -> dict:
    corrected = closed_form_corrected(family, n)
    stated = closed_form_stated(family, n)
    known = T_plus(2 * ((family + 1) // 2 if family % 2 else family // 2))
    if n:
        known = known + StructuredModule(boxes=(Box(corrected.box_deg, n),))
    sol = oracle_solve(known)
    hit = any(
        c.standard == corrected.standard
        and sum(b.dim for b in c.boxes) == corrected.box_dim
        for c in sol.candidates
    )
    return {
        "family": family,
        "n": n,
        "towers": str(correction_terms_of(corrected.standard)),
        "finite": f"F^{corrected.box_dim}<{corrected.box_deg}>",
        "label": corrected.parity_label,
        "stated_finite": f"F^{stated.box_dim}",
        "oracle": ("unique" if sol.unique else f"{len(sol.candidates)} candidates")
        + ("" if hit else " MISSING"),
        "warns": ",".join(w.cls for w in stated_corrected_diffs(family, n)) or "-",
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", type=int, nargs="+", default=[-1, 0, 1, 2])
    ap.add_argument("--n-max", type=int, default=7)
    args = ap.parse_args(argv)

    header = f"{'fam':>4} {'n':>3} {'towers':>14} {'finite':>10} {'label':>6} {'stated':>7} {'oracle':>14} warns"
    print(header)
    print("-" * len(header))
    for family in args.families:
        for n in range(args.n_max + 1):
            r = survey_row(family, n)
            print(
                f"{r['family']:>4} {r['n']:>3} {r['towers']:>14} {r['finite']:>10} "
                f"{r['label']:>6} {r['stated_finite']:>7} {r['oracle']:>14} {r['warns']}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
