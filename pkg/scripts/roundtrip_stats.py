"""Round-trip statistics per G template: generate members, classify, tabulate.

    python3 scripts/roundtrip_stats.py [--per-template 20] [--seed 1000] [--json out.json]
"""
import argparse
import json
import time
from collections import defaultdict

from symline.cli import GTS_ROTATION
from symline.classify import find_linear_symmetry
from symline.corpus import gts_member
from symline.solve import check_solution, verify_symmetry


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-template", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--json")
    args = ap.parse_args()

    rows = defaultdict(lambda: {"n": 0, "case": 0, "symmetry": 0, "solution": 0, "probabilistic": 0, "secs": 0.0})
    for template in GTS_ROTATION:
        for k in range(args.per_template):
            m = gts_member(args.seed + k, None if template == "fxqx" else template, template == "fxqx")
            t0 = time.perf_counter()
            cls = find_linear_symmetry(m.ode)
            row = rows[template]
            row["secs"] += time.perf_counter() - t0
            row["n"] += 1
            row["case"] += cls.outcome == m.expected
            if cls.symmetry is not None and verify_symmetry(m.ode, cls.symmetry.xi, cls.symmetry.eta):
                row["symmetry"] += 1
            if cls.solution is not None and check_solution(m.ode, cls.solution):
                row["solution"] += 1
            row["probabilistic"] += cls.verdicts.get("probabilistic", 0) > 0

    print(f"{'template':<10}{'n':>5}{'case':>7}{'sym':>7}{'sol':>7}{'prob':>7}{'s/ode':>8}")
    for template, r in rows.items():
        print(f"{template:<10}{r['n']:>5}{r['case']:>7}{r['symmetry']:>7}{r['solution']:>7}"
              f"{r['probabilistic']:>7}{r['secs'] / r['n']:>8.2f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
