"""Which strategy step resolves each Riccati family, and how fast.

    python3 scripts/riccati_families.py [--count 25] [--seed 500]
"""
import argparse
import time
from collections import Counter

from symline.corpus import RICCATI_FAMILIES, gen_riccati
from symline.riccati import riccati_strategy


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=25)
    ap.add_argument("--seed", type=int, default=500)
    args = ap.parse_args()
    for family, expected in RICCATI_FAMILIES.items():
        outcomes, how = Counter(), Counter()
        t0 = time.perf_counter()
        for s in range(args.seed, args.seed + args.count):
            cls = riccati_strategy(gen_riccati(family, s).ode)
            outcomes[cls.outcome] += 1
            how[cls.case] += 1
        secs = (time.perf_counter() - t0) / args.count
        hits = outcomes[expected]
        print(f"{family:<5} expected {expected:<13} {hits}/{args.count}  {secs:.2f}s/ode  routes {dict(how)}")


if __name__ == "__main__":
    main()
