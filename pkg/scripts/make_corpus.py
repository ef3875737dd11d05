"""Regenerate the generated part of the bundled corpus.

    python3 scripts/make_corpus.py [--out corpus] [--gts 102] [--riccati 25] [--controls 25]

Hand-written fixtures (worked_*.ode, riccati_unsolved.ode) are left alone.
"""
import argparse
from pathlib import Path

from symline.cli import generate

FAMILIES = ("riccati-q0", "riccati-fp", "riccati-qp", "riccati-fq")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "corpus"))
    ap.add_argument("--gts", type=int, default=102)
    ap.add_argument("--riccati", type=int, default=25)
    ap.add_argument("--controls", type=int, default=25)
    args = ap.parse_args()
    out = Path(args.out)
    for stale in out.glob("*.ode"):
        if stale.name.startswith(("gts_", "nonmember_", "riccati-")):
            stale.unlink()
    n = len(generate("gts", args.gts, 0, out))
    n += len(generate("nonmember", args.controls, 0, out))
    for fam in FAMILIES:
        n += len(generate(fam, args.riccati, 0, out))
    print(f"wrote {n} generated files to {out}")


if __name__ == "__main__":
    main()
