"""Command-line front end and corpus harness.

    symline solve FILE [--seed S] [--probes N] [--tol T] [--json]
    symline corpus DIR [--json] [--jobs K]
    symline gen --family gts|riccati-q0|riccati-fp|riccati-qp|riccati-fq|nonmember --count N --seed S --out DIR
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .classify import find_linear_symmetry
from .model import OUTCOMES, Classification, LinearSymmetry, Ode, projectively_equal
from .problem import ProblemError, ProblemFile
from .solve import check_solution, same_solution_family, verify_symmetry
from .symcore import ParseError, probe_settings, render
from .symcore.probe import ProbeFailure


@dataclass
class RunOptions:
    seed: int = 0
    probes: int = 8
    tol: float = 1e-9
    with_solution: bool = True
    timing: bool = True


@dataclass
class Report:
    input: str
    params: list
    funcs: list
    branches: list
    summary: str
    seed: int
    probes: int
    tol: float
    integrate_call_sites: list
    ms: float | None = None
    error: str | None = None
    name: str = ""
    expect: dict = field(default_factory=dict)

    @property
    def expect_ok(self) -> bool:
        return all(b.get("expect", {}).get("ok", True) for b in self.branches) and not (self.expect and self.error)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["ms"] is None:
            del d["ms"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(**d)


def branch_record(cls: Classification) -> dict:
    rec = {
        "phi": render(cls.ode.phi),
        "outcome": cls.outcome,
        "case": cls.case,
        "reduction": [tr.as_dict() for tr in cls.chain],
        "symmetry": cls.symmetry.as_dict() if cls.symmetry else None,
        "solution": render(cls.solution.lhs) if cls.solution else None,
        "verified": {
            "determining": bool(cls.verified.get("determining", False)),
            "solution": bool(cls.verified.get("solution", False)),
            "probabilistic": bool(cls.verdicts.get("probabilistic", 0) > 0),
        },
        "verdicts": {k: cls.verdicts.get(k, 0) for k in ("symbolic", "witness", "probabilistic")},
        "failed": cls.failed,
    }
    if cls.riccati is not None:
        rec["riccati"] = cls.riccati
    details = {k: v for k, v in cls.details.items() if k != "integrate_call_sites"}
    if details:
        rec["details"] = details
    return rec


def compare_expect(problem: ProblemFile, ode: Ode, cls: Classification) -> dict:
    """Projective comparison of a branch with the problem's expect block."""
    exp = problem.expect
    out = {}
    if "class" in exp:
        out["class"] = cls.outcome == exp["class"]
    if "xi" in exp and "eta" in exp:
        want = LinearSymmetry(problem.parse_expect("xi"), problem.parse_expect("eta"))
        got = cls.symmetry
        if got is None:
            out["symmetry"] = False
        else:
            # a different verified symmetry is acceptable when the expected one verifies too
            out["symmetry"] = projectively_equal(got, want) or (
                cls.verified.get("determining", False) and verify_symmetry(ode, want.xi, want.eta))
    if "solution" in exp:
        lhs = problem.parse_expect("solution")
        ok = check_solution(ode, lhs)
        if ok and cls.solution is not None:
            ok = same_solution_family(lhs, cls.solution.lhs)
        out["solution"] = ok
    out["ok"] = all(out.values())
    return out


def run(problem: ProblemFile, options: RunOptions | None = None) -> Report:
    """Classify every solved branch of the problem; errors are captured in the report."""
    options = options or RunOptions()
    t0 = time.perf_counter()
    report = Report(problem.statement, list(problem.params), list(problem.funcs), [], "Error", options.seed,
                    options.probes, options.tol, [], name=problem.name, expect=dict(problem.expect))
    with probe_settings(seed=options.seed, probes=options.probes, abs_tol=options.tol, rel_tol=options.tol):
        try:
            odes = problem.branches()
        except (ProblemError, ParseError) as exc:
            report.error = f"{type(exc).__name__}: {exc}"
            odes = []
        for ode in odes:
            cls = find_linear_symmetry(ode, with_solution=options.with_solution)
            rec = branch_record(cls)
            report.integrate_call_sites.extend(cls.details.get("integrate_call_sites", []))
            if problem.expect:
                try:
                    rec["expect"] = compare_expect(problem, ode, cls)
                except (ParseError, ProbeFailure, ValueError) as exc:
                    rec["expect"] = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
            report.branches.append(rec)
    tags = sorted({b["outcome"] for b in report.branches}, key=OUTCOMES.index)
    if tags:
        report.summary = "|".join(tags)
    if options.timing:
        report.ms = round(1000 * (time.perf_counter() - t0), 1)
    return report


def solve_file(path, options: RunOptions | None = None) -> Report:
    try:
        problem = ProblemFile.read(path)
    except (OSError, ProblemError) as exc:
        return Report(str(path), [], [], [], "Error", (options or RunOptions()).seed, 0, 0.0, [],
                      error=f"{type(exc).__name__}: {exc}", name=Path(path).name)
    return run(problem, options)


# ---------------------------------------------------------------- corpus


def file_seed(master: int, name: str) -> int:
    return zlib.crc32(f"{master}:{name}".encode()) & 0x7FFFFFFF


def _corpus_job(args):
    path, options = args
    opts = RunOptions(**{**asdict(options), "seed": file_seed(options.seed, Path(path).name)})
    return solve_file(path, opts)


def corpus_run(directory, options: RunOptions | None = None, jobs: int = 1):
    """(summary, reports) over every *.ode file, in filename order."""
    options = options or RunOptions()
    t0 = time.perf_counter()
    paths = sorted(Path(directory).glob("*.ode"))
    work = [(str(p), options) for p in paths]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_corpus_job, work))
    else:
        reports = [_corpus_job(w) for w in work]
    counts = Counter(b["outcome"] for r in reports for b in r.branches)
    summary = {
        "directory": str(directory),
        "files": len(reports),
        "branches": sum(len(r.branches) for r in reports),
        "counts": {tag: counts[tag] for tag in OUTCOMES if counts[tag]},
        "errors": [r.name for r in reports if r.error],
        "mismatches": [r.name for r in reports if not r.expect_ok],
        "probabilistic": [r.name for r in reports if any(b["verified"]["probabilistic"] for b in r.branches)],
        "verified": sum(1 for r in reports for b in r.branches if b["verified"]["determining"]),
        "seed": options.seed,
    }
    if options.timing:
        summary["ms"] = round(1000 * (time.perf_counter() - t0), 1)
    return summary, reports


# ---------------------------------------------------------------- generation

GEN_FAMILIES = ("gts", "riccati-q0", "riccati-fp", "riccati-qp", "riccati-fq", "nonmember")
_RICCATI = {"riccati-q0": "q'=0", "riccati-fp": "f=p", "riccati-qp": "q=p", "riccati-fq": "f=q"}
GTS_ROTATION = ("cubic", "quartic", "quintic", "exp", "u+exp", "fxqx")


def generate(family: str, count: int, seed: int, out) -> list[Path]:
    from . import corpus

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i in range(count):
        s = seed + i
        if family == "gts":
            template = GTS_ROTATION[s % len(GTS_ROTATION)]
            m = corpus.gts_member(s, None if template == "fxqx" else template, template == "fxqx")
            text = m.problem().to_text(f"gts member, template {template}, seed {s}")
        elif family in _RICCATI:
            m = corpus.gen_riccati(_RICCATI[family], s)
            a, b = m.constants
            text = m.problem().to_text(f"riccati family {_RICCATI[family]}, a = {a}, b = {b}, seed {s}")
        elif family == "nonmember":
            ode = corpus.gen_nonmember(s)
            pf = ProblemFile(f"y' = {render(ode.phi)}", expect={"class": corpus.nonmember_expected(s)})
            text = pf.to_text(f"negative control ({corpus.nonmember_kind(s)}), seed {s}")
        else:
            raise ValueError(f"unknown family {family!r}")
        path = out / f"{family}_{s:04d}.ode"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


# ---------------------------------------------------------------- text output


def format_report(r: Report) -> str:
    lines = [f"{r.name or 'input'}: {r.input}"]
    if r.error:
        lines.append(f"  error: {r.error}")
    for i, b in enumerate(r.branches, 1):
        lines.append(f"  branch {i}: y' = {b['phi']}")
        lines.append(f"    outcome: {b['outcome']}")
        for tr in b["reduction"]:
            lines.append(f"    reduction ({tr['kind']}): {tr['forward']}")
        if b["symmetry"]:
            lines.append(f"    symmetry: xi = {b['symmetry']['xi']}, eta = {b['symmetry']['eta']}")
        if b.get("riccati") and b["riccati"].get("step"):
            lines.append(f"    riccati step {b['riccati']['step']}")
        if b["solution"]:
            lines.append(f"    solution: {b['solution']} = C1")
        if b["failed"]:
            lines.append(f"    reason: {b['failed'][:300]}")
        v = b["verified"]
        flag = "  [probabilistic]" if v["probabilistic"] else ""
        lines.append(f"    verified: determining={v['determining']} solution={v['solution']}{flag}")
        if "expect" in b:
            lines.append(f"    expect: {'ok' if b['expect']['ok'] else 'MISMATCH'} {b['expect']}")
    if r.ms is not None:
        lines.append(f"  {r.ms} ms")
    return "\n".join(lines)


def format_summary(summary: dict) -> str:
    lines = [f"{summary['files']} files, {summary['branches']} branches"]
    width = max((len(t) for t in summary["counts"]), default=0)
    for tag, n in summary["counts"].items():
        lines.append(f"  {tag:<{width}}  {n}")
    for key in ("errors", "mismatches", "probabilistic"):
        if summary[key]:
            lines.append(f"{key}: {', '.join(summary[key])}")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symline", description="Linear symmetries of first-order ODEs")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def probe_flags(p):
        p.add_argument("--seed", type=int, default=0, help="probe seed (default 0)")
        p.add_argument("--probes", type=int, default=8, help="probe points per numeric test")
        p.add_argument("--tol", type=float, default=1e-9, help="absolute and relative probe tolerance")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable reports)")
        p.add_argument("--no-solution", action="store_true", help="skip the quadrature solution")

    solve = sub.add_parser("solve", help="classify one problem file")
    solve.add_argument("file")
    probe_flags(solve)

    corpus = sub.add_parser("corpus", help="classify every *.ode file in a directory")
    corpus.add_argument("dir")
    corpus.add_argument("--jobs", type=int, default=1)
    probe_flags(corpus)

    gen = sub.add_parser("gen", help="write generated problem files")
    gen.add_argument("--family", choices=GEN_FAMILIES, required=True)
    gen.add_argument("--count", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    return parser


def _options(args) -> RunOptions:
    return RunOptions(args.seed, args.probes, args.tol, not args.no_solution, not args.no_timing)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "solve":
        report = solve_file(args.file, _options(args))
        print(report.to_json() if args.json else format_report(report))
        if report.error:
            return 2
        return 0 if report.expect_ok else 1
    if args.cmd == "corpus":
        summary, reports = corpus_run(args.dir, _options(args), args.jobs)
        if args.json:
            doc = {"summary": summary, "reports": [r.to_dict() for r in reports]}
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            for r in reports:
                print(format_report(r))
            print(format_summary(summary))
        return 1 if summary["mismatches"] else 0
    paths = generate(args.family, args.count, args.seed, args.out)
    print(f"wrote {len(paths)} files to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
