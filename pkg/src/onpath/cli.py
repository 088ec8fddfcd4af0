"""Command-line entry point. Every command prints one JSON report on stdout.

Exit codes: 0 pass, 1 definitional failure, 2 usage or parse error,
3 size guard.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

from onpath import __version__
from onpath.axioms import AXIOM_IDS, AxiomSizeError, check
from onpath.core import DatasetError, dumps_dataset, loads_dataset
from onpath.oracle import OrderClass, SizeGuardError, solve
from onpath.qhd.consumer import QhdInstance, equilibrium
from onpath.qhd.data import QhdDataError, loads_qhd
from onpath.qhd.focs import exp_focs_check, focs_search
from onpath.qhd.repro import gen_appendixA, repro_theorem1, repro_theorem2
from onpath.qhd.utility import utility_from_name
from onpath.rationalize import ModelKind, RationalizationError, UnsupportedCase, construct, verify
from onpath.simgen import GenConfig, GenerationError, generate

SCHEMA = "onpath.report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: list
    result: dict
    input_digest: str | None = None
    timing_s: float = 0.0
    version: str = __version__
    schema: str = SCHEMA
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema": self.schema, "version": self.version, "command": self.command,
                "input_digest": self.input_digest, "timing_s": self.timing_s, "result": self.result,
                **self.extra}


def _read(path: str) -> tuple[str, str]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return raw.decode("utf-8"), "sha256:" + hashlib.sha256(raw).hexdigest()


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# -- commands -----------------------------------------------------------------

def cmd_check(args) -> tuple[int, dict, str]:
    text, digest = _read(args.path)
    ds = loads_dataset(text)
    names = list(AXIOM_IDS) if args.axiom == "all" else [a for a in args.axiom.split(",") if a]
    if args.axiom == "all" and ds.T != 2:
        names = [a for a in names if a not in ("nnsarp", "cond3", "cond4")]
    verdicts = []
    for a in names:
        try:
            verdicts += check(ds, a, mode=args.mode, t=args.t)
        except ValueError as exc:
            if isinstance(exc, AxiomSizeError):
                raise
            raise UsageError(str(exc)) from None
    payload = {"verdicts": [v.to_json() for v in verdicts]}
    ok = all(v.holds is True for v in verdicts)
    return (EXIT_OK if ok else EXIT_FAIL), payload, digest


def cmd_rationalize(args) -> tuple[int, dict, str]:
    text, digest = _read(args.path)
    ds = loads_dataset(text)
    model = ModelKind.parse(args.model)
    try:
        profile = construct(ds, model)
    except UnsupportedCase as exc:
        return EXIT_FAIL, {"model": model.value, "profile": None, "unsupported": str(exc)}, digest
    except RationalizationError as exc:
        return EXIT_FAIL, {
            "model": model.value, "profile": None, "reason": str(exc),
            "witness": exc.verdict.to_json() if exc.verdict else None,
        }, digest
    res = verify(ds, profile, model)
    payload = {"model": model.value, "profile": profile.to_json(), "verified": res.ok,
               "failures": list(res.failures)}
    return (EXIT_OK if res.ok else EXIT_FAIL), payload, digest


def cmd_oracle(args) -> tuple[int, dict, str]:
    text, digest = _read(args.path)
    ds = loads_dataset(text)
    model = ModelKind.parse(args.model)
    method = "enumerate" if args.max_profiles is not None else args.method
    res = solve(ds, model, OrderClass(args.cls), method, args.max_profiles)
    payload = {"model": model.value, "class": args.cls, "method": res.method,
               "witness": res.witness.to_json() if res.witness else None,
               "profiles_checked": res.profiles_checked, "exhausted": res.exhausted}
    return (EXIT_OK if res.witness else EXIT_FAIL), payload, digest


def cmd_gen(args) -> tuple[int, dict, str | None]:
    sizes = _ints(args.sizes)
    if args.periods is not None and args.periods != len(sizes):
        raise UsageError(f"--periods {args.periods} disagrees with --sizes {args.sizes}")
    cfg = GenConfig(seed=args.seed, sizes=tuple(sizes), K=args.k, density=args.density,
                    distinct_x1=args.distinct_x1, model=args.model, order_class=args.cls)
    try:
        sim = generate(cfg)
    except GenerationError as exc:
        raise UsageError(str(exc)) from None
    text = dumps_dataset(sim.dataset)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    payload = {"config": cfg.to_json(), "dataset": json.loads(text), "profile": sim.profile.to_json(),
               "resamples": sim.resamples, "out": args.out}
    return EXIT_OK, payload, None


def cmd_qhd(args) -> tuple[int, dict, str | None]:
    sub = args.qhd_cmd
    if sub == "equilibrium":
        params = {"gamma": args.gamma} if args.u == "crra" else {}
        try:
            util = utility_from_name(args.u, **params)
            inst = QhdInstance(util, args.beta, args.delta, tuple(_floats(args.p, 3)), args.m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        eq = equilibrium(inst)
        return EXIT_OK, {"instance": inst.to_json(), "equilibrium": eq.to_json()}, None
    if sub in ("focs-check", "exp-focs"):
        text, digest = _read(args.path)
        obs = loads_qhd(text)
        rows, ok = [], True
        for o in obs:
            if sub == "focs-check":
                s = focs_search(o.x, o.p)
                rows.append({**o.to_json(), "certificate": s.certificate.to_json() if s.certificate else None,
                             "transcript": list(s.transcript)})
                ok &= s.certificate is not None
            else:
                e = exp_focs_check(o.x, o.p)
                rows.append({**o.to_json(), "exp_focs": e.to_json() if e else None})
                ok &= e is not None
        return (EXIT_OK if ok else EXIT_FAIL), {"observations": rows}, digest
    if sub == "repro":
        if args.which == "thm1":
            rep = repro_theorem1(args.c)
        elif args.which == "thm2":
            rep = repro_theorem2()
        else:
            rep = gen_appendixA(args.K)[1]
        return (EXIT_OK if rep.passed else EXIT_FAIL), rep.to_json(), None
    if sub == "gen-appendixA":
        data, rep = gen_appendixA(args.K)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(data, fh)
                fh.write("\n")
        return EXIT_OK, {"dataset": data, "verification": rep.to_json(), "out": args.out}, None
    raise UsageError("missing qhd subcommand")


# -- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="onpath", description="Revealed-preference tests for on-path dynamic choice data.")
    p.epilog = "--pretty anywhere on the command line indents the JSON output."
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="evaluate axioms on a dataset")
    c.add_argument("path")
    c.add_argument("--axiom", default="all", help="comma-separated ids or 'all'")
    c.add_argument("--mode", choices=("greedy", "exhaustive"), default="greedy")
    c.add_argument("--t", type=int, default=None)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("rationalize", help="construct a rationalizing profile")
    r.add_argument("path")
    r.add_argument("--model", required=True)
    r.set_defaults(func=cmd_rationalize)

    o = sub.add_parser("oracle", help="exact search for a rationalizing profile")
    o.add_argument("path")
    o.add_argument("--model", required=True)
    o.add_argument("--class", dest="cls", choices=("linear", "weak"), default="weak")
    o.add_argument("--method", choices=("search", "enumerate"), default="search")
    o.add_argument("--max-profiles", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="simulate a dataset from a random profile")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--model", default="sophisticated")
    g.add_argument("--periods", type=int, default=None)
    g.add_argument("--sizes", default="2,3")
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--density", type=float, default=0.7)
    g.add_argument("--class", dest="cls", choices=("linear", "weak"), default="linear")
    g.add_argument("--distinct-x1", action="store_true")
    g.add_argument("--out", default=None, help="also write the dataset JSON here")
    g.set_defaults(func=cmd_gen)

    q = sub.add_parser("qhd", help="three-period quasi-hyperbolic consumer")
    qs = q.add_subparsers(dest="qhd_cmd", required=True, parser_class=_Parser)
    e = qs.add_parser("equilibrium")
    e.add_argument("--beta", type=float, required=True)
    e.add_argument("--delta", type=float, required=True)
    e.add_argument("--u", default="cubic", choices=("cubic", "crra"))
    e.add_argument("--gamma", type=float, default=2.0)
    e.add_argument("--p", required=True, help="p1,p2,p3")
    e.add_argument("--m", type=float, required=True)
    for name in ("focs-check", "exp-focs"):
        f = qs.add_parser(name)
        f.add_argument("path")
    rp = qs.add_parser("repro")
    rp.add_argument("which", choices=("thm1", "thm2", "appendixA"))
    rp.add_argument("--K", type=int, default=50)
    rp.add_argument("--c", type=float, default=0.1)
    ga = qs.add_parser("gen-appendixA")
    ga.add_argument("--K", type=int, default=50)
    ga.add_argument("--out", default=None)
    q.set_defaults(func=cmd_qhd)
    return p


def run(argv: list[str]) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report JSON)."""
    t0 = time.perf_counter()
    digest = None
    try:
        args = build_parser().parse_args([a for a in argv if a != "--pretty"])
        code, payload, digest = args.func(args)
    except UsageError as exc:
        code, payload = EXIT_USAGE, {"error": "usage", "message": str(exc)}
    except (DatasetError, QhdDataError) as exc:
        viol = [v.to_json() for v in getattr(exc, "violations", [])]
        code, payload = EXIT_USAGE, {"error": "parse", "message": str(exc), "violations": viol}
    except (SizeGuardError, AxiomSizeError) as exc:
        code, payload = EXIT_GUARD, {"error": "size-guard", "message": str(exc)}
    report = RunReport(list(argv), payload, digest, round(time.perf_counter() - t0, 6))
    return code, report.to_json()


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, report = run(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    pretty = "--pretty" in argv
    print(json.dumps(report, indent=2 if pretty else None, sort_keys=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
