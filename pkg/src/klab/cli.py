"""Command-line entry point: ``klab {build,verify,obstruct,inv0,uvd}``.

Exit codes: 0 all checks pass, 1 a check failed (the report is still written),
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path
from typing import Sequence

from .acceptance import AcceptanceSuite, format_line
from .aff import AffElement
from .checks import CheckRecord
from .errors import InvalidParams, KlabError
from .families import identity_ramp
from .kernels import BACKEND
from .lab import inv0_equivalence_report, obstruction_experiment
from .report import RunConfig, system_to_json, write_functions_csv, write_json
from .spaces import GridFunction, Space, sup_norm
from .systems import build_system_A, build_system_B
from .unitary import det_class_of_generator_image, is_uniformly_varied

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    common.add_argument("--stages", type=int, help="stage_count (overrides the config)")
    common.add_argument("--grid", type=int, help="grid_resolution N (overrides the config)")
    common.add_argument("--seed", type=int, help="seed of the random test families (overrides the config)")
    common.add_argument("--out", type=Path, default=Path("klab-out"), help="output directory")
    p = argparse.ArgumentParser(prog="klab", description="Finite-stage checks for the A/B block systems.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="serialize the stages and steps of A and B")
    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    ob = sub.add_parser("obstruct", parents=[common], help="run the obstruction chain for one candidate")
    ob.add_argument("--n", type=int, default=1, help="stage of the candidate section")
    ob.add_argument("--M", type=float, default=0.0, help="sup-norm of the candidate phase correction")
    sub.add_parser("inv0", parents=[common], help="certify that A and B share K-theory and traces")
    sub.add_parser("uvd", parents=[common], help="uniformly varied determinant verdicts for A and B")
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    over = {}
    if args.stages is not None:
        over["stage_count"] = args.stages
    if args.grid is not None:
        over["grid_resolution"] = args.grid
    if args.seed is not None:
        over["seed"] = args.seed
    cfg = dataclasses.replace(cfg, **over)
    cfg.params()  # validate now so config errors exit 2
    return cfg


def _report(command: str, cfg: RunConfig, checks: Sequence[CheckRecord], **extra) -> dict:
    return {
        "command": command,
        "config": cfg.to_json(),
        "pass": all(c.passed for c in checks),
        "checks": [c.to_json() for c in checks],
        **extra,
    }


def _finish(out: Path, doc: dict, started: float) -> int:
    write_json(out / "report.json", doc)
    write_json(out / "timing.json", {"command": doc["command"], "backend": BACKEND, "seconds": round(time.perf_counter() - started, 3)})
    return EXIT_OK if doc["pass"] else EXIT_FAIL


def cmd_build(cfg: RunConfig, out: Path) -> int:
    p = cfg.params()
    doc = {"config": cfg.to_json(), "systems": [system_to_json(build_system_A(p)), system_to_json(build_system_B(p))]}
    write_json(out / "systems.json", doc)
    sizes = [[b["size"] for b in st["blocks"]] for st in doc["systems"][0]["stages"]]
    print(f"wrote {out / 'systems.json'}; stage sizes {sizes}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, started: float) -> int:
    suite = AcceptanceSuite(cfg.params(), cfg.seed, cfg.random_count)
    results = suite.run()
    for r in results:
        print(format_line(r))
    checks = [c for r in results for c in r.checks]
    doc = _report("verify", cfg, checks, criteria=[r.to_json() for r in results])
    doc["pass"] = all(r.passed for r in results)
    _verify_csv(suite, out)
    return _finish(out, doc, started)


def _verify_csv(suite: AcceptanceSuite, out: Path) -> None:
    """Ramps of the obstruction chain and determinant phases of B's (n,n) parts."""
    P, B, N = suite.params, None, suite.N
    try:
        B = suite.B
        ramps = []
        for n in range(1, P.stage_count - 1):
            led = obstruction_experiment(B, n, AffElement.zeros(B.blocks(n), N, n))
            ramps.append((f"htilde_n{n}_m{led.m}", led.htilde))
        if ramps:
            write_functions_csv(out / "htilde.csv", ramps)
        phases = []
        for n in range(1, P.stage_count):
            d = det_class_of_generator_image(B.step(n), n - 1, n - 1)
            phases.append((f"B_det_phase_step{n}", d.phase(N)))
            da = det_class_of_generator_image(suite.A.step(n), n - 1, n - 1)
            phases.append((f"A_det_phase_step{n}", da.phase(N)))
        if phases:
            write_functions_csv(out / "det_phases.csv", phases)
    except KlabError as exc:
        print(f"csv dumps skipped: {exc}", file=sys.stderr)


def candidate_phase(blocks, resolution: int, n: int, M: float) -> AffElement:
    """``M`` times the ramp (tent on circles) rescaled to sup-norm 1 on every block."""
    funcs = []
    for b in blocks:
        if b.space is Space.POINT:
            funcs.append(GridFunction.constant(b.space, resolution, M))
        else:
            f = identity_ramp(b.space, resolution).func
            funcs.append(f * (M / sup_norm(f)))
    return AffElement(n, tuple(funcs))


def cmd_obstruct(cfg: RunConfig, out: Path, n: int, M: float, started: float) -> int:
    p = cfg.params()
    B = build_system_B(p)
    if not 1 <= n < B.stage_count:
        raise InvalidParams(f"--n must lie in 1..{B.stage_count - 1}")
    if M < 0:
        raise InvalidParams("--M must be nonnegative")
    h = candidate_phase(B.blocks(n), p.grid_resolution, n, M)
    try:
        led = obstruction_experiment(B, n, h)
    except KlabError as exc:
        rec = CheckRecord("admissible stage within the built stages", "choice of m", type(exc).__name__, "==", "found", 0, False, {"error": str(exc)})
        print(f"FAIL: {exc}")
        return _finish(out, _report("obstruct", cfg, [rec], n=n, M=M), started)
    for c in led.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.lhs} {c.relation} {c.rhs}")
    ledger = {
        "n": led.n,
        "m": led.m,
        "M": led.M,
        "ratio": led.ratio,
        "htilde_norm": led.htilde_norm,
        "pushed_norm": led.pushed_norm,
        "tail_bound": led.tail_bound,
        "lower_bound": led.lower_bound,
        "direct_final": led.direct_final,
        "threshold": led.threshold,
        "threshold_violated": led.threshold_violated,
        "grid_margin": led.grid_margin,
    }
    write_functions_csv(out / "htilde.csv", [("htilde", led.htilde), ("pushed", led.pushed)])
    return _finish(out, _report("obstruct", cfg, led.checks, ledger=ledger), started)


def cmd_inv0(cfg: RunConfig, out: Path, started: float) -> int:
    p = cfg.params()
    rep = inv0_equivalence_report(build_system_A(p), build_system_B(p), cfg.seed, cfg.random_count)
    for c in rep.checks:
        if not c.passed or "distance" in c.name:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.lhs} {c.relation} {c.rhs}")
    print(f"{sum(c.passed for c in rep.checks)}/{len(rep.checks)} checks pass")
    defects = [dataclasses.asdict(d) for d in rep.step_defects]
    return _finish(out, _report("inv0", cfg, rep.checks, step_defects=defects, partial_sums=list(rep.partial_sums)), started)


def cmd_uvd(cfg: RunConfig, out: Path, started: float) -> int:
    p = cfg.params()
    checks = []
    verdicts = {}
    for sys_, expect_pass in ((build_system_A(p), True), (build_system_B(p), False)):
        vs = is_uniformly_varied(sys_)
        verdicts[sys_.name] = [
            {"step": v.step, "source": v.source + 1, "target": v.target + 1, "target_space": v.target_space.value, "winding": v.winding, "oscillation": v.oscillation, "pass": v.passed}
            for v in vs
        ]
        ok = all(v.passed for v in vs)
        checks.append(CheckRecord(f"{sys_.name}: all parts uniformly varied", "uniformly varied determinant", ok, "==", expect_pass, 0, ok == expect_pass))
        print(f"{sys_.name}: {'uniformly varied' if ok else 'not uniformly varied'} ({sum(v.passed for v in vs)}/{len(vs)} parts)")
    return _finish(out, _report("uvd", cfg, checks, verdicts=verdicts), started)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = _config(args)
        if args.command == "build":
            return cmd_build(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, started)
        if args.command == "obstruct":
            return cmd_obstruct(cfg, args.out, args.n, args.M, started)
        if args.command == "inv0":
            return cmd_inv0(cfg, args.out, started)
        return cmd_uvd(cfg, args.out, started)
    except InvalidParams as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
