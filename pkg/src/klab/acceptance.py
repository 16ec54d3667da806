"""The acceptance suite: eleven criteria, each a list of :class:`CheckRecord`.

A criterion passes when all of its ``checks`` pass. ``notes`` hold extra
records that are reported but do not count towards the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np

from .aff import AffElement, aff_distance_certificate, aff_induced, row_contraction_defect, row_step_image
from .checks import CheckRecord, check_eq, check_ge, check_le
from .errors import KlabError
from .families import family_elements, lipschitz_elements, random_grid_functions, standard_family
from .ktheory import K0Vector, K1Vector, k0_induced, k1_induced
from .lab import grid_margin, obstruction_experiment, splitting_for_A, stage_tests
from .spaces import GridFunction, Space, midrange_seminorm, sup_norm
from .systems import Block, InductiveSystem, SystemParams, build_system_A, build_system_B, stage_sizes, winding_length
from .unitary import (
    DiagonalExponent,
    LatticeMode,
    UClass,
    d_prime,
    det_class_of_generator_image,
    dhs_determinant,
    dhs_quadrature,
    is_uniformly_varied,
    metric_D,
    push_forward_uclass,
    scalar_distance_certificate,
)


TITLES = {
    1: "size ladder",
    2: "determinant dichotomy",
    3: "uniformly varied determinant verdicts",
    4: "trace distance between A and B",
    5: "tail bounds and row contraction",
    6: "quotient norm oracle",
    7: "de la Harpe-Skandalis determinant",
    8: "metric certificates",
    9: "section for A",
    10: "obstruction for B",
    11: "functoriality",
}


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[CheckRecord]
    notes: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def worst(self) -> CheckRecord | None:
        failed = [c for c in self.checks if not c.passed]
        return failed[0] if failed else (self.checks[-1] if self.checks else None)

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "notes": [c.to_json() for c in self.notes],
        }


def _worst_le(name: str, anchor: str, values, bound, margin, **detail) -> CheckRecord:
    """Single record for ``max(values) <= bound``."""
    return check_le(name, anchor, max(values, default=0.0), bound, margin, count=len(values), **detail)


class AcceptanceSuite:
    """Holds the two systems and the seed; each ``criterion_k`` is independent."""

    def __init__(self, params: SystemParams | None = None, seed: int = 0, random_count: int = 100) -> None:
        self.params = params if params is not None else SystemParams.default()
        self.seed = seed
        self.random_count = random_count
        self.N = self.params.grid_resolution
        self.margin = grid_margin(self.N)

    @cached_property
    def A(self) -> InductiveSystem:
        return build_system_A(self.params)

    @cached_property
    def B(self) -> InductiveSystem:
        return build_system_B(self.params)

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, 100 + stream])

    # 1 ---------------------------------------------------------------------
    def criterion_1(self) -> CriterionResult:
        sizes = stage_sizes(self.params)
        checks = []
        for n in range(1, self.params.stage_count):
            cur, nxt = sizes[n - 1], sizes[n]
            expect = [cur[i - 1] * self.params.p(i) ** self.params.k(n) for i in range(1, n + 1)]
            checks.append(check_eq(f"stage {n + 1} sizes [n+1,i] = [n,i] p_i^k_n", "size recursion", nxt[:n], expect))
            checks.append(check_eq(f"stage {n + 1} last two sizes equal", "size recursion", nxt[n], nxt[n - 1]))
        return CriterionResult(1, TITLES[1], checks)

    # 2 ---------------------------------------------------------------------
    def criterion_2(self) -> CriterionResult:
        sizes = stage_sizes(self.params)
        checks = []
        for n in range(1, self.params.steps + 1):
            l = self.params.p(n) ** self.params.k(n) - 1
            da = det_class_of_generator_image(self.A.step(n), n - 1, n - 1)
            sign = Fraction((l - 1) % 2, 2)
            checks.append(check_eq(f"A step {n}: winding of det", "A determinant", da.winding, 0))
            checks.append(check_eq(f"A step {n}: det constant = (-1)^(l-1)", "A determinant", da.constant, sign, l=l))
            checks.append(check_le(f"A step {n}: phase oscillation", "A determinant", da.oscillation, 0.0, 1e-9))
            db = det_class_of_generator_image(self.B.step(n), n - 1, n - 1)
            ln = winding_length(self.params, n)
            checks.append(check_eq(f"B step {n}: winding of det = l_n", "B determinant", db.winding, ln))
            checks.append(check_eq(f"B step {n}: l_n = 4^n [n+1,n]", "B determinant", ln, 4**n * sizes[n][n - 1]))
            ph = db.phase(self.N)
            resid = GridFunction(ph.space, ph.samples - float(Fraction(db.winding, db.rank)) * ph.nodes, self.N)
            checks.append(check_le(f"B step {n}: phase oscillation after the winding", "B determinant", midrange_seminorm(resid), 0.0, 1e-9))
        return CriterionResult(2, TITLES[2], checks)

    # 3 ---------------------------------------------------------------------
    def criterion_3(self) -> CriterionResult:
        va = is_uniformly_varied(self.A)
        vb = is_uniformly_varied(self.B)
        fails_a = [(v.step, v.source, v.target) for v in va if not v.passed]
        fails_b = sorted((v.step, v.source, v.target) for v in vb if not v.passed)
        expected = [(n, n - 1, n - 1) for n in range(1, self.params.steps + 1)]
        checks = [
            check_eq("A: failing parts", "uniformly varied determinant", fails_a, [], parts=len(va)),
            check_eq("B: failing parts are exactly the (n,n) parts", "uniformly varied determinant", fails_b, expected, parts=len(vb)),
        ]
        return CriterionResult(3, TITLES[3], checks)

    # 4 ---------------------------------------------------------------------
    def criterion_4(self) -> CriterionResult:
        checks = []
        for n in range(1, self.params.steps + 1):
            bound = Fraction(2, self.params.p(n) ** self.params.k(n))
            cert = aff_distance_certificate(self.A.step(n), self.B.step(n), stage_tests(self.A, n, self.seed, self.random_count))
            checks.append(check_le(f"step {n}: distance at nodes", "trace intertwining bound", cert.node_max, bound, self.margin))
            checks.append(check_le(f"step {n}: distance enclosure", "trace intertwining bound", cert.upper, bound, self.margin))
            ident = [u for j, u in enumerate(cert.per_block_upper) if j != n - 1]
            checks.append(_worst_le(f"step {n}: identical blocks", "trace intertwining bound", ident, 0.0, 1e-12))
        return CriterionResult(4, TITLES[4], checks)

    # 5 ---------------------------------------------------------------------
    def criterion_5(self) -> CriterionResult:
        P = self.params
        checks, notes = [], []
        for n in range(1, P.steps + 1):
            for m in range(n + 1, P.stage_count + 1):
                tail = P.tail_sum(n, m)
                checks.append(check_le(f"tail sum n={n} m={m}", "tail bound", tail, Fraction(1, 4)))
                checks.append(check_ge(f"factor 1 - tail n={n} m={m}", "tail bound", 1 - tail, Fraction(3, 4)))
        fam = [t.func for t in standard_family(Space.INTERVAL, self.N, self.seed, self.random_count)]
        for n in range(1, P.stage_count):
            for m in range(n + 1, P.stage_count):
                sup_gap, quo_gap, pos_gap = [], [], []
                worst = None
                for f in fam:
                    d, w = row_contraction_defect(self.B, n, m, f)
                    gap = d - float(w) * sup_norm(f)
                    sup_gap.append(gap)
                    if worst is None or gap > worst[0]:
                        worst = (gap, d, float(w) * sup_norm(f))
                    # quotient-norm form
                    g = row_step_image(self.B, n, m, f)
                    quo_gap.append(midrange_seminorm(g - f) - float(w) * midrange_seminorm(f))
                    fp = f - f.min()
                    dp, _ = row_contraction_defect(self.B, n, m, fp)
                    pos_gap.append(dp - float(w) * sup_norm(fp))
                checks.append(
                    CheckRecord(
                        f"row contraction n={n} m={m}: sup|xi f - f| <= p^-k ||f||",
                        "row contraction",
                        worst[1],
                        "<=",
                        worst[2],
                        self.margin,
                        worst[1] <= worst[2] + self.margin,
                        {"family_size": len(fam), "max_excess": max(sup_gap)},
                    )
                )
                notes.append(_worst_le(f"row contraction n={n} m={m}, quotient norm form", "row contraction", quo_gap, 0.0, self.margin))
                notes.append(_worst_le(f"row contraction n={n} m={m}, nonnegative f", "row contraction", pos_gap, 0.0, self.margin))
        return CriterionResult(5, TITLES[5], checks, notes)

    # 6 ---------------------------------------------------------------------
    def criterion_6(self, count: int = 1000) -> CriterionResult:
        rng = self.rng(6)
        errs = []
        for _ in range(count):
            space = Space.INTERVAL if rng.integers(2) else Space.CIRCLE
            N = int(rng.integers(32, 65))
            f = random_grid_functions(space, N, rng, 1, scale=float(rng.uniform(0.1, 10)))[0]
            errs.append(abs(midrange_seminorm(f) - brute_force_quotient(f.samples)))
        return CriterionResult(6, TITLES[6], [_worst_le("|midrange - brute force|", "quotient norm formula", errs, 0.0, 1e-12)])

    # 7 ---------------------------------------------------------------------
    def criterion_7(self, count: int = 100) -> CriterionResult:
        rng = self.rng(7)
        quad_err, exact_err = [], []
        N = 64
        for _ in range(count):
            space = (Space.POINT, Space.INTERVAL, Space.CIRCLE)[int(rng.integers(3))]
            size = int(rng.integers(1, 65))
            rank = int(rng.integers(0, size + 1))
            path = DiagonalExponent.projection(Block(size, space), rank, N)
            target = rank / size
            quad_err.append(float(np.max(np.abs(dhs_quadrature(path).funcs[0].samples - target))))
            exact_err.append(float(np.max(np.abs(dhs_determinant(path).funcs[0].samples - target))))
        checks = [
            _worst_le("quadrature |Delta - rank/size|", "determinant of exponential paths", quad_err, 0.0, 1e-9),
            _worst_le("closed form |Delta - rank/size|", "determinant of exponential paths", exact_err, 0.0, 1e-12),
        ]
        return CriterionResult(7, TITLES[7], checks)

    # 8 ---------------------------------------------------------------------
    def criterion_8(self, count: int = 1000) -> CriterionResult:
        rng = self.rng(8)
        N = 256
        gaps, dist_w = [], []
        stage = 3
        blocks = self.A.blocks(stage)
        for r in range(count):
            mode = LatticeMode.MOD_ALL_CONSTANTS if r % 2 == 0 else LatticeMode.MOD_LATTICE
            ranks = tuple(int(rng.integers(0, b.size + 1)) if b.size < 1000 else b.size for b in blocks)
            w = [0] * len(blocks)
            w[-1] = int(rng.integers(-3, 4))
            scale = float(rng.choice([0.01, 0.1, 1.0]))
            u = _random_uclass(blocks, ranks, w, N, rng, scale, mode)
            v = _random_uclass(blocks, ranks, w, N, rng, scale, mode)
            D, dp = metric_D(u, v), d_prime(u, v)
            gaps.append(D - 2 * math.pi * dp)
            w2 = list(w)
            w2[-1] += int(rng.integers(1, 4))
            if ranks[-1]:
                dist_w.append(metric_D(u, v.with_windings(w2)))
        checks = [
            _worst_le("D - 2 pi d' on random pairs", "metric comparison", gaps, 0.0, 1e-12),
            check_eq("distinct windings give D = 2", "distinct windings", sorted(set(dist_w)), [2.0], pairs=len(dist_w)),
        ]
        for size in (1, 4, 16, 64):
            cert = scalar_distance_certificate(size, count, self.seed)
            checks.append(check_le(f"scalar pairs in M_{size}: D <= 2 pi / {size}", "scalar distance bound", cert.max_distance, cert.bound, 0.0))
        return CriterionResult(8, TITLES[8], checks)

    # 9 ---------------------------------------------------------------------
    def criterion_9(self) -> CriterionResult:
        checks = []
        for n in range(1, self.params.stage_count):
            for power in (1, -1, 2):
                s = splitting_for_A(self.A, n, power)
                checks.append(check_eq(f"n={n} power={power}: winding of the section", "section", s.pi_of_section, power))
                for d in s.diagram:
                    checks.append(check_eq(f"n={n} m={d.m} power={power}: windings agree", "corner diagram", d.windings_equal, True))
                    checks.append(check_le(f"n={n} m={d.m} power={power}: diagram defect", "corner diagram", d.defect, 0.0, 1e-9))
        return CriterionResult(9, TITLES[9], checks)

    # 10 --------------------------------------------------------------------
    def candidates(self, n: int) -> list[tuple[str, AffElement]]:
        blocks = self.B.blocks(n)
        fam = family_elements([b.space for b in blocks], self.N, self.seed, self.random_count)
        out = [("zero", AffElement.zeros(blocks, self.N, n))]
        for name, funcs in fam:
            el = AffElement(n, funcs)
            out.append((name, el))
            out.append((f"10*{name}", el * 10.0))
        return out

    def criterion_10(self, max_n: int = 4, max_M: float = 10.0) -> CriterionResult:
        checks = []
        for n in range(1, min(max_n, self.params.stage_count - 2) + 1):
            agg: dict[str, list] = {}
            budget = []
            count = 0
            for name, h in self.candidates(n):
                M = h.norm()
                if M > max_M:
                    continue
                count += 1
                try:
                    led = obstruction_experiment(self.B, n, h)
                except KlabError as exc:
                    budget.append(f"{name}: {exc}")
                    continue
                for c in led.checks:
                    agg.setdefault(c.name, []).append(c)
            checks.append(check_eq(f"n={n}: experiment completed for every candidate", "choice of m", budget, [], candidates=count))
            for cname, recs in agg.items():
                checks.append(_aggregate(f"n={n}: {cname}", recs))
        return CriterionResult(10, TITLES[10], checks)

    # 11 --------------------------------------------------------------------
    def criterion_11(self) -> CriterionResult:
        P = self.params
        rng = self.rng(11)
        checks = []
        for sys in (self.A, self.B):
            k0_ok = k1_ok = True
            for n in range(1, P.stage_count):
                blocks = sys.blocks(n)
                for _ in range(5):
                    x = K0Vector(n, tuple(int(rng.integers(-b.size, b.size + 1)) for b in blocks))
                    y = K1Vector(n, tuple(int(rng.integers(-5, 6)) if b.space is Space.CIRCLE else 0 for b in blocks))
                    for m in range(n + 1, P.stage_count + 1):
                        xi, yi = x, y
                        for s in range(n, m):
                            xi, yi = k0_induced(sys.step(s), xi), k1_induced(sys.step(s), yi)
                        k0_ok &= k0_induced(sys.hom(n, m), x) == xi
                        k1_ok &= k1_induced(sys.hom(n, m), y) == yi
            checks.append(check_eq(f"{sys.name}: K_0 composite = iterated", "functoriality", k0_ok, True))
            checks.append(check_eq(f"{sys.name}: K_1 composite = iterated", "functoriality", k1_ok, True))
            aff_gaps, lips = [], []
            for n, m, f in self._aff_cases(sys, rng):
                direct = aff_induced(sys.hom(n, m), f)
                it, lip = f, _lip(f)
                for s in range(n, m):
                    it = aff_induced(sys.step(s), it)
                    lip = max(lip, _lip(it))
                aff_gaps.append(direct.distance(it) - (2 * lip / self.N + 1e-9))
                lips.append(lip)
            checks.append(_worst_le(f"{sys.name}: AffT composite - iterated - 2 Lip/N", "functoriality", aff_gaps, 0.0, 0.0, cases=len(aff_gaps), max_lip=max(lips)))
            u_gaps, w_ok = [], True
            for n in range(1, P.stage_count):
                blocks = sys.blocks(n)
                for power in (1, -1):
                    g = UClass.generator(blocks, n - 1, self.N, power, LatticeMode.MOD_ALL_CONSTANTS, n)
                    for m in range(n + 1, P.stage_count + 1):
                        direct = push_forward_uclass(sys.hom(n, m), g)
                        it = g
                        for s in range(n, m):
                            it = push_forward_uclass(sys.step(s), it)
                        w_ok &= direct.windings == it.windings and direct.ranks == it.ranks
                        u_gaps.append(d_prime(direct, it))
            checks.append(check_eq(f"{sys.name}: UClass windings and ranks composite = iterated", "functoriality", w_ok, True))
            checks.append(_worst_le(f"{sys.name}: UClass d' composite vs iterated", "functoriality", u_gaps, 0.0, 1e-9))
        return CriterionResult(11, TITLES[11], checks)

    def _aff_cases(self, sys: InductiveSystem, rng: np.random.Generator):
        """Full test elements where every step resolves on the grid; interval-supported data elsewhere."""
        P = self.params
        for n in range(1, P.stage_count):
            blocks = sys.blocks(n)
            spaces = [b.space for b in blocks]
            elems = lipschitz_elements(spaces, self.N, self.seed + n, 10)
            for m in range(n + 1, P.stage_count + 1):
                full_ok = sys.name == "A" or (n, m) == (1, 2)
                for funcs in elems:
                    if full_ok:
                        yield n, m, AffElement(n, funcs)
                    else:
                        yield n, m, AffElement(n, tuple(f if f.space is Space.INTERVAL else f * 0.0 for f in funcs))

    # -----------------------------------------------------------------------
    def criteria(self) -> list[Callable[[], CriterionResult]]:
        return [getattr(self, f"criterion_{k}") for k in range(1, 12)]

    def run(self) -> list[CriterionResult]:
        out = []
        for k, fn in enumerate(self.criteria(), start=1):
            try:
                out.append(fn())
            except KlabError as exc:
                rec = CheckRecord(f"raised {type(exc).__name__}", "error", str(exc), "==", "no error", 0, False)
                out.append(CriterionResult(k, TITLES[k], [rec]))
        return out


def brute_force_quotient(samples: np.ndarray) -> float:
    """``min_c max_k |s_k - c|`` with ``c`` ranging over all pairwise midpoints of the samples."""
    s = np.asarray(samples, dtype=float)
    cands = 0.5 * (s[:, None] + s[None, :])
    return float(np.min(np.max(np.abs(s[None, None, :] - cands[:, :, None]), axis=2)))


def _random_uclass(blocks, ranks, windings, N, rng, scale, mode) -> UClass:
    phases = []
    for b in blocks:
        if b.space is Space.POINT:
            phases.append(GridFunction(Space.POINT, [float(rng.uniform(-scale, scale))]))
        else:
            phases.append(random_grid_functions(b.space, N, rng, 1, scale)[0])
    return UClass(None, tuple(b.space for b in blocks), ranks, windings, phases, mode)


def _lip(f: AffElement) -> float:
    return max(g.lipschitz() for g in f.funcs)


def _aggregate(name: str, recs: list[CheckRecord]) -> CheckRecord:
    """Collapse one check across many candidates into its tightest instance."""
    failed = [r for r in recs if not r.passed]
    if failed:
        r = failed[0]
        return CheckRecord(name, r.anchor, r.lhs, r.relation, r.rhs, r.margin, False, {"failed": len(failed), "count": len(recs)})

    def slack(r: CheckRecord) -> float:
        try:
            if r.relation in ("<=",):
                return float(r.rhs) + float(r.margin) - float(r.lhs)
            if r.relation in (">=", ">"):
                return float(r.lhs) + float(r.margin) - float(r.rhs)
        except (TypeError, ValueError):
            pass
        return 0.0

    r = min(recs, key=slack)
    return CheckRecord(name, r.anchor, r.lhs, r.relation, r.rhs, r.margin, True, {"count": len(recs)})


def format_line(res: CriterionResult) -> str:
    rec = res.worst()
    verdict = "PASS" if res.passed else "FAIL"
    if rec is None:
        return f"[{verdict}] {res.number:2d}. {res.title}"
    return f"[{verdict}] {res.number:2d}. {res.title}: {rec.name}: {_short(rec.lhs)} {rec.relation} {_short(rec.rhs)} (margin {_short(rec.margin)})"


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    s = str(v)
    return s if len(s) <= 60 else s[:57] + "..."
