"""End-to-end experiments on the A/B pair.

* :func:`inv0_equivalence_report` certifies that the two systems have the same
  K-theory and approximately intertwined trace data.
* :func:`splitting_for_A` builds the compatible section for A from generator
  classes and checks it commutes with corner inclusions.
* :func:`obstruction_experiment` replays, at finite stages, the inequality chain
  that defeats every candidate section for B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .aff import AffElement, AffMap, aff_distance_certificate, aff_induced, tail_contraction_bound
from .checks import CheckRecord, check_eq, check_ge, check_gt, check_le
from .errors import NotUVD, ParamMismatch, StageBudgetExceeded, StageOutOfRange
from .families import family_elements
from .ktheory import K0Vector, k0_induced, rho
from .spaces import GridFunction, Space, midrange_seminorm
from .systems import InductiveSystem, PartialHom, Projection, StepHom, corner_unit_image, multiplicity_matrix, stage_sizes, winding_length
from .unitary import (
    LatticeMode,
    UClass,
    d_prime,
    include_uclass,
    is_uniformly_varied,
    push_forward_uclass,
    uvd_passes,
)

COMPATIBILITY_BUDGET = Fraction(1, 16)


def grid_margin(resolution: int) -> float:
    return 4.0 / resolution


def stage_tests(sys: InductiveSystem, n: int, seed: int = 0, random_count: int = 100) -> list[AffElement]:
    blocks = sys.blocks(n)
    fam = family_elements([b.space for b in blocks], sys.params.grid_resolution, seed, random_count)
    return [AffElement(n, funcs) for _, funcs in fam]


# ---------------------------------------------------------------------------
# Inv^0 agreement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepDefect:
    step: int
    node_max: float
    upper: float
    bound: Fraction
    identical_block_defect: float


@dataclass(frozen=True)
class Inv0Report:
    checks: tuple[CheckRecord, ...]
    step_defects: tuple[StepDefect, ...]
    partial_sums: tuple[Fraction, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def inv0_equivalence_report(A: InductiveSystem, B: InductiveSystem, seed: int = 0, random_count: int = 100) -> Inv0Report:
    """Stage-by-stage certificate that A and B share K-theory and nearly share traces."""
    if A.params != B.params:
        raise ParamMismatch("systems were built from different parameters")
    params = A.params
    N = params.grid_resolution
    margin = grid_margin(N)
    checks: list[CheckRecord] = []
    for n in range(1, A.stage_count + 1):
        checks.append(check_eq(f"stage {n} blocks agree", "same building blocks", A.blocks(n), B.blocks(n)))
    checks.append(check_eq("stage 1 maps agree", "identical first stage", A.hom(1, 1), B.hom(1, 1)))
    defects: list[StepDefect] = []
    partial = []
    acc = Fraction(0)
    for n in range(1, A.stage_count):
        ha, hb = A.step(n), B.step(n)
        checks.append(check_eq(f"step {n} multiplicity matrices agree", "same K-theory maps", multiplicity_matrix(ha), multiplicity_matrix(hb)))
        bound = Fraction(2, params.p(n) ** params.k(n))
        acc += bound
        partial.append(acc)
        cert = aff_distance_certificate(ha, hb, stage_tests(A, n, seed, random_count))
        others = [u for j, u in enumerate(cert.per_block_upper) if j != n - 1]
        ident = max(others, default=0.0)
        defects.append(StepDefect(n, cert.node_max, cert.upper, bound, ident))
        checks.append(check_le(f"step {n} trace distance at nodes", "approximate intertwining", cert.node_max, bound, margin))
        checks.append(check_le(f"step {n} trace distance enclosure", "approximate intertwining", cert.upper, bound, margin))
        checks.append(check_le(f"step {n} identical parts", "approximate intertwining", ident, 0.0, 1e-12))
        # corner units push identically
        blocks = A.blocks(n)
        worst = 0.0
        same = True
        for mask in product((0, 1), repeat=len(blocks)):
            x = K0Vector(n, tuple(b.size * m for b, m in zip(blocks, mask)))
            ya, yb = k0_induced(ha, x), k0_induced(hb, x)
            same &= ya == yb
            fa = aff_induced(ha, rho(x, blocks, N))
            fb = aff_induced(hb, rho(x, blocks, N))
            worst = max(worst, fa.distance(fb))
        checks.append(check_eq(f"step {n} corner units: K_0 images", "constant projections", same, True))
        checks.append(check_le(f"step {n} corner units: trace images", "constant projections", worst, 0.0, 1e-12))
    total_defect = sum(d.upper for d in defects)
    checks.append(check_le("summed step defects", "summable intertwining errors", total_defect, float(acc), A.stage_count * margin))
    return Inv0Report(tuple(checks), tuple(defects), tuple(partial))


# ---------------------------------------------------------------------------
# row subsystems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RowSystem:
    """The block-n row of a system: circle block n, then interval block n at later stages."""

    system: InductiveSystem
    row: int
    steps: tuple[StepHom, ...]

    @property
    def first_stage(self) -> int:
        return self.row

    def step_from(self, stage: int) -> StepHom:
        return self.steps[stage - self.row]

    def project(self, u: UClass) -> UClass:
        """The quotient onto the row: keep only the block-n component."""
        if u.stage is None or u.stage < self.row:
            raise StageOutOfRange("class does not live at a stage containing the row")
        i = self.row - 1
        return UClass(u.stage, (u.spaces[i],), (u.ranks[i],), (u.windings[i],), (u.phases[i],), u.mode)

    def push(self, u: UClass, to_stage: int, guard: bool = True) -> UClass:
        """Push a row class along the row steps up to ``to_stage``."""
        v = u
        for s in range(u.stage, to_stage):
            v = push_forward_uclass(self.step_from(s), v, guard)
        return v


def corner_quotient_map(sys: InductiveSystem, n: int) -> RowSystem:
    """Extract the block-n row of ``sys`` as a chain of one-block steps."""
    if not 1 <= n <= sys.stage_count:
        raise StageOutOfRange(f"row {n} outside 1..{sys.stage_count}")
    steps = []
    for m in range(n, sys.stage_count):
        h = sys.step(m)
        part = h.part(n - 1, n - 1)
        steps.append(StepHom((h.source[n - 1],), (h.target[n - 1],), {(0, 0): PartialHom(part.source, part.target, part.pattern)}, True, m, m + 1))
    return RowSystem(sys, n, tuple(steps))


# ---------------------------------------------------------------------------
# the section for A
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagramDefect:
    m: int
    windings_equal: bool
    defect: float
    interval_oscillation: float


@dataclass(frozen=True)
class SplittingData:
    stage: int
    corner: Projection
    section: UClass
    pi_of_section: int
    power: int
    diagram: tuple[DiagramDefect, ...]


def splitting_for_A(sys: InductiveSystem, n: int, power: int = 1) -> SplittingData:
    """Section on the corner ``P_n`` sending ``power`` to the generator class, with its diagram checks."""
    if not uvd_passes(is_uniformly_varied(sys)):
        raise NotUVD(f"system {sys.name} fails the uniformly varied determinant test")
    N = sys.params.grid_resolution
    corner = corner_unit_image(sys, n, n)
    section = UClass.generator(sys.blocks(n), n - 1, N, power, LatticeMode.MOD_ALL_CONSTANTS, n, corner.ranks)
    pi = section.windings[n - 1]
    rows = []
    for m in range(n + 1, sys.stage_count + 1):
        pushed = push_forward_uclass(sys.hom(n, m), section)
        p_m = corner_unit_image(sys, m, m)
        s_m = UClass.generator(sys.blocks(m), m - 1, N, power, LatticeMode.MOD_ALL_CONSTANTS, m, p_m.ranks)
        included = include_uclass(s_m, corner_unit_image(sys, n, m))
        same = pushed.windings == included.windings
        defect = d_prime(pushed, included) if same else float("inf")
        osc = max(
            (midrange_seminorm(h) for h, sp, r in zip(pushed.phases, pushed.spaces, pushed.ranks) if sp is Space.INTERVAL and r),
            default=0.0,
        )
        rows.append(DiagramDefect(m, same, defect, osc))
    return SplittingData(n, corner, section, pi, power, tuple(rows))


# ---------------------------------------------------------------------------
# the obstruction for B
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ObstructionLedger:
    n: int
    m: int
    M: float
    ratio: Fraction
    htilde_norm: Fraction
    pushed_norm: float
    tail_bound: Fraction
    lower_bound: float
    direct_final: float
    threshold: Fraction
    threshold_violated: bool
    grid_margin: float
    checks: tuple[CheckRecord, ...]
    htilde: GridFunction = field(repr=False)
    pushed: GridFunction = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def trace(self) -> list[tuple[str, object, object]]:
        return [(c.name, c.lhs, c.rhs) for c in self.checks]


def admissible_stage(n: int, M: float) -> int:
    """Smallest ``m > n`` with ``4^(m-1) > 8M + 8``."""
    target = 8 * Fraction(M) + 8
    m = n + 1
    while 4 ** (m - 1) <= target:
        m += 1
    return m


def obstruction_experiment(B: InductiveSystem, n: int, h: AffElement, m: int | None = None) -> ObstructionLedger:
    """Finite-stage inequality chain for the candidate class ``[g] e^{2 pi i h}`` at stage n."""
    N = B.params.grid_resolution
    margin = grid_margin(N)
    if not 1 <= n < B.stage_count:
        raise StageOutOfRange(f"need 1 <= n < {B.stage_count}")
    M = h.norm()
    if m is None:
        m = admissible_stage(n, M)
        if m > B.stage_count:
            raise StageBudgetExceeded(f"need m = {m} for M = {M}, only {B.stage_count} stages built")
    elif not n < m <= B.stage_count:
        raise StageOutOfRange(f"need {n} < m <= {B.stage_count}")
    j = m - 2  # interval block m-1 of stage m
    sizes = stage_sizes(B.params)
    ratio = Fraction(winding_length(B.params, m - 1), sizes[m - 1][j])
    hom = B.hom(n, m)
    blocks = B.blocks(n)
    checks = [
        check_eq("ratio l_{m-1}/[m,m-1]", "ratio identity", ratio, Fraction(4 ** (m - 1))),
        check_gt("admissible stage", "choice of m", float(ratio), 8 * M + 8, 0, M=M, m=m),
    ]
    gen = UClass.generator(blocks, n - 1, N, 1, LatticeMode.MOD_ALL_CONSTANTS, n)
    ht = push_forward_uclass(hom, gen, guard=True, blocks=[j]).phases[j]
    ramp_err = float(np.max(np.abs(ht.samples - float(ratio) * ht.nodes)))
    checks.append(check_le("generator image phase is the ramp ratio*t", "generator image", ramp_err, 0.0, 1e-9 * float(ratio)))
    htilde_norm = ratio / 2
    checks.append(check_ge("ramp quotient norm", "ramp norm", float(htilde_norm), 4 * M + 4))
    u = UClass.from_phase(blocks, h, [0] * (n - 1) + [1], LatticeMode.MOD_ALL_CONSTANTS)
    pushed = push_forward_uclass(hom, u, guard=False, blocks=[j]).phases[j]
    aff_part = AffMap.from_step(hom).apply_block(h, j, guard=False)
    split_err = midrange_seminorm(pushed - ht - aff_part)
    checks.append(check_le("pushed class = ramp + induced phase", "pushed class", split_err, 0.0, 1e-9))
    checks.append(check_le("induced phase quotient norm", "contractive trace map", midrange_seminorm(aff_part), M, 1e-12))
    pushed_norm = midrange_seminorm(pushed)
    checks.append(check_ge("pushed class quotient norm", "pushed norm", pushed_norm, 4 * M + 4, margin))
    checks.append(check_ge("pushed class norm >= ramp norm - M", "pushed norm", pushed_norm, float(htilde_norm) - M, margin))
    tail = tail_contraction_bound(B, m - 1, m) if m < B.stage_count else Fraction(0)
    factor = 1 - tail
    checks.append(check_ge("tail factor", "tail contraction", factor, Fraction(3, 4)))
    lower = float(factor) * pushed_norm
    checks.append(check_ge("final corner lower bound", "final bound", lower, 3.0, margin))
    row = corner_quotient_map(B, m - 1)
    row_class = UClass(m, (Space.INTERVAL,), (sizes[m - 1][j],), (0,), (pushed,), LatticeMode.MOD_ALL_CONSTANTS)
    final = row.push(row_class, B.stage_count, guard=False)
    direct = midrange_seminorm(final.phases[0])
    checks.append(check_ge("direct tail push", "tail contraction", direct, lower, margin))
    violated = lower > COMPATIBILITY_BUDGET
    checks.append(check_gt("lower bound exceeds compatibility budget", "contradiction", lower, COMPATIBILITY_BUDGET))
    return ObstructionLedger(
        n, m, M, ratio, htilde_norm, pushed_norm, tail, lower, direct, COMPATIBILITY_BUDGET, violated, margin, tuple(checks), ht, pushed
    )
