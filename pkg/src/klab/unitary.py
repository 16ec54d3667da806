"""Determinant data of unitaries over the block systems.

A unitary ``u`` in ``M_r(C(X))`` is recorded modulo constant-determinant
unitaries by its normalized determinant

    det u(x) = z^winding * exp(2 pi i * r * h(x)),

where ``winding`` is nonzero only on circle blocks and the phase ``h`` is a real
grid function. Modulo all constant-determinant unitaries ``h`` is taken up to
real constants; modulo the closed commutator subgroup only up to constants in
``(1/r) Z``. Every phase is stored with a fixed basepoint value (0, or the
representative in ``[0, 1/r)``) at ``t = 0`` / ``theta = 0``.

The determinant of the image of a generator under a pattern is computed
symbolically: winding maps add their windings and constants add exact
rational phases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import simpson

from .aff import AffElement, evaluate_map
from .arith import orbit_phase_sum
from .errors import BlockMismatch, GridTooCoarse, NonTorsionClass, NotCircleSource
from .spaces import GridFunction, Space, grid_nodes, lattice_quotient_seminorm, midrange_seminorm, node_count
from .systems import (
    Block,
    CircleWinding,
    ConstPoint,
    ExpWinding,
    InductiveSystem,
    Projection,
    RootOrbit,
    StepHom,
    push_ranks,
)


class LatticeMode(enum.Enum):
    MOD_ALL_CONSTANTS = "mod-all-constants"
    MOD_LATTICE = "mod-lattice"


def _normalize_phase(h: GridFunction, rank: int, mode: LatticeMode) -> GridFunction:
    base = float(h.samples[0])
    if rank == 0:
        return GridFunction.zeros(h.space, h.resolution)
    if mode is LatticeMode.MOD_ALL_CONSTANTS:
        shift = base
    else:
        shift = math.floor(base * rank) / rank
    if shift == 0.0:
        return h
    return h - shift


@dataclass(frozen=True, eq=False)
class UClass:
    """Per-block ``(winding, phase)`` data of a unitary class on a corner.

    ``ranks[i]`` is the rank of the corner in block i (0 when the block is absent).
    """

    stage: int | None
    spaces: tuple[Space, ...]
    ranks: tuple[int, ...]
    windings: tuple[int, ...]
    phases: tuple[GridFunction, ...]
    mode: LatticeMode = LatticeMode.MOD_ALL_CONSTANTS

    def __post_init__(self) -> None:
        for name in ("spaces", "ranks", "windings", "phases"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        n = len(self.spaces)
        if not (len(self.ranks) == len(self.windings) == len(self.phases) == n):
            raise BlockMismatch("per-block data of different lengths")
        for sp, w, h, r in zip(self.spaces, self.windings, self.phases, self.ranks):
            if w and sp is not Space.CIRCLE:
                raise BlockMismatch("windings live on circle blocks only")
            if h.space is not sp:
                raise BlockMismatch("phase space does not match the block")
            if r < 0:
                raise ValueError("negative rank")
        object.__setattr__(
            self,
            "phases",
            tuple(_normalize_phase(h, r, self.mode) for h, r in zip(self.phases, self.ranks)),
        )
        object.__setattr__(self, "windings", tuple(w if r else 0 for w, r in zip(self.windings, self.ranks)))

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, blocks: Sequence[Block], resolution: int, mode: LatticeMode = LatticeMode.MOD_ALL_CONSTANTS, stage: int | None = None, ranks: Sequence[int] | None = None) -> "UClass":
        rk = tuple(ranks) if ranks is not None else tuple(b.size for b in blocks)
        return cls(stage, tuple(b.space for b in blocks), rk, (0,) * len(blocks), tuple(GridFunction.zeros(b.space, resolution) for b in blocks), mode)

    @classmethod
    def generator(cls, blocks: Sequence[Block], index: int, resolution: int, power: int = 1, mode: LatticeMode = LatticeMode.MOD_ALL_CONSTANTS, stage: int | None = None, ranks: Sequence[int] | None = None) -> "UClass":
        """``diag(z^power, 1, ..., 1)`` in circle block ``index``."""
        if blocks[index].space is not Space.CIRCLE:
            raise NotCircleSource("generators live on circle blocks")
        z = cls.zero(blocks, resolution, mode, stage, ranks)
        w = [0] * len(blocks)
        w[index] = power
        return z.with_windings(w)

    @classmethod
    def from_phase(cls, blocks: Sequence[Block], phase: AffElement, windings: Sequence[int] | None = None, mode: LatticeMode = LatticeMode.MOD_ALL_CONSTANTS, ranks: Sequence[int] | None = None) -> "UClass":
        """The class of ``e^{2 pi i h}`` (times a winding unitary), ``h`` the normalized phase."""
        rk = tuple(ranks) if ranks is not None else tuple(b.size for b in blocks)
        w = tuple(windings) if windings is not None else (0,) * len(blocks)
        return cls(phase.stage, tuple(b.space for b in blocks), rk, w, phase.funcs, mode)

    def with_windings(self, windings: Sequence[int]) -> "UClass":
        return UClass(self.stage, self.spaces, self.ranks, tuple(windings), self.phases, self.mode)

    # arithmetic -------------------------------------------------------
    def _check(self, other: "UClass") -> None:
        if self.spaces != other.spaces or self.ranks != other.ranks or self.mode is not other.mode:
            raise BlockMismatch("classes on different corners or modes")

    def __add__(self, other: "UClass") -> "UClass":
        self._check(other)
        return UClass(self.stage, self.spaces, self.ranks, tuple(a + b for a, b in zip(self.windings, other.windings)), tuple(a + b for a, b in zip(self.phases, other.phases)), self.mode)

    def __neg__(self) -> "UClass":
        return UClass(self.stage, self.spaces, self.ranks, tuple(-a for a in self.windings), tuple(-a for a in self.phases), self.mode)

    def __sub__(self, other: "UClass") -> "UClass":
        return self + (-other)

    @property
    def resolution(self) -> int:
        for h in self.phases:
            if h.space is not Space.POINT:
                return h.resolution
        return 2

    def phase_element(self) -> AffElement:
        return AffElement(self.stage, self.phases)

    def k1(self) -> tuple[int, ...]:
        return self.windings


# ---------------------------------------------------------------------------
# determinant of generator images
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeterminantClass:
    """``det(x) = exp(2 pi i (winding * x + constant))`` over a corner of rank ``rank``.

    For a circle target ``winding`` is the K_1 winding; for an interval target
    it is the slope of the continuous lift of the determinant.
    """

    space: Space
    rank: int
    winding: int
    constant: Fraction

    @property
    def oscillation(self) -> float:
        """Oscillation of the normalized phase after removing a circle winding."""
        if self.space is Space.INTERVAL:
            return abs(self.winding) / self.rank
        return 0.0

    def phase(self, resolution: int) -> GridFunction:
        """The normalized phase ``(winding * t + constant) / rank`` (interval) or ``constant / rank``."""
        c = float(self.constant) / self.rank
        if self.space is Space.INTERVAL:
            slope = Fraction(self.winding, self.rank)
            return GridFunction.from_callable(self.space, resolution, lambda t: float(slope) * t + c)
        return GridFunction.constant(self.space, resolution, c)

    def to_uclass(self, resolution: int, mode: LatticeMode = LatticeMode.MOD_ALL_CONSTANTS) -> UClass:
        w = self.winding if self.space is Space.CIRCLE else 0
        return UClass(None, (self.space,), (self.rank,), (w,), (self.phase(resolution),), mode)


def det_class_of_generator_image(h: StepHom, source_block: int, target_block: int) -> DeterminantClass:
    """Determinant of the image of ``diag(z, 1, ..., 1)`` under part ``(source, target)``."""
    if h.source[source_block].space is not Space.CIRCLE:
        raise NotCircleSource(f"block {source_block} is not a circle block")
    part = h.part(source_block, target_block)
    if part is None:
        raise BlockMismatch(f"part {(source_block, target_block)} is zero")
    winding = 0
    const = Fraction(0)
    for t in part.pattern.terms:
        lam = t.map
        if isinstance(lam, (CircleWinding, ExpWinding)):
            winding += t.mult * lam.winding
        elif isinstance(lam, ConstPoint):
            c = lam.point.coordinate
            const += t.mult * (c if isinstance(c, Fraction) else Fraction(c))
        elif isinstance(lam, RootOrbit):
            const += t.mult * orbit_phase_sum(lam.order, lam.start, lam.stop, lam.stride)
    const -= math.floor(const)
    return DeterminantClass(h.target[target_block].space, part.rank, winding, const)


@dataclass(frozen=True)
class PartVerdict:
    step: int
    source: int
    target: int
    target_space: Space
    winding: int
    oscillation: float
    passed: bool


def is_uniformly_varied(sys: InductiveSystem, tol: float = 1e-9) -> list[PartVerdict]:
    """Check every circle-source part: constant determinant into non-circle blocks,
    pure winding (``lambda z^k``) into circle blocks."""
    out = []
    for n, h in enumerate(sys.steps, start=1):
        for (i, j), _ in h.parts.items():
            if h.source[i].space is not Space.CIRCLE:
                continue
            d = det_class_of_generator_image(h, i, j)
            if d.space is Space.CIRCLE:
                ok = d.oscillation <= tol
            else:
                ok = d.winding == 0 and d.oscillation <= tol
            out.append(PartVerdict(n, i, j, d.space, d.winding, d.oscillation, ok))
    return out


def uvd_passes(verdicts: Iterable[PartVerdict]) -> bool:
    return all(v.passed for v in verdicts)


# ---------------------------------------------------------------------------
# push-forward
# ---------------------------------------------------------------------------


def _unwrap_guard(h: GridFunction) -> None:
    s = h.samples
    if h.space is Space.POINT:
        return
    d = np.diff(np.append(s, s[0])) if h.space is Space.CIRCLE else np.diff(s)
    if d.size and float(np.max(np.abs(d))) >= 0.5:
        raise GridTooCoarse(f"phase step {float(np.max(np.abs(d))):.3g} >= 1/2 between adjacent nodes")


def push_forward_uclass(h: StepHom, u: UClass, guard: bool = True, blocks: Sequence[int] | None = None) -> UClass:
    """Push a class along ``h`` onto the image corner.

    Target phase ``h_j = (1/r_j) sum_i sum_lam mult * (r_i h_i(lam x) + w_i lift(lam)(x))``
    with ``r_j`` the image rank. Exponential maps lift to ``w t``, constants to
    their exact phase, and circle windings multiply the K_1 winding instead.
    Only the target blocks in ``blocks`` are computed (others come back zero).
    """
    if u.spaces != tuple(b.space for b in h.source):
        raise BlockMismatch("class does not match the source blocks")
    if u.stage is not None and h.source_stage is not None and u.stage != h.source_stage:
        raise BlockMismatch(f"class at stage {u.stage}, map starts at stage {h.source_stage}")
    n = u.resolution
    out_ranks = push_ranks(h, u.ranks)
    wanted = range(len(h.target)) if blocks is None else blocks
    windings = [0] * len(h.target)
    phases = [GridFunction.zeros(b.space, n) for b in h.target]
    for j in wanted:
        space = h.target[j].space
        if out_ranks[j] == 0:
            continue
        arr = np.zeros(node_count(space, n))
        ramp = 0
        const = Fraction(0)
        const_f = 0.0
        for i, part in h.column(j):
            r_i, w_i, h_i = u.ranks[i], u.windings[i], u.phases[i]
            if r_i == 0:
                continue
            for t in part.pattern.terms:
                lam = t.map
                val = evaluate_map(lam, h_i, space, n, guard)
                if np.ndim(val):
                    arr += (r_i * t.mult) * val
                else:
                    const_f += r_i * t.mult * val
                if not w_i:
                    continue
                if isinstance(lam, CircleWinding):
                    windings[j] += t.mult * lam.winding * w_i
                elif isinstance(lam, ExpWinding):
                    ramp += t.mult * lam.winding * w_i
                elif isinstance(lam, ConstPoint):
                    c = lam.point.coordinate
                    const += t.mult * w_i * (c if isinstance(c, Fraction) else Fraction(c))
                elif isinstance(lam, RootOrbit):
                    const += t.mult * w_i * orbit_phase_sum(lam.order, lam.start, lam.stop, lam.stride)
        rank = out_ranks[j]
        const -= math.floor(const)
        total = arr / rank + (const_f + float(const)) / rank
        if ramp:
            total = total + float(Fraction(ramp, rank)) * grid_nodes(space, n)
        ph = GridFunction(space, total, n)
        if guard:
            _unwrap_guard(ph)
        phases[j] = ph
    return UClass(h.target_stage, tuple(b.space for b in h.target), out_ranks, tuple(windings), tuple(phases), u.mode)


def include_uclass(u: UClass, large: Projection) -> UClass:
    """The map induced by the inclusion of the corner of ``u`` into ``large``.

    Phases scale by ``rank small_j / rank large_j``; windings are kept.
    """
    if len(large.ranks) != len(u.ranks) or any(a > b for a, b in zip(u.ranks, large.ranks)):
        raise BlockMismatch("corner of the class is not contained in the larger corner")
    phases = tuple(h * (a / b) if b else h * 0.0 for h, a, b in zip(u.phases, u.ranks, large.ranks))
    return UClass(u.stage, u.spaces, large.ranks, u.windings, phases, u.mode)


def push_forward_uclass_star(h: StepHom, u: UClass, guard: bool = True) -> UClass:
    """Push onto the image corner, then include into the full target algebra."""
    v = push_forward_uclass(h, u, guard)
    return include_uclass(v, Projection.unit(h.target, h.target_stage))


# ---------------------------------------------------------------------------
# norms and metrics
# ---------------------------------------------------------------------------


def _block_seminorm(h: GridFunction, rank: int, mode: LatticeMode) -> float:
    if rank == 0:
        return 0.0
    if mode is LatticeMode.MOD_ALL_CONSTANTS:
        return midrange_seminorm(h)
    return lattice_quotient_seminorm(h, Fraction(1, rank))


def quotient_norm_uclass(u: UClass) -> float:
    """Max over blocks of the quotient seminorm of the phase (torsion classes only)."""
    if any(u.windings):
        raise NonTorsionClass("class has nonzero winding")
    return max((_block_seminorm(h, r, u.mode) for h, r in zip(u.phases, u.ranks)), default=0.0)


def d_prime(u: UClass, v: UClass) -> float:
    """Quotient distance of the phase difference (windings must agree)."""
    u._check(v)
    if u.windings != v.windings:
        return math.inf
    return max((_block_seminorm(a - b, r, u.mode) for a, b, r in zip(u.phases, v.phases, u.ranks)), default=0.0)


def metric_D(u: UClass, v: UClass) -> float:
    """2 if the windings differ or ``d' >= 1/2``, else ``|exp(2 pi i d') - 1|``."""
    u._check(v)
    if u.windings != v.windings:
        return 2.0
    dp = d_prime(u, v)
    if dp >= 0.5:
        return 2.0
    return abs(np.exp(2j * np.pi * dp) - 1.0)


@dataclass(frozen=True)
class ScalarCertificate:
    size: int
    samples: int
    max_distance: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.bound


def scalar_class(size: int, theta: float, mode: LatticeMode = LatticeMode.MOD_LATTICE) -> UClass:
    """The class of the scalar ``exp(2 pi i theta)`` in a size-``size`` point block."""
    return UClass(None, (Space.POINT,), (size,), (0,), (GridFunction(Space.POINT, [theta]),), mode)


def scalar_distance_certificate(size: int, samples: int = 1000, seed: int = 0) -> ScalarCertificate:
    """Largest distance between sampled scalar classes in ``M_size``, against ``2 pi / size``."""
    rng = np.random.default_rng([seed, size])
    worst = 0.0
    for a, b in rng.uniform(0.0, 1.0, (samples, 2)):
        worst = max(worst, metric_D(scalar_class(size, a), scalar_class(size, b)))
    return ScalarCertificate(size, samples, worst, 2 * math.pi / size)


# ---------------------------------------------------------------------------
# the de la Harpe--Skandalis determinant on exponential paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiagonalExponent:
    """A self-adjoint diagonal exponent: per block, ``(entry, multiplicity)`` pairs."""

    blocks: tuple[Block, ...]
    entries: tuple[tuple[tuple[GridFunction, int], ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        for b, es in zip(self.blocks, self.entries):
            if sum(m for _, m in es) != b.size:
                raise BlockMismatch("diagonal multiplicities must fill the block")
            if any(f.space is not b.space for f, _ in es):
                raise BlockMismatch("entry space does not match the block")

    @classmethod
    def projection(cls, block: Block, rank: int, resolution: int) -> "DiagonalExponent":
        es = []
        if rank:
            es.append((GridFunction.constant(block.space, resolution, 1.0), rank))
        if block.size - rank:
            es.append((GridFunction.constant(block.space, resolution, 0.0), block.size - rank))
        return cls((block,), (tuple(es),))


def dhs_determinant(path: DiagonalExponent | Sequence[DiagonalExponent]) -> AffElement:
    """Determinant of ``s -> exp(2 pi i s h)``: the normalized trace of ``h``.

    A sequence of exponents stands for the concatenated path; values add.
    """
    parts = [path] if isinstance(path, DiagonalExponent) else list(path)
    total = None
    for p in parts:
        funcs = []
        for b, es in zip(p.blocks, p.entries):
            acc = sum(f.samples * m for f, m in es)
            funcs.append(GridFunction(b.space, acc / b.size, es[0][0].resolution))
        el = AffElement(None, tuple(funcs))
        total = el if total is None else total + el
    return total


def dhs_quadrature(path: DiagonalExponent | Sequence[DiagonalExponent], nodes: int = 129, step: float = 1e-3) -> AffElement:
    """Numerical ``(1/2 pi i) int_0^1 tau(xi'(s) xi(s)^*) ds``.

    ``xi'`` comes from a five-point central difference and the integral from
    composite Simpson on ``nodes`` points.
    """
    parts = [path] if isinstance(path, DiagonalExponent) else list(path)
    s = np.linspace(0.0, 1.0, nodes)
    total = None
    for p in parts:
        funcs = []
        for b, es in zip(p.blocks, p.entries):
            acc = 0.0
            for f, m in es:
                x = f.samples[None, :]

                def xi(v):
                    return np.exp(2j * np.pi * v[:, None] * x)

                d = (-xi(s + 2 * step) + 8 * xi(s + step) - 8 * xi(s - step) + xi(s - 2 * step)) / (12 * step)
                integrand = (d * np.conj(xi(s))) / (2j * np.pi)
                acc = acc + m * simpson(integrand.real, x=s, axis=0)
            funcs.append(GridFunction(b.space, acc / b.size, es[0][0].resolution))
        el = AffElement(None, tuple(funcs))
        total = el if total is None else total + el
    return total
