"""The AffT functor on grid functions.

For a block ``M_s(C(X))`` the affine functions on the trace space are
``C_R(X)``, and a diagonal homomorphism acts by the weighted pattern average

    g_j(x) = (1/size_j) * sum_i size_i * sum_{lam in pattern(i, j)} f_i(lam(x)).

Node values are exact: winding maps send the node ``k/N`` to the phase
``(w*k mod N)/N`` by integer arithmetic, and rational constants use exact cell
lookup. Interpolation enters only when the inner function lives on a
different grid or a constant is not a node.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import BlockMismatch, GridTooCoarse, InvalidParams, StageOutOfRange, ZeroRankCorner
from .spaces import GridFunction, Space, node_count, sup_norm
from .systems import (
    Block,
    CircleWinding,
    ConstPoint,
    ExpWinding,
    IdentityInterval,
    InductiveSystem,
    Projection,
    RootOrbit,
    SpectralMap,
    StepHom,
    is_constant_map,
    multiplicity_matrix,
)

__all__ = [
    "AffElement",
    "AffMap",
    "DistanceCertificate",
    "Projection",
    "aff_distance_certificate",
    "aff_distance_of_steps",
    "aff_induced",
    "check_corner_diagram",
    "corner_restrict_aff_map",
    "evaluate_map",
    "row_contraction_defect",
    "tail_contraction_bound",
]


@dataclass(frozen=True, eq=False)
class AffElement:
    """One grid function per block of a stage."""

    stage: int | None
    funcs: tuple[GridFunction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "funcs", tuple(self.funcs))
        res = {f.resolution for f in self.funcs if f.space is not Space.POINT}
        if len(res) > 1:
            raise BlockMismatch("all components must share one grid")

    @property
    def resolution(self) -> int:
        for f in self.funcs:
            if f.space is not Space.POINT:
                return f.resolution
        return 2

    @property
    def spaces(self) -> tuple[Space, ...]:
        return tuple(f.space for f in self.funcs)

    @classmethod
    def constant(cls, blocks: Sequence[Block], resolution: int, values: Sequence[float] | float, stage: int | None = None) -> "AffElement":
        vals = [values] * len(blocks) if np.isscalar(values) else list(values)
        return cls(stage, tuple(GridFunction.constant(b.space, resolution, float(v)) for b, v in zip(blocks, vals)))

    @classmethod
    def zeros(cls, blocks: Sequence[Block], resolution: int, stage: int | None = None) -> "AffElement":
        return cls.constant(blocks, resolution, 0.0, stage)

    def norm(self) -> float:
        """Sup-norm on the direct sum: max over blocks."""
        return max(sup_norm(f) for f in self.funcs)

    def matches(self, blocks: Sequence[Block]) -> bool:
        return self.spaces == tuple(b.space for b in blocks)

    def _zip(self, other: "AffElement"):
        if len(self.funcs) != len(other.funcs):
            raise BlockMismatch("elements of different stages")
        return zip(self.funcs, other.funcs)

    def __add__(self, other: "AffElement") -> "AffElement":
        return AffElement(self.stage, tuple(a + b for a, b in self._zip(other)))

    def __sub__(self, other: "AffElement") -> "AffElement":
        return AffElement(self.stage, tuple(a - b for a, b in self._zip(other)))

    def __neg__(self) -> "AffElement":
        return AffElement(self.stage, tuple(-a for a in self.funcs))

    def __mul__(self, scalar: float) -> "AffElement":
        return AffElement(self.stage, tuple(a * scalar for a in self.funcs))

    __rmul__ = __mul__

    def distance(self, other: "AffElement") -> float:
        return max(float(np.max(np.abs(a.samples - b.samples))) for a, b in self._zip(other))


# ---------------------------------------------------------------------------
# term evaluation
# ---------------------------------------------------------------------------


def check_resolvable(lam: SpectralMap, g: GridFunction, resolution: int) -> None:
    """Raise :class:`GridTooCoarse` if a winding map would alias a non-constant function."""
    if isinstance(lam, (CircleWinding, ExpWinding)) and 8 * abs(lam.winding) > resolution and not g.is_constant():
        raise GridTooCoarse(f"winding {lam.winding} needs resolution >= {8 * abs(lam.winding)}, have {resolution}")


def evaluate_map(lam: SpectralMap, g: GridFunction, target: Space, resolution: int, guard: bool = True):
    """Values of ``g o lam`` on the target grid, summed over an orbit's points.

    Returns a float for constant maps (the orbit sum for :class:`RootOrbit`)
    and an array of node values otherwise.
    """
    if isinstance(lam, ConstPoint):
        return g.at(lam.point)
    if isinstance(lam, RootOrbit):
        if g.is_constant():
            return float(g.samples[0]) * lam.count
        return kernels.orbit_sum(g.samples, lam.order, lam.start, lam.stop, lam.stride)
    if lam.domain is not target:
        raise BlockMismatch(f"{lam} is not defined on {target.value}")
    n_nodes = node_count(target, resolution)
    if g.is_constant():
        return np.full(n_nodes, float(g.samples[0]))
    if guard:
        check_resolvable(lam, g, resolution)
    if isinstance(lam, IdentityInterval):
        return np.array(g.resample(resolution).samples)
    return kernels.winding_gather(g.samples, lam.winding, resolution, n_nodes)


# ---------------------------------------------------------------------------
# weighted maps
# ---------------------------------------------------------------------------

WeightedTerm = tuple[Fraction, SpectralMap]


@dataclass(frozen=True, eq=False)
class AffMap:
    """A positive map between AffT spaces of direct sums, by weighted pattern terms.

    ``terms[(i, j)]`` lists ``(weight, map)``; an orbit's weight applies to each
    of its points. ``mult`` keeps the multiplicity matrix so corner formulas
    can be evaluated.
    """

    source: tuple[Space, ...]
    target: tuple[Space, ...]
    terms: Mapping[tuple[int, int], tuple[WeightedTerm, ...]]
    mult: tuple[tuple[int, ...], ...]
    source_stage: int | None = None
    target_stage: int | None = None

    @classmethod
    def from_step(cls, h: StepHom) -> "AffMap":
        return cls.from_step_corner(h, Projection.unit(h.source))

    @classmethod
    def from_step_corner(cls, h: StepHom, p: Projection) -> "AffMap":
        """The map of the restriction of ``h`` to the corner ``p``."""
        if len(p.ranks) != len(h.source):
            raise BlockMismatch("corner does not match the source blocks")
        image = [0] * len(h.target)
        for (i, j), part in h.parts.items():
            image[j] += len(part.pattern) * p.ranks[i]
        terms: dict[tuple[int, int], tuple[WeightedTerm, ...]] = {}
        for (i, j), part in h.parts.items():
            if p.ranks[i] == 0:
                continue
            terms[(i, j)] = tuple((Fraction(p.ranks[i] * t.mult, image[j]), t.map) for t in part.pattern.terms)
        return cls(
            tuple(b.space for b in h.source),
            tuple(b.space for b in h.target),
            terms,
            tuple(tuple(r) for r in multiplicity_matrix(h)),
            h.source_stage,
            h.target_stage,
        )

    def column(self, j: int) -> list[tuple[int, tuple[WeightedTerm, ...]]]:
        return [(i, ts) for (i, jj), ts in self.terms.items() if jj == j]

    def apply_block(self, f: AffElement, j: int, guard: bool = True) -> GridFunction:
        n = f.resolution
        space = self.target[j]
        arr = np.zeros(node_count(space, n))
        const = 0.0
        for i, ts in self.column(j):
            g = f.funcs[i]
            for w, lam in ts:
                val = evaluate_map(lam, g, space, n, guard)
                if np.ndim(val):
                    arr += float(w) * val
                else:
                    const += float(w) * val
        return GridFunction(space, arr + const, n)

    def apply(self, f: AffElement, guard: bool = True) -> AffElement:
        if f.spaces != self.source:
            raise BlockMismatch("element does not match the source blocks")
        return AffElement(self.target_stage, tuple(self.apply_block(f, j, guard) for j in range(len(self.target))))

    def perturbed(self, i: int, j: int, index: int, eps: Fraction | float) -> "AffMap":
        """Copy with the weight of one term shifted by ``eps``."""
        terms = dict(self.terms)
        ts = list(terms[(i, j)])
        w, lam = ts[index]
        ts[index] = (w + Fraction(eps), lam)
        terms[(i, j)] = tuple(ts)
        return AffMap(self.source, self.target, terms, self.mult, self.source_stage, self.target_stage)

    def column_weight(self, j: int) -> Fraction:
        """Total weight reaching target block j (1 for unital maps)."""
        return sum((w * lam.count for _, ts in self.column(j) for w, lam in ts), Fraction(0))


def aff_induced(h: StepHom, f: AffElement, guard: bool = True) -> AffElement:
    """The induced map on affine functions of traces."""
    if not f.matches(h.source):
        raise BlockMismatch("element does not match the source blocks")
    if f.stage is not None and h.source_stage is not None and f.stage != h.source_stage:
        raise BlockMismatch(f"element lives at stage {f.stage}, map starts at {h.source_stage}")
    return AffMap.from_step(h).apply(f, guard)


# ---------------------------------------------------------------------------
# distances between induced maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceCertificate:
    """``node_max`` is attained at grid nodes; ``upper`` bounds the sup over all points."""

    node_max: float
    upper: float
    per_block_upper: tuple[float, ...]
    witness: int


def _split_terms(ts: Iterable[WeightedTerm]):
    consts, moving = [], {}
    for w, lam in ts:
        if is_constant_map(lam):
            consts.append((w, lam))
        else:
            moving[lam] = moving.get(lam, Fraction(0)) + w
    return consts, moving


def _enclosure_plan(m1: AffMap, m2: AffMap):
    plan = []
    for j in range(len(m1.target)):
        rows = []
        srcs = sorted({i for i, _ in m1.column(j)} | {i for i, _ in m2.column(j)})
        for i in srcs:
            c1, mv1 = _split_terms(m1.terms.get((i, j), ()))
            c2, mv2 = _split_terms(m2.terms.get((i, j), ()))
            r1 = r2 = Fraction(0)
            for lam in set(mv1) | set(mv2):
                a, b = mv1.get(lam, Fraction(0)), mv2.get(lam, Fraction(0))
                common = min(a, b)
                r1 += a - common
                r2 += b - common
            rows.append((i, c1, c2, float(r1), float(r2)))
        plan.append(rows)
    return plan


def aff_distance_certificate(h1: StepHom, h2: StepHom, tests: Sequence[AffElement]) -> DistanceCertificate:
    """Max over ``tests`` of ``|AffT h1 (f) - AffT h2 (f)|`` with a rigorous enclosure.

    Node values are exact, so winding maps beyond the grid guard are allowed.
    The enclosure cancels identical non-constant terms, evaluates all constant
    terms exactly and bounds the remaining ones by the range of ``f_i``.
    """
    if h1.source != h2.source or h1.target != h2.target:
        raise BlockMismatch("steps have different shapes")
    m1, m2 = AffMap.from_step(h1), AffMap.from_step(h2)
    plan = _enclosure_plan(m1, m2)
    node_max, witness = 0.0, -1
    per_block = [0.0] * len(h1.target)
    for idx, f in enumerate(tests):
        g1, g2 = m1.apply(f, guard=False), m2.apply(f, guard=False)
        d = g1.distance(g2)
        if witness < 0 or d > node_max:
            node_max, witness = d, idx
        for j, rows in enumerate(plan):
            lo = hi = 0.0
            for i, c1, c2, r1, r2 in rows:
                g = f.funcs[i]
                space = m1.target[j]
                c = sum(float(w) * evaluate_map(lam, g, space, f.resolution) for w, lam in c1)
                c -= sum(float(w) * evaluate_map(lam, g, space, f.resolution) for w, lam in c2)
                gmin, gmax = g.min(), g.max()
                lo += c + r1 * gmin - r2 * gmax
                hi += c + r1 * gmax - r2 * gmin
            per_block[j] = max(per_block[j], abs(lo), abs(hi))
    return DistanceCertificate(node_max, max(per_block, default=0.0), tuple(per_block), witness)


def aff_distance_of_steps(h1: StepHom, h2: StepHom, tests: Sequence[AffElement]) -> float:
    """Max over ``tests`` of the sup-norm distance (at nodes) of the induced outputs."""
    return aff_distance_certificate(h1, h2, tests).node_max


# ---------------------------------------------------------------------------
# tail contraction along a row
# ---------------------------------------------------------------------------


def tail_contraction_bound(sys: InductiveSystem, n: int, m: int) -> Fraction:
    """``sum_{j>=m} p_n^(-k_j)`` over the built steps; at most 1/4 by the parameter check."""
    if not 1 <= n < m <= sys.stage_count + 1:
        raise StageOutOfRange(f"need 1 <= n < m <= {sys.stage_count + 1}")
    bound = sys.params.tail_sum(n, m)
    if bound > Fraction(1, 4):
        raise InvalidParams(f"tail bound {bound} exceeds 1/4")
    return bound


def row_step_image(sys: InductiveSystem, n: int, m: int, f: GridFunction) -> GridFunction:
    """Image of ``f`` under the row-n part of step m (interval block n into itself, n < m)."""
    if not 1 <= n < m < sys.stage_count:
        raise StageOutOfRange("row part exists only for n < m < stage_count")
    part = sys.step(m).part(n - 1, n - 1)
    amap = AffMap(
        (Space.INTERVAL,),
        (Space.INTERVAL,),
        {(0, 0): tuple((Fraction(t.mult, len(part.pattern)), t.map) for t in part.pattern.terms)},
        ((len(part.pattern),),),
    )
    return amap.apply_block(AffElement(None, (f,)), 0)


def row_contraction_defect(sys: InductiveSystem, n: int, m: int, f: GridFunction) -> tuple[float, Fraction]:
    """``sup |xi(f) - f|`` for the row-n part of step m, and the weight ``p_n^(-k_m)``."""
    g = row_step_image(sys, n, m, f)
    return float(np.max(np.abs(g.samples - f.samples))), Fraction(1, sys.params.p(n) ** sys.params.k(m))


# ---------------------------------------------------------------------------
# corners
# ---------------------------------------------------------------------------


def corner_restrict_aff_map(xi2: AffMap, p: Projection, q: Projection, pbar: Projection, qbar: Projection) -> AffMap:
    """Map on the smaller corners from the map on the larger ones.

    Each term weight of part ``(i, j)`` is rescaled by
    ``(rank qbar_j / rank pbar_j) * (M_ij rank p_i) / (M_ij rank q_i)``.
    Blocks with ``rank p_i = 0`` drop out.
    """
    if not (p <= q and pbar <= qbar):
        raise InvalidParams("need p <= q and pbar <= qbar")
    terms: dict[tuple[int, int], tuple[WeightedTerm, ...]] = {}
    for (i, j), ts in xi2.terms.items():
        if p.ranks[i] == 0:
            continue
        m_ij = xi2.mult[i][j]
        if pbar.ranks[j] == 0 or m_ij * q.ranks[i] == 0:
            raise ZeroRankCorner(f"zero rank in the corner formula at part {(i, j)}")
        factor = Fraction(qbar.ranks[j], pbar.ranks[j]) * Fraction(m_ij * p.ranks[i], m_ij * q.ranks[i])
        terms[(i, j)] = tuple((w * factor, lam) for w, lam in ts)
    return AffMap(xi2.source, xi2.target, terms, xi2.mult, xi2.source_stage, xi2.target_stage)


def inclusion_scale(f: AffElement, small: Projection, large: Projection) -> AffElement:
    """The map induced by a corner inclusion: multiply block i by ``rank small_i / rank large_i``."""
    funcs = []
    for g, a, b in zip(f.funcs, small.ranks, large.ranks):
        funcs.append(g * (a / b) if b else g * 0.0)
    return AffElement(f.stage, tuple(funcs))


def check_corner_diagram(
    xi_p: AffMap,
    xi_q: AffMap,
    p: Projection,
    q: Projection,
    pbar: Projection,
    qbar: Projection,
    tests: Sequence[AffElement],
) -> float:
    """Max defect of ``iota o xi_p`` against ``xi_q o iota`` over ``tests``.

    Target blocks outside ``qbar`` are ignored.
    """
    worst = 0.0
    for f in tests:
        left = inclusion_scale(xi_p.apply(f, guard=False), pbar, qbar)
        right = xi_q.apply(inclusion_scale(f, p, q), guard=False)
        for j, (a, b) in enumerate(zip(left.funcs, right.funcs)):
            if qbar.ranks[j]:
                worst = max(worst, float(np.max(np.abs(a.samples - b.samples))))
    return worst
