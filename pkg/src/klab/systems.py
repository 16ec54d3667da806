"""Building blocks, eigenvalue patterns, step homomorphisms and the A/B systems.

Stages are numbered from 1. Inside a stage, blocks are addressed by 0-based
position, so the block the literature calls ``i`` sits at index ``i - 1`` and
the part ``(i, j)`` of a step is keyed ``(i - 1, j - 1)``.

A homomorphism between direct sums of ``M_s(C(X))`` blocks is recorded by its
eigenvalue pattern: for each pair of blocks, a multiset of continuous maps from
the target spectrum to the source spectrum. Patterns are stored compressed as
``(map, multiplicity)`` terms, and a run of roots of unity is a single
:class:`RootOrbit` term, so patterns with 10^12 entries stay small.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .arith import first_primes, van_der_corput
from .errors import BlockMismatch, InvalidParams, StageOutOfRange
from .spaces import Space, SpectrumPoint


@dataclass(frozen=True)
class Block:
    """``M_size(C(space))``."""

    size: int
    space: Space

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("block size must be positive")


# ---------------------------------------------------------------------------
# spectral maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstPoint:
    """The constant map onto ``point`` (legal from any target spectrum)."""

    point: SpectrumPoint
    domain = None
    count = 1

    @property
    def codomain(self) -> Space:
        return self.point.space


@dataclass(frozen=True)
class IdentityInterval:
    """``t -> t`` on [0, 1]."""

    domain = Space.INTERVAL
    codomain = Space.INTERVAL
    count = 1


@dataclass(frozen=True)
class CircleWinding:
    """``z -> z**winding`` on the circle."""

    winding: int
    domain = Space.CIRCLE
    codomain = Space.CIRCLE
    count = 1

    def __post_init__(self) -> None:
        if self.winding == 0:
            raise ValueError("winding must be nonzero")


@dataclass(frozen=True)
class ExpWinding:
    """``t -> exp(2 pi i winding t)`` from [0, 1] to the circle."""

    winding: int
    domain = Space.INTERVAL
    codomain = Space.CIRCLE
    count = 1

    def __post_init__(self) -> None:
        if self.winding == 0:
            raise ValueError("winding must be nonzero")


@dataclass(frozen=True)
class RootOrbit:
    """The constants at phases ``(stride*j mod order)/order`` for ``start <= j < stop``."""

    order: int
    start: int
    stop: int
    stride: int = 1
    domain = None
    codomain = Space.CIRCLE

    def __post_init__(self) -> None:
        if self.order < 1 or not 0 <= self.start < self.stop:
            raise ValueError("invalid orbit range")
        object.__setattr__(self, "stride", self.stride % self.order)

    @property
    def count(self) -> int:
        return self.stop - self.start

    def phases(self) -> Iterator[Fraction]:
        for j in range(self.start, self.stop):
            yield Fraction((self.stride * j) % self.order, self.order)

    def points(self) -> Iterator[ConstPoint]:
        for ph in self.phases():
            yield ConstPoint(SpectrumPoint.circle(ph))


SpectralMap = Union[ConstPoint, IdentityInterval, CircleWinding, ExpWinding, RootOrbit]
CONSTANT_MAPS = (ConstPoint, RootOrbit)


def is_constant_map(lam: SpectralMap) -> bool:
    return isinstance(lam, CONSTANT_MAPS)


def _phase_times(coord, v: int):
    return coord * v


def compose_maps(outer: SpectralMap, inner: SpectralMap) -> SpectralMap:
    """``outer o inner``: first ``inner`` (target of the later step), then ``outer``.

    Constants absorb everything; a constant pushed through a winding map is
    recomputed exactly on its rational phase.
    """
    if isinstance(outer, CONSTANT_MAPS):
        return outer
    if inner.codomain is not outer.domain:
        raise BlockMismatch(f"cannot compose {outer} after {inner}")
    if isinstance(outer, IdentityInterval):
        return inner
    if isinstance(outer, CircleWinding):
        v = outer.winding
        if isinstance(inner, CircleWinding):
            return CircleWinding(v * inner.winding)
        if isinstance(inner, ExpWinding):
            return ExpWinding(v * inner.winding)
        if isinstance(inner, ConstPoint):
            return ConstPoint(SpectrumPoint.circle(_phase_times(inner.point.coordinate, v)))
        if isinstance(inner, RootOrbit):
            return RootOrbit(inner.order, inner.start, inner.stop, inner.stride * v)
    if isinstance(outer, ExpWinding):
        if isinstance(inner, IdentityInterval):
            return outer
        if isinstance(inner, ConstPoint):
            return ConstPoint(SpectrumPoint.circle(_phase_times(inner.point.coordinate, outer.winding)))
    raise BlockMismatch(f"cannot compose {outer} after {inner}")  # pragma: no cover


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    map: SpectralMap
    mult: int = 1

    def __post_init__(self) -> None:
        if self.mult < 1:
            raise ValueError("multiplicity must be positive")

    @property
    def length(self) -> int:
        return self.mult * self.map.count


_TYPE_RANK = {IdentityInterval: 0, CircleWinding: 1, ExpWinding: 2, ConstPoint: 3, RootOrbit: 4}
_EXPAND_LIMIT = 4096


def _sort_key(lam: SpectralMap):
    rank = _TYPE_RANK[type(lam)]
    if isinstance(lam, ConstPoint):
        return (rank, lam.point.space.value, float(lam.point.coordinate), str(lam.point.coordinate))
    if isinstance(lam, RootOrbit):
        return (rank, "", float(lam.order), str((lam.order, lam.stride, lam.start, lam.stop)))
    if isinstance(lam, (CircleWinding, ExpWinding)):
        return (rank, "", float(lam.winding), "")
    return (rank, "", 0.0, "")


class Pattern:
    """An ordered multiset of spectral maps, stored as multiplicity terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term | SpectralMap] = ()) -> None:
        ts = tuple(t if isinstance(t, Term) else Term(t) for t in terms)
        object.__setattr__(self, "terms", ts)

    def __setattr__(self, name, value):
        raise AttributeError("Pattern is immutable")

    def __len__(self) -> int:
        return sum(t.length for t in self.terms)

    @property
    def length(self) -> int:
        return len(self)

    def merged(self) -> "Pattern":
        """Merge identical maps, keeping first-appearance order."""
        acc: dict[SpectralMap, int] = {}
        for t in self.terms:
            acc[t.map] = acc.get(t.map, 0) + t.mult
        return Pattern(Term(m, k) for m, k in acc.items())

    def canonical(self) -> tuple[tuple[SpectralMap, int], ...]:
        """Order-free normal form: small orbits expanded, equal maps merged, sorted."""
        acc: dict[SpectralMap, int] = {}
        for t in self.terms:
            if isinstance(t.map, RootOrbit) and t.map.count <= _EXPAND_LIMIT:
                for pt in t.map.points():
                    acc[pt] = acc.get(pt, 0) + t.mult
            else:
                acc[t.map] = acc.get(t.map, 0) + t.mult
        return tuple(sorted(acc.items(), key=lambda kv: _sort_key(kv[0])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def same_order(self, other: "Pattern") -> bool:
        return self.terms == other.terms

    def expand(self) -> Iterator[SpectralMap]:
        """Every entry of the pattern, orbits unrolled (small patterns only)."""
        for t in self.terms:
            items = list(t.map.points()) if isinstance(t.map, RootOrbit) else [t.map]
            for _ in range(t.mult):
                yield from items

    def compose(self, inner: "Pattern") -> "Pattern":
        """Pattern of ``outer o inner`` for all pairs, ``self`` being outer."""
        out: list[Term] = []
        for a in self.terms:
            for b in inner.terms:
                lam = compose_maps(a.map, b.map)
                mult = a.mult * b.mult
                if is_constant_map(a.map):
                    mult *= b.map.count
                out.append(Term(lam, mult))
        return Pattern(out).merged()

    def __add__(self, other: "Pattern") -> "Pattern":
        return Pattern(self.terms + other.terms)

    def __repr__(self) -> str:
        return f"Pattern({list(self.terms)!r})"


@dataclass(frozen=True)
class PartialHom:
    """The component of a step from one source block to one target block."""

    source: Block
    target: Block
    pattern: Pattern

    def __post_init__(self) -> None:
        if len(self.pattern) == 0:
            raise ValueError("a present part must have a nonempty pattern")
        for t in self.pattern.terms:
            lam = t.map
            if lam.codomain is not self.source.space:
                raise BlockMismatch(f"{lam} does not land in {self.source.space.value}")
            if lam.domain is not None and lam.domain is not self.target.space:
                raise BlockMismatch(f"{lam} is not defined on {self.target.space.value}")

    @property
    def rank(self) -> int:
        return len(self.pattern) * self.source.size


def identity_map(space: Space) -> SpectralMap:
    if space is Space.INTERVAL:
        return IdentityInterval()
    if space is Space.CIRCLE:
        return CircleWinding(1)
    return ConstPoint(SpectrumPoint.point())


@dataclass(frozen=True, eq=False)
class StepHom:
    """A homomorphism between direct sums of blocks, by its parts ``(i, j)``."""

    source: tuple[Block, ...]
    target: tuple[Block, ...]
    parts: Mapping[tuple[int, int], PartialHom]
    unital: bool = True
    source_stage: int | None = None
    target_stage: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "parts", dict(sorted(self.parts.items())))
        for (i, j), part in self.parts.items():
            if not (0 <= i < len(self.source) and 0 <= j < len(self.target)):
                raise BlockMismatch(f"part {(i, j)} outside the block ranges")
            if part.source != self.source[i] or part.target != self.target[j]:
                raise BlockMismatch(f"part {(i, j)} disagrees with the block lists")
        if self.unital:
            for j, blk in enumerate(self.target):
                used = sum(p.rank for (_, jj), p in self.parts.items() if jj == j)
                if used != blk.size:
                    raise BlockMismatch(f"column {j} uses rank {used}, block size {blk.size}")

    @classmethod
    def identity(cls, blocks: Sequence[Block], stage: int | None = None) -> "StepHom":
        parts = {(i, i): PartialHom(b, b, Pattern([identity_map(b.space)])) for i, b in enumerate(blocks)}
        return cls(tuple(blocks), tuple(blocks), parts, True, stage, stage)

    def part(self, i: int, j: int) -> PartialHom | None:
        return self.parts.get((i, j))

    def column(self, j: int) -> list[tuple[int, PartialHom]]:
        return [(i, p) for (i, jj), p in self.parts.items() if jj == j]

    def row(self, i: int) -> list[tuple[int, PartialHom]]:
        return [(j, p) for (ii, j), p in self.parts.items() if ii == i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepHom):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        if self.parts.keys() != other.parts.keys():
            return False
        return all(self.parts[k].pattern == other.parts[k].pattern for k in self.parts)

    __hash__ = None  # type: ignore[assignment]


def multiplicity_matrix(h: StepHom) -> list[list[int]]:
    """Entry ``(i, j)`` is the number of spectral maps in part ``(i, j)``."""
    m = [[0] * len(h.target) for _ in h.source]
    for (i, j), p in h.parts.items():
        m[i][j] = len(p.pattern)
    return m


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact integer matrix product."""
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)] for i in range(len(a))]


def compose(g: StepHom, f: StepHom) -> StepHom:
    """``g o f``: apply ``f`` first. Requires ``g.source == f.target``."""
    if tuple(g.source) != tuple(f.target):
        raise BlockMismatch("g.source does not match f.target")
    if f.target_stage is not None and g.source_stage is not None and f.target_stage != g.source_stage:
        raise BlockMismatch("stage labels do not chain")
    acc: dict[tuple[int, int], list[Term]] = {}
    for (i, k), pf in f.parts.items():
        for j, pg in g.row(k):
            acc.setdefault((i, j), []).extend(pf.pattern.compose(pg.pattern).terms)
    parts = {
        (i, j): PartialHom(f.source[i], g.target[j], Pattern(ts).merged()) for (i, j), ts in acc.items()
    }
    return StepHom(f.source, g.target, parts, f.unital and g.unital, f.source_stage, g.target_stage)


# ---------------------------------------------------------------------------
# parameters and the two systems
# ---------------------------------------------------------------------------


def default_t_seq(count: int) -> tuple[SpectrumPoint, ...]:
    return tuple(SpectrumPoint.interval(van_der_corput(n)) for n in range(1, count + 1))


def default_z_seq(count: int) -> tuple[SpectrumPoint, ...]:
    return tuple(SpectrumPoint.circle(van_der_corput(n)) for n in range(1, count + 1))


@dataclass(frozen=True)
class SystemParams:
    """Parameters shared by the systems A and B.

    Only ``k_seq[:stage_count - 1]``, ``t_seq[:stage_count - 1]`` and
    ``z_seq[:stage_count - 1]`` are used (one entry per step).
    """

    k_seq: tuple[int, ...]
    t_seq: tuple[SpectrumPoint, ...]
    z_seq: tuple[SpectrumPoint, ...]
    stage_count: int
    grid_resolution: int = 4096

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_seq", tuple(int(k) for k in self.k_seq))
        object.__setattr__(self, "t_seq", tuple(self.t_seq))
        object.__setattr__(self, "z_seq", tuple(self.z_seq))
        steps = self.stage_count - 1
        if self.stage_count < 1:
            raise InvalidParams("stage_count must be at least 1")
        if self.grid_resolution < 2:
            raise InvalidParams("grid_resolution must be at least 2")
        if len(self.k_seq) < steps or len(self.t_seq) < steps or len(self.z_seq) < steps:
            raise InvalidParams("k_seq, t_seq and z_seq need one entry per step")
        ks = self.k_seq
        if ks and ks[0] < 2:
            raise InvalidParams("k_1 must be at least 2")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise InvalidParams("k_seq must be strictly increasing")
        for t in self.t_seq[:steps]:
            if t.space is not Space.INTERVAL:
                raise InvalidParams("t_seq must hold interval points")
        for z in self.z_seq[:steps]:
            if z.space is not Space.CIRCLE:
                raise InvalidParams("z_seq must hold circle points")
        for n in range(1, steps + 1):
            for m in range(n + 1, steps + 1):
                if self.tail_sum(n, m) > Fraction(1, 4):
                    raise InvalidParams(f"tail condition fails for n={n}, m={m}: {self.tail_sum(n, m)}")

    @classmethod
    def default(cls, stage_count: int = 6, grid_resolution: int = 4096, k_seq: Sequence[int] | None = None) -> "SystemParams":
        steps = max(stage_count - 1, 0)
        ks = tuple(k_seq) if k_seq is not None else tuple(range(2, steps + 2))
        return cls(ks, default_t_seq(steps), default_z_seq(steps), stage_count, grid_resolution)

    @property
    def steps(self) -> int:
        return self.stage_count - 1

    @property
    def primes(self) -> tuple[int, ...]:
        return first_primes(max(self.stage_count, 1))

    def p(self, n: int) -> int:
        return self.primes[n - 1]

    def k(self, n: int) -> int:
        return self.k_seq[n - 1]

    def tail_sum(self, n: int, m: int) -> Fraction:
        """``sum_{j=m}^{stage_count-1} p_n^(-k_j)``; empty sums give 0."""
        p = first_primes(n)[-1]
        return sum((Fraction(1, p ** self.k_seq[j - 1]) for j in range(m, self.stage_count)), Fraction(0))


def stage_sizes(params: SystemParams) -> list[list[int]]:
    """Block sizes of every stage by the recursion; stage 1 is ``[1]``."""
    sizes = [[1]]
    for n in range(1, params.stage_count):
        prev = sizes[-1]
        k = params.k(n)
        nxt = [prev[i] * params.p(i + 1) ** k for i in range(n - 1)]
        top = prev[n - 1] * params.p(n) ** k
        sizes.append(nxt + [top, top])
    return sizes


def stage_blocks(params: SystemParams) -> list[tuple[Block, ...]]:
    out = []
    for n, sz in enumerate(stage_sizes(params), start=1):
        spaces = [Space.INTERVAL] * (n - 1) + [Space.CIRCLE]
        out.append(tuple(Block(s, sp) for s, sp in zip(sz, spaces)))
    return out


def winding_length(params: SystemParams, n: int) -> int:
    """``l_n = 4^n [n+1, n]``, the winding number of B's twisted part at step n."""
    sizes = stage_sizes(params)
    return 4**n * sizes[n][n - 1]


def _build_step(params: SystemParams, blocks, n: int, variant: str) -> StepHom:
    src, tgt = blocks[n - 1], blocks[n]
    k = params.k(n)
    t_n = params.t_seq[n - 1]
    z_n = params.z_seq[n - 1]
    parts: dict[tuple[int, int], PartialHom] = {}
    for i in range(n - 1):
        p = params.p(i + 1) ** k
        pat = Pattern([Term(IdentityInterval(), p - 1), Term(ConstPoint(t_n))])
        parts[(i, i)] = PartialHom(src[i], tgt[i], pat)
    pn = params.p(n) ** k
    l = pn - 1
    parts[(n - 1, n)] = PartialHom(src[n - 1], tgt[n], Pattern([Term(CircleWinding(1)), Term(ConstPoint(z_n), pn - 1)]))
    if variant == "A":
        pat = Pattern([ExpWinding(1), ExpWinding(-1), RootOrbit(l, 1, l)])
    else:
        pat = Pattern([ExpWinding(winding_length(params, n)), RootOrbit(l, 0, l)])
    parts[(n - 1, n - 1)] = PartialHom(src[n - 1], tgt[n - 1], pat)
    return StepHom(src, tgt, parts, True, n, n + 1)


class InductiveSystem:
    """A finite piece of an inductive limit: stages 1..stage_count and the steps between them."""

    def __init__(self, name: str, params: SystemParams, stages: Sequence[tuple[Block, ...]], steps: Sequence[StepHom]) -> None:
        if len(steps) != len(stages) - 1:
            raise BlockMismatch("need one step between consecutive stages")
        for n, h in enumerate(steps, start=1):
            if h.source != tuple(stages[n - 1]) or h.target != tuple(stages[n]) or not h.unital:
                raise BlockMismatch(f"step {n} does not map stage {n} unitally into stage {n + 1}")
        self.name = name
        self.params = params
        self.stages = tuple(tuple(s) for s in stages)
        self.steps = tuple(steps)
        self._homs: dict[tuple[int, int], StepHom] = {}

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def blocks(self, n: int) -> tuple[Block, ...]:
        self._check_stage(n)
        return self.stages[n - 1]

    def step(self, n: int) -> StepHom:
        """The connecting map from stage n to stage n+1."""
        if not 1 <= n < self.stage_count:
            raise StageOutOfRange(f"no step {n}")
        return self.steps[n - 1]

    def hom(self, n: int, m: int) -> StepHom:
        """The composite map from stage n to stage m (identity when n == m)."""
        self._check_stage(n)
        self._check_stage(m)
        if m < n:
            raise StageOutOfRange("m must be at least n")
        key = (n, m)
        if key not in self._homs:
            if n == m:
                h = StepHom.identity(self.stages[n - 1], n)
            elif m == n + 1:
                h = self.steps[n - 1]
            else:
                h = compose(self.steps[m - 2], self.hom(n, m - 1))
            self._homs[key] = h
        return self._homs[key]

    def _check_stage(self, n: int) -> None:
        if not 1 <= n <= self.stage_count:
            raise StageOutOfRange(f"stage {n} outside 1..{self.stage_count}")

    def __repr__(self) -> str:
        return f"InductiveSystem({self.name!r}, stages={self.stage_count})"


def _build(params: SystemParams, variant: str) -> InductiveSystem:
    blocks = stage_blocks(params)
    steps = [_build_step(params, blocks, n, variant) for n in range(1, params.stage_count)]
    return InductiveSystem(variant, params, blocks, steps)


def build_system_A(params: SystemParams) -> InductiveSystem:
    """The system whose generator images have constant determinant on interval blocks."""
    return _build(params, "A")


def build_system_B(params: SystemParams) -> InductiveSystem:
    """The twisted system: part (n, n) of step n winds ``l_n`` times."""
    return _build(params, "B")


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Projection:
    """A projection class in a stage, by its rank in each block."""

    stage: int | None
    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if any(r < 0 for r in self.ranks):
            raise ValueError("ranks must be nonnegative")

    @classmethod
    def unit(cls, blocks: Sequence[Block], stage: int | None = None) -> "Projection":
        return cls(stage, tuple(b.size for b in blocks))

    @classmethod
    def zero(cls, blocks: Sequence[Block], stage: int | None = None) -> "Projection":
        return cls(stage, (0,) * len(blocks))

    def fits(self, blocks: Sequence[Block]) -> bool:
        return len(self.ranks) == len(blocks) and all(r <= b.size for r, b in zip(self.ranks, blocks))

    def __le__(self, other: "Projection") -> bool:
        return len(self.ranks) == len(other.ranks) and all(a <= b for a, b in zip(self.ranks, other.ranks))

    def __sub__(self, other: "Projection") -> "Projection":
        if not other <= self:
            raise ValueError("difference of projections needs other <= self")
        return Projection(self.stage, tuple(a - b for a, b in zip(self.ranks, other.ranks)))


def push_ranks(h: StepHom, ranks: Sequence[int]) -> tuple[int, ...]:
    if len(ranks) != len(h.source):
        raise BlockMismatch("rank vector does not match the source blocks")
    out = [0] * len(h.target)
    for (i, j), p in h.parts.items():
        out[j] += len(p.pattern) * ranks[i]
    return tuple(out)


def corner_unit_image(sys: InductiveSystem, n: int, m: int) -> Projection:
    """Image at stage m of the unit of the circle block of stage n."""
    if not 1 <= n <= m <= sys.stage_count:
        raise StageOutOfRange(f"need 1 <= n <= m <= {sys.stage_count}")
    blocks = sys.blocks(n)
    ranks = [0] * len(blocks)
    ranks[n - 1] = blocks[n - 1].size
    return Projection(m, push_ranks(sys.hom(n, m), ranks))
