"""Exact K-theory bookkeeping for the block systems.

K_0 of a stage is recorded by integer rank vectors, K_1 by integer windings on
circle blocks. The limit group of the A/B systems is modeled by eventually
constant rational sequences ``(a_1, a_2, ...)`` with ``a_n`` in

    G_n = { m / (p_1^k_1 ... p_{n-1}^k_{n-1} p_n^l) : m in Z, l >= 0 }.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .aff import AffElement
from .arith import first_primes
from .errors import BlockMismatch
from .spaces import GridFunction, Space
from .systems import Block, CircleWinding, StepHom, push_ranks


@dataclass(frozen=True)
class K0Vector:
    stage: int | None
    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))

    def __add__(self, other: "K0Vector") -> "K0Vector":
        _same_len(self.ranks, other.ranks)
        return K0Vector(self.stage, tuple(a + b for a, b in zip(self.ranks, other.ranks)))

    def __sub__(self, other: "K0Vector") -> "K0Vector":
        _same_len(self.ranks, other.ranks)
        return K0Vector(self.stage, tuple(a - b for a, b in zip(self.ranks, other.ranks)))

    def is_positive(self) -> bool:
        return all(r >= 0 for r in self.ranks)

    def in_scale(self, blocks: Sequence[Block]) -> bool:
        return len(blocks) == len(self.ranks) and all(0 <= r <= b.size for r, b in zip(self.ranks, blocks))

    @classmethod
    def unit(cls, blocks: Sequence[Block], stage: int | None = None) -> "K0Vector":
        return cls(stage, tuple(b.size for b in blocks))


@dataclass(frozen=True)
class K1Vector:
    stage: int | None
    windings: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "windings", tuple(int(w) for w in self.windings))

    def __add__(self, other: "K1Vector") -> "K1Vector":
        _same_len(self.windings, other.windings)
        return K1Vector(self.stage, tuple(a + b for a, b in zip(self.windings, other.windings)))

    @classmethod
    def generator(cls, blocks: Sequence[Block], index: int, stage: int | None = None, power: int = 1) -> "K1Vector":
        if blocks[index].space is not Space.CIRCLE:
            raise BlockMismatch("K_1 generators live on circle blocks")
        w = [0] * len(blocks)
        w[index] = power
        return cls(stage, tuple(w))


def _same_len(a, b) -> None:
    if len(a) != len(b):
        raise BlockMismatch("vectors of different stages")


def _check_stage(h: StepHom, stage: int | None, length: int) -> None:
    if length != len(h.source):
        raise BlockMismatch("vector does not match the source blocks")
    if stage is not None and h.source_stage is not None and stage != h.source_stage:
        raise BlockMismatch(f"vector at stage {stage}, map starts at stage {h.source_stage}")


def k0_induced(h: StepHom, x: K0Vector) -> K0Vector:
    """``ranks' = M^T ranks`` with M the multiplicity matrix."""
    _check_stage(h, x.stage, len(x.ranks))
    return K0Vector(h.target_stage, push_ranks(h, x.ranks))


def k1_induced(h: StepHom, x: K1Vector) -> K1Vector:
    """Windings pushed through circle-to-circle winding maps; other maps contribute 0."""
    _check_stage(h, x.stage, len(x.windings))
    out = [0] * len(h.target)
    for (i, j), part in h.parts.items():
        if h.target[j].space is not Space.CIRCLE or h.source[i].space is not Space.CIRCLE:
            continue
        for t in part.pattern.terms:
            if isinstance(t.map, CircleWinding):
                out[j] += t.mult * t.map.winding * x.windings[i]
    return K1Vector(h.target_stage, tuple(out))


def rho(x: K0Vector, blocks: Sequence[Block], resolution: int) -> AffElement:
    """The constant ``rank_i / size_i`` on each block."""
    _same_len(x.ranks, blocks)
    return AffElement(
        x.stage,
        tuple(GridFunction.constant(b.space, resolution, r / b.size) for r, b in zip(x.ranks, blocks)),
    )


def rho_exact(x: K0Vector, blocks: Sequence[Block]) -> tuple[Fraction, ...]:
    _same_len(x.ranks, blocks)
    return tuple(Fraction(r, b.size) for r, b in zip(x.ranks, blocks))


# ---------------------------------------------------------------------------
# the limit group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class K0LimitElement:
    """``(coords[0], coords[1], ..., tail, tail, ...)``; position n is 1-based."""

    coords: tuple[Fraction, ...]
    tail: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        object.__setattr__(self, "tail", Fraction(self.tail))

    def at(self, n: int) -> Fraction:
        return self.coords[n - 1] if n <= len(self.coords) else self.tail

    def support(self, horizon: int) -> set[int]:
        return {n for n in range(1, horizon + 1) if self.at(n) != 0}

    def scaled(self, c: Fraction) -> "K0LimitElement":
        return K0LimitElement(tuple(a * c for a in self.coords), self.tail * c)

    def __add__(self, other: "K0LimitElement") -> "K0LimitElement":
        n = max(len(self.coords), len(other.coords))
        return K0LimitElement(tuple(self.at(i) + other.at(i) for i in range(1, n + 1)), self.tail + other.tail)

    def __sub__(self, other: "K0LimitElement") -> "K0LimitElement":
        return self + other.scaled(Fraction(-1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, K0LimitElement):
            return NotImplemented
        n = max(len(self.coords), len(other.coords))
        return self.tail == other.tail and all(self.at(i) == other.at(i) for i in range(1, n + 1))

    def __hash__(self) -> int:
        coords = list(self.coords)
        while coords and coords[-1] == self.tail:
            coords.pop()
        return hash((tuple(coords), self.tail))

    def is_positive(self, horizon: int) -> bool:
        return all(self.at(n) >= 0 for n in range(1, horizon + 1)) and self.tail >= 0


@dataclass(frozen=True)
class LimitGroup:
    """The dimension group of the A/B systems for a given ``k_seq``.

    Membership is decided at positions ``1..horizon`` with ``horizon = len(k_seq) + 1``;
    the tail is checked at every position from ``len(coords) + 1`` to the horizon.
    """

    k_seq: tuple[int, ...]
    primes: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_seq", tuple(self.k_seq))
        object.__setattr__(self, "primes", first_primes(len(self.k_seq) + 1))

    @property
    def horizon(self) -> int:
        return len(self.k_seq) + 1

    def stage_denominator(self, n: int) -> int:
        """``p_1^k_1 ... p_{n-1}^k_{n-1}``."""
        out = 1
        for j in range(1, n):
            out *= self.primes[j - 1] ** self.k_seq[j - 1]
        return out

    def in_G(self, n: int, q: Fraction) -> bool:
        d = Fraction(q).denominator
        p = self.primes[n - 1]
        while d % p == 0:
            d //= p
        return self.stage_denominator(n) % d == 0

    def contains(self, x: K0LimitElement) -> bool:
        return all(self.in_G(n, x.at(n)) for n in range(1, self.horizon + 1))

    def unit(self) -> K0LimitElement:
        return K0LimitElement((), Fraction(1))

    def generator(self, k: int) -> K0LimitElement:
        """``e_k = (0, .., 0, 1, 0, ...)`` with the 1 at position k."""
        return K0LimitElement(tuple(Fraction(int(n == k)) for n in range(1, k + 1)), Fraction(0))

    def from_stage(self, x: K0Vector, blocks: Sequence[Block]) -> K0LimitElement:
        """Embed a stage-n rank vector: ``a_i = rank_i/size_i`` for i < n, tail ``rank_n/size_n``."""
        r = rho_exact(x, blocks)
        return K0LimitElement(r[:-1], r[-1])

    def divisible_by_all_powers(self, x: K0LimitElement, k: int) -> bool:
        """Structural criterion: ``x`` in the group, supported on position k only, zero tail."""
        return self.contains(x) and x.tail == 0 and x.support(self.horizon) <= {k}

    def divisible_brute_force(self, x: K0LimitElement, k: int, max_power: int = 64) -> bool:
        """Check ``x / p_k^e`` lies in the group for every ``e <= max_power``."""
        if not self.contains(x):
            return False
        pk = self.primes[k - 1]
        return all(self.contains(x.scaled(Fraction(1, pk**e))) for e in range(1, max_power + 1))


def divisibility_support(x: K0LimitElement, k: int, group: LimitGroup) -> bool:
    """True iff ``x`` is divisible in the group by every power of ``p_k``."""
    return group.divisible_by_all_powers(x, k)


@dataclass(frozen=True)
class Implication:
    """One verified step of the fixed-generator argument."""

    generator: int
    claim: str
    lhs: str
    rhs: str
    holds: bool


def alpha0_identity_check(stage_count: int, k_seq: Sequence[int] | None = None, max_num: int = 48) -> list[Implication]:
    """Replay why an order-unit preserving order automorphism fixes every ``e_k``.

    For each generator ``e_k``: it is divisible by all powers of ``p_k``, so its
    image is ``t e_k``; positivity of ``1 - e_k`` and of ``1 - e_k / t`` gives
    ``t <= 1`` and ``1/t <= 1``. Candidate scalars ``t = a/b`` in ``G_k`` with
    ``a, b <= max_num`` are enumerated and only ``t = 1`` survives.
    """
    ks = tuple(k_seq) if k_seq is not None else tuple(range(2, stage_count + 1))
    group = LimitGroup(ks)
    unit = group.unit()
    out: list[Implication] = [Implication(0, "order unit fixed (hypothesis)", "alpha(1)", "1", True)]
    for k in range(1, min(stage_count, group.horizon) + 1):
        e = group.generator(k)
        out.append(Implication(k, "e_k in group", str(e.coords), "G~", group.contains(e)))
        out.append(Implication(k, "e_k divisible by all powers of p_k", "support", f"{{{k}}}", group.divisible_by_all_powers(e, k)))
        others = [j for j in range(1, group.horizon + 1) if j != k]
        out.append(
            Implication(
                k,
                "only multiples of e_k share that divisibility",
                "unit and e_j (j != k) divisible",
                "False",
                not group.divisible_by_all_powers(unit, k) and not any(group.divisible_by_all_powers(group.generator(j), k) for j in others),
            )
        )
        out.append(Implication(k, "1 - e_k positive", "min coordinate", "0", (unit - e).is_positive(group.horizon)))
        survivors = set()
        for a, b in product(range(1, max_num + 1), repeat=2):
            t = Fraction(a, b)
            if not group.in_G(k, t):
                continue
            image_ok = (unit - e.scaled(t)).is_positive(group.horizon)
            inverse_ok = (unit - e.scaled(1 / t)).is_positive(group.horizon)
            if image_ok and inverse_ok:
                survivors.add(t)
        out.append(Implication(k, "t <= 1 and 1/t <= 1 force t = 1", str(sorted(survivors)), "[Fraction(1, 1)]", survivors == {Fraction(1)}))
    return out
