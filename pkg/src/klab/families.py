"""Seeded test-function families used by every norm certificate.

All members are Lipschitz-1 with sup-norm at most 1: dyadic hats, the ramp
``t -> t`` (the tent ``min(theta, 1 - theta)`` on the circle), ``sin`` and
``cos`` of frequency 1..8 divided by ``2 pi k``, and random piecewise-linear
functions with 16 pieces.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .spaces import GridFunction, Space, grid_nodes


class TestFunction(NamedTuple):
    name: str
    func: GridFunction


def dyadic_hats(space: Space, resolution: int, levels: int = 3) -> list[TestFunction]:
    x = grid_nodes(space, resolution)
    out = []
    for lev in range(1, levels + 1):
        w = 2.0**-lev
        centers = range(1, 2**lev) if space is Space.INTERVAL else range(2**lev)
        for i in centers:
            c = i * w
            d = np.abs(x - c)
            if space is Space.CIRCLE:
                d = np.minimum(d, 1.0 - d)
            out.append(TestFunction(f"hat[{lev},{i}]", GridFunction(space, np.maximum(0.0, w - d), resolution)))
    return out


def identity_ramp(space: Space, resolution: int) -> TestFunction:
    x = grid_nodes(space, resolution)
    if space is Space.CIRCLE:
        return TestFunction("tent", GridFunction(space, np.minimum(x, 1.0 - x), resolution))
    return TestFunction("ramp", GridFunction(space, x, resolution))


def trig_family(space: Space, resolution: int, max_freq: int = 8) -> list[TestFunction]:
    x = grid_nodes(space, resolution)
    out = []
    for k in range(1, max_freq + 1):
        a = 2 * np.pi * k
        out.append(TestFunction(f"sin{k}", GridFunction(space, np.sin(a * x) / a, resolution)))
        out.append(TestFunction(f"cos{k}", GridFunction(space, np.cos(a * x) / a, resolution)))
    return out


def random_lipschitz(space: Space, resolution: int, rng: np.random.Generator, count: int = 100, pieces: int = 16) -> list[TestFunction]:
    """Random piecewise-linear functions with Lipschitz constant and sup-norm at most 1."""
    x = grid_nodes(space, resolution)
    knots = np.arange(pieces + 1) / pieces
    out = []
    for r in range(count):
        if space is Space.CIRCLE:
            d = rng.uniform(-1.0, 1.0, pieces) / pieces
            d = 0.5 * (d - d.mean())
        else:
            d = rng.uniform(-1.0, 1.0, pieces) / pieces
        v = np.concatenate([[0.0], np.cumsum(d)])
        v -= 0.5 * (v.max() + v.min())
        half = 0.5 * (v.max() - v.min())
        v += rng.uniform(-(1.0 - half), 1.0 - half)
        out.append(TestFunction(f"rand{r}", GridFunction(space, np.interp(x, knots, v), resolution)))
    return out


def standard_family(space: Space, resolution: int, seed: int = 0, random_count: int = 100) -> list[TestFunction]:
    """The declared certificate family on one spectrum."""
    if space is Space.POINT:
        return [TestFunction(f"const{c}", GridFunction.constant(space, resolution, c)) for c in (-1.0, 0.0, 0.5, 1.0)]
    rng = np.random.default_rng([seed, 0 if space is Space.INTERVAL else 1])
    return (
        dyadic_hats(space, resolution)
        + [identity_ramp(space, resolution)]
        + trig_family(space, resolution)
        + random_lipschitz(space, resolution, rng, random_count)
    )


def random_grid_functions(space: Space, resolution: int, rng: np.random.Generator, count: int, scale: float = 1.0) -> list[GridFunction]:
    """Unstructured random node data (no Lipschitz control)."""
    n = 1 if space is Space.POINT else (resolution + 1 if space is Space.INTERVAL else resolution)
    return [GridFunction(space, scale * rng.standard_normal(n), resolution) for _ in range(count)]


def lipschitz_elements(spaces: Sequence[Space], resolution: int, seed: int, count: int = 100):
    """``count`` tuples of independent random Lipschitz-1 functions, one per space."""
    rng = np.random.default_rng([seed, 7])
    per_space = {
        sp: random_lipschitz(sp, resolution, rng, count) if sp is not Space.POINT else None
        for sp in sorted(set(spaces), key=lambda s: s.value)
    }
    out = []
    for r in range(count):
        funcs = []
        for b, sp in enumerate(spaces):
            if sp is Space.POINT:
                funcs.append(GridFunction.constant(sp, resolution, float(rng.uniform(-1, 1))))
            else:
                fam = per_space[sp]
                funcs.append(fam[(r + 37 * b) % count].func)
        out.append(tuple(funcs))
    return out


def family_elements(spaces: Sequence[Space], resolution: int, seed: int = 0, random_count: int = 100):
    """Direct-sum test elements: member k of each spectrum's family on every block.

    The number of elements is the size of the largest per-space family; shorter
    families wrap around.
    """
    fams = {sp: standard_family(sp, resolution, seed, random_count) for sp in sorted(set(spaces), key=lambda s: s.value)}
    count = max(len(f) for f in fams.values())
    out = []
    for k in range(count):
        names, funcs = [], []
        for sp in spaces:
            tf = fams[sp][k % len(fams[sp])]
            names.append(tf.name)
            funcs.append(tf.func)
        out.append(("/".join(dict.fromkeys(names)), tuple(funcs)))
    return out
