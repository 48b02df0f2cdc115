"""Seeded instance families: dipoles, harmonic truncations, random grid cycles."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cycles import FLOAT, RATIONAL, ZeroCycle, make_cycle
from .errors import BadParams
from .grid import GridCycle, GridSpec, make_grid_cycle

FAMILIES = ("dipoles", "harmonic", "grid-random")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _rand_coord(rng, mode, denom=16):
    if mode == RATIONAL:
        return Fraction(int(rng.integers(-denom, denom + 1)), denom)
    return float(rng.uniform(-1.0, 1.0))


def _rand_weight(rng, mode, denom=12):
    if mode == RATIONAL:
        v = 0
        while v == 0:
            v = int(rng.integers(-2 * denom, 2 * denom + 1))
        return Fraction(v, denom)
    return float(rng.uniform(-2.0, 2.0))


def random_cycle(n: int, atoms: int, seed=0, mode: str = FLOAT) -> ZeroCycle:
    """Cycle with up to ``atoms`` atoms at random points and random weights.

    The last weight balances the others so the total is exactly zero in
    rational mode; in float mode the balancing is exact up to rounding.
    """
    if atoms < 0 or n < 1:
        raise BadParams(f"need n >= 1 and atoms >= 0, got n={n}, atoms={atoms}")
    if atoms < 2:
        return make_cycle(n, (), mode)
    rng = _rng(seed)
    pts = [tuple(_rand_coord(rng, mode) for _ in range(n)) for _ in range(atoms)]
    ws = [_rand_weight(rng, mode) for _ in range(atoms - 1)]
    ws.append(-sum(ws, Fraction(0) if mode == RATIONAL else 0.0))
    return make_cycle(n, list(zip(pts, ws)), mode)


def dipole(a, b, weight=1, mode: str = FLOAT) -> ZeroCycle:
    """``weight * ([[b]] - [[a]])``."""
    return make_cycle(len(a), [(b, weight), (a, -weight)], mode)


def dipoles(n: int, count: int, seed=0, mode: str = FLOAT) -> list:
    """``count`` random unit dipoles ``[[b]] - [[a]]``."""
    if count < 0:
        raise BadParams("count must be non-negative")
    rng = _rng(seed)
    out = []
    for _ in range(count):
        a = tuple(_rand_coord(rng, mode) for _ in range(n))
        b = a
        while b == a:
            b = tuple(_rand_coord(rng, mode) for _ in range(n))
        out.append(dipole(a, b, 1, mode))
    return out


def harmonic(J: int, n: int = 1, mode: str = RATIONAL) -> ZeroCycle:
    """``sum_{j <= J} ([[j^-2 e_1]] - [[0]])``: mass ``2J``, G equal to ``sum j^-2``."""
    if J < 0 or n < 1:
        raise BadParams(f"need J >= 0 and n >= 1, got J={J}, n={n}")
    zero = (0,) * n
    atoms = []
    for j in range(1, J + 1):
        x = Fraction(1, j * j) if mode == RATIONAL else 1.0 / (j * j)
        atoms.append(((x,) + (0,) * (n - 1), 1))
        atoms.append((zero, -1))
    return make_cycle(n, atoms, mode)


def grid_random(n: int, k: int, atoms: int, seed=0, mode: str = RATIONAL, max_weight: int = 6) -> GridCycle:
    """Random grid cycle on at most ``atoms`` vertices with integer-over-``max_weight`` weights."""
    if atoms < 0:
        raise BadParams("atoms must be non-negative")
    spec = GridSpec(n, k)
    rng = _rng(seed)
    if atoms < 2:
        return make_grid_cycle(spec, {}, mode)
    theta = {}
    for _ in range(atoms - 1):
        idx = tuple(int(i) for i in rng.integers(-k, k + 1, size=n))
        w = Fraction(int(rng.integers(-max_weight, max_weight + 1)), max_weight)
        theta[idx] = theta.get(idx, 0) + w
    last = tuple(int(i) for i in rng.integers(-k, k + 1, size=n))
    theta[last] = theta.get(last, 0) - sum(theta.values(), Fraction(0))
    if mode == FLOAT:
        theta = {i: float(w) for i, w in theta.items()}
        # float rounding of the balancing weight
        drift = sum(theta.values())
        if drift and theta:
            j = max(theta, key=lambda i: abs(theta[i]))
            theta[j] -= drift
    return make_grid_cycle(spec, theta, mode)
