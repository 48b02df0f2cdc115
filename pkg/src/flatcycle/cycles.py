"""Finite 0-dimensional cycles and 1-chains in the cube [-1, 1]^n.

A :class:`ZeroCycle` is a finite signed atomic measure with zero total
weight; a :class:`OneChain` is a finite weighted sum of oriented segments.
Together with :func:`boundary` and :func:`cone` they are the finite
specialization of 0- and 1-dimensional currents used by every other module.

Two arithmetic modes are supported.  In ``"rational"`` mode coordinates and
weights are :class:`fractions.Fraction` and all cancellation is exact; in
``"float"`` mode they are binary floats and the zero-sum condition is checked
to a relative tolerance.  Euclidean lengths are always computed in floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import ChiNonZero, DimensionMismatch, OutOfCube

Number = Union[Fraction, float]
Point = tuple

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

#: coordinates may overshoot the cube by this much before OutOfCube is raised
CUBE_SLACK = 1e-12
#: float-mode tolerance on |sum of weights| relative to the total mass
CHI_RTOL = 1e-12


def coerce(value, mode: str) -> Number:
    """Convert a number (or a ``"p/q"`` string) to the scalar type of ``mode``."""
    if mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r}")
            return Fraction(value)
        return Fraction(value)
    if mode == FLOAT:
        if isinstance(value, str):
            return float(Fraction(value.strip()))
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite value {value!r}")
        return out
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def dist(x: Point, y: Point) -> float:
    """Euclidean distance, evaluated in floats."""
    return math.dist([float(c) for c in x], [float(c) for c in y])


def dist_l1(x: Point, y: Point) -> float:
    return float(sum(abs(float(a) - float(b)) for a, b in zip(x, y)))


def _clamp_coord(c, mode):
    if c > 1:
        return coerce(1, mode)
    if c < -1:
        return coerce(-1, mode)
    return c


def _as_point(coords, n: int, mode: str) -> Point:
    pt = tuple(coerce(c, mode) for c in coords)
    if len(pt) != n:
        raise DimensionMismatch(f"point {coords!r} has {len(pt)} coordinates, expected {n}")
    return pt


def _check_in_cube(pt: Point, mode: str) -> Point:
    for c in pt:
        if abs(c) > 1 + CUBE_SLACK:
            raise OutOfCube(f"point {tuple(float(v) for v in pt)} lies outside [-1,1]^n; clamp first")
    return tuple(_clamp_coord(c, mode) for c in pt)


def _chi_ok(weights: Iterable[Number], mode: str) -> bool:
    ws = list(weights)
    total = sum(ws, coerce(0, mode))
    if mode == RATIONAL:
        return total == 0
    return abs(total) <= CHI_RTOL * sum(abs(w) for w in ws)


@dataclass(frozen=True)
class ZeroCycle:
    """Signed atomic measure on the cube with zero total weight.

    ``atoms`` is kept sorted by point, with no duplicate points and no zero
    weights, so structural equality is cycle equality.  Build instances with
    :func:`make_cycle` rather than directly.
    """

    n: int
    atoms: tuple = ()
    mode: str = FLOAT

    @property
    def points(self) -> list:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> list:
        return [w for _, w in self.atoms]

    def weight(self, x: Point) -> Number:
        return self.as_dict().get(tuple(x), coerce(0, self.mode))

    def as_dict(self) -> dict:
        return dict(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __bool__(self) -> bool:
        return bool(self.atoms)

    @property
    def mass(self) -> Number:
        return mass(self)

    @property
    def chi(self) -> Number:
        return chi(self)

    def positive_part(self) -> list:
        return [(p, w) for p, w in self.atoms if w > 0]

    def negative_part(self) -> list:
        return [(p, -w) for p, w in self.atoms if w < 0]

    def as_mode(self, mode: str) -> "ZeroCycle":
        if mode == self.mode:
            return self
        return make_cycle(self.n, self.atoms, mode=mode)

    def __add__(self, other: "ZeroCycle") -> "ZeroCycle":
        return combine(1, self, 1, other)

    def __sub__(self, other: "ZeroCycle") -> "ZeroCycle":
        return combine(1, self, -1, other)

    def __neg__(self) -> "ZeroCycle":
        return combine(-1, self, 0, self)

    def __mul__(self, lam) -> "ZeroCycle":
        return combine(lam, self, 0, self)

    __rmul__ = __mul__


def _build(n: int, acc: Mapping, mode: str, check_chi: bool) -> ZeroCycle:
    items = []
    for pt, w in acc.items():
        if w != 0:
            items.append((pt, w))
    items.sort(key=lambda a: a[0])
    if check_chi and not _chi_ok((w for _, w in items), mode):
        total = sum((w for _, w in items), coerce(0, mode))
        raise ChiNonZero(f"weights sum to {float(total)!r}, not 0")
    return ZeroCycle(n=n, atoms=tuple(items), mode=mode)


def make_cycle(n: int, atoms: Iterable = (), mode: str = FLOAT) -> ZeroCycle:
    """Build a cycle from ``(point, weight)`` pairs.

    Duplicate points are merged by summing weights and zero weights are
    dropped.  Points may overshoot the cube by at most ``CUBE_SLACK`` (they
    are then clamped).

    Raises
    ------
    DimensionMismatch
        a point does not have ``n`` coordinates.
    OutOfCube
        a coordinate exceeds [-1, 1] by more than the slack.
    ChiNonZero
        the weights do not sum to zero (exactly in rational mode, to
        ``CHI_RTOL`` relative in float mode).
    """
    if n < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {n}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    acc: dict = {}
    zero = coerce(0, mode)
    for coords, w in atoms:
        pt = _check_in_cube(_as_point(coords, n, mode), mode)
        acc[pt] = acc.get(pt, zero) + coerce(w, mode)
    return _build(n, acc, mode, check_chi=True)


def zero_cycle(n: int, mode: str = FLOAT) -> ZeroCycle:
    return ZeroCycle(n=n, atoms=(), mode=mode)


def embed_free(n: int, points_with_weights: Iterable = (), mode: str = FLOAT) -> ZeroCycle:
    """Map a finite combination of Dirac functionals to a cycle.

    ``sum theta_i delta_{x_i}`` goes to ``sum theta_i [[x_i]] - (sum theta_i) [[0]]``,
    the boundary of the cone from the origin; the result has zero total
    weight by construction.
    """
    pw = [(_as_point(x, n, mode), coerce(w, mode)) for x, w in points_with_weights]
    total = sum((w for _, w in pw), coerce(0, mode))
    origin = tuple(coerce(0, mode) for _ in range(n))
    return make_cycle(n, pw + [(origin, -total)], mode=mode)


def _atoms_of(m) -> list:
    if isinstance(m, ZeroCycle):
        return list(m.atoms)
    return [(tuple(p), w) for p, w in m]


def chi(m) -> Number:
    """Augmentation: total weight of a cycle or of a raw list of atoms."""
    atoms = _atoms_of(m)
    if not atoms:
        return 0 if not isinstance(m, ZeroCycle) else coerce(0, m.mode)
    total = atoms[0][1] * 0
    for _, w in atoms:
        total += w
    return total


def mass(m) -> Number:
    """Mass: sum of |weights| for measures, sum of |coef| * length for chains."""
    if isinstance(m, OneChain):
        return m.mass
    atoms = _atoms_of(m)
    if not atoms:
        return 0 if not isinstance(m, ZeroCycle) else coerce(0, m.mode)
    total = abs(atoms[0][1]) * 0
    for _, w in atoms:
        total += abs(w)
    return total


def combine(alpha, t1: ZeroCycle, beta, t2: ZeroCycle) -> ZeroCycle:
    """Return ``alpha * t1 + beta * t2``.

    The result is rational only when both inputs are rational; scalars are
    coerced to the result mode.
    """
    if t1.n != t2.n:
        raise DimensionMismatch(f"cannot combine cycles in dimensions {t1.n} and {t2.n}")
    mode = RATIONAL if (t1.mode == RATIONAL and t2.mode == RATIONAL) else FLOAT
    a, b = coerce(alpha, mode), coerce(beta, mode)
    zero = coerce(0, mode)
    acc: dict = {}
    if a != 0:
        for p, w in t1.atoms:
            pt = tuple(coerce(c, mode) for c in p)
            acc[pt] = acc.get(pt, zero) + a * coerce(w, mode)
    if b != 0:
        for p, w in t2.atoms:
            pt = tuple(coerce(c, mode) for c in p)
            acc[pt] = acc.get(pt, zero) + b * coerce(w, mode)
    # float sums of two valid cycles can drift slightly past CHI_RTOL
    return _build(t1.n, acc, mode, check_chi=(mode == RATIONAL))


def clamp(m):
    """Project every point coordinate-wise onto [-1, 1].

    Accepts a :class:`ZeroCycle` (returned as a cycle, atoms re-merged) or a
    raw list of ``(point, weight)`` pairs (returned as such a list).
    """
    if isinstance(m, ZeroCycle):
        acc: dict = {}
        zero = coerce(0, m.mode)
        for p, w in m.atoms:
            pt = tuple(_clamp_coord(c, m.mode) for c in p)
            acc[pt] = acc.get(pt, zero) + w
        return _build(m.n, acc, m.mode, check_chi=False)
    out = []
    for p, w in m:
        out.append((tuple(min(1, max(-1, c)) for c in p), w))
    return out


@dataclass(frozen=True)
class Segment:
    """Oriented segment ``coef * [[a, b]]`` whose boundary is ``coef * ([[b]] - [[a]])``."""

    a: Point
    b: Point
    coef: Number

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DimensionMismatch("segment endpoints have different dimensions")
        if self.coef != 0 and tuple(self.a) == tuple(self.b):
            raise ValueError("degenerate segment with non-zero coefficient")

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    @property
    def mass(self) -> float:
        return abs(float(self.coef)) * self.length


@dataclass(frozen=True)
class OneChain:
    """Finite sum of weighted oriented segments (a polyhedral 1-current)."""

    n: int
    segments: tuple = ()
    mode: str = FLOAT

    def __post_init__(self):
        for s in self.segments:
            if len(s.a) != self.n:
                raise DimensionMismatch(f"segment in dimension {len(s.a)}, chain in {self.n}")

    @property
    def mass(self) -> float:
        return math.fsum(s.mass for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)


def make_chain(n: int, segments: Iterable, mode: str = FLOAT) -> OneChain:
    """Build a chain from ``Segment`` objects or ``(a, b, coef)`` triples; zero coefficients are dropped."""
    segs = []
    for s in segments:
        if not isinstance(s, Segment):
            a, b, c = s
            s = Segment(_as_point(a, n, mode), _as_point(b, n, mode), coerce(c, mode))
        else:
            s = Segment(_as_point(s.a, n, mode), _as_point(s.b, n, mode), coerce(s.coef, mode))
        if s.coef != 0:
            segs.append(s)
    return OneChain(n=n, segments=tuple(segs), mode=mode)


def boundary(s: OneChain) -> ZeroCycle:
    """Boundary of a chain, ``sum coef * ([[b]] - [[a]])``.

    The result always has zero total weight; in rational mode cancellation is
    exact.  Raises :class:`OutOfCube` if an endpoint leaves the cube.
    """
    mode = s.mode
    zero = coerce(0, mode)
    acc: dict = {}
    for seg in s.segments:
        a = _check_in_cube(tuple(coerce(c, mode) for c in seg.a), mode)
        b = _check_in_cube(tuple(coerce(c, mode) for c in seg.b), mode)
        c = coerce(seg.coef, mode)
        acc[b] = acc.get(b, zero) + c
        acc[a] = acc.get(a, zero) - c
    return _build(s.n, acc, mode, check_chi=(mode == RATIONAL))


def cone(t: ZeroCycle, a: Sequence) -> OneChain:
    """Cone over ``t`` with vertex ``a``: one segment ``a -> x_i`` of weight ``theta_i`` per atom.

    Because ``chi(t) = 0`` the boundary of the cone is ``t`` itself, and its mass
    is ``sum |theta_i| |x_i - a|``.
    """
    if not _chi_ok(t.weights, t.mode):
        raise ChiNonZero("cone construction needs a cycle with zero total weight")
    vertex = _check_in_cube(_as_point(a, t.n, t.mode), t.mode)
    segs = [Segment(vertex, p, w) for p, w in t.atoms if p != vertex]
    return OneChain(n=t.n, segments=tuple(segs), mode=t.mode)
