"""Lattices in Q^r, hypercube covers, quotient models, and their towers.

A full-rank lattice in Q^r plus a cell width alpha encodes a formal
model of a rank-r torus: the cover of R^r by side-alpha hypercubes
indexed by Z^r.  When alpha divides the lattice (every generator
coordinate is an integer multiple of alpha), the translation action
descends and the quotient has finitely many special-fiber components.
Refining alpha by powers of a prime p produces a tower of models whose
cell indices project and pull back by simple residue arithmetic; those
index maps and the rank-1 special-fiber dual graphs (cycles of P^1s) are
what this module computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratlin import Matrix, _frac


class UnsupportedRankError(ValueError):
    """Operation implemented only for rank-1 quotient models."""


class InvalidResidueError(ValueError):
    """Cell index out of range for the model's component count."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CellWidth:
    """Positive rational side length of the hypercube cells."""

    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frac(self.alpha))
        if self.alpha <= 0:
            raise ValueError("cell width must be positive")

    def __truediv__(self, k) -> "CellWidth":
        return CellWidth(self.alpha / _frac(k))

    def __repr__(self) -> str:
        return f"CellWidth({self.alpha})"


class TropicalLattice:
    """Full-rank lattice in Q^r; generator vectors are the matrix columns."""

    __slots__ = ("rank", "generators")

    def __init__(self, generators: Matrix):
        if not generators.is_square():
            raise ValueError("generator matrix must be square")
        if generators.rows > 0 and generators.det() == 0:
            raise ValueError("generator matrix must have full rank")
        object.__setattr__(self, "rank", generators.rows)
        object.__setattr__(self, "generators", generators)

    def __setattr__(self, name, value):
        raise AttributeError("TropicalLattice is immutable")

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "TropicalLattice":
        r = len(columns)
        return cls(Matrix.from_columns(columns, r))

    def generator(self, i: int) -> tuple[Fraction, ...]:
        return self.generators.column(i)

    def covolume(self) -> Fraction:
        """|det| of the generator matrix (1 for rank 0)."""
        return abs(self.generators.det()) if self.rank > 0 else Fraction(1)

    def __eq__(self, other) -> bool:
        return isinstance(other, TropicalLattice) and self.generators == other.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    def __repr__(self) -> str:
        return f"TropicalLattice(rank {self.rank}, generators {self.generators!r})"


@dataclass(frozen=True)
class HypercubeModel:
    """Cover of R^r by closed hypercubes of side alpha, indexed by Z^r."""

    rank: int
    alpha: CellWidth

    def cell_index(self, u: Sequence) -> tuple[tuple[int, ...], tuple[bool, ...]]:
        if len(u) != self.rank:
            raise ValueError("point dimension mismatch")
        return cell_index(u, self.alpha)


@dataclass(frozen=True)
class QuotientModel:
    """Hypercube model at width alpha/p^level, quotiented by the lattice."""

    lattice: TropicalLattice
    alpha: CellWidth
    p: int
    level: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError("p must be prime")
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if not divides(self.width(), self.lattice):
            raise ValueError("alpha / p^level must divide the lattice")

    def width(self) -> CellWidth:
        return CellWidth(self.alpha.alpha / self.p**self.level)

    def at_level(self, level: int) -> "QuotientModel":
        return QuotientModel(self.lattice, self.alpha, self.p, level)


@dataclass(frozen=True)
class DualGraph:
    """Special-fiber components and their intersections, with multiplicity."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, multiplicity), u <= v

    def degree(self, v: int) -> int:
        # a loop contributes 2, matching a node of a component with itself
        out = 0
        for a, b, mult in self.edges:
            if a == v:
                out += mult
            if b == v:
                out += mult
        return out


# ---------------------------------------------------------------------------
# widths and cells


def _rational_gcd(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    num = math.gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def max_dividing_width(lat: TropicalLattice) -> CellWidth:
    """Largest alpha with every generator coordinate in alpha*Z.

    This is the gcd, taken over positive rationals, of all the generator
    coordinates; the lattice is full rank, so it is nonzero.
    """
    g = Fraction(0)
    for i in range(lat.rank):
        for x in lat.generators.column(i):
            g = _rational_gcd(g, x)
    return CellWidth(g)


def divides(alpha: CellWidth, lat: TropicalLattice) -> bool:
    """True iff the lattice is contained in alpha * Z^r."""
    a = alpha.alpha
    return all(
        (x / a).denominator == 1 for i in range(lat.rank) for x in lat.generators.column(i)
    )


def cell_index(u: Sequence, alpha: CellWidth) -> tuple[tuple[int, ...], tuple[bool, ...]]:
    """Cell of the width-alpha cover containing u, with boundary flags.

    Closed hypercubes overlap along faces; ties break by floor, and the
    boundary mask marks the coordinates where u sits on a shared face.
    """
    a = alpha.alpha
    scaled = [_frac(x) / a for x in u]
    e = tuple(math.floor(s) for s in scaled)
    boundary = tuple(s.denominator == 1 for s in scaled)
    return e, boundary


# ---------------------------------------------------------------------------
# quotient models


def quotient_components(q: QuotientModel) -> int:
    """Number of special-fiber components: covolume / (cell width)^rank."""
    beta = q.width().alpha
    count = q.lattice.covolume() / beta**q.lattice.rank
    assert count.denominator == 1 and count > 0
    return int(count)


def dual_graph(q: QuotientModel) -> DualGraph:
    """Cycle of components for a rank-1 model.

    One cell gives a single component meeting itself in a node (a loop);
    two cells give two components meeting twice (a doubled edge); k >= 3
    cells close up into a k-cycle.
    """
    if q.lattice.rank != 1:
        raise UnsupportedRankError("dual graphs are only computed for rank 1")
    k = quotient_components(q)
    vertices = tuple(range(k))
    if k == 1:
        edges = ((0, 0, 1),)
    elif k == 2:
        edges = ((0, 1, 2),)
    else:
        edges = tuple((j, (j + 1) % k, 1) for j in range(k))
        edges = tuple(sorted((min(a, b), max(a, b), m) for a, b, m in edges))
    return DualGraph(vertices, edges)


def tower_project(e: int, q: QuotientModel) -> int:
    """Send a level-(n+1) cell index down to level n (q sits at level n).

    On R-coordinates the covering map is the identity on cells, because
    scaling by p matches the width-alpha/p^(n+1) cell e with the
    width-alpha/p^n cell e; only the residue changes modulus.
    """
    if q.lattice.rank != 1:
        raise UnsupportedRankError("tower index maps are only computed for rank 1")
    count = quotient_components(q)
    if not 0 <= e < count * q.p:
        raise InvalidResidueError(f"cell index {e} invalid at level {q.level + 1}")
    return e % count


def tower_preimages(e: int, q: QuotientModel, steps: int = 1) -> list[int]:
    """The p^steps cell indices at level n+steps lying over cell e at level n."""
    if q.lattice.rank != 1:
        raise UnsupportedRankError("tower index maps are only computed for rank 1")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    count = quotient_components(q)
    if not 0 <= e < count:
        raise InvalidResidueError(f"cell index {e} invalid at level {q.level}")
    return [e + t * count for t in range(q.p**steps)]


# ---------------------------------------------------------------------------
# canonical descriptors


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _hnf_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of a full-rank square integer matrix.

    Upper triangular, positive diagonal, entries above each pivot reduced
    into [0, pivot): the unique canonical basis of the row span.
    """
    h = [list(r) for r in rows]
    n = len(h)
    for c in range(n):
        for i in range(c + 1, n):
            a, b = h[c][c], h[i][c]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            rc, ri = h[c], h[i]
            h[c] = [x * p + y * q for p, q in zip(rc, ri)]
            h[i] = [-(b // g) * p + (a // g) * q for p, q in zip(rc, ri)]
        if h[c][c] < 0:
            h[c] = [-x for x in h[c]]
        for i in range(c):
            f = h[i][c] // h[c][c]
            if f:
                h[i] = [a - f * b for a, b in zip(h[i], h[c])]
    return h


def lattice_hnf(lat: TropicalLattice) -> Matrix:
    """Canonical rational basis of the lattice: equal lattices compare equal."""
    if lat.rank == 0:
        return Matrix([], cols=0)
    scale = 1
    for i in range(lat.rank):
        for x in lat.generators.column(i):
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    rows = [[int(x * scale) for x in lat.generators.column(i)] for i in range(lat.rank)]
    hnf = _hnf_rows(rows)
    return Matrix([[Fraction(x, scale) for x in r] for r in hnf], cols=lat.rank)


@dataclass(frozen=True)
class ModelDescriptor:
    """Canonical invariants of a quotient model.

    Two towers built from the same lattice data, the same alpha, prime,
    and level have equal descriptors; this is the finite shadow of
    "isomorphic special fibers".
    """

    rank: int
    lattice_basis: tuple[tuple[Fraction, ...], ...]
    alpha: Fraction
    p: int
    level: int
    components: int

    def canonical_string(self) -> str:
        rows = ";".join(",".join(str(x) for x in r) for r in self.lattice_basis)
        return (
            f"rank={self.rank}|lattice=[{rows}]|alpha={self.alpha}"
            f"|p={self.p}|level={self.level}|components={self.components}"
        )


def descriptor(q: QuotientModel) -> ModelDescriptor:
    hnf = lattice_hnf(q.lattice)
    return ModelDescriptor(
        rank=q.lattice.rank,
        lattice_basis=hnf.row_tuples,
        alpha=q.alpha.alpha,
        p=q.p,
        level=q.level,
        components=quotient_components(q),
    )
