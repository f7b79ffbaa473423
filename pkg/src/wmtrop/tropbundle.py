"""Tropical data of line bundles on totally degenerate abeloid quotients.

A bundle is recorded by its valuation-level shadow: the lattice, an
integer matrix D giving the coordinates of sigma on the dual basis, and
the valuations v_i of the trivialization on the lattice generators.  The
induced symmetric form S = G^T D decides ampleness; the affine functions
z_m with slope D*a and constant given by the quadratic extension of the
v_i decide which hypercube models the bundle extends to; and on rank-1
quotients an explicit piecewise-affine witness f with integer slopes can
be constructed and verified cell by cell.

Only valuations are modeled.  Unit-level data (the actual trivializing
elements, frames, transition units) is discarded, so triviality tests
are necessary conditions only and are named accordingly.  The abelian
part of a non-degenerate quotient enters solely through the opaque
`abelian_part_ample` flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratlin import Matrix, _frac
from .troplattice import CellWidth, TropicalLattice, divides


class ModelUndefinedError(ValueError):
    """The requested cell width does not divide the lattice, so no model exists."""


class NoPLevelError(ValueError):
    """No refinement alpha/p^n works; carries the offending prime factors."""

    def __init__(self, offending_primes: tuple[int, ...]):
        self.offending_primes = offending_primes
        primes = ", ".join(str(p) for p in offending_primes)
        super().__init__(
            f"valuation denominators contain primes coprime to p ({primes}); "
            "choose a finer base width"
        )


@dataclass(frozen=True)
class AffineFunction:
    """u -> slope . u + constant on R^r."""

    slope: tuple[Fraction, ...]
    constant: Fraction

    def eval(self, u: Sequence) -> Fraction:
        if len(u) != len(self.slope):
            raise ValueError("point dimension mismatch")
        return sum((s * _frac(x) for s, x in zip(self.slope, u)), self.constant)


class BundleData:
    """(sigma matrix, trivialization valuations) over a fixed lattice basis.

    `sigma` holds the integer coordinates of sigma(m_j) on the dual
    basis; `chi_vals[i]` is the valuation of the trivialization at the
    i-th generator.  The induced form S = G^T sigma must be symmetric,
    which is checked at construction.
    """

    __slots__ = ("lattice", "sigma", "chi_vals", "abelian_part_ample")

    def __init__(
        self,
        lattice: TropicalLattice,
        sigma: Matrix,
        chi_vals: Sequence,
        abelian_part_ample: bool = True,
    ):
        r = lattice.rank
        if not (sigma.is_square() and sigma.rows == r):
            raise ValueError("sigma must be square of the lattice rank")
        if not sigma.is_integral():
            raise ValueError("sigma must have integer entries")
        chi = tuple(_frac(x) for x in chi_vals)
        if len(chi) != r:
            raise ValueError("one trivialization valuation per generator required")
        form = lattice.generators.transpose() * sigma
        if form != form.transpose():
            raise ValueError("induced bilinear form is not symmetric")
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "chi_vals", chi)
        object.__setattr__(self, "abelian_part_ample", bool(abelian_part_ample))

    def __setattr__(self, name, value):
        raise AttributeError("BundleData is immutable")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BundleData)
            and self.lattice == other.lattice
            and self.sigma == other.sigma
            and self.chi_vals == other.chi_vals
            and self.abelian_part_ample == other.abelian_part_ample
        )

    def __hash__(self) -> int:
        return hash((self.lattice, self.sigma, self.chi_vals, self.abelian_part_ample))

    def __repr__(self) -> str:
        return f"BundleData(rank {self.rank}, sigma {self.sigma!r}, chi {self.chi_vals})"


def form_matrix(b: BundleData) -> Matrix:
    """Symmetric form S = G^T sigma; S_ij is the pairing valuation of (m_i, sigma m_j)."""
    return b.lattice.generators.transpose() * b.sigma


def ample_check(b: BundleData) -> bool:
    """Positive definiteness of S by exact leading principal minors.

    Covers the torus part only; whether the abelian-part bundle is ample
    is the caller's concern (see `abelian_part_ample`).
    """
    s = form_matrix(b)
    return all(s.leading_minor(k).det() > 0 for k in range(1, b.rank + 1))


def chi_valuation(b: BundleData, a: Sequence[int]) -> Fraction:
    """Valuation of the trivialization at the lattice point sum(a_i m_i).

    Extends the generator valuations quadratically:
    sum a_i v_i + sum_{i<j} a_i a_j S_ij + sum_i C(a_i, 2) S_ii,
    which is the unique extension consistent with the pairing cocycle
    chi(m+m') = chi(m) chi(m') <m, sigma m'>.
    """
    if len(a) != b.rank:
        raise ValueError("coefficient vector length mismatch")
    if any(int(x) != x for x in a):
        raise ValueError("coefficients must be integers")
    coeffs = [int(x) for x in a]
    s = form_matrix(b)
    out = sum((c * v for c, v in zip(coeffs, b.chi_vals)), Fraction(0))
    for i in range(b.rank):
        out += Fraction(coeffs[i] * (coeffs[i] - 1), 2) * s[i, i]
        for j in range(i + 1, b.rank):
            out += coeffs[i] * coeffs[j] * s[i, j]
    return out


def z_affine(b: BundleData, a: Sequence[int]) -> AffineFunction:
    """Tropicalization of the translation isomorphism at lattice point a.

    Slope is the integer vector sigma * a; the constant is the
    trivialization valuation at a.
    """
    coeffs = [int(x) for x in a]
    slope = b.sigma.apply(coeffs)
    return AffineFunction(slope=slope, constant=chi_valuation(b, coeffs))


def tensor_power(b: BundleData, n: int) -> BundleData:
    """n-th tensor power: same lattice, n*sigma, n*chi valuations."""
    if n < 1:
        raise ValueError("tensor power must be positive")
    return BundleData(
        b.lattice,
        b.sigma.scale(n),
        tuple(n * v for v in b.chi_vals),
        b.abelian_part_ample,
    )


def extends_to(b: BundleData, alpha: CellWidth) -> bool:
    """Whether the bundle extends to the width-alpha model.

    Requires the model to exist (alpha divides the lattice).  The test is
    that every generator valuation is an integer multiple of alpha: that
    suffices for the whole lattice because the form entries S_ij already
    lie in alpha*Z whenever alpha divides the lattice and sigma is
    integral, so the quadratic extension stays in alpha*Z.
    """
    if not divides(alpha, b.lattice):
        raise ModelUndefinedError("alpha does not divide the lattice; no model at this width")
    a = alpha.alpha
    return all((v / a).denominator == 1 for v in b.chi_vals)


def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


def minimal_level(b: BundleData, alpha: CellWidth, p: int) -> int:
    """Smallest n >= 0 with the bundle extending to the width-alpha/p^n model.

    Exists iff each v_i/alpha has a p-power denominator; otherwise raises
    NoPLevelError carrying the offending prime factors.
    """
    if not divides(alpha, b.lattice):
        raise ModelUndefinedError("alpha does not divide the lattice; no model at this width")
    if p < 2:
        raise ValueError("p must be at least 2")
    level = 0
    bad: set[int] = set()
    for v in b.chi_vals:
        den = (v / alpha.alpha).denominator
        n = 0
        while den % p == 0:
            den //= p
            n += 1
        if den != 1:
            bad.update(_prime_factors(den))
        level = max(level, n)
    if bad:
        raise NoPLevelError(tuple(sorted(bad)))
    return level


@dataclass(frozen=True)
class TropicalSection:
    """Piecewise-affine witness on a rank-1 quotient.

    Slopes s_0..s_{k-1} on the cells [j*alpha, (j+1)*alpha] of one
    period, the value at 0, and the periodic extension data: crossing a
    period adds `slope_increment` to every slope and `value_increment`
    to the value at the left endpoint.
    """

    alpha: Fraction
    slopes: tuple[int, ...]
    base_value: Fraction
    slope_increment: int
    value_increment: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frac(self.alpha))
        object.__setattr__(self, "base_value", _frac(self.base_value))
        object.__setattr__(self, "value_increment", _frac(self.value_increment))
        if self.alpha <= 0:
            raise ValueError("cell width must be positive")
        if not self.slopes:
            raise ValueError("at least one cell per period required")
        if any(not isinstance(s, int) for s in self.slopes):
            raise ValueError("slopes must be integers")

    @property
    def period_cells(self) -> int:
        return len(self.slopes)

    @property
    def period(self) -> Fraction:
        return self.alpha * len(self.slopes)

    def slope_in_cell(self, j: int) -> int:
        t, i = divmod(j, len(self.slopes))
        return self.slopes[i] + t * self.slope_increment

    def corner_value(self, j: int) -> Fraction:
        """Value at the cell corner j*alpha, for any integer j."""
        t, i = divmod(j, len(self.slopes))
        val = self.base_value
        for lidx in range(i):
            val += self.slopes[lidx] * self.alpha
        if t:
            u0 = i * self.alpha
            lam = self.period
            val += t * (self.slope_increment * u0 + self.value_increment)
            val += Fraction(t * (t - 1), 2) * self.slope_increment * lam
        return val

    def eval(self, u) -> Fraction:
        u = _frac(u)
        j = math.floor(u / self.alpha)
        return self.corner_value(j) + self.slope_in_cell(j) * (u - j * self.alpha)


@dataclass(frozen=True)
class FaceTransition:
    """Data at a shared cell face: the valuation shadow of a transition unit."""

    position: Fraction
    left_slope: int
    right_slope: int
    slope_difference: int
    left_value: Fraction
    right_value: Fraction

    @property
    def value(self) -> Fraction:
        """Common value of the two affine pieces at the face (when continuous)."""
        return self.left_value

    @property
    def continuous(self) -> bool:
        return self.left_value == self.right_value


@dataclass(frozen=True)
class SectionReport:
    ok: bool
    failures: tuple[str, ...]
    faces: tuple[FaceTransition, ...]


def _rank1_generator_data(b: BundleData) -> tuple[Fraction, int, int, Fraction]:
    """(period, orientation, slope increment, value increment) for rank 1.

    The period is the positive generator of the valuation lattice; if the
    stored generator is negative, the data is re-expressed through the
    opposite lattice element so that one period step moves by +period.
    """
    if b.rank != 1:
        raise ValueError("rank-1 bundle required")
    g = b.lattice.generators[0, 0]
    sign = 1 if g > 0 else -1
    lam = abs(g)
    d_eff = sign * int(b.sigma[0, 0])
    v_eff = chi_valuation(b, (sign,))
    return lam, sign, d_eff, v_eff


def construct_f(b: BundleData, alpha: CellWidth) -> TropicalSection:
    """Canonical piecewise-affine witness on the rank-1 width-alpha model.

    The slopes over one period are integers summing to v/alpha and are
    distributed as evenly as possible, the leftmost cells absorbing the
    remainder.  Any other integer slope vector with the same sum is an
    equally valid witness and is accepted by verify_section.
    """
    if b.rank != 1:
        raise ValueError("explicit witnesses are only constructed for rank 1")
    if not extends_to(b, alpha):
        raise ModelUndefinedError(
            "bundle does not extend at this width; refine alpha (see minimal_level)"
        )
    lam, _, d_eff, v_eff = _rank1_generator_data(b)
    k_frac = lam / alpha.alpha
    assert k_frac.denominator == 1
    k = int(k_frac)
    total_frac = v_eff / alpha.alpha
    assert total_frac.denominator == 1
    total = int(total_frac)
    base = total // k
    rem = total - base * k
    slopes = tuple([base + 1] * rem + [base] * (k - rem))
    return TropicalSection(
        alpha=alpha.alpha,
        slopes=slopes,
        base_value=Fraction(0),
        slope_increment=d_eff,
        value_increment=v_eff,
    )


def verify_section(b: BundleData, f: TropicalSection) -> SectionReport:
    """Check a rank-1 witness cell by cell; failures are report content.

    Checks: integer slopes; agreement of adjacent affine pieces at every
    shared face over one period plus its translate (the valuation form of
    "transition units have absolute value 1"); and that crossing a period
    adds exactly the affine function z of the lattice generator, both in
    slope and in value.
    """
    lam, _, d_eff, v_eff = _rank1_generator_data(b)
    failures: list[str] = []
    if f.alpha * f.period_cells != lam:
        failures.append(
            f"period mismatch: {f.period_cells} cells of width {f.alpha} "
            f"do not tile a period of length {lam}"
        )
        return SectionReport(ok=False, failures=tuple(failures), faces=())
    for s in f.slopes:
        if not isinstance(s, int):
            failures.append(f"non-integer slope {s}")
    if f.slope_increment != d_eff:
        failures.append(
            f"periodicity (slope): increment per period is {f.slope_increment}, "
            f"the bundle requires {d_eff}"
        )
    if f.value_increment != v_eff:
        failures.append(
            f"periodicity (value): increment per period is {f.value_increment}, "
            f"the bundle requires {v_eff}"
        )
    slope_sum = sum(f.slopes) * f.alpha
    if slope_sum != f.value_increment:
        failures.append(
            f"periodicity: slopes sum to {slope_sum} over one period "
            f"but the value increment is {f.value_increment}"
        )
    k = f.period_cells
    faces = []
    for j in range(2 * k):
        pos = (j + 1) * f.alpha
        left_slope = f.slope_in_cell(j)
        right_slope = f.slope_in_cell(j + 1)
        left_value = f.corner_value(j) + left_slope * f.alpha
        right_value = f.corner_value(j + 1)
        faces.append(
            FaceTransition(
                position=pos,
                left_slope=left_slope,
                right_slope=right_slope,
                slope_difference=left_slope - right_slope,
                left_value=left_value,
                right_value=right_value,
            )
        )
        if left_value != right_value:
            failures.append(
                f"discontinuity at u={pos}: left piece gives {left_value}, "
                f"right piece gives {right_value}"
            )
    return SectionReport(ok=not failures, failures=tuple(failures), faces=tuple(faces))


def degree0_triviality_necessary(b: BundleData) -> bool:
    """Valuation-level necessary condition for a degree-0 rank-1 bundle to be trivial.

    True iff the generator valuation lies in period * Z.  Sufficiency
    would need the discarded unit-level data, so this is only one
    direction.
    """
    if b.rank != 1:
        raise ValueError("rank-1 bundle required")
    if not b.sigma.is_zero():
        raise ValueError("degree-0 (sigma = 0) bundle required")
    lam = abs(b.lattice.generators[0, 0])
    return (b.chi_vals[0] / lam).denominator == 1
