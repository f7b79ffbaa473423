"""Monodromy and weight filtrations of local Galois-representation data.

Inputs are explicit matrices: a nilpotent operator N, an invertible
Frobenius matrix Phi, the residue cardinality q, and a cohomological
degree i.  The module computes

* the canonical increasing filtration attached to N, centered at 0, the
  unique one with N Fil_j <= Fil_{j-2} and N^j an isomorphism between the
  j-th and (-j)-th graded pieces, via the closed formula
  Fil_j = sum over j1-j2=j of ker N^(j1+1) /\\ im N^(j2);
* the weight-space decomposition of Phi (generalized eigenspaces grouped
  by the power of q carried by the eigenvalue moduli) and the increasing
  filtration it spans;
* the comparison of the two filtrations: Fil_j must equal W_(i+j), and
  the Frobenius eigenvalues on each graded piece of the N-filtration
  must be pure of weight i+j.

Weight recognition is exact where possible (constant-term power-of-q
test, reciprocal functional equation) and finishes with a high-precision
check that every complex root has the right modulus; only that last step
is numeric, at 64+ decimal digits against a caller-adjustable tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .polyfactor import factor_rational
from .ratlin import (
    DimensionMismatch,
    Matrix,
    RatPoly,
    Subspace,
    apply_to_subspace,
    char_poly,
    contains,
    image,
    kernel,
    solve,
    subspace_intersect,
    subspace_sum,
)

#: default tolerance for the numeric root-modulus check: 10^-20
DEFAULT_TOL = Fraction(1, 10**20)


class NotUnipotentError(ValueError):
    """The matrix is not of the form identity + nilpotent."""


class NotNilpotentError(ValueError):
    """The matrix has a nonzero eigenvalue."""


class NotPureError(ValueError):
    """An irreducible factor is not pure of any integer weight."""

    def __init__(self, poly: RatPoly, q: int, reason: str):
        self.poly = poly
        self.q = q
        self.reason = reason
        super().__init__(f"{poly!r} is not weight-pure for q={q}: {reason}")


class NilpotentOperator:
    """Square matrix N with N^dim = 0, with its nilpotency index."""

    __slots__ = ("n_matrix", "nilpotency_index")

    def __init__(self, n_matrix: Matrix):
        if not n_matrix.is_square():
            raise DimensionMismatch("nilpotent operator must be square")
        d = n_matrix.rows
        power = Matrix.identity(d)
        index = 0
        for k in range(1, d + 1):
            power = power * n_matrix
            if power.is_zero():
                index = k
                break
        else:
            if d > 0:
                raise NotNilpotentError("matrix is not nilpotent")
        object.__setattr__(self, "n_matrix", n_matrix)
        object.__setattr__(self, "nilpotency_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("NilpotentOperator is immutable")

    @property
    def dimension(self) -> int:
        return self.n_matrix.rows

    def __eq__(self, other) -> bool:
        return isinstance(other, NilpotentOperator) and self.n_matrix == other.n_matrix

    def __hash__(self) -> int:
        return hash(self.n_matrix)

    def __repr__(self) -> str:
        return f"NilpotentOperator(dim {self.dimension}, index {self.nilpotency_index})"


class FrobeniusData:
    """Invertible Frobenius matrix together with the residue cardinality q."""

    __slots__ = ("phi_matrix", "q")

    def __init__(self, phi_matrix: Matrix, q: int):
        if not phi_matrix.is_square():
            raise DimensionMismatch("Frobenius matrix must be square")
        if phi_matrix.rows > 0 and phi_matrix.det() == 0:
            raise ValueError("Frobenius matrix must be invertible")
        if not isinstance(q, int) or q < 2:
            raise ValueError("q must be an integer >= 2")
        object.__setattr__(self, "phi_matrix", phi_matrix)
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("FrobeniusData is immutable")

    @property
    def dimension(self) -> int:
        return self.phi_matrix.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FrobeniusData)
            and self.phi_matrix == other.phi_matrix
            and self.q == other.q
        )

    def __hash__(self) -> int:
        return hash((self.phi_matrix, self.q))

    def __repr__(self) -> str:
        return f"FrobeniusData(dim {self.dimension}, q={self.q})"


class Filtration:
    """Finite increasing filtration of Q^n indexed by the integers.

    Stores the pieces on the jump range [lo, hi]; below lo everything is
    zero, from hi on everything is the full space.  Equality compares the
    pieces at every index, so two filtrations with different stored
    ranges but the same subspaces are equal.
    """

    __slots__ = ("ambient_dim", "lo", "hi", "_pieces")

    def __init__(self, ambient_dim: int, pieces: dict[int, Subspace], lo: int, hi: int):
        if lo > hi:
            raise ValueError("empty index range")
        for j in range(lo, hi + 1):
            if j not in pieces:
                raise ValueError(f"missing filtration piece at index {j}")
            if pieces[j].ambient_dim != ambient_dim:
                raise DimensionMismatch("piece has wrong ambient dimension")
        for j in range(lo, hi):
            if not contains(pieces[j + 1], pieces[j]):
                raise ValueError("filtration is not increasing")
        if not pieces[hi].is_full():
            raise ValueError("top filtration piece must be the full space")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "_pieces", {j: pieces[j] for j in range(lo, hi + 1)})

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    @classmethod
    def from_map(cls, ambient_dim: int, mapping: dict[int, Subspace]) -> "Filtration":
        """Build from a contiguous map of pieces, trimming to the jump range."""
        if not mapping:
            return cls.trivial(ambient_dim)
        keys = sorted(mapping)
        jumps = []
        prev = Subspace.zero(ambient_dim)
        for j in keys:
            if mapping[j] != prev:
                jumps.append(j)
            prev = mapping[j]
        if not jumps:
            return cls.trivial(ambient_dim)
        lo, hi = jumps[0], jumps[-1]
        return cls(ambient_dim, {j: mapping[j] for j in range(lo, hi + 1)}, lo, hi)

    @classmethod
    def trivial(cls, ambient_dim: int) -> "Filtration":
        return cls(ambient_dim, {0: Subspace.full(ambient_dim)}, 0, 0)

    def at(self, j: int) -> Subspace:
        if j < self.lo:
            return Subspace.zero(self.ambient_dim)
        if j > self.hi:
            return Subspace.full(self.ambient_dim)
        return self._pieces[j]

    def pieces(self) -> dict[int, Subspace]:
        return dict(self._pieces)

    def jump_indices(self) -> list[int]:
        return [j for j in range(self.lo, self.hi + 1) if self.at(j) != self.at(j - 1)]

    def graded_dimension(self, j: int) -> int:
        return self.at(j).dim - self.at(j - 1).dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Filtration) or self.ambient_dim != other.ambient_dim:
            return False
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return all(self.at(j) == other.at(j) for j in range(lo, hi + 1))

    def __hash__(self) -> int:
        return hash((self.ambient_dim, tuple(sorted(self.jump_indices()))))

    def __repr__(self) -> str:
        dims = ", ".join(f"{j}:{self.at(j).dim}" for j in range(self.lo, self.hi + 1))
        return f"Filtration(Q^{self.ambient_dim}; {dims})"


@dataclass(frozen=True)
class WeightDecomposition:
    """Phi-stable direct summands indexed by integer weight."""

    ambient_dim: int
    components: dict[int, Subspace]

    def weights(self) -> list[int]:
        return sorted(self.components)


@dataclass(frozen=True)
class WmcReport:
    """Outcome of the weight-monodromy comparison; failures are content."""

    commutation_ok: bool
    filtrations_equal: bool
    graded_weights: dict[int, list[tuple[int, int]]]
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.commutation_ok and self.filtrations_equal and not self.violations


# ---------------------------------------------------------------------------
# logarithm / exponential of unipotent and nilpotent matrices


def log_unipotent(u: Matrix) -> NilpotentOperator:
    """Nilpotent logarithm of a unipotent matrix, as a finite series."""
    if not u.is_square():
        raise DimensionMismatch("logarithm of a non-square matrix")
    d = u.rows
    x = u - Matrix.identity(d)
    out = Matrix.zero(d, d)
    power = Matrix.identity(d)
    for k in range(1, d + 1):
        power = power * x
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    else:
        if d > 0:
            raise NotUnipotentError("matrix minus identity is not nilpotent")
    return NilpotentOperator(out)


def exp_nilpotent(n: NilpotentOperator) -> Matrix:
    """Exact exponential of a nilpotent operator (the series terminates)."""
    d = n.dimension
    out = Matrix.identity(d)
    power = Matrix.identity(d)
    fact = 1
    for k in range(1, n.nilpotency_index):
        power = power * n.n_matrix
        fact *= k
        out = out + power.scale(Fraction(1, fact))
    return out


# ---------------------------------------------------------------------------
# the filtration attached to a nilpotent operator


def monodromy_filtration(n: NilpotentOperator) -> Filtration:
    """Canonical centered filtration of a nilpotent operator.

    Computed directly from the closed formula
    Fil_j = sum over j1 - j2 = j, j1, j2 >= 0 of ker N^(j1+1) /\\ im N^(j2).
    """
    d = n.dimension
    if d == 0:
        return Filtration.trivial(0)
    powers = [Matrix.identity(d)]
    for _ in range(d):
        powers.append(powers[-1] * n.n_matrix)
    kers = [kernel(p) for p in powers]  # kers[k] = ker N^k
    ims = [image(p) for p in powers]  # ims[k] = im N^k
    mapping: dict[int, Subspace] = {}
    for j in range(-d, d + 1):
        acc = Subspace.zero(d)
        for j1 in range(max(0, j), d + 1):
            j2 = j1 - j
            if j2 > d or ims[j2].is_zero():
                break  # images only shrink as j2 grows
            ker_exp = min(j1 + 1, d)
            if kers[ker_exp].is_full():
                term = ims[j2]
            else:
                term = subspace_intersect(kers[ker_exp], ims[j2])
            if not term.is_zero():
                acc = subspace_sum(acc, term)
            if acc.is_full():
                break
        mapping[j] = acc
    return Filtration.from_map(d, mapping)


# ---------------------------------------------------------------------------
# weights


def _exact_q_power(r: Fraction, q: int) -> int | None:
    """m with r == q**m, or None."""
    if r <= 0:
        return None
    if r == 1:
        return 0
    if r > 1:
        if r.denominator != 1:
            return None
        num, m = r.numerator, 0
        while num % q == 0:
            num //= q
            m += 1
        return m if num == 1 and m > 0 else None
    inv = _exact_q_power(1 / r, q)
    return -inv if inv is not None else None


def _tolerance_digits(tol: Fraction) -> int:
    digits = 0
    t = tol
    while t < 1:
        t *= 10
        digits += 1
    return digits


def weil_weight(g: RatPoly, q: int, tol: Fraction = DEFAULT_TOL) -> int:
    """Weight j such that every complex root of g has squared modulus q^j.

    Expects g monic and irreducible over Q (irreducibility is the
    caller's responsibility).  Exact necessary conditions run first: the
    constant term must be (up to sign) q^(j*deg/2), and the root set must
    be stable under r -> q^j / r, i.e. x^deg * g(q^j/x) must be
    proportional to g.  The genuinely archimedean condition - that each
    individual root modulus is right - is then verified numerically to
    within tol at 64+ decimal digits.  Raises NotPureError otherwise.
    """
    if g.is_zero() or g.degree < 1:
        raise ValueError("weight of a constant polynomial is undefined")
    if g.leading != 1:
        raise ValueError("polynomial must be monic")
    if not isinstance(q, int) or q < 2:
        raise ValueError("q must be an integer >= 2")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    n = g.degree
    c0 = g.coefficient(0)
    if c0 == 0:
        raise NotPureError(g, q, "constant term is zero, so 0 is a root")
    m = _exact_q_power(c0 * c0, q)
    if m is None:
        raise NotPureError(g, q, "constant term squared is not a power of q")
    if m % n != 0:
        raise NotPureError(g, q, "constant term forces a non-integer weight")
    j = m // n
    qj = Fraction(q) ** j
    # x^n g(q^j/x) proportional to g forces the proportionality constant c0
    for i in range(n + 1):
        if g.coefficient(n - i) * qj ** (n - i) != c0 * g.coefficient(i):
            raise NotPureError(g, q, f"roots not stable under r -> q^{j}/r")
    # enough digits that the absolute comparison against q^j stays sharp
    # even when q^j itself is large
    magnitude_digits = abs(j) * len(str(q))
    dps = max(64, _tolerance_digits(tol) + magnitude_digits + 30)
    with mpmath.workdps(dps):
        coeffs = [
            mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
            for c in reversed(g.coeffs)
        ]
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * dps)
        target = mpmath.mpf(q) ** j
        bar = mpmath.mpf(tol.numerator) / mpmath.mpf(tol.denominator)
        for root in roots:
            if abs(abs(root) ** 2 - target) > bar:
                raise NotPureError(
                    g, q, f"a root has squared modulus away from q^{j} by more than tol"
                )
    return j


def weight_decomposition(f: FrobeniusData, tol: Fraction = DEFAULT_TOL) -> WeightDecomposition:
    """Split Q^d into the Phi-stable summands of each pure weight.

    The component of weight j is the kernel of h_j(Phi), with h_j the
    product (with multiplicity) of the weight-j irreducible factors of
    the characteristic polynomial.  A factor that is pure of no integer
    weight aborts the decomposition with NotPureError.
    """
    d = f.dimension
    if d == 0:
        return WeightDecomposition(0, {})
    cp = char_poly(f.phi_matrix)
    by_weight: dict[int, RatPoly] = {}
    for g, mult in factor_rational(cp):
        j = weil_weight(g, f.q, tol)
        by_weight[j] = by_weight.get(j, RatPoly.one()) * g**mult
    components = {j: kernel(h.eval_matrix(f.phi_matrix)) for j, h in by_weight.items()}
    total = sum(s.dim for s in components.values())
    assert total == d, "primary components must fill the space"
    return WeightDecomposition(d, components)


def weight_filtration(w: WeightDecomposition) -> Filtration:
    """Increasing filtration W_m = sum of components of weight <= m."""
    if not w.components:
        return Filtration.trivial(w.ambient_dim)
    ws = w.weights()
    lo, hi = ws[0], ws[-1]
    mapping: dict[int, Subspace] = {}
    acc = Subspace.zero(w.ambient_dim)
    for j in range(lo, hi + 1):
        if j in w.components:
            acc = subspace_sum(acc, w.components[j])
        mapping[j] = acc
    return Filtration(w.ambient_dim, mapping, lo, hi)


def check_commutation(n: NilpotentOperator, f: FrobeniusData) -> bool:
    """True iff N Phi = q Phi N exactly."""
    if n.dimension != f.dimension:
        raise DimensionMismatch("operator dimensions differ")
    return n.n_matrix * f.phi_matrix == (f.phi_matrix * n.n_matrix).scale(f.q)


# ---------------------------------------------------------------------------
# induced maps on graded pieces


def _quotient_reps(big: Subspace, small: Subspace) -> list[tuple[Fraction, ...]]:
    """Rows of big's basis that are independent modulo small."""
    reps = []
    current = small
    for v in big.vectors():
        if not current.contains_vector(v):
            reps.append(v)
            current = subspace_sum(current, Subspace.span(big.ambient_dim, [v]))
    return reps


def induced_quotient_matrix(
    op: Matrix,
    src_big: Subspace,
    src_small: Subspace,
    dst_big: Subspace,
    dst_small: Subspace,
) -> Matrix:
    """Matrix of the map src_big/src_small -> dst_big/dst_small induced by op.

    Assumes op(src_big) <= dst_big and op(src_small) <= dst_small.
    """
    src_reps = _quotient_reps(src_big, src_small)
    dst_reps = _quotient_reps(dst_big, dst_small)
    ambient = dst_big.ambient_dim
    basis_cols = [list(v) for v in dst_small.vectors()] + [list(v) for v in dst_reps]
    basis = Matrix.from_columns(basis_cols, ambient) if basis_cols else Matrix([], cols=0)
    cols = []
    for v in src_reps:
        w = op.apply(v)
        x = solve(basis, w) if basis_cols else (tuple() if all(c == 0 for c in w) else None)
        if x is None:
            raise ArithmeticError("operator does not map into the target subspace")
        cols.append(x[dst_small.dim :])
    return Matrix.from_columns(cols, len(dst_reps))


def graded_map_is_bijective(n: NilpotentOperator, fil: Filtration, j: int) -> bool:
    """Whether N^j induces an isomorphism gr_j -> gr_(-j)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    dim_src = fil.graded_dimension(j)
    dim_dst = fil.graded_dimension(-j)
    if dim_src != dim_dst:
        return False
    if dim_src == 0:
        return True
    power = n.n_matrix**j
    induced = induced_quotient_matrix(power, fil.at(j), fil.at(j - 1), fil.at(-j), fil.at(-j - 1))
    return induced.rank() == dim_src


def _graded_frobenius_weights(
    f: FrobeniusData, fil: Filtration, j: int, tol: Fraction
) -> list[tuple[int, int]]:
    """Weights (with multiplicity) of Phi acting on gr_j of the filtration."""
    induced = induced_quotient_matrix(
        f.phi_matrix, fil.at(j), fil.at(j - 1), fil.at(j), fil.at(j - 1)
    )
    out: dict[int, int] = {}
    for g, mult in factor_rational(char_poly(induced)):
        w = weil_weight(g, f.q, tol)
        out[w] = out.get(w, 0) + mult * g.degree
    return sorted(out.items())


def check_wmc(
    n: NilpotentOperator, f: FrobeniusData, i: int, tol: Fraction = DEFAULT_TOL
) -> WmcReport:
    """Compare the N-filtration with the weight filtration shifted by i.

    The report records (a) whether N Phi = q Phi N, (b) whether
    Fil_j = W_(i+j) for every j as an identity of canonical subspaces,
    and (c) the Frobenius weights on each graded piece gr_j, which must
    all equal i+j.  Failures land in `violations`; nothing raises.
    """
    if n.dimension != f.dimension:
        raise DimensionMismatch("operator dimensions differ")
    violations: list[dict] = []
    commutation_ok = check_commutation(n, f)
    if not commutation_ok:
        violations.append({"kind": "commutation", "detail": "N Phi != q Phi N"})

    mono = monodromy_filtration(n)

    weight_fil = None
    try:
        decomp = weight_decomposition(f, tol)
        weight_fil = weight_filtration(decomp)
    except NotPureError as err:
        violations.append({"kind": "not_pure", "detail": str(err)})

    filtrations_equal = False
    if weight_fil is not None:
        lo = min(mono.lo, weight_fil.lo - i)
        hi = max(mono.hi, weight_fil.hi - i)
        mismatches = []
        for j in range(lo - 1, hi + 1):
            if mono.at(j) != weight_fil.at(i + j):
                mismatches.append(
                    {
                        "kind": "filtration_mismatch",
                        "index": j,
                        "monodromy_dim": mono.at(j).dim,
                        "weight_index": i + j,
                        "weight_dim": weight_fil.at(i + j).dim,
                    }
                )
        violations.extend(mismatches)
        filtrations_equal = not mismatches

    graded_weights: dict[int, list[tuple[int, int]]] = {}
    for j in mono.jump_indices():
        stable = contains(mono.at(j), apply_to_subspace(f.phi_matrix, mono.at(j)))
        if not stable:
            violations.append(
                {
                    "kind": "graded_not_phi_stable",
                    "index": j,
                    "detail": "Phi does not preserve the filtration piece",
                }
            )
            continue
        try:
            pairs = _graded_frobenius_weights(f, mono, j, tol)
        except NotPureError as err:
            violations.append({"kind": "graded_not_pure", "index": j, "detail": str(err)})
            continue
        graded_weights[j] = pairs
        for w, mult in pairs:
            if w != i + j:
                violations.append(
                    {
                        "kind": "graded_weight",
                        "index": j,
                        "weight": w,
                        "multiplicity": mult,
                        "expected": i + j,
                    }
                )
    return WmcReport(
        commutation_ok=commutation_ok,
        filtrations_equal=filtrations_equal,
        graded_weights=graded_weights,
        violations=violations,
    )
