"""Exact construction of the polynomial factors of the scattering states.

The eigenfunction factor P(x) must be symmetric, translation invariant,
homogeneous of degree k, and annihilated by the generalized Laplace
operator

    L[P] = sum_j d^2 P/dx_j^2
         + lambda * sum_{j != m} (x_j - x_m)^(-1) (d_j - d_m) P,

with lambda the coupling combination nu' - delta.  Everything here is done
in rational arithmetic: nullspace dimensions are discrete claims and
floating-point rank decisions are untrustworthy.

Working basis: products of power sums of the centered variables
y_j = x_j - mean(x), one product per partition of k into parts >= 2
(p_1(y) vanishes identically, so translation invariance is structural).
Polynomials are stored by symmetric-monomial index: the descending
exponent partition of any monomial in a permutation orbit, mapped to the
orbit's common rational coefficient, ordered graded-lexicographically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .errors import DomainError, InternalConsistencyError, ResourceLimitError

DEFAULT_MAX_DEGREE = 8
DEFAULT_MAX_VARS = 6

# Generic-lambda policy: dimensions agreeing at these two samples are
# reported as the generic degeneracy.
GENERIC_LAMBDAS = (Fraction(7, 10), Fraction(13, 9))

Monomial = tuple[int, ...]
PolyDict = dict[Monomial, Fraction]


# --- raw multivariate polynomial helpers (dict exponent-tuple -> Fraction) --

def _clean(p: PolyDict) -> PolyDict:
    return {m: c for m, c in p.items() if c != 0}

def _add(p: PolyDict, q: PolyDict) -> PolyDict:
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, Fraction(0)) + c
    return _clean(out)

def _scale(p: PolyDict, s: Fraction) -> PolyDict:
    return {} if s == 0 else {m: c * s for m, c in p.items()}

def _mul(p: PolyDict, q: PolyDict) -> PolyDict:
    out: PolyDict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return _clean(out)

def _diff(p: PolyDict, j: int) -> PolyDict:
    out: PolyDict = {}
    for m, c in p.items():
        if m[j]:
            mm = list(m)
            mm[j] -= 1
            out[tuple(mm)] = out.get(tuple(mm), Fraction(0)) + c * m[j]
    return _clean(out)


def _centered_power_sum(n_vars: int, a: int) -> PolyDict:
    """p_a(y) = sum_j (x_j - mean(x))^a as a polynomial in x."""
    inv_n = Fraction(1, n_vars)
    total: PolyDict = {}
    for j in range(n_vars):
        y_j: PolyDict = {}
        for i in range(n_vars):
            m = [0] * n_vars
            m[i] = 1
            y_j[tuple(m)] = (1 - inv_n) if i == j else -inv_n
        power: PolyDict = {(0,) * n_vars: Fraction(1)}
        for _ in range(a):
            power = _mul(power, y_j)
        total = _add(total, power)
    return total


def _partitions_min2(k: int) -> list[tuple[int, ...]]:
    """Partitions of k into parts >= 2, descending, in descending lex order."""
    if k == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, cap: int, acc: tuple[int, ...]):
        if remaining == 0:
            out.append(acc)
            return
        for part in range(min(cap, remaining), 1, -1):
            if remaining - part != 1:
                rec(remaining - part, part, acc + (part,))

    rec(k, k, ())
    return out


def _orbit_key(m: Monomial) -> Monomial:
    return tuple(sorted(m, reverse=True))


def _compress_symmetric(p: PolyDict, n_vars: int) -> dict[Monomial, Fraction]:
    """Group an (asserted symmetric) polynomial by exponent partition."""
    out: dict[Monomial, Fraction] = {}
    for m, c in p.items():
        key = _orbit_key(m)
        if key in out and out[key] != c:
            raise InternalConsistencyError(
                f"polynomial not symmetric: orbit {key} has coefficients "
                f"{out[key]} and {c}")
        out[key] = c
    # every orbit member must be present with the same coefficient
    for key, c in out.items():
        for perm in set(itertools.permutations(key)):
            if p.get(perm, Fraction(0)) != c:
                raise InternalConsistencyError(
                    f"polynomial not symmetric on orbit {key}")
    return out


def _expand_partitions(coeffs: Mapping[Monomial, Fraction]) -> PolyDict:
    out: PolyDict = {}
    for key, c in coeffs.items():
        for perm in set(itertools.permutations(key)):
            out[perm] = c
    return out


def partition_order_key(partition: Monomial):
    """Graded lexicographic sort key (largest first when reverse-sorted)."""
    return (sum(partition), partition)


@dataclass(frozen=True)
class SymPolynomial:
    """Symmetric translation-invariant homogeneous polynomial, exact."""
    n_vars: int
    degree: int
    coefficients: Mapping[Monomial, Fraction]  # partition -> coefficient

    def expand(self) -> PolyDict:
        return _expand_partitions(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def ordered_items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.coefficients.items(),
                      key=lambda kv: partition_order_key(kv[0]), reverse=True)


def _check_caps(n_vars: int, degree: int, max_vars: int, max_degree: int):
    if n_vars < 2:
        raise DomainError("need at least two variables")
    if degree < 0:
        raise DomainError("degree must be >= 0")
    if n_vars > max_vars or degree > max_degree:
        raise ResourceLimitError(
            f"(n_vars={n_vars}, degree={degree}) beyond caps "
            f"({max_vars}, {max_degree})")


def _independent_subset(vectors: list[dict[Monomial, Fraction]]
                        ) -> list[int]:
    """Indices of a maximal linearly independent subset (exact elimination)."""
    pivots: list[tuple[Monomial, dict[Monomial, Fraction]]] = []
    kept: list[int] = []
    for idx, vec in enumerate(vectors):
        cur = dict(vec)
        for pm, pv in pivots:
            if pm in cur:
                factor = cur[pm] / pv[pm]
                for m, c in pv.items():
                    cur[m] = cur.get(m, Fraction(0)) - factor * c
                cur = {m: c for m, c in cur.items() if c != 0}
        if cur:
            lead = max(cur, key=partition_order_key)
            pivots.append((lead, cur))
            kept.append(idx)
    return kept


def ti_symmetric_basis(n_vars: int, degree: int, *,
                       max_vars: int = DEFAULT_MAX_VARS,
                       max_degree: int = DEFAULT_MAX_DEGREE
                       ) -> list[SymPolynomial]:
    """Basis of symmetric homogeneous degree-k polynomials in y = x - mean.

    Spanning set: one power-sum product per partition of the degree into
    parts >= 2, reduced to linear independence by exact elimination.
    """
    _check_caps(n_vars, degree, max_vars, max_degree)
    candidates = []
    for partition in _partitions_min2(degree):
        poly: PolyDict = {(0,) * n_vars: Fraction(1)}
        for part in partition:
            poly = _mul(poly, _centered_power_sum(n_vars, part))
        candidates.append(_compress_symmetric(poly, n_vars))
    kept = _independent_subset(candidates)
    return [SymPolynomial(n_vars, degree, candidates[i]) for i in kept]


def _divide_by_difference(q: PolyDict, i: int, j: int, n_vars: int) -> PolyDict:
    """Exact quotient q / (x_i - x_j); raises if the division has remainder.

    Writing q = sum_d c_d x_i^d, the remainder is q with x_i replaced by
    x_j and the quotient is sum_d c_d sum_{m<d} x_i^m x_j^(d-1-m).
    """
    remainder: PolyDict = {}
    quotient: PolyDict = {}
    for m, c in q.items():
        d = m[i]
        moved = list(m)
        moved[i] = 0
        moved[j] += d
        key = tuple(moved)
        remainder[key] = remainder.get(key, Fraction(0)) + c
        base = list(m)
        base[i] = 0
        for s in range(d):
            mm = list(base)
            mm[i] = s
            mm[j] += d - 1 - s
            key = tuple(mm)
            quotient[key] = quotient.get(key, Fraction(0)) + c
    if _clean(remainder):
        raise InternalConsistencyError(
            f"(d_{i} - d_{j}) result not divisible by (x_{i} - x_{j}); "
            "basis is not symmetric")
    return _clean(quotient)


def apply_laplace_operator(poly: PolyDict, n_vars: int,
                           lam: Fraction) -> PolyDict:
    """L[P] for an expanded polynomial dict (see module docstring)."""
    out: PolyDict = {}
    for j in range(n_vars):
        out = _add(out, _diff(_diff(poly, j), j))
    # ordered pair sum = twice the unordered one
    for i in range(n_vars):
        for j in range(i + 1, n_vars):
            q = _add(_diff(poly, i), _scale(_diff(poly, j), Fraction(-1)))
            out = _add(out, _scale(_divide_by_difference(q, i, j, n_vars),
                                   2 * lam))
    return out


def _as_fraction(lam) -> Fraction:
    if isinstance(lam, Fraction):
        return lam
    if isinstance(lam, int):
        return Fraction(lam)
    if isinstance(lam, float):
        return Fraction(lam)  # exact binary-float value
    if isinstance(lam, str):
        return Fraction(lam)
    raise DomainError(f"cannot interpret lambda {lam!r} as a rational")


def _nullspace(matrix: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Exact right-nullspace basis via RREF (columns = unknowns)."""
    rows = [row[:] for row in matrix if any(c != 0 for c in row)]
    pivot_cols: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0),
                     None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [c / rows[r][col] for c in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(col)
        r += 1
        if r == len(rows):
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            vec[pc] = -rows[i][free]
        basis.append(vec)
    return basis


def _primitive_normalize(coeffs: dict[Monomial, Fraction]
                         ) -> dict[Monomial, Fraction]:
    """Scale to coprime integers with positive leading coefficient."""
    if not coeffs:
        return coeffs
    den_lcm = 1
    for c in coeffs.values():
        den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
    num_gcd = 0
    for c in coeffs.values():
        num_gcd = gcd(num_gcd, abs(c.numerator * (den_lcm // c.denominator)))
    scale = Fraction(den_lcm, num_gcd)
    lead = max(coeffs, key=partition_order_key)
    if coeffs[lead] < 0:
        scale = -scale
    return {m: c * scale for m, c in coeffs.items()}


@dataclass(frozen=True)
class LaplaceSystem:
    """Constraint system of the generalized Laplace equation at (N, k)."""
    n_vars: int
    degree: int
    lam: Fraction
    basis: tuple[SymPolynomial, ...]
    constraint_matrix: tuple[tuple[Fraction, ...], ...]
    nullspace_dim: int
    solutions: tuple[SymPolynomial, ...]


def solve_generalized_laplace(n_vars: int, degree: int, lam, *,
                              max_vars: int = DEFAULT_MAX_VARS,
                              max_degree: int = DEFAULT_MAX_DEGREE
                              ) -> LaplaceSystem:
    """Exact nullspace of L on the degree-k translation-invariant space."""
    lam_f = _as_fraction(lam)
    basis = ti_symmetric_basis(n_vars, degree, max_vars=max_vars,
                               max_degree=max_degree)
    images = [
        _compress_symmetric(
            apply_laplace_operator(b.expand(), n_vars, lam_f), n_vars)
        for b in basis]
    row_keys = sorted({m for img in images for m in img},
                      key=partition_order_key, reverse=True)
    matrix = [[img.get(mk, Fraction(0)) for img in images] for mk in row_keys]
    null = _nullspace(matrix, len(basis))
    solutions = []
    for vec in null:
        combo: dict[Monomial, Fraction] = {}
        for coeff, b in zip(vec, basis):
            if coeff == 0:
                continue
            for m, c in b.coefficients.items():
                combo[m] = combo.get(m, Fraction(0)) + coeff * c
        combo = {m: c for m, c in combo.items() if c != 0}
        solutions.append(SymPolynomial(n_vars, degree,
                                       _primitive_normalize(combo)))
    return LaplaceSystem(
        n_vars=n_vars, degree=degree, lam=lam_f, basis=tuple(basis),
        constraint_matrix=tuple(tuple(row) for row in matrix),
        nullspace_dim=len(null), solutions=tuple(solutions))


@dataclass(frozen=True)
class GenericDegeneracy:
    """Dimensions at the two generic lambda samples."""
    samples: tuple[tuple[Fraction, int], tuple[Fraction, int]]

    @property
    def dimension(self) -> int | None:
        (_, d1), (_, d2) = self.samples
        return d1 if d1 == d2 else None


def generic_degeneracy(n_vars: int, degree: int, **caps) -> GenericDegeneracy:
    return GenericDegeneracy(tuple(
        (lam, solve_generalized_laplace(n_vars, degree, lam,
                                        **caps).nullspace_dim)
        for lam in GENERIC_LAMBDAS))


def degeneracy(n_vars: int, degree: int, lam=None, **caps) -> int:
    """Number of independent solutions at lam (generic policy when None)."""
    if lam is not None:
        return solve_generalized_laplace(n_vars, degree, lam,
                                         **caps).nullspace_dim
    gen = generic_degeneracy(n_vars, degree, **caps)
    if gen.dimension is None:
        raise InternalConsistencyError(
            "generic lambda samples disagree: "
            + ", ".join(f"dim={d} at lambda={l}" for l, d in gen.samples))
    return gen.dimension


def evaluate_poly(poly: SymPolynomial, x: Sequence):
    """Evaluate at a configuration via centered variables.

    Exact when every coordinate is an int or Fraction; float otherwise.
    The polynomial is translation invariant, so centering changes nothing
    analytically but keeps float evaluation well conditioned.
    """
    if len(x) != poly.n_vars:
        raise DomainError(
            f"configuration has {len(x)} coordinates, polynomial wants "
            f"{poly.n_vars}")
    exact = all(isinstance(c, (int, Fraction)) for c in x)
    if exact:
        mean = Fraction(sum(Fraction(c) for c in x), len(x))
        y = [Fraction(c) - mean for c in x]
        total = Fraction(0)
    else:
        mean = sum(float(c) for c in x) / len(x)
        y = [float(c) - mean for c in x]
        total = 0.0
    for mon, coeff in poly.expand().items():
        term = coeff if exact else float(coeff)
        for base, e in zip(y, mon):
            if e:
                term = term * base ** e
        total += term
    return total


def translation_defect(poly: SymPolynomial) -> PolyDict:
    """sum_j dP/dx_j, exactly; empty dict iff translation invariant."""
    p = poly.expand()
    out: PolyDict = {}
    for j in range(poly.n_vars):
        out = _add(out, _diff(p, j))
    return out


def euler_defect(poly: SymPolynomial) -> PolyDict:
    """sum_j x_j dP/dx_j - k P, exactly; empty dict iff homogeneous."""
    p = poly.expand()
    out = _scale(p, Fraction(-poly.degree))
    for j in range(poly.n_vars):
        d = _diff(p, j)
        xj: PolyDict = {}
        m0 = [0] * poly.n_vars
        m0[j] = 1
        xj[tuple(m0)] = Fraction(1)
        out = _add(out, _mul(xj, d))
    return out
