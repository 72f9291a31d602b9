"""Eigenfunction assembly and finite-difference verification.

States live in the ordered sector x_1 >= x_2 >= ... >= x_N.  A scattering
state at radial momentum p and polynomial degree k is

    psi = prod_{j<k} (x_j - x_k)^nu' * r^(-b') J_b'(p r) * P(x),

with r the translation-invariant hyper-radius, b' from the model module
and P a generalized-Laplace solution at lambda = nu' - delta.  General
states superpose degrees with momentum-scaled coefficients; their large-r
limit splits into incoming/outgoing waves whose literal form is evaluated
here as well.

All wavefunction values are returned as complex even when analytically
real, so the deformed phases flow through one code path.  The Hamiltonian
is applied by second-order central differences for verification.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from . import polynomials
from .errors import (AsymptoticRangeError, DomainError,
                     SingularConfigurationError)
from .model import CouplingParams, radial_indices
from .polynomials import SymPolynomial, evaluate_poly
from .specialfn import (asymptotic_threshold, bessel_j, bessel_j_prime)

DEFAULT_MIN_GAP = 1e-9
NEAR_NODE_GUARD = 1e-8


@dataclass(frozen=True)
class Configuration:
    """Ordered-sector configuration with a coincidence clearance floor."""
    coords: tuple[float, ...]
    min_gap: float = DEFAULT_MIN_GAP

    def __post_init__(self):
        if len(self.coords) < 2:
            raise DomainError("need at least two coordinates")
        if self.min_gap <= 0.0:
            raise DomainError("min_gap must be > 0")
        gaps = [self.coords[j] - self.coords[j + 1]
                for j in range(len(self.coords) - 1)]
        if any(g < 0 for g in gaps):
            raise DomainError("coordinates must be ordered descending "
                              "(x_1 >= ... >= x_N)")
        if min(gaps) < self.min_gap:
            raise SingularConfigurationError(
                f"adjacent gap {min(gaps):.3e} below min_gap {self.min_gap:.3e}")

    @classmethod
    def from_unordered(cls, coords: Sequence[float],
                       min_gap: float = DEFAULT_MIN_GAP) -> "Configuration":
        """Canonicalize an unordered tuple by descending sort."""
        ordered = tuple(sorted((float(c) for c in coords), reverse=True))
        return cls(ordered, min_gap)

    @property
    def n(self) -> int:
        return len(self.coords)


def _coords_of(x) -> tuple[float, ...]:
    if isinstance(x, Configuration):
        return x.coords
    return tuple(float(c) for c in x)


SUM_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class MomentumSet:
    """Sorted sum-zero individual momenta with radial/angular split."""
    momenta: tuple[float, ...]
    p: float
    alphas: tuple[float, ...]

    @classmethod
    def from_momenta(cls, momenta: Sequence[float]) -> "MomentumSet":
        ms = tuple(float(v) for v in momenta)
        if len(ms) < 2:
            raise DomainError("need at least two momenta")
        if any(ms[j] > ms[j + 1] for j in range(len(ms) - 1)):
            raise DomainError("momenta must be sorted ascending")
        big = max(abs(v) for v in ms)
        if abs(sum(ms)) > SUM_ZERO_TOL * len(ms) * max(big, 1.0):
            raise DomainError(f"momenta must sum to zero, got {sum(ms):.3e}")
        p = math.sqrt(sum(v * v for v in ms))
        alphas = tuple(v / p for v in ms) if p > 0 else tuple(0.0 for _ in ms)
        return cls(ms, p, alphas)

    @property
    def n(self) -> int:
        return len(self.momenta)

    def reversed_momenta(self) -> tuple[float, ...]:
        """p_{N+1-j} pairing used by the outgoing wave."""
        return tuple(reversed(self.momenta))


def reference_momentum_set(n: int, p: float) -> MomentumSet:
    """Centered arithmetic-sequence momenta rescaled to magnitude p."""
    if n < 2:
        raise DomainError("need at least two particles")
    if p <= 0.0:
        raise DomainError("need p > 0")
    base = [j - (n - 1) / 2.0 for j in range(n)]
    norm = math.sqrt(sum(b * b for b in base))
    return MomentumSet.from_momenta(tuple(b * p / norm for b in base))


@dataclass(frozen=True)
class SuperpositionCoeffs:
    """Angular coefficients of a degenerate superposition.

    entries maps (degree k, solution index q >= 1) to the angular
    coefficient; the full coefficient is p**scaling_exponent times it.
    """
    entries: Mapping[tuple[int, int], complex]
    scaling_exponent: float

    @classmethod
    def for_params(cls, params: CouplingParams,
                   entries: Mapping[tuple[int, int], complex]
                   ) -> "SuperpositionCoeffs":
        n_prime = radial_indices(params, 0).n_prime
        return cls(dict(entries), n_prime)

    def reconstruct(self, p: float) -> dict[tuple[int, int], complex]:
        scale = p ** self.scaling_exponent
        return {kq: scale * c for kq, c in self.entries.items()}


# --- geometry ----------------------------------------------------------------

def radial_coordinate(x) -> float:
    """Hyper-radius r with r^2 = (1/N) sum_{i<j} (x_i - x_j)^2."""
    c = _coords_of(x)
    n = len(c)
    total = sum((c[i] - c[j]) ** 2 for i in range(n) for j in range(i + 1, n))
    return math.sqrt(total / n)


def pair_differences(x) -> list[float]:
    c = _coords_of(x)
    n = len(c)
    return [c[i] - c[j] for i in range(n) for j in range(i + 1, n)]


def ground_state(x, nu_prime: float, min_gap: float = 1e-12) -> float:
    """Jastrow zero mode prod_{j<k} (x_j - x_k)^nu'.

    Positive in the open sector.  Exact coincidences give 0 for nu' > 0
    and 1 for nu' = 0; for nu' < 0 a gap below min_gap is singular.
    """
    diffs = pair_differences(x)
    if any(d < 0 for d in diffs):
        raise DomainError("configuration must be ordered descending")
    if nu_prime < 0.0 and min(diffs) < min_gap:
        raise SingularConfigurationError(
            f"gap {min(diffs):.3e} below {min_gap:.3e} with negative exponent")
    if nu_prime == 0.0:
        return 1.0
    result = 1.0
    for d in diffs:
        result *= d ** nu_prime
    return result


def radial_solution(r: float, p: float, b_prime: float) -> float:
    """Radial profile r^(-b') J_b'(p r)."""
    if r <= 0.0 or p <= 0.0:
        raise DomainError("radial_solution needs r > 0 and p > 0")
    return r ** (-b_prime) * bessel_j(b_prime, p * r)


def radial_solution_derivative(r: float, p: float, b_prime: float) -> float:
    """d/dr of r^(-b') J_b'(p r), analytic."""
    if r <= 0.0 or p <= 0.0:
        raise DomainError("radial_solution needs r > 0 and p > 0")
    return (-b_prime) * r ** (-b_prime - 1.0) * bessel_j(b_prime, p * r) \
        + r ** (-b_prime) * p * bessel_j_prime(b_prime, p * r)


# --- polynomial solutions cache ---------------------------------------------

@lru_cache(maxsize=256)
def _laplace_solutions_cached(n_vars: int, degree: int, lam: Fraction
                              ) -> tuple[SymPolynomial, ...]:
    return polynomials.solve_generalized_laplace(n_vars, degree,
                                                 lam).solutions


def laplace_solutions(params: CouplingParams, k: int
                      ) -> tuple[SymPolynomial, ...]:
    """Polynomial factors at degree k for lambda = nu' - delta."""
    lam = Fraction(params.nu_prime - params.delta)
    return _laplace_solutions_cached(params.n_particles, k, lam)


def _poly_value(poly: SymPolynomial | None, coords: tuple[float, ...]) -> float:
    if poly is None:
        return 1.0
    return float(evaluate_poly(poly, coords))


# --- eigenfunctions ----------------------------------------------------------

def scattering_eigenfunction(x, pset: MomentumSet,
                             poly: SymPolynomial | None,
                             params: CouplingParams, k: int) -> complex:
    """Single degenerate scattering state at degree k (poly=None means 1)."""
    if pset.p <= 0.0:
        raise DomainError("scattering states need p > 0")
    coords = _coords_of(x)
    idx = radial_indices(params, k)
    r = radial_coordinate(coords)
    value = ground_state(coords, params.nu_prime) \
        * radial_solution(r, pset.p, idx.b_prime) \
        * _poly_value(poly, coords)
    return complex(value)


def general_eigenfunction(x, pset: MomentumSet, coeffs: SuperpositionCoeffs,
                          params: CouplingParams) -> complex:
    """Finite superposition of degenerate states with scaled coefficients."""
    if pset.p <= 0.0:
        raise DomainError("scattering states need p > 0")
    coords = _coords_of(x)
    r = radial_coordinate(coords)
    jastrow = ground_state(coords, params.nu_prime)
    full = coeffs.reconstruct(pset.p)
    total = 0j
    for (k, q), c in full.items():
        sols = laplace_solutions(params, k)
        if not sols:
            raise DomainError(f"degree {k} has zero degeneracy at these "
                              "couplings")
        if not 1 <= q <= len(sols):
            raise DomainError(f"solution index q={q} outside 1..{len(sols)} "
                              f"at degree {k}")
        idx = radial_indices(params, k)
        total += c * radial_solution(r, pset.p, idx.b_prime) \
            * _poly_value(sols[q - 1], coords)
    return jastrow * total


def make_scattering_state(params: CouplingParams, pset: MomentumSet,
                          k: int, q: int = 1) -> Callable[[tuple], complex]:
    """Callable psi(coords) for one degenerate state (for FD verification)."""
    sols = laplace_solutions(params, k)
    if k > 0 and not sols:
        raise DomainError(f"degree {k} has zero degeneracy")
    poly = sols[q - 1] if k > 0 else None
    idx = radial_indices(params, k)

    def psi(coords):
        r = radial_coordinate(coords)
        return complex(ground_state(coords, params.nu_prime)
                       * radial_solution(r, pset.p, idx.b_prime)
                       * _poly_value(poly, tuple(coords)))
    return psi


def make_general_state(params: CouplingParams, pset: MomentumSet,
                       coeffs: SuperpositionCoeffs
                       ) -> Callable[[tuple], complex]:
    def psi(coords):
        return general_eigenfunction(coords, pset, coeffs, params)
    return psi


def asymptotic_wave(x, pset: MomentumSet, coeffs: SuperpositionCoeffs,
                    params: CouplingParams, sign: int,
                    max_rel_error: float = 1e-3) -> complex:
    """Incoming (+) / outgoing (-) large-r wave of the superposition.

    Literal evaluation of

        (2 pi r)^(-1/2) p^(n'-1/2) Jastrow r^(-A')
          * sum_kq Ct_kq r^(-k) P_kq(x) exp(+-i (b'+1/2) pi/2 -+ i p r);

    psi_+ + psi_- approaches the full superposition as p r grows.  Raises
    AsymptoticRangeError when p r is below the Bessel asymptotic threshold
    at max_rel_error for any participating order.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    coords = _coords_of(x)
    r = radial_coordinate(coords)
    pr = pset.p * r
    idx0 = radial_indices(params, 0)
    for (k, _q) in coeffs.entries:
        thr = asymptotic_threshold(radial_indices(params, k).b_prime,
                                   max_rel_error)
        if pr < thr:
            raise AsymptoticRangeError(
                f"p*r = {pr:.6g} below asymptotic threshold {thr:.6g} "
                f"(degree {k})")
    envelope = (2.0 * math.pi * r) ** -0.5 * pset.p ** (idx0.n_prime - 0.5) \
        * ground_state(coords, params.nu_prime) * r ** (-idx0.a_prime)
    total = 0j
    for (k, q), c in coeffs.entries.items():
        sols = laplace_solutions(params, k)
        if not sols:
            raise DomainError(f"degree {k} has zero degeneracy")
        if not 1 <= q <= len(sols):
            raise DomainError(f"solution index q={q} outside 1..{len(sols)}")
        b_k = radial_indices(params, k).b_prime
        phase = cmath.exp(sign * 1j * (b_k + 0.5) * math.pi / 2.0
                          - sign * 1j * pr)
        total += c * r ** (-k) * _poly_value(sols[q - 1], coords) * phase
    return envelope * total


def plane_wave_in(x, pset: MomentumSet, amplitude: complex) -> complex:
    """amplitude * exp(i sum_j p_j x_j)."""
    coords = _coords_of(x)
    return amplitude * cmath.exp(1j * sum(p * c for p, c
                                          in zip(pset.momenta, coords)))


def plane_wave_out(x, pset: MomentumSet, amplitude: complex,
                   nu_prime: float) -> complex:
    """Reversed-momentum wave with phase exp(-i pi nu' N(N-1)/2).

    The phase is the pure-phase form of the outgoing prefactor; a stray
    power of r would not be asymptotically normalizable (see metadata flag
    "outgoing_prefactor").
    """
    coords = _coords_of(x)
    n = len(coords)
    phase = cmath.exp(-1j * math.pi * nu_prime * n * (n - 1) / 2.0)
    return amplitude * phase * cmath.exp(
        1j * sum(c * p for c, p in zip(coords, pset.reversed_momenta())))


# --- finite-difference Hamiltonian -------------------------------------------

def _hamiltonian_terms(psi: Callable[[tuple], complex],
                       coords: tuple[float, ...], params: CouplingParams,
                       h: float) -> tuple[complex, complex, complex, complex]:
    """(kinetic, inverse-square, deformation, harmonic) term values."""
    n = len(coords)
    if h <= 0.0:
        raise DomainError("need h > 0")
    gaps = [coords[j] - coords[j + 1] for j in range(n - 1)]
    if min(gaps) <= 2.0 * h:
        raise SingularConfigurationError(
            f"stencil width 2h={2 * h:.3e} crosses a coincidence hyperplane "
            f"(min gap {min(gaps):.3e})")
    center = complex(psi(coords))
    plus = []
    minus = []
    for j in range(n):
        cp = list(coords); cp[j] += h
        cm = list(coords); cm[j] -= h
        plus.append(complex(psi(tuple(cp))))
        minus.append(complex(psi(tuple(cm))))
    kinetic = -0.5 * sum((plus[j] - 2.0 * center + minus[j]) / (h * h)
                         for j in range(n))
    inv_sq = (params.g / 2.0) * sum(
        1.0 / (coords[j] - coords[m]) ** 2
        for j in range(n) for m in range(n) if j != m) * center
    deform = params.delta * sum(
        (plus[j] - minus[j]) / (2.0 * h) / (coords[j] - coords[m])
        for j in range(n) for m in range(n) if j != m)
    harmonic = 0j
    if params.omega != 0.0:
        harmonic = (params.omega ** 2 / 2.0) * sum(c * c for c in coords) \
            * center
    return kinetic, inv_sq, deform, harmonic


def apply_hamiltonian_fd(psi: Callable[[tuple], complex], x,
                         params: CouplingParams, h: float) -> complex:
    """(H psi)(x) with second-order central differences."""
    coords = _coords_of(x)
    return sum(_hamiltonian_terms(psi, coords, params, h))


def state_energy(pset: MomentumSet) -> float:
    """Eigenvalue of a scattering state at radial momentum p.

    With the kinetic term normalized as -(1/2) sum d^2/dx_j^2, both the
    Bessel-profile states and the plane waves exp(i sum p_j x_j) with
    sum p_j^2 = p^2 carry energy p^2 / 2.
    """
    return pset.p ** 2 / 2.0


def eigen_residual(psi: Callable[[tuple], complex], p_squared: float,
                   samples: Sequence, params: CouplingParams,
                   h_factor: float = 1e-3) -> float:
    """max over samples of |H psi - p^2 psi| / guard.

    The guard is |p^2 psi| floored at NEAR_NODE_GUARD times the global
    sample scale; for p^2 = 0 (zero modes) the per-sample scale is the
    term-magnitude sum (cancellation quality), floored at the natural
    curvature scale |psi| * sum(1/gap^2) so states annihilated term by
    term do not divide by roundoff.
    """
    rows = []
    for x in samples:
        coords = _coords_of(x)
        gaps = [coords[j] - coords[j + 1] for j in range(len(coords) - 1)]
        h = h_factor * min(gaps)
        terms = _hamiltonian_terms(psi, coords, params, h)
        hpsi = sum(terms)
        psi_val = complex(psi(coords))
        target = p_squared * psi_val
        term_scale = sum(abs(t) for t in terms)
        curvature = abs(psi_val) * sum(1.0 / (g * g) for g in gaps)
        rows.append((abs(hpsi - target), abs(target), term_scale, curvature))
    if not rows:
        raise DomainError("no samples")
    global_scale = max(t for _, t, _, _ in rows)
    out = 0.0
    for err, target_mag, term_scale, curvature in rows:
        if p_squared == 0.0:
            denom = max(term_scale, curvature, 1e-300)
        else:
            denom = max(target_mag, NEAR_NODE_GUARD * global_scale)
        out = max(out, err / denom)
    return out


def residual_convergence(psi: Callable[[tuple], complex], p_squared: float,
                         samples: Sequence, params: CouplingParams,
                         h_factor: float = 1e-3) -> tuple[float, float, float]:
    """(residual at h, residual at h/2, ratio); ~4 for a second-order stencil."""
    res_h = eigen_residual(psi, p_squared, samples, params, h_factor)
    res_h2 = eigen_residual(psi, p_squared, samples, params, h_factor / 2.0)
    return res_h, res_h2, res_h / res_h2 if res_h2 > 0 else math.inf
