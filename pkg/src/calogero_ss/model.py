"""Parameter algebra of the PT-deformed inverse-square model.

Couples the long-range coupling g, the deformation coupling delta and the
ground-state exponent nu' through the quadratic

    g = nu'^2 - nu' (1 + 2 delta),

derives the radial indices (b', A', n', c, phi) used by the wavefunction
and scattering modules, evaluates the confined model's bound spectrum, and
provides an extensional PT-commutation checker for the Hamiltonian terms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (CouplingRangeError, DomainError, NoRealExponentError,
                     SingularConfigurationError)

DISCRIMINANT_TOL = 1e-14
ROUNDTRIP_TOL = 1e-12


class Validity(enum.Enum):
    """Coupling-range classification for a non-negative exponent."""
    RANGE_I = "RangeI"      # delta >= -1/2 and 0 > g >= -(delta + 1/2)^2
    RANGE_II = "RangeII"    # g >= 0, any delta
    INVALID = "Invalid"


def classify_validity(g: float, delta: float) -> Validity:
    if g >= 0.0:
        return Validity.RANGE_II
    if delta >= -0.5 and g >= -((delta + 0.5) ** 2):
        return Validity.RANGE_I
    return Validity.INVALID


@dataclass(frozen=True)
class ExponentRoots:
    """Both roots of the exponent quadratic plus the selection."""
    roots: tuple[float, float]   # ascending
    selected: float              # largest non-negative root
    validity: Validity


def solve_nu_prime(g: float, delta: float) -> ExponentRoots:
    """Solve nu'^2 - (1 + 2 delta) nu' - g = 0 and select an exponent.

    Both roots are reported; the default policy selects the largest
    non-negative one.  A negative discriminant (beyond clamping tolerance)
    or the absence of a non-negative root is an error: the ground state
    would be singular at particle coincidences.
    """
    if not (math.isfinite(g) and math.isfinite(delta)):
        raise DomainError("solve_nu_prime: non-finite couplings")
    s = 1.0 + 2.0 * delta
    disc = s * s + 4.0 * g
    if disc < -DISCRIMINANT_TOL:
        raise NoRealExponentError(
            f"no real exponent: discriminant {disc:.3e} < 0 for g={g}, "
            f"delta={delta}")
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    lo, hi = (s - root) / 2.0, (s + root) / 2.0
    if hi < 0.0:
        raise CouplingRangeError(
            f"both exponent roots negative for g={g}, delta={delta}; "
            "a non-negative exponent is required")
    return ExponentRoots((lo, hi), hi, classify_validity(g, delta))


def coupling_from_exponent(nu_prime: float, delta: float) -> float:
    """g = nu'^2 - nu' (1 + 2 delta); inverse of solve_nu_prime."""
    if nu_prime < 0.0:
        raise DomainError(f"exponent must be >= 0, got {nu_prime}")
    return nu_prime * nu_prime - nu_prime * (1.0 + 2.0 * delta)


@dataclass(frozen=True)
class CouplingParams:
    """Model parameters with the derived exponent and validity class.

    omega is carried for the bound-spectrum formula only; every scattering
    operation requires omega = 0.  nu is the undeformed exponent solving
    g = nu^2 - nu (None when that quadratic has no real root); it enters
    only the bound-spectrum formula and the optional phi convention toggle.
    """
    n_particles: int
    g: float
    delta: float
    omega: float
    nu_prime: float
    nu: float | None
    validity_class: Validity

    def __post_init__(self):
        if self.n_particles < 2:
            raise DomainError("need at least 2 particles")
        if self.omega < 0.0:
            raise DomainError("omega must be >= 0")
        if self.nu_prime < 0.0:
            raise DomainError("nu_prime must be >= 0")
        expected = coupling_from_exponent(self.nu_prime, self.delta)
        if abs(self.g - expected) > ROUNDTRIP_TOL * max(1.0, abs(self.g)):
            raise DomainError(
                f"inconsistent couplings: g={self.g} vs "
                f"nu'^2 - nu'(1+2 delta) = {expected}")

    @classmethod
    def from_coupling(cls, n_particles: int, g: float, delta: float,
                      omega: float = 0.0) -> "CouplingParams":
        sol = solve_nu_prime(g, delta)
        if sol.validity is Validity.INVALID:
            raise CouplingRangeError(
                f"couplings g={g}, delta={delta} outside both validity ranges")
        return cls(n_particles, g, delta, omega, sol.selected,
                   _undeformed_exponent(g), sol.validity)

    @classmethod
    def from_exponent(cls, n_particles: int, nu_prime: float, delta: float,
                      omega: float = 0.0) -> "CouplingParams":
        g = coupling_from_exponent(nu_prime, delta)
        return cls(n_particles, g, delta, omega, nu_prime,
                   _undeformed_exponent(g), classify_validity(g, delta))


def _undeformed_exponent(g: float) -> float | None:
    disc = 1.0 + 4.0 * g
    if disc < 0.0:
        return None
    return (1.0 + math.sqrt(disc)) / 2.0


@dataclass(frozen=True)
class RadialIndices:
    """Derived indices of the radial problem at polynomial degree k.

    b' fixes the Bessel order, A' = b' - k the asymptotic envelope power,
    n' the momentum scaling, c the two-body exponent nu' - b', and phi the
    reversed-wave phase exponent.
    """
    k: int
    b_prime: float
    a_prime: float
    n_prime: float
    c: float
    phi: float


def radial_indices(params: CouplingParams, k: int, *,
                   phi_use_nu: bool = False) -> RadialIndices:
    """Indices for degree k.

    phi defaults to -nu' N(N-1)/2 (the convention consistent with the
    outgoing plane-wave phase); phi_use_nu switches to the undeformed
    exponent for comparison runs.
    """
    if k < 0:
        raise DomainError("polynomial degree k must be >= 0")
    n = params.n_particles
    pairs = n * (n - 1) / 2.0
    b_prime = (n - 3) / 2.0 + k + (params.nu_prime - params.delta) * pairs
    n_prime = (3 - n) / 2.0 + pairs * params.delta
    if phi_use_nu:
        if params.nu is None:
            raise DomainError(
                "phi_use_nu requires a real undeformed exponent "
                f"(g={params.g} gives none)")
        phi = -params.nu * pairs
    else:
        phi = -params.nu_prime * pairs
    return RadialIndices(k=k, b_prime=b_prime, a_prime=b_prime - k,
                         n_prime=n_prime, c=params.nu_prime - b_prime,
                         phi=phi)


def bound_state_energy(n_particles: int, nu: float, omega: float,
                       n: Sequence[int]) -> float:
    """Confined-model spectrum: E = (N w/2)[1 + (N-1) nu] + w sum(n_j).

    Quantum numbers must be non-negative integers, non-decreasing.
    """
    if omega <= 0.0:
        raise DomainError("bound spectrum needs omega > 0")
    if nu < 0.0:
        raise DomainError("nu must be >= 0")
    if len(n) != n_particles:
        raise DomainError(f"need {n_particles} quantum numbers, got {len(n)}")
    for j, nj in enumerate(n):
        if nj != int(nj) or nj < 0:
            raise DomainError(f"quantum number n[{j}]={nj} not a non-negative "
                              "integer")
        if j and nj < n[j - 1]:
            raise DomainError("quantum numbers must be non-decreasing")
    return (n_particles * omega / 2.0) * (1.0 + (n_particles - 1) * nu) \
        + omega * sum(n)


# --- PT-commutation checker -------------------------------------------------
#
# PT acts on functions as (PT f)(x) = conj(f(-x)).  Each Hamiltonian term is
# applied by finite differences; the residual |PT(T f)(x) - T(PT f)(x)|
# measures the commutator extensionally.  "control_x1" (multiplication by
# x_1) is the deliberately PT-breaking reference.  Multiplication by i*x_1
# is also provided: it is PT-invariant (parity flips x_1, conjugation flips
# i), which makes it a useful non-Hermitian-but-invariant control.

TermFn = Callable[[Callable, Sequence[float], float], complex]


def _min_pair_gap(x: Sequence[float]) -> float:
    n = len(x)
    return min(abs(x[i] - x[j]) for i in range(n) for j in range(i + 1, n))


def _d1(f, x, j, h):
    xp = list(x); xm = list(x)
    xp[j] += h; xm[j] -= h
    return (f(tuple(xp)) - f(tuple(xm))) / (2.0 * h)


def _d2(f, x, j, h):
    xp = list(x); xm = list(x)
    xp[j] += h; xm[j] -= h
    return (f(tuple(xp)) - 2.0 * f(tuple(x)) + f(tuple(xm))) / (h * h)


def hamiltonian_term(name: str, g: float = 1.0, delta: float = 0.5,
                     omega: float = 0.0) -> TermFn:
    """One term of the extended Hamiltonian as an (f, x, h) -> value map."""
    if name == "kinetic":
        def term(f, x, h):
            return -0.5 * sum(_d2(f, x, j, h) for j in range(len(x)))
    elif name == "inverse_square":
        def term(f, x, h):
            n = len(x)
            s = sum(1.0 / (x[j] - x[k]) ** 2
                    for j in range(n) for k in range(n) if j != k)
            return (g / 2.0) * s * f(tuple(x))
    elif name == "momentum_deformation":
        def term(f, x, h):
            n = len(x)
            return delta * sum(_d1(f, x, j, h) / (x[j] - x[k])
                               for j in range(n) for k in range(n) if j != k)
    elif name == "harmonic":
        def term(f, x, h):
            return (omega ** 2 / 2.0) * sum(c * c for c in x) * f(tuple(x))
    elif name == "control_x1":
        def term(f, x, h):
            return x[0] * f(tuple(x))
    elif name == "control_ix1":
        def term(f, x, h):
            return 1j * x[0] * f(tuple(x))
    else:
        raise DomainError(f"unknown Hamiltonian term {name!r}")
    return term


def pt_invariance_residual(term: str | TermFn,
                           testfn: Callable[[tuple], complex],
                           sample: Sequence[float], *,
                           g: float = 1.0, delta: float = 0.5,
                           omega: float = 0.0, h: float = 1e-4,
                           min_gap: float = 1e-6) -> float:
    """|PT(T psi)(x) - T(PT psi)(x)| for one Hamiltonian term T.

    ~0 for every term of the extended Hamiltonian, O(|x_1 psi|) for the
    PT-breaking control.  The sample (and its parity image) must stay off
    the coincidence hyperplanes by at least min_gap and clear of the
    stencil width.
    """
    x = tuple(float(c) for c in sample)
    gap = _min_pair_gap(x)
    if gap < max(min_gap, 4.0 * h):
        raise SingularConfigurationError(
            f"sample gap {gap:.3e} too close to a coincidence hyperplane")
    op = hamiltonian_term(term, g=g, delta=delta, omega=omega) \
        if isinstance(term, str) else term

    def pt_of(fn):
        return lambda y: complex(fn(tuple(-c for c in y))).conjugate()

    minus_x = tuple(-c for c in x)
    side_apply_then_pt = complex(op(testfn, minus_x, h)).conjugate()
    side_pt_then_apply = complex(op(pt_of(testfn), x, h))
    return abs(side_apply_then_pt - side_pt_then_apply)
