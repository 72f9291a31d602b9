"""Bessel functions of the first kind with real order, self-contained.

Two evaluation regimes:

* ascending power series, summed in ``decimal`` arithmetic with a working
  precision scaled to the argument (the series suffers catastrophic
  cancellation in fixed precision once x is a few tens);
* the large-argument (Hankel) expansion
  J_nu(x) ~ sqrt(2/(pi x)) [P cos w - Q sin w],  w = x - nu*pi/2 - pi/4,
  truncated at its smallest term, with the first omitted term kept as the
  error estimate.

The regime switchover is x* = max(20, 2*order).  The expansion is
error-controlled: when its estimate exceeds the accuracy target (large
order with x barely above x*) the series is used instead, and if the
series would exceed its 200-term cap an :class:`AccuracyLossError` is
raised carrying the best achievable estimate.

Only what the scattering problem needs is provided: J_nu, its derivative,
and the leading asymptotic amplitude/phase decomposition.  Second-kind
functions, complex order/argument and the x ~ nu transition region are
out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

from .errors import AccuracyLossError, AsymptoticRangeError, DomainError

# Envelope-relative accuracy target of the hybrid evaluator.
REL_TARGET = 1e-10

# Series stopping rule: next |term| < SERIES_EPS * |partial sum|, at most
# SERIES_MAX_TERMS terms.
SERIES_EPS = Decimal("1e-18")
SERIES_MAX_TERMS = 200

# Lanczos approximation, g = 607/128, 15 coefficients (Godfrey's set).
# Relative error well under 1e-13 on [0.5, 60].
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
)


def gamma(z: float) -> float:
    """Gamma function via the Lanczos approximation (reflection for z < 1/2)."""
    if not math.isfinite(z):
        raise DomainError(f"gamma: non-finite argument {z!r}")
    if z < 0.5:
        s = math.sin(math.pi * z)
        if s == 0.0:
            raise DomainError(f"gamma: pole at non-positive integer {z!r}")
        return math.pi / (s * gamma(1.0 - z))
    zz = z - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (zz + 0.5) * math.exp(-t) * acc


def switchover(order: float) -> float:
    """Series/asymptotic switchover point x* for a given order."""
    return max(20.0, 2.0 * abs(order))


def _series_value(order: float, x: float) -> float:
    """Ascending series, exact-cancellation safe.

    Sum_m (-1)^m (x^2/4)^m / (m! (order+1)_m), scaled by
    (x/2)^order / Gamma(order+1).  The Pochhammer recurrence keeps every
    term exact at working precision; only the single Gamma prefactor is a
    double-precision transcendental.
    """
    # Working precision: cancellation grows like 10^(0.4343 x).
    prec = 30 + int(0.45 * x)
    with localcontext() as ctx:
        ctx.prec = prec
        q = Decimal(x) * Decimal(x) / 4
        dnu = Decimal(order)
        term = Decimal(1)
        total = term
        for m in range(1, SERIES_MAX_TERMS + 1):
            term = -term * q / (Decimal(m) * (dnu + Decimal(m)))
            total += term
            if abs(term) < SERIES_EPS * abs(total):
                break
        else:
            est = float(abs(term) / abs(total)) if total else math.inf
            raise AccuracyLossError(
                f"bessel series hit {SERIES_MAX_TERMS}-term cap at order "
                f"{order}, x={x}", est)
        half = Decimal(x) / 2
        pref = (half.ln() * dnu).exp() / Decimal(gamma(order + 1.0))
        return float(pref * total)


def _asymptotic_value(order: float, x: float) -> tuple[float, float]:
    """Hankel expansion value and its envelope-relative error estimate.

    Terms a_k/x^k with a_k = prod_{m<=k}(4 nu^2 - (2m-1)^2)/(k! 8^k) feed
    the P (even k) and Q (odd k) cosine/sine series; summation stops at the
    smallest term, whose magnitude bounds the truncation error while the
    terms are still decreasing.
    """
    mu = 4.0 * order * order
    p_sum, q_sum = 1.0, 0.0
    term = 1.0
    prev = math.inf
    estimate = 0.0
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * x * k)
        if abs(term) >= prev:
            estimate = prev  # expansion started diverging
            break
        if k % 2 == 1:
            q_sum += term if (k // 2) % 2 == 0 else -term
        else:
            p_sum += term if (k // 2) % 2 == 0 else -term
        prev = abs(term)
        if abs(term) < 1e-18:
            estimate = abs(term)
            break
    w = x - order * math.pi / 2.0 - math.pi / 4.0
    amp = math.sqrt(2.0 / (math.pi * x))
    return amp * (p_sum * math.cos(w) - q_sum * math.sin(w)), estimate


def bessel_j(order: float, x: float) -> float:
    """Bessel function of the first kind, real order, x >= 0.

    Negative integer orders reduce by J_(-n) = (-1)^n J_n; negative
    non-integer orders use the same series/asymptotic machinery (the
    radial index b' of the two-body problem goes negative for weak
    exponents, so this domain is load-bearing).  Negative arguments are
    rejected: for non-integer order they are branch-ambiguous and the
    physics only needs x = p r > 0.
    """
    if not (math.isfinite(order) and math.isfinite(x)):
        raise DomainError(f"bessel_j: non-finite input ({order!r}, {x!r})")
    if x < 0.0:
        raise DomainError("bessel_j: negative argument rejected "
                          "(branch ambiguity for non-integer order)")
    if order < 0.0 and order == math.floor(order):
        n = int(-order)
        val = bessel_j(float(n), x)
        return -val if n % 2 else val
    if x == 0.0:
        if order == 0.0:
            return 1.0
        if order > 0.0:
            return 0.0
        raise DomainError("bessel_j: negative order diverges at x = 0")
    if x < switchover(order):
        return _series_value(order, x)
    value, estimate = _asymptotic_value(order, x)
    if estimate <= REL_TARGET:
        return value
    # Expansion unusable this close to x ~ 2*order: the series still
    # converges here for moderate x; beyond its term cap we must report.
    try:
        return _series_value(order, x)
    except AccuracyLossError:
        raise AccuracyLossError(
            f"bessel_j: series/asymptotic gap at order {order}, x={x}",
            estimate) from None


def bessel_j_prime(order: float, x: float) -> float:
    """dJ_order/dx via the identity J' = J_(order-1) - (order/x) J_order."""
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"bessel_j_prime: need x > 0, got {x!r}")
    if order == 0.0:
        return -bessel_j(1.0, x)
    return bessel_j(order - 1.0, x) - (order / x) * bessel_j(order, x)


def asymptotic_threshold(order: float, max_rel_error: float = 1e-6) -> float:
    """Smallest x at which the leading asymptotic term meets max_rel_error.

    The first neglected contribution is the Q term, |4 nu^2 - 1| / (8x) in
    units of the envelope; half-integer orders 1/2 make it vanish exactly.
    """
    lead = abs(4.0 * order * order - 1.0) / 8.0
    if lead == 0.0:
        return 0.0
    return lead / max_rel_error


def bessel_asymptotic(order: float, x: float,
                      max_rel_error: float = 1e-6) -> tuple[float, float]:
    """Leading large-argument decomposition J ~ amplitude * cos(x + phase).

    Returns (amplitude, phase) with amplitude = sqrt(2/(pi x)) (independent
    of order) and phase = -order*pi/2 - pi/4.  Raises AsymptoticRangeError
    when x is below the threshold at which the leading term is good to
    max_rel_error.
    """
    if not (math.isfinite(order) and math.isfinite(x)):
        raise DomainError("bessel_asymptotic: non-finite input")
    if x <= 0.0:
        raise DomainError("bessel_asymptotic: need x > 0")
    threshold = asymptotic_threshold(order, max_rel_error)
    if x < threshold:
        raise AsymptoticRangeError(
            f"bessel_asymptotic: x={x} below threshold {threshold:.6g} for "
            f"order {order} at tolerance {max_rel_error:g}")
    return math.sqrt(2.0 / (math.pi * x)), -order * math.pi / 2.0 - math.pi / 4.0


@dataclass(frozen=True)
class BesselEval:
    """Value and derivative of J at a point, as one record."""
    order: float
    argument: float
    value: float
    derivative: float


def bessel_eval(order: float, x: float) -> BesselEval:
    """Evaluate J and dJ/dx together."""
    return BesselEval(order, x, bessel_j(order, x), bessel_j_prime(order, x))
