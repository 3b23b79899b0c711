"""Special functions for the zero-forcing uplink closed forms.

Self-contained (numpy only): exponential integrals, upper incomplete gamma,
integer digamma, Tricomi's confluent hypergeometric U, the 2F0 reduction,
the logarithmic moment of an Erlang variable, and the exponential-integral
moment kernel I_{m,n}(a, b, alpha) used by the exact-rate expression.

Closed forms that involve alternating sums carry a running estimate of the
cancellation they suffered; the public entry points silently switch to the
adaptive-quadrature evaluation of the defining integral when that estimate
is too large to trust in double precision.
"""

import math

import numpy as np

from .quadrature import QuadratureSpec, integrate_semi_infinite

__all__ = [
    "EULER_GAMMA",
    "expint_ei",
    "expint_en",
    "expint_e1_scaled",
    "expint_en_scaled",
    "upper_gamma",
    "upper_gamma_scaled",
    "digamma_int",
    "tricomi_u",
    "hyp2f0_neg",
    "log_moment_kernel",
    "log_moment_quadrature",
    "ei_moment_kernel",
    "ei_moment_quadrature",
]

EULER_GAMMA = 0.5772156649015328606065120900824024

_ORACLE_SPEC = QuadratureSpec(relative_tolerance=1e-11,
                              absolute_tolerance=1e-300,
                              max_subdivisions=4000)

# Cancellation beyond this factor leaves fewer than ~6 reliable digits in
# double precision, so the quadrature path takes over.
_CANCEL_LIMIT = 1e10


def _check_int(value, name, minimum):
    if value != int(value):
        raise ValueError(f"{name} must be an integer, got {value}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def _en_continued_fraction(n, z):
    """Modified-Lentz continued fraction for e^z * E_n(z); good for z > ~1."""
    tiny = 1e-300
    b = z + n
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        a = -i * (n - 1 + i)
        b += 2.0
        d = a * d + b
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 5e-16:
            return h
    raise RuntimeError(f"E_{n}({z}): continued fraction did not converge")


def _en_series(n, z):
    """Power series for E_n(z), z <= 1 (Abramowitz & Stegun 5.1.12 family)."""
    if n == 1:
        psi = -EULER_GAMMA
    else:
        psi = digamma_int(n)
    if n == 1:
        ans = -math.log(z) - EULER_GAMMA
    else:
        ans = ((-z) ** (n - 1) / math.factorial(n - 1)) * (-math.log(z) + psi)
    term = 1.0  # (-z)^m / m!
    for m in range(0, 200):
        if m > 0:
            term *= -z / m
        if m == n - 1:
            continue
        contrib = -term / (m - n + 1)
        ans += contrib
        if m > 2 and abs(contrib) < 1e-17 * abs(ans):
            break
    return ans


def expint_ei(x):
    """Exponential integral Ei(x) for x < 0 (the only range the rate needs)."""
    if x >= 0:
        raise ValueError(f"expint_ei requires x < 0, got {x}")
    if x < -1.0:
        z = -x
        return -_en_continued_fraction(1, z) * math.exp(-z)
    # gamma + ln|x| + sum x^k / (k k!)
    s = EULER_GAMMA + math.log(-x)
    p = 1.0
    for k in range(1, 200):
        p *= x / k
        contrib = p / k
        s += contrib
        if abs(contrib) < 1e-17 * (abs(s) + 1e-300):
            break
    return s


def expint_en(n, z):
    """Generalized exponential integral E_n(z) = int_1^inf t^-n e^-zt dt."""
    n = _check_int(n, "n", 0)
    if z <= 0:
        raise ValueError(f"expint_en requires z > 0, got {z}")
    if n == 0:
        return math.exp(-z) / z
    if z > 1.0:
        return _en_continued_fraction(n, z) * math.exp(-z)
    return _en_series(n, z)


def expint_e1_scaled(z):
    """e^z * E_1(z); stays finite for large z where E_1 alone underflows."""
    return expint_en_scaled(1, z)


def expint_en_scaled(n, z):
    """e^z * E_n(z) without intermediate under/overflow."""
    n = _check_int(n, "n", 0)
    if z <= 0:
        raise ValueError(f"expint_en_scaled requires z > 0, got {z}")
    if n == 0:
        return 1.0 / z
    if z > 1.0:
        return _en_continued_fraction(n, z)
    return math.exp(z) * _en_series(n, z)


def upper_gamma(a, x):
    """Upper incomplete gamma for integer a >= 1:
    Gamma(a, x) = (a-1)! e^-x sum_{j<a} x^j / j!.
    """
    a = _check_int(a, "a", 1)
    if x < 0:
        raise ValueError(f"upper_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return math.exp(math.lgamma(a))
    # log-sum-exp over j*ln(x) - ln(j!) keeps large a / large x in range
    logs = [j * math.log(x) - math.lgamma(j + 1) for j in range(a)]
    top = max(logs)
    log_s = top + math.log(sum(math.exp(v - top) for v in logs))
    return math.exp(math.lgamma(a) + log_s - x)


def upper_gamma_scaled(a, x):
    """e^x Gamma(a, x) = (a-1)! sum_{j<a} x^j / j!; finite for any x >= 0."""
    a = _check_int(a, "a", 1)
    if x < 0:
        raise ValueError(f"upper_gamma_scaled requires x >= 0, got {x}")
    if x == 0.0:
        return math.exp(math.lgamma(a))
    logs = [j * math.log(x) - math.lgamma(j + 1) for j in range(a)]
    top = max(logs)
    log_s = top + math.log(sum(math.exp(v - top) for v in logs))
    return math.exp(math.lgamma(a) + log_s)


def digamma_int(n):
    """psi(n) for integer n >= 1: -gamma + sum_{k<n} 1/k."""
    n = _check_int(n, "n", 1)
    return -EULER_GAMMA + sum(1.0 / k for k in range(1, n))


def tricomi_u(a, b, z, spec=_ORACLE_SPEC):
    """Confluent hypergeometric U(a, b, z) for integer a >= 1, integer b, z > 0.

    Evaluated from the integral representation
    U = (1/Gamma(a)) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,
    which converges for every integer b once a >= 1.
    """
    a = _check_int(a, "a", 1)
    b = _check_int(b, "b", -(10 ** 9))
    if z <= 0:
        raise ValueError(f"tricomi_u requires z > 0, got {z}")
    lg = math.lgamma(a)
    c1 = a - 1.0
    c2 = b - a - 1.0

    def f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lt = np.where(t > 0, np.log(np.maximum(t, 1e-300)), -np.inf)
            arg = -z * t + c1 * lt + c2 * np.log1p(np.maximum(t, 0.0)) - lg
            out = np.where(arg < 700.0, np.exp(np.minimum(arg, 700.0)),
                           np.inf)
        out = np.where(t > 0, out, 1.0 if a == 1 else 0.0)
        return out if out.ndim else float(out)

    # Stationary point of the log-integrand locates the mass.
    bq = z - b + 2.0
    peak = (-bq + math.sqrt(bq * bq + 4.0 * z * c1)) / (2.0 * z)
    scale = max(peak, 1.0 / z)
    return integrate_semi_infinite(f, 0.0, spec, scale=scale)


def hyp2f0_neg(n, p, x):
    """2F0(n, p; --; -x) for integers n >= 1, p >= 0 and x > 0.

    Reached through U: 2F0(a, b; --; -1/z) = z^a U(a, a-b+1, z) with z = 1/x.
    p = 0 is the empty product.  For small x the x^-n prefactor would
    overflow, so the same integral is evaluated in the substituted variable
    v = t/x (and for x below the asymptotic-series cutoff, truncating that
    series at two terms is already exact to double precision).
    """
    n = _check_int(n, "n", 1)
    p = _check_int(p, "p", 0)
    if x <= 0:
        raise ValueError(f"hyp2f0_neg requires x > 0, got {x}")
    if p == 0:
        return 1.0
    if (n + 1.0) * (p + 1.0) * x < 1e-9:
        return 1.0 - n * p * x
    if x < 0.5:
        lg = math.lgamma(n)

        def f(v):
            v = np.asarray(v, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                arg = -v + (n - 1) * np.log(np.maximum(v, 1e-300)) \
                    - p * np.log1p(x * np.maximum(v, 0.0)) - lg
                out = np.exp(np.minimum(arg, 700.0))
            out = np.where(v > 0, out, 1.0 if n == 1 else 0.0)
            return out if out.ndim else float(out)

        return integrate_semi_infinite(f, 0.0, _ORACLE_SPEC, scale=float(n))
    return x ** (-n) * tricomi_u(n, n - p + 1, 1.0 / x)


# ---------------------------------------------------------------------------
# log-moment kernel: int_0^inf ln(1+a z) z^{n-1} e^{-z/mu} dz
# ---------------------------------------------------------------------------

def _log_moment_normalized_closed(n, mu, a):
    """Closed form of the kernel divided by (n-1)! mu^n, with a cancellation
    estimate.  Returns (value, amplification)."""
    c = 1.0 / float(mu)
    a = float(a)
    s = c / a  # = 1/(a mu)
    t = expint_e1_scaled(s) / a
    total = t
    amp = 1.0
    for j in range(1, n):
        frac = c * t
        denom = abs(1.0 - frac)
        if denom == 0.0 or amp * frac / denom > 1e12:
            return math.nan, math.inf  # recurrence has cancelled away
        amp = max(amp, amp * frac / denom + 1.0)
        t = (1.0 - frac) / (a * j)
        total += t
    return a * total, amp


def log_moment_quadrature(n, mu, a, spec=_ORACLE_SPEC, normalized=False):
    """Adaptive-quadrature evaluation of the log-moment integral."""
    n = _check_int(n, "n", 1)
    norm = math.lgamma(n) + n * math.log(mu) if normalized else 0.0

    def f(z):
        if z <= 0.0:
            return 0.0
        return math.log1p(a * z) * math.exp(
            (n - 1) * math.log(z) - z / mu - norm)

    return integrate_semi_infinite(f, 0.0, spec, scale=max(n * mu, mu))


def _log_moment_normalized(n, mu, a):
    """E-based kernel / ((n-1)! mu^n); switches to quadrature when the
    forward recurrence has cancelled too much."""
    value, amp = _log_moment_normalized_closed(n, mu, a)
    if amp < 1e6 and math.isfinite(value):
        return value
    return log_moment_quadrature(n, mu, a, normalized=True)


def log_moment_kernel(n, mu, a):
    """int_0^inf ln(1 + a z) z^{n-1} e^{-z/mu} dz for integer n >= 1.

    Equals Gamma(n+1) a mu^{n+1} 3F1(n+1, 1, 1; 2; -a mu); the 3F1 is never
    summed directly (zero radius of convergence at negative argument), the
    integral itself is the definition used here.
    """
    n = _check_int(n, "n", 1)
    if mu <= 0:
        raise ValueError(f"log_moment_kernel requires mu > 0, got {mu}")
    if a < 0:
        raise ValueError(f"log_moment_kernel requires a >= 0, got {a}")
    if a == 0.0:
        return 0.0
    return _log_moment_normalized(n, mu, a) * math.exp(
        math.lgamma(n) + n * math.log(mu))


# ---------------------------------------------------------------------------
# Ei-moment kernel: I_{m,n}(a, b, alpha)
#   = int_0^inf x^m (a x + b)^n e^{-alpha x} Ei(-(a x + b)) dx
# ---------------------------------------------------------------------------

def _kp(p, al, mu, ei_al):
    """K_p(al, mu) = boundary + incomplete-gamma tail of the recursion.
    Returns (value, sum of |contributions|)."""
    ld = np.longdouble
    t1 = np.exp(ld(-al * mu)) * ld(al) ** p / ld(mu) * ld(ei_al)
    # running term: q! C(p-1,q) al^{p-q-1} / (mu+1)^{q+1}
    term = ld(al) ** (p - 1) / ld(mu + 1.0)
    acc = term
    for q in range(1, p):
        term = term * ld(p - q) / (ld(al) * ld(mu + 1.0))
        acc += term
    t2 = np.exp(ld(-al * (mu + 1.0))) / ld(mu) * acc
    return t1 + t2, abs(t1) + abs(t2)


def _ei_moment_closed(m, n, a, b, alpha):
    """Closed form via the J_p/K_p integration-by-parts recursion.

    Returns (value, cancellation_estimate).  Evaluated in extended
    precision; the estimate mirrors the recursion on absolute values, so
    the step-by-step error amplification J_p <- (p/mu) J_{p-1} is counted.
    """
    ld = np.longdouble
    mu = alpha / a
    pmax = n + m
    ei_b = expint_ei(-b)
    arg2 = (mu + 1.0) * b
    ei_2 = expint_ei(-float(arg2)) if arg2 < 700 else 0.0

    j = (-ld(ei_2) + np.exp(ld(-b * mu)) * ld(ei_b)) / ld(mu)
    # seed the error tracking with the component magnitudes: J_0 is itself
    # a difference of two exponential-integral terms
    j_abs = (abs(ld(ei_2)) + np.exp(ld(-b * mu)) * abs(ld(ei_b))) / ld(mu)
    js = [j]
    js_abs = [j_abs]
    for p in range(1, pmax + 1):
        k_val, k_abs = _kp(p, b, float(mu), ei_b)
        gain = ld(p) / ld(mu)
        j = k_val + gain * j
        j_abs = k_abs + gain * j_abs
        js.append(j)
        js_abs.append(j_abs)

    total = ld(0.0)
    outer_abs = ld(0.0)
    coeff = ld(-b) ** m  # C(m,i) (-b)^{m-i}, i = 0
    for i in range(0, m + 1):
        if i > 0:
            coeff = coeff * ld(m - i + 1) / (ld(i) * ld(-b))
        total += coeff * js[n + i]
        outer_abs += abs(coeff) * js_abs[n + i]
    pref = np.exp(ld(alpha * b / a)) / ld(a) ** (m + 1)
    value = float(pref * total)
    if not math.isfinite(value) or value == 0.0:
        return value, math.inf
    cond = float(outer_abs / abs(total))
    return value, cond


def ei_moment_quadrature(m, n, a, b, alpha, spec=_ORACLE_SPEC):
    """Direct adaptive quadrature of the defining integral.

    Raises OverflowError when the integrand (hence the integral) exceeds
    the double-precision range, which happens for large n with b >> 1.
    """

    def f(x):
        w = a * x + b
        ei = expint_ei(-w) if w < 700 else 0.0
        if ei == 0.0:
            return 0.0
        lx = m * math.log(x) if x > 0 else (0.0 if m == 0 else -math.inf)
        if lx == -math.inf:
            return 0.0
        logval = lx + n * math.log(w) - alpha * x + math.log(-ei)
        if logval > 705.0:
            raise OverflowError(
                "Ei-moment integrand exceeds double-precision range "
                f"(m={m}, n={n}, a={a}, b={b}, alpha={alpha})")
        return -math.exp(logval)

    return integrate_semi_infinite(f, 0.0, spec,
                                   scale=(m + n + 1.0) / alpha)


# The recursion consumes float64 Ei values, so its achievable accuracy is
# condition * 2.2e-16; accept the closed form only while that stays well
# inside the layer's 1e-8 oracle contract.
_EI_MOMENT_COND_LIMIT = 1e7


def ei_moment_kernel(m, n, a, b, alpha):
    """I_{m,n}(a, b, alpha); strictly negative since Ei(-(ax+b)) < 0.

    Closed form when it is trustworthy in double precision, otherwise the
    defining integral.
    """
    m = _check_int(m, "m", 0)
    n = _check_int(n, "n", 0)
    if a <= 0 or b <= 0 or alpha <= 0:
        raise ValueError("ei_moment_kernel requires a, b, alpha > 0")
    value, cond = _ei_moment_closed(m, n, a, b, alpha)
    if math.isfinite(value) and cond < _EI_MOMENT_COND_LIMIT:
        return value
    return ei_moment_quadrature(m, n, a, b, alpha)
