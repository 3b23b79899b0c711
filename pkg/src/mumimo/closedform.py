"""Exact closed-form uplink metrics: ergodic rate, rate lower bound, M-PSK
symbol error rate (exact, high-SNR floor, three-point approximation), and
outage probability.

Every expression is an exact finite formula for the post-ZF SINR law, but
several contain binomial-weighted alternating sums that cancel
catastrophically once N - K is large.  Sums are therefore accumulated in
extended precision with a running condition estimate
(sum |terms| / |sum|); when it exceeds the guard, evaluation switches to
adaptive quadrature of the defining integral and the event is recorded in
the caller's QualityLog.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureSpec, integrate, integrate_semi_infinite
from .sinrdist import make_sinr_model, mgf_sinr, mgf_sinr_high_snr
from .specfun import (_ei_moment_closed, _log_moment_normalized, digamma_int,
                      ei_moment_quadrature, tricomi_u, upper_gamma_scaled)

__all__ = [
    "ModulationScheme",
    "RateResult",
    "QualityLog",
    "rate_exact",
    "rate_by_quadrature",
    "rate_lower_bound",
    "cell_sum_rate",
    "ser_exact",
    "ser_high_snr",
    "ser_approx",
    "outage_exact",
    "outage_small_threshold",
]

LOG2E = 1.0 / math.log(2.0)
_CANCEL_LIMIT = 1e12
_RATE_SPEC = QuadratureSpec(relative_tolerance=1e-9,
                            absolute_tolerance=1e-300)


@dataclass(frozen=True)
class ModulationScheme:
    """M-ary PSK constellation constants for the MGF-based SER."""

    psk_order: int

    def __post_init__(self):
        if self.psk_order < 2:
            raise ValueError("psk_order must be >= 2")

    @property
    def g_mpsk(self):
        return math.sin(math.pi / self.psk_order) ** 2

    @property
    def theta_max(self):
        return math.pi - math.pi / self.psk_order


@dataclass(frozen=True)
class RateResult:
    value: float  # bits/s/Hz
    method: str   # exact_general | exact_distinct | lower_bound | quadrature_fallback
    cancellation_flagged: bool = False


class QualityLog:
    """Collects numerical-quality events (cancellation-guard fallbacks)."""

    def __init__(self):
        self._lock = threading.Lock()
        self.events = []

    def flag(self, message):
        with self._lock:
            self.events.append(message)

    @property
    def tripped(self):
        return bool(self.events)


def _note(quality, message):
    if quality is not None:
        quality.flag(message)


# ---------------------------------------------------------------------------
# ergodic rate
# ---------------------------------------------------------------------------

def _rate_no_interference(config, beta):
    """L = 1: E ln(1 + p_u X) is the Erlang log-moment."""
    nu = config.zf_shape
    return LOG2E * _log_moment_normalized(nu, beta, config.transmit_snr)


def rate_by_quadrature(config, fading, expansion, user, cell,
                       spec=_RATE_SPEC):
    """E log2(1 + p_u X/(p_u Z + 1)) by integrating the conditional Erlang
    log-moment against the interference density.  This is the arbiter path:
    no alternating sums anywhere."""
    beta = fading.direct_gain(cell, user)
    if expansion.is_empty:
        return _rate_no_interference(config, beta)
    nu = config.zf_shape
    p_u = config.transmit_snr
    dist_mean = float(np.sum(expansion.rates()))

    def f(z):
        a = p_u / (p_u * z + 1.0)
        inner = _log_moment_normalized(nu, beta, a)
        return inner * _pdf_z_expansion(expansion, z)

    val = integrate_semi_infinite(f, 0.0, spec, scale=max(dist_mean, 1.0))
    return LOG2E * val


def _pdf_z_expansion(expansion, z):
    if z < 0:
        return 0.0
    total = np.longdouble(0.0)
    for mu, n, chi in expansion.terms_hi():
        if z == 0:
            if n == 1:
                total += chi / mu
            continue
        total += chi * np.exp(-np.longdouble(z) / mu
                              + (n - 1) * np.log(np.longdouble(z) / mu)
                              - np.longdouble(math.lgamma(n))) / mu
    return float(total)


def _rate_terms_representable(n, big_j, zmu, mu0, a_in, b_in, alph):
    """Cheap magnitude precheck: the largest Tricomi-U value and the
    Ei-moment kernel magnitude must fit in double precision (the recursion
    itself gets extended-precision headroom).  When they cannot, the sum's
    condition number is astronomically past the guard anyway, so the
    caller goes straight to quadrature."""
    if big_j >= 1:
        d = big_j - 1
        # U(n, n+d+1, z) ~ Gamma(n+d)/Gamma(n) z^{-(n+d)} for small z
        log_u = max(math.lgamma(n + d) - math.lgamma(n)
                    - (n + d) * math.log(zmu),
                    -n * math.log(zmu))
        if log_u > 690.0:
            return False
    pmax = n - 1 + big_j
    if pmax >= 1:
        # |I_{n-1,J}| ~ e^{alpha b / a} a^{-m-1} max(b,1)^pmax J-growth,
        # with the recursion gaining p/mu0 per step
        log_i = (alph * b_in / a_in + math.lgamma(pmax + 1)
                 - pmax * math.log(mu0)
                 + pmax * math.log(max(b_in, 1.0))
                 - (n) * math.log(a_in))
        if log_i > 700.0:  # kernel would overflow the double-valued terms
            return False
    return True


_EPS_LD = float(np.finfo(np.longdouble).eps)
_EI_MOMENT_INNER_LIMIT = 1e6   # beyond this, a quadrature I-value is cheaper/safer
_U_RELERR = 1e-11           # tricomi_u quadrature tolerance
_RATE_RELERR_LIMIT = 1e-6   # accepted propagated error of the closed rate


def _ei_moment_value(m, n, a, b, alpha):
    """(value, relative-error estimate) for one I_{m,n} kernel.

    The closed recursion is driven by float64 Ei values, hence the 2.2e-16
    error scale.
    """
    val, cond = _ei_moment_closed(m, n, a, b, alpha)
    if math.isfinite(val) and cond <= _EI_MOMENT_INNER_LIMIT:
        return val, max(cond * 2.3e-16, 1e-16)
    try:
        return ei_moment_quadrature(m, n, a, b, alpha), _U_RELERR
    except OverflowError:
        # the kernel itself exceeds double range; poison the sum so the
        # caller switches to its own quadrature path
        return math.inf, math.inf


def _rate_general(config, beta, expansion):
    """General exact rate, valid for arbitrary eigenvalue multiplicities.

    Returns (value, condition, propagated relative error).  Per (m, n) term
    the inner structure is
      -e^{1/(beta p_u)} I_{n-1, w}(1/beta, 1/(beta p_u), 1/mu - 1/beta)
      + q-sum of Tricomi-U values,
    summed over w = N-K-p with alternating binomial weights.  Inner-kernel
    error estimates are propagated so that cancellation in either layer is
    visible to the guard.
    """
    nu = config.zf_shape
    big_j = nu - 1  # N - K
    p_u = config.transmit_snr
    a_in = 1.0 / beta
    b_in = 1.0 / (beta * p_u)
    ld = np.longdouble
    exp_b = np.exp(ld(b_in))
    total = ld(0.0)
    total_abs = ld(0.0)
    err = ld(0.0)
    for mu, n, chi in expansion.terms_hi():
        if chi == 0.0:
            continue
        alph = 1.0 / float(mu) - 1.0 / beta
        if alph <= 0:
            return math.nan, math.inf, math.inf  # outside the kernel domain
        zmu = 1.0 / (float(mu) * p_u)
        if not _rate_terms_representable(n, big_j, zmu, alph / a_in,
                                         a_in, b_in, alph):
            return math.nan, math.inf, math.inf
        # U(n, n + d + 1, zmu) for d = 0 .. J-1, shared across the p-sum
        us = [ld(tricomi_u(n, n + d + 1, zmu)) for d in range(big_j)]
        zmu_n = ld(zmu) ** n
        lg_n = ld(math.lgamma(n))
        for p in range(big_j + 1):
            w = big_j - p
            i_val, i_rel = _ei_moment_value(n - 1, w, a_in, b_in, alph)
            sign = ld(1.0) if w % 2 == 0 else ld(-1.0)
            lw = ld(math.lgamma(w + 1))
            term_i = -chi * np.exp(-n * np.log(ld(mu)) - lg_n - lw) \
                * sign * exp_b * ld(i_val)
            total += term_i
            total_abs += abs(term_i)
            err += abs(term_i) * ld(i_rel)
            # q-sum collapsed to d = w - q: (w-1-d)! (-1)^d (beta p_u)^-d U_d
            qacc = ld(0.0)
            qabs = ld(0.0)
            for d in range(w):
                piece = np.exp(ld(math.lgamma(w - d))
                               - d * np.log(ld(beta * p_u)) - lw) * us[d]
                if d % 2 == 1:
                    piece = -piece
                qacc += piece
                qabs += abs(piece)
            total += chi * zmu_n * qacc
            total_abs += abs(chi) * zmu_n * qabs
            err += abs(chi) * zmu_n * qabs * ld(_U_RELERR)
    err += total_abs * ld(_EPS_LD)
    value = float(total) * LOG2E
    if not math.isfinite(value) or value <= 0.0 or total == 0.0:
        return value, math.inf, math.inf
    return value, float(total_abs / abs(total)), float(err / abs(total))


def _rate_distinct(config, beta, expansion):
    """Distinct-eigenvalue specialization: the q-sum reduces to scaled upper
    incomplete gammas instead of Tricomi U.  Returns (value, condition,
    propagated relative error)."""
    nu = config.zf_shape
    big_j = nu - 1
    p_u = config.transmit_snr
    a_in = 1.0 / beta
    b_in = 1.0 / (beta * p_u)
    ld = np.longdouble
    exp_b = np.exp(ld(b_in))
    total = ld(0.0)
    total_abs = ld(0.0)
    err = ld(0.0)
    for mu, n, chi in expansion.terms_hi():
        if chi == 0.0:
            continue
        alph = 1.0 / float(mu) - 1.0 / beta
        if alph <= 0:
            return math.nan, math.inf, math.inf
        zmu = 1.0 / (float(mu) * p_u)
        if big_j >= 1 and math.lgamma(big_j) + max(0.0, zmu) > 690.0:
            return math.nan, math.inf, math.inf  # gammas exceed double range
        if not _rate_terms_representable(1, big_j, zmu, alph / a_in,
                                         a_in, b_in, alph):
            return math.nan, math.inf, math.inf
        # e^{zmu} Gamma(d+1, zmu) for d = 0 .. J-1
        gs = [ld(upper_gamma_scaled(d + 1, zmu)) for d in range(big_j)]
        inv_mu = ld(1.0) / ld(mu)
        for p in range(big_j + 1):
            w = big_j - p
            i_val, i_rel = _ei_moment_value(0, w, a_in, b_in, alph)
            sign = ld(1.0) if w % 2 == 0 else ld(-1.0)
            lw = ld(math.lgamma(w + 1))
            term_i = -chi * inv_mu * np.exp(-lw) * sign * exp_b * ld(i_val)
            total += term_i
            total_abs += abs(term_i)
            err += abs(term_i) * ld(i_rel)
            qacc = ld(0.0)
            qabs = ld(0.0)
            for d in range(w):
                # q = w - d: (q-1)! (-1)^q beta^{-d} mu^{d+1} e^z Gamma(d+1, z)
                piece = np.exp(ld(math.lgamma(w - d)) - lw
                               - d * np.log(ld(beta))
                               + (d + 1) * np.log(ld(mu))) * gs[d]
                if (w - d) % 2 == 1:
                    piece = -piece
                qacc += piece
                qabs += abs(piece)
            # (-1)^w prefactor times the (-1)^{w-d} inner signs gives (-1)^d
            total += chi * inv_mu * sign * qacc
            total_abs += abs(chi) * inv_mu * qabs
            err += abs(chi) * inv_mu * qabs * ld(1e-14)
    err += total_abs * ld(_EPS_LD)
    value = float(total) * LOG2E
    if not math.isfinite(value) or value <= 0.0 or total == 0.0:
        return value, math.inf, math.inf
    return value, float(total_abs / abs(total)), float(err / abs(total))


def rate_exact(config, fading, expansion, user, cell, quality=None):
    """Exact ergodic uplink rate of one user, in bits/s/Hz.

    Uses the distinct-eigenvalue specialization when every eigenvalue is
    simple, the general formula otherwise, and the quadrature arbiter when
    the sums are too ill-conditioned (large N - K) or an eigenvalue exceeds
    the direct gain.
    """
    beta = fading.direct_gain(cell, user)
    if expansion.is_empty:
        return RateResult(_rate_no_interference(config, beta),
                          "exact_general")
    distinct = bool(np.all(expansion.tau == 1))
    if distinct:
        value, cond, rel_err = _rate_distinct(config, beta, expansion)
        method = "exact_distinct"
    else:
        value, cond, rel_err = _rate_general(config, beta, expansion)
        method = "exact_general"
    if (math.isfinite(value) and cond <= _CANCEL_LIMIT
            and rel_err <= _RATE_RELERR_LIMIT):
        return RateResult(value, method)
    _note(quality, f"rate_exact: cancellation guard tripped "
                   f"(condition {cond:.3g}, error estimate {rel_err:.3g}); "
                   f"used quadrature")
    value = rate_by_quadrature(config, fading, expansion, user, cell)
    return RateResult(value, "quadrature_fallback", cancellation_flagged=True)


def rate_lower_bound(config, fading, expansion, user, cell, quality=None):
    """Jensen lower bound: log2(1 + p_u beta e^{psi(N-K+1) - E ln(p_u Z+1)})."""
    beta = fading.direct_gain(cell, user)
    nu = config.zf_shape
    p_u = config.transmit_snr
    log_interf = 0.0
    for mu, n, chi in expansion.terms():
        if chi == 0.0:
            continue
        log_interf += chi * _log_moment_normalized(n, mu, p_u)
    value = math.log1p(p_u * beta
                       * math.exp(digamma_int(nu) - log_interf)) * LOG2E
    return RateResult(value, "lower_bound")


def cell_sum_rate(config, fading, cell, expansion, method="exact",
                  quality=None):
    """Per-cell sum rate: K times the mean per-user rate.

    Symmetric profiles (all users of the cell identical) are computed once
    and scaled by K.
    """
    fn = {"exact": rate_exact, "bound": rate_lower_bound}[method]
    beta_row = fading.beta[cell, cell, :]
    if np.all(beta_row == beta_row[0]):
        return config.users_per_cell * fn(config, fading, expansion, 0, cell,
                                          quality=quality).value
    vals = [fn(config, fading, expansion, k, cell, quality=quality).value
            for k in range(config.users_per_cell)]
    return config.users_per_cell * float(np.mean(vals))


# ---------------------------------------------------------------------------
# symbol error rate
# ---------------------------------------------------------------------------

_GL_CACHE = {}


def _gauss_legendre(order, lo, hi):
    key = (order, lo, hi)
    if key not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[key] = (0.5 * (hi - lo) * (x + 1.0) + lo,
                          0.5 * (hi - lo) * w)
    return _GL_CACHE[key]


def _ser_integral(mgf, modulation, integration):
    """(1/pi) int_0^Theta M(g / sin^2 theta) dtheta.

    Fixed 64-node Gauss-Legendre checked against 128 nodes; adaptive
    subdivision only if they disagree beyond the requested tolerance.
    """
    g = modulation.g_mpsk
    theta = modulation.theta_max
    spec = integration or QuadratureSpec(relative_tolerance=1e-8,
                                         absolute_tolerance=1e-12)

    def integrand(t):
        sin2 = math.sin(t) ** 2
        if sin2 == 0.0:
            return 0.0
        return mgf(g / sin2)

    x64, w64 = _gauss_legendre(64, 0.0, theta)
    x32, w32 = _gauss_legendre(32, 0.0, theta)
    est64 = sum(w * integrand(t) for t, w in zip(x64, w64)) / math.pi
    est32 = sum(w * integrand(t) for t, w in zip(x32, w32)) / math.pi
    if abs(est64 - est32) <= max(spec.absolute_tolerance,
                                 spec.relative_tolerance * abs(est64)):
        return min(1.0, max(0.0, est64))
    value = integrate(integrand, 0.0, theta, spec) / math.pi
    return min(1.0, max(0.0, value))


def ser_exact(config, fading, expansion, modulation, user, cell,
              integration=None, quality=None):
    """Average M-PSK SER from the closed-form MGF."""
    model = make_sinr_model(config, fading, user, cell, expansion=expansion)
    return _ser_integral(lambda s: mgf_sinr(model, s, quality=quality),
                         modulation, integration)


def ser_high_snr(config, fading, expansion, modulation, user, cell,
                 integration=None, quality=None):
    """SNR-independent SER floor (diversity order zero under interference)."""
    model = make_sinr_model(config, fading, user, cell, expansion=expansion)
    return _ser_integral(lambda s: mgf_sinr_high_snr(model, s,
                                                     quality=quality),
                         modulation, integration)


def ser_approx(config, fading, expansion, modulation, user, cell,
               quality=None):
    """Three-evaluation SER approximation (no theta integration)."""
    model = make_sinr_model(config, fading, user, cell, expansion=expansion)
    g = modulation.g_mpsk
    theta = modulation.theta_max
    m = lambda s: mgf_sinr(model, s, quality=quality)
    val = ((theta / (2 * math.pi) - 1.0 / 6.0) * m(g)
           + 0.25 * m(4.0 * g / 3.0)
           + (theta / (2 * math.pi) - 0.25) * m(g / math.sin(theta) ** 2))
    return min(1.0, max(0.0, val))


# ---------------------------------------------------------------------------
# outage probability
# ---------------------------------------------------------------------------

def _outage_inner(nu, mu, n, c, d, big_j):
    """Vector A_q = c^q Gamma(n+q) mu^-n / ((n-1)! q! d^{n+q}), q = 0..J."""
    a = np.empty(big_j + 1, dtype=np.longdouble)
    a[0] = np.exp(-np.longdouble(n) * (np.log(np.longdouble(mu))
                                       + np.log(np.longdouble(d))))
    for q in range(big_j):
        a[q + 1] = a[q] * c * (n + q) / ((q + 1) * d)
    return a


def outage_exact(config, fading, expansion, user, cell, gamma_th):
    """P{gamma <= gamma_th}: exact finite-sum outage probability."""
    if gamma_th <= 0:
        return 0.0
    beta = fading.direct_gain(cell, user)
    p_u = config.transmit_snr
    if expansion.is_empty:
        from .sinrdist import DesiredPowerDist, cdf_x
        return cdf_x(DesiredPowerDist(config.zf_shape, beta),
                     gamma_th / p_u)
    big_j = config.zf_shape - 1  # N - K
    c = gamma_th / beta
    t = 1.0 / p_u
    ld = np.longdouble
    # B_j = (c t)^j / j!
    b = np.empty(big_j + 1, dtype=ld)
    b[0] = 1.0
    for j in range(big_j):
        b[j + 1] = b[j] * c * t / (j + 1)
    total = ld(0.0)
    for mu, n, chi in expansion.terms_hi():
        if chi == 0.0:
            continue
        d = 1.0 / float(mu) + c
        a = _outage_inner(config.zf_shape, float(mu), n, c, d, big_j)
        s_a = np.cumsum(a)
        inner = np.sum(b * s_a[::-1])
        total += chi * inner
    value = 1.0 - math.exp(-c * t) * float(total)
    return min(1.0, max(0.0, value))


def outage_small_threshold(config, fading, expansion, user, cell, gamma_th):
    """Small-threshold / high-SNR outage asymptote (keeps only p = q terms);
    independent of the transmit power."""
    if gamma_th <= 0:
        return 0.0
    beta = fading.direct_gain(cell, user)
    if expansion.is_empty:
        return 0.0  # no interference: outage vanishes as p_u -> infinity
    big_j = config.zf_shape - 1
    c = gamma_th / beta
    total = np.longdouble(0.0)
    for mu, n, chi in expansion.terms_hi():
        if chi == 0.0:
            continue
        d = 1.0 / float(mu) + c
        a = _outage_inner(config.zf_shape, float(mu), n, c, d, big_j)
        total += chi * np.sum(a)
    return min(1.0, max(0.0, 1.0 - float(total)))
