"""System configuration, large-scale fading tensors, and interference profiles.

The interference seen by one base station after zero-forcing is a weighted
sum of independent exponentials whose rates are the cross-cell large-scale
gains.  This module groups those gains into distinct values with
multiplicities and computes the partial-fraction ("characteristic")
coefficients that every downstream closed form consumes.
"""

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "LargeScaleFading",
    "InterferenceProfile",
    "CharacteristicExpansion",
    "build_profile",
    "characteristic_coefficients",
    "symmetric_fading",
    "save_fading_text",
    "load_fading_text",
]

# Diagonal entries closer than this (relatively) are the same eigenvalue.
CLUSTER_TOL = 1e-12
# Distinct eigenvalues closer than this make the expansion ill-conditioned.
NEAR_DEGENERATE_TOL = 1e-6


@dataclass(frozen=True)
class SystemConfig:
    """The (L, K, N, p_u) tuple: cells, users per cell, BS antennas, and the
    per-user transmit SNR in linear scale (noise power normalized to 1)."""

    num_cells: int
    users_per_cell: int
    antennas: int
    transmit_snr: float

    def __post_init__(self):
        if self.num_cells < 1 or self.users_per_cell < 1:
            raise ValueError("num_cells and users_per_cell must be >= 1")
        if self.antennas < self.users_per_cell:
            raise ValueError(
                f"zero-forcing needs antennas >= users_per_cell "
                f"({self.antennas} < {self.users_per_cell})")
        if self.transmit_snr <= 0:
            raise ValueError("transmit_snr must be positive (linear scale)")

    @property
    def zf_shape(self):
        """Erlang shape of the post-ZF desired power: N - K + 1."""
        return self.antennas - self.users_per_cell + 1


@dataclass(frozen=True)
class LargeScaleFading:
    """beta[l, i, k]: gain from user k of cell i to base station l."""

    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 3 or beta.shape[0] != beta.shape[1]:
            raise ValueError("beta must have shape (L, L, K)")
        if not np.all(beta > 0):
            raise ValueError("all large-scale gains must be positive")
        object.__setattr__(self, "beta", beta)

    @property
    def num_cells(self):
        return self.beta.shape[0]

    @property
    def users_per_cell(self):
        return self.beta.shape[2]

    def direct_gain(self, cell, user):
        return float(self.beta[cell, cell, user])


def symmetric_fading(num_cells, users_per_cell, direct=1.0, cross=0.1):
    """All direct gains equal, all cross gains equal (Scenario-I geometry)."""
    beta = np.full((num_cells, num_cells, users_per_cell), float(cross))
    for l in range(num_cells):
        beta[l, l, :] = direct
    return LargeScaleFading(beta)


@dataclass(frozen=True)
class InterferenceProfile:
    """Diagonal of the block interference matrix for one home cell, grouped
    into distinct eigenvalues (decreasing) with multiplicities."""

    home_cell: int
    diagonal: np.ndarray
    mu: np.ndarray
    tau: np.ndarray

    @property
    def is_empty(self):
        return self.diagonal.size == 0

    @property
    def num_distinct(self):
        return self.mu.size


@dataclass(frozen=True)
class CharacteristicExpansion:
    """Partial-fraction weights chi[m][n-1] of prod_m (1 - mu_m s)^-tau_m in
    the basis (1 - mu_m s)^-n.

    `chi` is float64; `chi_hi` keeps the extended-precision values the
    recursion produced, since the expansion is intrinsically cancellation-
    prone and a few extra digits in the coefficients are cheap insurance.
    """

    mu: np.ndarray
    tau: np.ndarray
    chi: tuple  # tuple of 1-D float arrays, chi[m] has length tau[m]
    chi_hi: tuple = None

    @property
    def is_empty(self):
        return self.mu.size == 0

    def terms(self):
        """Yield (mu_m, n, chi_mn) over every term of the expansion."""
        for m, mu_m in enumerate(self.mu):
            for n in range(1, int(self.tau[m]) + 1):
                yield float(mu_m), n, float(self.chi[m][n - 1])

    def terms_hi(self):
        """terms() but with the extended-precision coefficients."""
        chi = self.chi_hi if self.chi_hi is not None else self.chi
        for m, mu_m in enumerate(self.mu):
            for n in range(1, int(self.tau[m]) + 1):
                yield np.longdouble(mu_m), n, chi[m][n - 1]

    def rates(self):
        """The underlying exponential means: each mu_m repeated tau_m times."""
        return np.repeat(self.mu, self.tau)

    def mgf(self, s):
        """E e^{s Z} via the expansion; defined for s < 1/max(mu)."""
        if self.is_empty:
            return 1.0
        total = np.longdouble(0.0)
        for mu_m, n, chi in self.terms_hi():
            total = total + chi * (np.longdouble(1.0) - mu_m * np.longdouble(s)) ** (-n)
        return float(total)

    def mgf_exact(self, s):
        """E e^{s Z} directly from the product form (reference path)."""
        if self.is_empty:
            return 1.0
        total = np.longdouble(1.0)
        for mu_m, t in zip(self.mu, self.tau):
            total = total * (np.longdouble(1.0) - np.longdouble(mu_m)
                             * np.longdouble(s)) ** (-int(t))
        return float(total)

    @staticmethod
    def empty():
        return CharacteristicExpansion(np.array([]), np.array([], dtype=int),
                                       ())


def build_profile(config, fading, home_cell, merge_tol=None):
    """Collect cross-cell gains into an InterferenceProfile.

    Gains whose relative difference is below CLUSTER_TOL are one eigenvalue.
    `merge_tol` optionally widens that threshold, trading a perturbation of
    the diagonal for a better-conditioned expansion (the "merge" escape
    hatch for nearly-degenerate profiles).
    """
    beta = fading.beta
    l = home_cell
    diag = np.concatenate([beta[l, i, :] for i in range(config.num_cells)
                           if i != l]) if config.num_cells > 1 else np.array([])
    if diag.size == 0:
        return InterferenceProfile(l, diag, np.array([]),
                                   np.array([], dtype=int))
    tol = CLUSTER_TOL if merge_tol is None else float(merge_tol)
    values = np.sort(diag)[::-1]
    mu, tau = [], []
    for v in values:
        if mu and (mu[-1] - v) <= tol * mu[-1]:
            tau[-1] += 1
        else:
            mu.append(v)
            tau.append(1)
    return InterferenceProfile(l, diag, np.array(mu),
                               np.array(tau, dtype=int))


def characteristic_coefficients(profile):
    """Partial-fraction coefficients chi_{m,n} of the profile's MGF.

    For each eigenvalue mu_m the remaining product is expanded around it:
    with u = 1 - mu_m s, the product of the other factors is exp of a power
    series whose coefficients come from the exact log-derivatives, and
    chi_{m,n} is the (tau_m - n)-th series coefficient.
    """
    if profile.is_empty:
        raise ValueError("characteristic_coefficients requires a non-empty "
                         "profile (no interference when L = 1)")
    mu = profile.mu
    tau = profile.tau
    gaps = (mu[:-1] - mu[1:]) / mu[:-1] if mu.size > 1 else np.array([1.0])
    if mu.size > 1 and gaps.min() < CLUSTER_TOL:
        raise ValueError("distinct eigenvalues closer than the clustering "
                         "threshold; rebuild the profile with merge_tol")
    if mu.size > 1 and gaps.min() < NEAR_DEGENERATE_TOL:
        warnings.warn(
            "nearly degenerate eigenvalues (relative gap "
            f"{gaps.min():.2e}); the expansion may be ill-conditioned -- "
            "consider build_profile(..., merge_tol=...)", RuntimeWarning)

    chi = []
    ld = np.longdouble
    for m in range(mu.size):
        t_m = int(tau[m])
        ratios = np.array([mu[j] for j in range(mu.size) if j != m],
                          dtype=ld) / ld(mu[m])
        taus = np.array([tau[j] for j in range(mu.size) if j != m], dtype=ld)
        # g(u) = prod_j (A_j + B_j u)^{-tau_j}, A = 1 - ratio, B = ratio
        a = ld(1.0) - ratios
        c = np.empty(t_m, dtype=ld)
        c[0] = np.prod(a ** (-taus)) if ratios.size else ld(1.0)
        if t_m > 1:
            w = ratios / a  # B_j / A_j
            h = np.array([ld(-1.0) ** k / k * np.sum(taus * w ** k)
                          for k in range(1, t_m)], dtype=ld)
            for k in range(1, t_m):
                c[k] = np.sum(np.arange(1, k + 1, dtype=ld) * h[:k]
                              * c[k - 1::-1]) / k
        # chi_{m,n} = c_{tau_m - n}
        chi.append(c[::-1].copy())
    return CharacteristicExpansion(mu.copy(), tau.copy(),
                                   tuple(c.astype(float) for c in chi),
                                   tuple(chi))


# ---------------------------------------------------------------------------
# text-file interchange for fading tensors
# ---------------------------------------------------------------------------

def save_fading_text(fading, path):
    """Write a beta tensor as a plain-text table.

    Format: a header line "L K", then one line per (l, i) pair holding
    "l i beta_1 ... beta_K".  Lines starting with '#' are comments.
    """
    beta = fading.beta
    lcount, _, k = beta.shape
    with open(path, "w") as fh:
        fh.write("# large-scale fading tensor: gain from user k of cell i "
                 "to BS l\n")
        fh.write(f"{lcount} {k}\n")
        for l in range(lcount):
            for i in range(lcount):
                row = " ".join(f"{v:.17g}" for v in beta[l, i])
                fh.write(f"{l} {i} {row}\n")


def load_fading_text(path):
    with open(path) as fh:
        rows = [ln.strip() for ln in fh
                if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty fading file")
    try:
        lcount, k = (int(v) for v in rows[0].split())
    except ValueError as exc:
        raise ValueError(f"{path}: bad header line {rows[0]!r}") from exc
    if len(rows) != 1 + lcount * lcount:
        raise ValueError(f"{path}: expected {lcount * lcount} tensor rows, "
                         f"got {len(rows) - 1}")
    beta = np.zeros((lcount, lcount, k))
    seen = set()
    for ln in rows[1:]:
        parts = ln.split()
        l, i = int(parts[0]), int(parts[1])
        vals = [float(v) for v in parts[2:]]
        if len(vals) != k:
            raise ValueError(f"{path}: row ({l},{i}) has {len(vals)} gains, "
                             f"expected {k}")
        beta[l, i, :] = vals
        seen.add((l, i))
    if len(seen) != lcount * lcount:
        raise ValueError(f"{path}: duplicate or missing (l, i) rows")
    return LargeScaleFading(beta)
