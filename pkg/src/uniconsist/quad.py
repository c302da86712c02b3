"""Quadratic sequence-model tests with scaled weight profiles.

The statistic is T_n(y) = Sum_j kappa_nj^2 y_j^2 - sigma^2 rho_n / n with
rho_n = Sum_j kappa_nj^2. Standardizing by the exact null standard deviation
sigma^4 n^{-2} sqrt(2 A_n), where A_n = sigma^{-4} n^2 Sum_j kappa_nj^4,
gives the decision

    reject  iff  sigma^{-4} n^2 T_n(y) / sqrt(2 A_n) > x_alpha,

with Gaussian power prediction beta = Phi(x_alpha - R_n / sqrt(2 A_n)),
R_n(theta) = sigma^{-4} n^2 Sum_j kappa_nj^2 theta_j^2.

Weight profiles follow the scaled family

    kappa_nj^2 = n^{-lam} / (j^gamma + c n^beta),
    beta = (2 - 4r) gamma,  lam = 2 - 2r - beta,

whose effective dimension k_n (smallest index where the cumulative weight
passes half of rho_n) grows like n^{2-4r}. A banded variant zeroes the
weights above a cut l_n and takes k_n := l_n. The fixed-weight statistic
T(z) = Sum_j kappa_j^2 z_j^2 (no n-scaling, summable decreasing weights)
covers the boundary rate r = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import AssumptionError, ValidationError
from .reports import TestReport
from .signals import SignalSpec

_A4_DELTA_GRID = (0.5, 1.0, 2.0, 4.0)
_A5_C_GRID = (1.5, 2.0, 4.0)


def gaussian_upper_quantile(alpha: float) -> float:
    """x_alpha with 1 - Phi(x_alpha) = alpha (machine-precision inverse)."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0, 1)")
    return float(stats.norm.isf(alpha))


def _as_energy(theta) -> np.ndarray:
    """Per-index squared coefficient mass from a SignalSpec or raw array."""
    if isinstance(theta, SignalSpec):
        return theta.index_energy()
    arr = np.asarray(theta, dtype=float)
    if arr.ndim != 1:
        raise ValidationError("coefficient array must be 1-D")
    return np.square(arr)


@dataclass(frozen=True)
class KappaProfile:
    """Scaled weight family with per-n derived quantities.

    ``kappa_sq[n]`` is the length-J weight vector; ``rho``, ``A``, ``k`` and
    ``kappa_n_sq`` hold rho_n, A_n, the cumulative-definition k_n and the
    weight at k_n. ``assumptions`` carries the measured structural margins
    (bounds on A_n and rho_n n^{2r}, weight-decay ratios past k_n, flatness
    ratios within a constant multiple of k_n, and the relative truncation
    tail); monotone decay of the weights is enforced, the rest are reported.
    """

    r: float
    gamma: float
    c: float
    J: int
    n_list: tuple[int, ...]
    sigma: float
    mode: str
    kappa_sq: dict[int, np.ndarray]
    rho: dict[int, float]
    A: dict[int, float]
    k: dict[int, int]
    kappa_n_sq: dict[int, float]
    assumptions: dict

    @property
    def beta_exponent(self) -> float:
        return (2.0 - 4.0 * self.r) * self.gamma

    @property
    def lambda_exponent(self) -> float:
        return 2.0 - 2.0 * self.r - self.beta_exponent

    def require_n(self, n: int):
        if n not in self.kappa_sq:
            raise ValidationError(f"n = {n} not in profile n_list {self.n_list}")

    def to_json_dict(self) -> dict:
        return {"r": self.r, "gamma": self.gamma, "c": self.c, "J": self.J,
                "n_list": list(self.n_list), "mode": self.mode}


def cumulative_k(kappa_sq: np.ndarray, rho: float) -> int:
    """k_n = max{k : Sum_{j<k} kappa_j^2 <= rho/2} (exact definition)."""
    prefix = np.concatenate([[0.0], np.cumsum(kappa_sq)[:-1]])
    return int(np.searchsorted(prefix, rho / 2.0, side="right"))


def build_profile(r: float, gamma: float, c: float, J: int, n_list,
                  sigma: float = 1.0, band_limit=None) -> KappaProfile:
    """Construct and validate a scaled weight profile.

    ``band_limit``: optional map n -> l_n activating the banded variant
    (weights zero above l_n, k_n := l_n, kappa_n^2 := kappa_n1^2).
    """
    if not (0.0 < r < 0.5):
        raise ValidationError("rate r must lie in (0, 1/2); r = 1/2 uses FixedKappa")
    if gamma <= 1.0:
        raise AssumptionError("A1", f"weight decay requires gamma > 1, got {gamma}")
    if c <= 0.0:
        raise ValidationError("c must be positive")
    if sigma <= 0.0:
        raise ValidationError("sigma must be positive")
    n_list = tuple(int(n) for n in n_list)
    if not n_list or any(n < 2 for n in n_list):
        raise ValidationError("n_list must contain integers >= 2")
    J = int(J)
    if J < 2:
        raise ValidationError("J must be at least 2")

    beta = (2.0 - 4.0 * r) * gamma
    lam = 2.0 - 2.0 * r - beta
    j = np.arange(1, J + 1, dtype=float)
    kappa_sq, rho, A, k, kn_sq = {}, {}, {}, {}, {}
    tail_rel = {}
    mode = "scaled" if band_limit is None else "banded"
    for n in n_list:
        w = n ** (-lam) / (np.power(j, gamma) + c * n ** beta)
        if band_limit is not None:
            l_n = int(band_limit(n)) if callable(band_limit) else int(band_limit)
            if not 1 <= l_n <= J:
                raise ValidationError(f"band limit {l_n} outside 1..J for n={n}")
            w = w.copy()
            w[l_n:] = 0.0
        if np.any(np.diff(w) > 0.0):
            raise AssumptionError("A1", f"weights not nonincreasing at n={n}")
        w.flags.writeable = False
        rho_n = float(np.sum(w))
        if rho_n <= 0.0:
            raise ValidationError(f"degenerate profile at n={n}")
        kappa_sq[n] = w
        rho[n] = rho_n
        A[n] = float(sigma ** (-4) * n ** 2 * np.sum(np.square(w)))
        if band_limit is not None:
            k[n] = int(band_limit(n)) if callable(band_limit) else int(band_limit)
            kn_sq[n] = float(w[0])
        else:
            k[n] = cumulative_k(w, rho_n)
            kn_sq[n] = float(w[k[n] - 1])
        # Crude integral bound on the dropped tail Sum_{j>J} kappa_nj^2.
        tail = n ** (-lam) * J ** (1.0 - gamma) / (gamma - 1.0)
        tail_rel[n] = float(tail / rho_n) if band_limit is None else 0.0

    a_vals = np.array([A[n] for n in n_list])
    rho_scaled = np.array([rho[n] * n ** (2.0 * r) for n in n_list])
    label = "A6" if band_limit is not None else "A4"
    decay, flat_first, flat_band = {}, [], {}
    for n in n_list:
        w = kappa_sq[n]
        kn = k[n]
        flat_first.append(float(w[0] / kn_sq[n]))
        for d in _A4_DELTA_GRID:
            idx = int((1.0 + d) * kn)
            val = float(w[idx - 1] / kn_sq[n]) if idx <= J else 0.0
            decay.setdefault(d, []).append(val * (1.0 + d) ** gamma)
        for cc in _A5_C_GRID:
            idx = int(cc * kn)
            val = float(w[idx - 1] / kn_sq[n]) if idx <= J else 0.0
            flat_band.setdefault(cc, []).append(val)
    assumptions = {
        "A2": {"min_A": float(a_vals.min()), "max_A": float(a_vals.max())},
        "A3": {"c1": float(rho_scaled.min()), "c2": float(rho_scaled.max())},
        label: {"decay_constant": {d: max(v) for d, v in decay.items()}},
        "A5": {"first_over_kn": {"min": min(flat_first), "max": max(flat_first)},
               "band_ratio_min": {cc: min(v) for cc, v in flat_band.items()}},
        "tail_rel": tail_rel,
    }
    return KappaProfile(r=r, gamma=gamma, c=c, J=J, n_list=n_list, sigma=sigma,
                        mode=mode, kappa_sq=kappa_sq, rho=rho, A=A, k=k,
                        kappa_n_sq=kn_sq, assumptions=assumptions)


@dataclass(frozen=True)
class QuadTestConfig:
    profile: KappaProfile
    alpha: float
    x_alpha: float = field(init=False)

    def __post_init__(self):
        x = gaussian_upper_quantile(self.alpha)
        if abs((1.0 - stats.norm.cdf(x)) - self.alpha) > 1e-8:
            raise ValidationError("critical point fails the quantile identity")
        object.__setattr__(self, "x_alpha", x)


def quad_statistic(y: np.ndarray, profile: KappaProfile, n: int) -> float:
    """Raw centered statistic T_n(y) for one observation vector."""
    profile.require_n(n)
    y = np.asarray(y, dtype=float)
    if y.shape != (profile.J,):
        raise ValidationError(f"observation length {y.shape} != (J,) = ({profile.J},)")
    w = profile.kappa_sq[n]
    return float(w @ np.square(y) - profile.sigma ** 2 * profile.rho[n] / n)


def noncentrality(theta, profile: KappaProfile, n: int) -> float:
    """R_n(theta) = sigma^{-4} n^2 Sum_j kappa_nj^2 theta_j^2."""
    profile.require_n(n)
    energy = _as_energy(theta)
    if energy.size > profile.J:
        if np.any(energy[profile.J:] > 0.0):
            raise ValidationError(
                "signal support exceeds profile truncation J; rebuild with larger J")
        energy = energy[:profile.J]
    w = profile.kappa_sq[n][:energy.size]
    return float(profile.sigma ** (-4) * n ** 2 * (w @ energy))


def null_variance(profile: KappaProfile, n: int) -> float:
    """Exact finite-J null variance of T_n: 2 sigma^4 n^{-2} Sum kappa^4."""
    profile.require_n(n)
    return float(2.0 * profile.sigma ** 4 * n ** (-2)
                 * np.sum(np.square(profile.kappa_sq[n])))


def predict_beta(R_n: float, A_n: float, x_alpha: float) -> float:
    """Gaussian type-II error Phi(x_alpha - R_n / sqrt(2 A_n))."""
    return float(stats.norm.cdf(x_alpha - R_n / math.sqrt(2.0 * A_n)))


def decide_and_predict(y: np.ndarray, config: QuadTestConfig, n: int,
                       theta=None) -> TestReport:
    """Standardize, decide, and (when theta is given) predict power."""
    profile = config.profile
    t_raw = quad_statistic(y, profile, n)
    A_n = profile.A[n]
    standardized = profile.sigma ** (-4) * n ** 2 * t_raw / math.sqrt(2.0 * A_n)
    r_n = None if theta is None else noncentrality(theta, profile, n)
    beta = None if r_n is None else predict_beta(r_n, A_n, config.x_alpha)
    return TestReport(
        family="quad", n=n, statistic=t_raw, standardized=standardized,
        reject=bool(standardized > config.x_alpha), predicted_beta=beta,
        ingredients={"R_n": r_n, "A_n": A_n, "rho_n": profile.rho[n],
                     "k_n": profile.k[n], "kappa_n_sq": profile.kappa_n_sq[n]})


@dataclass(frozen=True)
class FixedKappa:
    """Fixed summable decreasing weights for the boundary rate r = 1/2.

    Observations z_j = eta_j + sigma_j xi_j with bounded positive scales.
    """

    kappa_sq: np.ndarray
    sigmas: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.kappa_sq, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("kappa_sq must be a nonempty 1-D array")
        if np.any(w < 0.0) or w[0] <= 0.0:
            raise AssumptionError("D1", "weights must be nonnegative with kappa_1 > 0")
        if np.any(np.diff(w) > 0.0):
            raise AssumptionError("D1", "weights must be nonincreasing")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "kappa_sq", w)
        if self.sigmas is not None:
            s = np.asarray(self.sigmas, dtype=float)
            if s.shape != w.shape:
                raise ValidationError("sigmas must match kappa_sq in length")
            if np.any(s <= 0.0) or not np.all(np.isfinite(s)):
                raise AssumptionError("D2", "scales must be positive and bounded")
            s = s.copy()
            s.flags.writeable = False
            object.__setattr__(self, "sigmas", s)

    @property
    def L(self) -> int:
        return int(self.kappa_sq.size)

    def scales(self) -> np.ndarray:
        if self.sigmas is None:
            return np.ones(self.L)
        return self.sigmas


def fixed_kappa_statistic(z: np.ndarray, fk: FixedKappa) -> float:
    """T(z) = Sum_j kappa_j^2 z_j^2 over the stored weight length."""
    z = np.asarray(z, dtype=float)
    if z.shape != (fk.L,):
        raise ValidationError(f"observation length {z.shape} != ({fk.L},)")
    return float(fk.kappa_sq @ np.square(z))
