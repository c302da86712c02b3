"""Kernel-smoothing tests in the sequence model over the full trigonometric basis.

For a symmetric density kernel K on [-1, 1] with transform
Khat(omega) = int exp(2 pi i omega t) K(t) dt, bandwidth h, and complex
exponential observations y_j (j in Z, carried as the real TrigFull pairs
plus the zero-frequency coordinate), the centered and standardized statistic
is

    T_n = n h^{1/2} sigma^{-2} gamma^{-1}
          ( Sum_j |Khat(j h)|^2 |y_j|^2  -  n^{-1} sigma^2 Sum_j |Khat(j h)|^2 ),

where gamma^2 = 2 int (K*K)^2 = 2 int |Khat|^4. The test rejects when
T_n >= x_alpha; against a signal theta the Gaussian power prediction is
Phi(x_alpha - gamma^{-1} sigma^{-2} n h^{1/2} T1n(theta)) with
T1n(theta) = Sum_j |Khat(j h)|^2 |theta_j|^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize, stats

from .errors import ValidationError
from .quad import gaussian_upper_quantile
from .reports import TestReport
from .signals import Basis, NoiseModel, SignalSpec

_GAUSS_NODES = 96


def _gauss_integral(f, a: float, b: float, pieces) -> float:
    """Gauss-Legendre integration split at the given interior knots."""
    knots = [a] + [p for p in pieces if a < p < b] + [b]
    x, w = np.polynomial.legendre.leggauss(_GAUSS_NODES)
    total = 0.0
    for lo, hi in zip(knots[:-1], knots[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.sum(w * f(mid + half * x)))
    return total


@dataclass(frozen=True)
class Kernel:
    """Symmetric probability kernel supported on [-1, 1].

    ``func`` evaluates K (vectorized, zero outside the support), ``fourier``
    its transform at real frequencies. Construction verifies unit mass,
    symmetry, and that the two routes to gamma^2 agree to 1e-8.
    """

    name: str
    func: object
    fourier: object

    def __post_init__(self):
        mass = _gauss_integral(self.func, -1.0, 1.0, (0.0,))
        if abs(mass - 1.0) > 1e-10:
            raise ValidationError(f"kernel mass {mass!r} != 1")
        t = np.linspace(0.0, 1.0, 257)
        if not np.allclose(self.func(t), self.func(-t), atol=1e-12, rtol=0.0):
            raise ValidationError("kernel must be symmetric")
        if abs(float(np.asarray(self.fourier(np.array([0.0])))[0]) - 1.0) > 1e-10:
            raise ValidationError("Khat(0) must equal 1")
        if abs(self.gamma_sq - self._gamma_sq_fourier()) > 1e-8:
            raise ValidationError("gamma^2 cross-check failed between time and Fourier routes")

    def khat(self, omega) -> np.ndarray:
        return np.asarray(self.fourier(np.asarray(omega, dtype=float)))

    @cached_property
    def norm_sq(self) -> float:
        return _gauss_integral(lambda t: np.square(self.func(t)), -1.0, 1.0, (0.0,))

    @cached_property
    def autoconv(self):
        """t -> (K*K)(t), exact overlap integration, support [-2, 2]."""
        x, w = np.polynomial.legendre.leggauss(_GAUSS_NODES)

        def conv(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            out = np.zeros_like(ts)
            for i, t in enumerate(ts):
                lo, hi = max(-1.0, t - 1.0), min(1.0, t + 1.0)
                if hi <= lo:
                    continue
                mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                s = mid + half * x
                out[i] = half * float(np.sum(w * self.func(t - s) * self.func(s)))
            return out

        return conv

    @cached_property
    def gamma_sq(self) -> float:
        """gamma^2 = 2 int (K*K)^2, by overlap quadrature."""
        conv = self.autoconv
        return 2.0 * _gauss_integral(lambda t: np.square(conv(t)), -2.0, 2.0,
                                     (-1.0, 0.0, 1.0))

    def _gamma_sq_fourier(self, w_max: float = 64.0) -> float:
        """gamma^2 = 2 int |Khat|^4 over R, piecewise to tame oscillation."""
        edges = np.arange(0.0, w_max + 0.25, 0.5)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += _gauss_integral(lambda w: np.power(self.khat(w), 4), lo, hi, ())
        return 4.0 * total


def _box_fourier(omega: np.ndarray) -> np.ndarray:
    return np.sinc(2.0 * omega)


def _epanechnikov_fourier(omega: np.ndarray) -> np.ndarray:
    a = 2.0 * math.pi * np.asarray(omega, dtype=float)
    small = np.abs(a) < 1e-2
    a_safe = np.where(small, 1.0, a)
    exact = 3.0 * (np.sin(a_safe) - a_safe * np.cos(a_safe)) / a_safe ** 3
    a2 = np.square(a)
    series = 1.0 - a2 / 10.0 + np.square(a2) / 280.0
    return np.where(small, series, exact)


def box_kernel() -> Kernel:
    return Kernel(
        name="box",
        func=lambda t: np.where(np.abs(np.asarray(t, dtype=float)) <= 1.0, 0.5, 0.0),
        fourier=_box_fourier)


def epanechnikov_kernel() -> Kernel:
    return Kernel(
        name="epanechnikov",
        func=lambda t: np.where(np.abs(np.asarray(t, dtype=float)) <= 1.0,
                                0.75 * (1.0 - np.square(np.asarray(t, dtype=float))), 0.0),
        fourier=_epanechnikov_fourier)


_BUILTINS = {"box": box_kernel, "epanechnikov": epanechnikov_kernel}


def builtin_kernel(name: str) -> Kernel:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValidationError(f"unknown kernel {name!r}; choose from {sorted(_BUILTINS)}")


def half_level_radius(kernel: Kernel) -> float:
    """Largest omega such that |Khat| stays >= 1/2 on [0, omega] (numeric)."""
    grid = np.linspace(0.0, 4.0, 4097)
    vals = np.abs(kernel.khat(grid))
    below = np.flatnonzero(vals < 0.5)
    if below.size == 0:
        return float(grid[-1])
    i = int(below[0])
    if i == 0:
        raise ValidationError("|Khat(0)| < 1/2; not a unit-mass kernel")
    return float(optimize.brentq(
        lambda w: abs(float(kernel.khat(np.array([w]))[0])) - 0.5,
        grid[i - 1], grid[i], xtol=1e-12))


def inconsistency_bandwidths(kernel: Kernel, m_list) -> list[float]:
    """Bandwidths h_l = 1/(2 b m_l) pairing a spike schedule with the kernel.

    b is the half-level radius, so each spike frequency m_l lands at
    m_l h_l = 1/(2b), outside the kernel's half-level pass-band whenever
    b < 1/sqrt(2); the smoothed energy of the spike is then uniformly small.
    """
    b = half_level_radius(kernel)
    return [1.0 / (2.0 * b * int(m)) for m in m_list]


@dataclass(frozen=True)
class KernelObservations:
    """Sequence-model data for the kernel statistic.

    ``y0`` observes the zero frequency (signal part always 0 for densities),
    ``pairs`` row j-1 observes the cos/sin pair at frequency j.
    """

    y0: float
    pairs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValidationError("pairs must have shape (J, 2)")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pairs", arr)

    @property
    def J(self) -> int:
        return int(self.pairs.shape[0])


def sample_kernel_observations(signal: SignalSpec, noise: NoiseModel,
                               rng: np.random.Generator) -> KernelObservations:
    """Draw (y0, pairs): one normal for the zero frequency, then the pairs."""
    if signal.basis is not Basis.TRIG_FULL:
        raise ValidationError("kernel observations require a TrigFull signal")
    scale = noise.noise_scale
    y0 = scale * float(rng.standard_normal())
    pairs = signal.coeffs + scale * rng.standard_normal(signal.coeffs.shape)
    return KernelObservations(y0=y0, pairs=pairs)


@dataclass(frozen=True)
class KernelTestConfig:
    """Kernel, bandwidth rule, and level.

    Exactly one of ``h`` (explicit bandwidth) or ``h_rule = (r, const)``
    (bandwidth const * n^{4r-2}) must be given.
    """

    kernel: Kernel
    alpha: float
    noise_sigma: float = 1.0
    h: float | None = None
    h_rule: tuple[float, float] | None = None
    x_alpha: float = field(init=False)

    def __post_init__(self):
        if (self.h is None) == (self.h_rule is None):
            raise ValidationError("give exactly one of h or h_rule")
        if self.h_rule is not None:
            r, const = self.h_rule
            if not (0.0 < r < 0.5) or const <= 0.0:
                raise ValidationError("h_rule requires 0 < r < 1/2 and const > 0")
        if self.noise_sigma <= 0.0:
            raise ValidationError("noise_sigma must be positive")
        object.__setattr__(self, "x_alpha", gaussian_upper_quantile(self.alpha))

    def bandwidth(self, n: int | None = None) -> float:
        if self.h is not None:
            h = self.h
        else:
            if n is None:
                raise ValidationError("h_rule needs n to resolve the bandwidth")
            r, const = self.h_rule
            h = const * float(n) ** (4.0 * r - 2.0)
        if not (0.0 < h < 1.0):
            raise ValidationError(f"bandwidth {h!r} outside (0, 1)")
        return h


def _weights(config: KernelTestConfig, J: int, h: float) -> np.ndarray:
    if J * h < 1.0:
        warnings.warn(
            f"truncation J*h = {J * h:.3g} < 1 cuts into the main support of Khat",
            stacklevel=3)
    return np.square(config.kernel.khat(np.arange(J + 1) * h))


def kernel_statistic_fourier(obs: KernelObservations, config: KernelTestConfig,
                             n: int) -> float:
    """The standardized statistic T_n from coefficient-space observations."""
    h = config.bandwidth(n)
    w = _weights(config, obs.J, h)
    core = w[0] * obs.y0 ** 2 + float(w[1:] @ np.sum(np.square(obs.pairs), axis=1))
    sigma = config.noise_sigma
    center = (sigma ** 2 / n) * (w[0] + 2.0 * float(np.sum(w[1:])))
    gamma = math.sqrt(config.kernel.gamma_sq)
    return float(n * math.sqrt(h) / (sigma ** 2 * gamma) * (core - center))


def t1n(theta: SignalSpec, config: KernelTestConfig, n: int | None = None) -> float:
    """Smoothed signal energy Sum_j |Khat(j h)|^2 |theta_j|^2."""
    if theta.basis is not Basis.TRIG_FULL:
        raise ValidationError("t1n requires a TrigFull signal")
    h = config.bandwidth(n)
    w = np.square(config.kernel.khat(np.arange(1, theta.J + 1) * h))
    return float(w @ theta.index_energy())


def kernel_power_prediction(theta: SignalSpec, config: KernelTestConfig,
                            n: int) -> float:
    """Gaussian type-II error of the kernel test against theta."""
    h = config.bandwidth(n)
    shift = (n * math.sqrt(h) / (config.noise_sigma ** 2
                                 * math.sqrt(config.kernel.gamma_sq))
             * t1n(theta, config, n))
    return float(stats.norm.cdf(config.x_alpha - shift))


def decide_and_predict(obs: KernelObservations, config: KernelTestConfig,
                       n: int, theta: SignalSpec | None = None) -> TestReport:
    stat = kernel_statistic_fourier(obs, config, n)
    beta = None if theta is None else kernel_power_prediction(theta, config, n)
    h = config.bandwidth(n)
    return TestReport(
        family="kernel", n=n, statistic=stat, standardized=stat,
        reject=bool(stat >= config.x_alpha), predicted_beta=beta,
        ingredients={"h": h, "gamma_sq": config.kernel.gamma_sq,
                     "T1n": None if theta is None else t1n(theta, config, n)})
