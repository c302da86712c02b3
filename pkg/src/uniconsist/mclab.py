"""Replicated Monte Carlo evaluation of the test families.

Reproducibility contract: replicate i of a run draws from the counter-based
substream keyed by (seed, stream, i), independent of execution order, block
size, or thread count. Runs aggregate boolean rejection matrices whose rows
are fully determined by the key, so identical configurations produce
byte-identical summaries on any schedule.

Pairing: all variant signals within a run share the replicate's noise (the
xi vector in the sequence model, the uniform sample in the i.i.d. model),
so variant contrasts are common-random-number comparisons.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chi2 import Chi2Config
from .cvm import CvmNullTable
from .errors import ValidationError
from .kernel import KernelTestConfig, _weights
from .quad import FixedKappa, QuadTestConfig
from .rng import STREAM_IID, STREAM_SEQUENCE_MODEL, substream
from .signals import Basis, DensitySpec, SignalSpec, invert_cdf

BLOCK_ROWS = 512
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class MCConfig:
    replicates: int
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.replicates < 100:
            raise ValidationError("replicates must be at least 100")
        if self.threads < 1:
            raise ValidationError("threads must be at least 1")


def wilson_interval(successes: int, trials: int,
                    z: float = _Z95) -> tuple[float, float]:
    """95% score interval; always contains the point estimate."""
    if trials <= 0:
        raise ValidationError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials
                         + z * z / (4.0 * trials * trials)) / denom
    return center - half, center + half


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_error: float
    replicates: int
    ci_lo: float
    ci_hi: float

    @classmethod
    def from_successes(cls, successes: int, trials: int) -> "MCEstimate":
        p = successes / trials
        lo, hi = wilson_interval(successes, trials)
        return cls(estimate=p,
                   std_error=math.sqrt(p * (1.0 - p) / trials),
                   replicates=trials, ci_lo=lo, ci_hi=hi)


def estimate_columns(rejections: np.ndarray) -> list[MCEstimate]:
    """One estimate per variant column of a rejection matrix."""
    rej = np.asarray(rejections, dtype=bool)
    trials = rej.shape[0]
    return [MCEstimate.from_successes(int(rej[:, v].sum()), trials)
            for v in range(rej.shape[1])]


def paired_excess(rejections: np.ndarray, col_a: int, col_b: int) -> dict:
    """Mean difference of paired rejection indicators and its standard error."""
    rej = np.asarray(rejections, dtype=bool)
    d = rej[:, col_a].astype(float) - rej[:, col_b].astype(float)
    R = d.size
    return {"difference": float(d.mean()),
            "std_error": float(d.std(ddof=1) / math.sqrt(R))}


@dataclass(frozen=True)
class PowerReport:
    """Per-n comparison of empirical and predicted type II errors."""

    rows: tuple

    @staticmethod
    def row(n: int, empirical_alpha: float, empirical_beta: float,
            predicted_beta: float, band: float) -> dict:
        gap = abs(empirical_beta - predicted_beta)
        return {"n": int(n), "empirical_alpha": float(empirical_alpha),
                "empirical_beta": float(empirical_beta),
                "predicted_beta": float(predicted_beta),
                "abs_gap": gap, "within_band": bool(gap <= band)}

    def to_json_dict(self) -> dict:
        return {"rows": list(self.rows)}


def _run_blocks(mc: MCConfig, n_variants: int, block_fn) -> np.ndarray:
    out = np.empty((mc.replicates, n_variants), dtype=bool)
    spans = [(lo, min(lo + BLOCK_ROWS, mc.replicates))
             for lo in range(0, mc.replicates, BLOCK_ROWS)]

    def work(span):
        lo, hi = span
        out[lo:hi] = block_fn(np.arange(lo, hi))

    if mc.threads == 1:
        for span in spans:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=mc.threads) as pool:
            list(pool.map(work, spans))
    return out


def _theta_rows(thetas, J: int) -> np.ndarray:
    rows = np.zeros((len(thetas), J))
    for v, theta in enumerate(thetas):
        if theta is None:
            continue
        if isinstance(theta, SignalSpec):
            if theta.basis is Basis.TRIG_FULL:
                raise ValidationError("sequence-model runs need a 1-D basis signal")
            vec = np.asarray(theta.coeffs, dtype=float)
        else:
            vec = np.asarray(theta, dtype=float)
        if vec.size > J:
            if np.any(vec[J:] != 0.0):
                raise ValidationError(
                    f"variant {v} has support beyond the truncation J = {J}")
            vec = vec[:J]
        rows[v, :vec.size] = vec
    return rows


def _pair_blocks(thetas, J: int) -> np.ndarray:
    rows = np.zeros((len(thetas), J, 2))
    for v, theta in enumerate(thetas):
        if theta is None:
            continue
        if not isinstance(theta, SignalSpec) or theta.basis is not Basis.TRIG_FULL:
            raise ValidationError("kernel runs take TrigFull signals (or None)")
        coeffs = np.asarray(theta.coeffs, dtype=float)
        if coeffs.shape[0] > J:
            if np.any(coeffs[J:] != 0.0):
                raise ValidationError(
                    f"variant {v} has support beyond the truncation J = {J}")
            coeffs = coeffs[:J]
        rows[v, :coeffs.shape[0]] = coeffs
    return rows


def quad_rejections(mc: MCConfig, config: QuadTestConfig, n: int,
                    thetas) -> np.ndarray:
    """Rejection matrix of the quadratic test; one column per theta variant."""
    profile = config.profile
    profile.require_n(n)
    J = profile.J
    w = profile.kappa_sq[n]
    sigma = profile.sigma
    scale = sigma / math.sqrt(n)
    center = sigma ** 2 * profile.rho[n] / n
    std = math.sqrt(2.0 * profile.A[n]) / (sigma ** (-4) * n ** 2)
    theta_rows = _theta_rows(thetas, J)

    def block(idx: np.ndarray) -> np.ndarray:
        xi = np.empty((idx.size, J))
        for row, i in enumerate(idx):
            xi[row] = substream(mc.seed, STREAM_SEQUENCE_MODEL, int(i)
                                ).standard_normal(J)
        rej = np.empty((idx.size, len(thetas)), dtype=bool)
        for v in range(theta_rows.shape[0]):
            y = theta_rows[v] + scale * xi
            t_raw = np.square(y) @ w - center
            rej[:, v] = t_raw > config.x_alpha * std
        return rej

    return _run_blocks(mc, len(thetas), block)


def kernel_rejections(mc: MCConfig, config: KernelTestConfig, n: int,
                      thetas, J: int) -> np.ndarray:
    """Rejection matrix of the kernel test; one column per theta variant."""
    h = config.bandwidth(n)
    w = _weights(config, J, h)
    sigma = config.noise_sigma
    scale = sigma / math.sqrt(n)
    center = (sigma ** 2 / n) * (w[0] + 2.0 * float(np.sum(w[1:])))
    factor = n * math.sqrt(h) / (sigma ** 2 * math.sqrt(config.kernel.gamma_sq))
    pair_rows = _pair_blocks(thetas, J)

    def block(idx: np.ndarray) -> np.ndarray:
        z = np.empty((idx.size, 1 + 2 * J))
        for row, i in enumerate(idx):
            z[row] = substream(mc.seed, STREAM_SEQUENCE_MODEL, int(i)
                               ).standard_normal(1 + 2 * J)
        y0 = scale * z[:, 0]
        noise = z[:, 1:].reshape(idx.size, J, 2)
        rej = np.empty((idx.size, len(thetas)), dtype=bool)
        for v in range(pair_rows.shape[0]):
            pairs = pair_rows[v] + scale * noise
            core = w[0] * np.square(y0) + np.sum(np.square(pairs), axis=2) @ w[1:]
            rej[:, v] = factor * (core - center) >= config.x_alpha
        return rej

    return _run_blocks(mc, len(thetas), block)


def _variant_points(u: np.ndarray, density) -> np.ndarray:
    if density is None:
        return u
    if not isinstance(density, DensitySpec):
        raise ValidationError("i.i.d. runs take DensitySpec variants (or None)")
    return invert_cdf(density, u.ravel()).reshape(u.shape)


def chi2_rejections(mc: MCConfig, config: Chi2Config, n: int,
                    densities) -> np.ndarray:
    """Rejection matrix of the chi-square test; one column per density."""
    m = config.cells(n)
    threshold = config.x_alpha * math.sqrt(2.0 * m) + (m - 1)

    def block(idx: np.ndarray) -> np.ndarray:
        u = np.empty((idx.size, n))
        for row, i in enumerate(idx):
            u[row] = substream(mc.seed, STREAM_IID, int(i)).random(n)
        offsets = (np.arange(idx.size) * m)[:, None]
        rej = np.empty((idx.size, len(densities)), dtype=bool)
        for v, density in enumerate(densities):
            x = _variant_points(u, density)
            cell = np.clip(np.floor(x * m).astype(np.int64), 0, m - 1)
            counts = np.bincount((cell + offsets).ravel(),
                                 minlength=idx.size * m).reshape(idx.size, m)
            t = n * m * np.sum(np.square(counts / n - 1.0 / m), axis=1)
            rej[:, v] = t > threshold
        return rej

    return _run_blocks(mc, len(densities), block)


def cvm_rejections(mc: MCConfig, table: CvmNullTable, alpha: float, n: int,
                   densities) -> np.ndarray:
    """Rejection matrix of the omega-square test; one column per density."""
    critical = table.critical(alpha)
    grid = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)

    def block(idx: np.ndarray) -> np.ndarray:
        u = np.empty((idx.size, n))
        for row, i in enumerate(idx):
            u[row] = substream(mc.seed, STREAM_IID, int(i)).random(n)
        rej = np.empty((idx.size, len(densities)), dtype=bool)
        for v, density in enumerate(densities):
            x = np.sort(_variant_points(u, density), axis=1)
            stat = np.sum(np.square(x - grid), axis=1) + 1.0 / (12.0 * n)
            rej[:, v] = stat > critical
        return rej

    return _run_blocks(mc, len(densities), block)


def _dispatch_rejections(config, n: int, mc: MCConfig, variants, *,
                         alpha: float | None = None, J: int | None = None,
                         critical: float | None = None) -> np.ndarray:
    if isinstance(config, QuadTestConfig):
        return quad_rejections(mc, config, n, variants)
    if isinstance(config, KernelTestConfig):
        return kernel_rejections(mc, config, n, variants,
                                 J if J is not None else 2 * n)
    if isinstance(config, Chi2Config):
        return chi2_rejections(mc, config, n, variants)
    if isinstance(config, CvmNullTable):
        if alpha is None:
            raise ValidationError("cvm runs need the level alpha")
        return cvm_rejections(mc, config, alpha, n, variants)
    if isinstance(config, FixedKappa):
        if critical is None:
            raise ValidationError("fixed-weight runs need a critical value")
        return fixed_rejections(mc, config, critical, variants)
    raise ValidationError(f"unsupported family config {type(config).__name__}")


def _as_density(alternative):
    if alternative is None or isinstance(alternative, DensitySpec):
        return alternative
    if isinstance(alternative, SignalSpec):
        return DensitySpec(alternative)
    raise ValidationError("i.i.d. alternatives must be densities or signals")


def estimate_size(config, n: int, mc: MCConfig, **kw) -> MCEstimate:
    """Null rejection rate of the configured test."""
    rej = _dispatch_rejections(config, n, mc, [None], **kw)
    return estimate_columns(rej)[0]


def estimate_power(config, alternative, n: int, mc: MCConfig,
                   **kw) -> MCEstimate:
    """Rejection rate under one alternative (signal, density, or shift)."""
    if isinstance(config, (Chi2Config, CvmNullTable)):
        alternative = _as_density(alternative)
    rej = _dispatch_rejections(config, n, mc, [alternative], **kw)
    return estimate_columns(rej)[0]


def fixed_rejections(mc: MCConfig, fk: FixedKappa, critical: float,
                     etas) -> np.ndarray:
    """Rejection matrix of the fixed-weight test; one column per shift."""
    L = fk.L
    scales = fk.scales()
    eta_rows = np.zeros((len(etas), L))
    for v, eta in enumerate(etas):
        if eta is None:
            continue
        vec = np.asarray(eta, dtype=float)
        if vec.shape != (L,):
            raise ValidationError(f"shift {v} must have shape ({L},)")
        eta_rows[v] = vec

    def block(idx: np.ndarray) -> np.ndarray:
        xi = np.empty((idx.size, L))
        for row, i in enumerate(idx):
            xi[row] = substream(mc.seed, STREAM_SEQUENCE_MODEL, int(i)
                                ).standard_normal(L)
        noise = scales * xi
        rej = np.empty((idx.size, len(etas)), dtype=bool)
        for v in range(eta_rows.shape[0]):
            t = np.square(eta_rows[v] + noise) @ fk.kappa_sq
            rej[:, v] = t > critical
        return rej

    return _run_blocks(mc, len(etas), block)
