"""Monte Carlo estimators for Lyapunov spectra, moment growth rates and
empirical rate functions.

Realizations are evolved in fixed-size chunks; chunk boundaries depend only
on the chunk size, never on the worker count, and the final reductions run
in chunk order, so repeated runs are bit-identical for any parallel layout.
Moment growth rates use the log-sum-exp estimator with an effective sample
size diagnostic and a linear-in-1/T extrapolation across the horizon list.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .evolution import SCHEMES, BatchEvolver
from .processes import (
    DT_GUARD_RATIO,
    TAG_BOOTSTRAP,
    ProcessSpec,
    open_stream,
    realization_rng,
)

__all__ = [
    "LEEstimate",
    "GLEEstimate",
    "RateFunctionTable",
    "EstimateRejectedError",
    "estimate_le",
    "estimate_gle",
    "estimate_scalar_cgf",
    "estimate_scalar_cgf_from_spec",
    "empirical_rate_function",
    "lyapunov_from_gle",
    "convex_hull_regularize",
]

DEFAULT_CHUNK_SIZE = 1024
DEFAULT_BOOTSTRAP = 400
ESS_WARN = 100.0
ESS_UNRELIABLE = 10.0
MAX_EXCLUDED_FRACTION = 0.01


class EstimateRejectedError(RuntimeError):
    """Raised when an ensemble fails its own quality guards."""


@dataclass
class LEEstimate:
    """Lyapunov spectrum estimate with between-realization uncertainty."""

    lambda_: np.ndarray
    stderr: np.ndarray
    T: float
    n_realizations: int
    batch_count: int
    excluded: int = 0
    meta: dict = field(default_factory=dict)


@dataclass
class GLEEstimate:
    """Moment growth rates w(eta) on a grid, with CI, ESS and extrapolation."""

    eta_grid: np.ndarray
    w: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    ess: np.ndarray
    T_list: tuple[float, ...]
    w_by_T: np.ndarray
    fit_residual: np.ndarray
    unreliable: np.ndarray
    n_realizations: int
    meta: dict = field(default_factory=dict)


@dataclass
class RateFunctionTable:
    """Grid representation of a convex rate function J over time averages."""

    grid: np.ndarray
    J: np.ndarray
    extrapolated: np.ndarray
    T: float
    n_samples: int


# ----------------------------------------------------------------------
# ensemble drivers
# ----------------------------------------------------------------------


def _steps_for(T_values, dt: float) -> list[int]:
    steps = []
    for T in T_values:
        k = int(round(T / dt))
        if k < 1 or abs(k * dt - T) > 1e-9 * max(1.0, T):
            raise ValueError(f"horizon T={T} is not a positive multiple of dt={dt}")
        steps.append(k)
    return steps


def _block_steps(n_batch: int, dim: int) -> int:
    # keep a block of half-grid samples around ~50 MB
    return int(np.clip(3_000_000 // max(1, n_batch * dim * dim), 16, 2048))


def _matrix_chunk_job(args):
    """Evolve one chunk of realizations; returns logD snapshots and trace integrals."""
    spec, scheme, dt, snapshot_steps, lo, hi, track_z = args
    indices = range(lo, hi)
    M = hi - lo
    d = spec.dim
    n_total = snapshot_steps[-1]
    stream = open_stream(spec, dt / 2.0, indices, 2 * n_total)
    ev = BatchEvolver(d, M, scheme, dt, track_z=track_z)
    snaps = np.empty((len(snapshot_steps), M, d))
    trace_at = np.empty((len(snapshot_steps), M))
    block = _block_steps(M, d)
    next_snap = 0
    done = 0
    while done < n_total:
        stop = min(done + block, snapshot_steps[next_snap])
        pts = stream.advance(2 * (stop - done))
        ev.step_block(pts[0::2])
        done = stop
        while next_snap < len(snapshot_steps) and snapshot_steps[next_snap] == done:
            snaps[next_snap] = ev.logD
            trace_at[next_snap] = ev.trace_integral
            next_snap += 1
    return snaps, trace_at


def _scalar_chunk_job(args):
    """Accumulate trapezoid integrals of the diagonal entries for one chunk."""
    spec, dt, snapshot_steps, lo, hi = args
    indices = range(lo, hi)
    M = hi - lo
    d = spec.dim
    n_total = snapshot_steps[-1]
    stream = open_stream(spec, dt, indices, n_total)
    prev = _diag_single(stream.current)
    acc = np.zeros((M, d))
    snaps = np.empty((len(snapshot_steps), M, d))
    block = _block_steps(M, max(d, 2))
    next_snap = 0
    done = 0
    while done < n_total:
        stop = min(done + block, snapshot_steps[next_snap])
        pts = stream.advance(stop - done)
        vals = _diag_block(pts)
        # trapezoid: 0.5*(x_k + x_{k+1})*dt accumulated stepwise
        acc += 0.5 * dt * (prev + vals[0])
        if vals.shape[0] > 1:
            acc += (0.5 * dt * (vals[:-1] + vals[1:])).sum(axis=0)
        prev = vals[-1]
        done = stop
        while next_snap < len(snapshot_steps) and snapshot_steps[next_snap] == done:
            snaps[next_snap] = acc
            next_snap += 1
    return snaps


def _diag_single(vals: np.ndarray) -> np.ndarray:
    """Diagonal entries of one batch of states: (M, d, d) or (M,) -> (M, d)."""
    if vals.ndim == 3:
        return np.diagonal(vals, axis1=-2, axis2=-1).copy()
    return np.asarray(vals, dtype=float)[:, None]


def _diag_block(vals: np.ndarray) -> np.ndarray:
    """Diagonal entries of a block: (n, M, d, d) or (n, M) -> (n, M, d)."""
    if vals.ndim == 4:
        return np.diagonal(vals, axis1=-2, axis2=-1).copy()
    return np.asarray(vals, dtype=float)[:, :, None]


def _run_chunked(job, args_list, workers):
    if not workers or workers <= 1:
        return [job(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, args_list))


def _chunk_ranges(n: int, chunk_size: int):
    return [(lo, min(lo + chunk_size, n)) for lo in range(0, n, chunk_size)]


def _evolve_snapshots(spec, scheme, dt, snapshot_steps, n_realizations,
                      workers=None, chunk_size=DEFAULT_CHUNK_SIZE):
    """logD and trace-integral snapshots for the whole ensemble.

    Returns (logD_snaps, trace_snaps) with shapes (n_snap, M, d) and
    (n_snap, M), laid out in realization order.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    args = [(spec, scheme, dt, tuple(snapshot_steps), lo, hi, False)
            for lo, hi in _chunk_ranges(n_realizations, chunk_size)]
    parts = _run_chunked(_matrix_chunk_job, args, workers)
    snaps = np.concatenate([p[0] for p in parts], axis=1)
    traces = np.concatenate([p[1] for p in parts], axis=1)
    return snaps, traces


def _dt_guard(spec: ProcessSpec, dt: float) -> None:
    eps = spec.epsilon
    if eps is not None and dt > eps / DT_GUARD_RATIO * (1 + 1e-12):
        warnings.warn(
            f"dt = {dt:g} exceeds epsilon/{DT_GUARD_RATIO:g}; noise under-resolved",
            RuntimeWarning,
            stacklevel=3,
        )


# ----------------------------------------------------------------------
# Lyapunov exponents
# ----------------------------------------------------------------------


def estimate_le(spec: ProcessSpec, scheme: str = "midpoint", dt: float = 0.01,
                T: float = 100.0, n_realizations: int = 100, workers: int | None = None,
                transient: float | None = None, batch_count: int = 8,
                chunk_size: int = DEFAULT_CHUNK_SIZE) -> LEEstimate:
    """Lyapunov spectrum from time-averaged log diagonal factors.

    lambda_k is the ensemble mean of (logD_k(T) - logD_k(t0)) / (T - t0) with
    the first `transient` time units (default 10 correlation times) excluded
    so the orthogonal frame can align with the stationary flag.  The standard
    error comes from the between-realization spread; time batches provide an
    autocorrelation-aware cross-check recorded in meta.  Realizations whose
    trajectory went non-finite are excluded and counted; more than 1%
    exclusions rejects the whole estimate.
    """
    if n_realizations < 2:
        raise ValueError("n_realizations must be >= 2")
    _dt_guard(spec, dt)
    eps = spec.epsilon
    if transient is None:
        transient = 10.0 * eps if eps is not None else 0.0
    if eps is not None and T < 50.0 * eps:
        warnings.warn(f"T = {T:g} is below 50 correlation times; estimate may be biased",
                      RuntimeWarning, stacklevel=2)
    n = _steps_for([T], dt)[0]
    k0 = min(int(round(transient / dt)), n // 2)
    edges = sorted({k0 + int(round(j * (n - k0) / batch_count)) for j in range(batch_count + 1)} | {n})
    edges = [e for e in edges if e >= max(k0, 1)]
    snaps, traces = _evolve_snapshots(spec, scheme, dt, edges, n_realizations,
                                      workers, chunk_size)
    if k0 == 0:
        base, t0 = np.zeros_like(snaps[0]), 0.0
    else:
        base, t0 = snaps[0], edges[0] * dt
    final = snaps[-1]
    rates = (final - base) / (T - t0)
    ok = np.all(np.isfinite(rates), axis=1)
    excluded = int(np.count_nonzero(~ok))
    if excluded > MAX_EXCLUDED_FRACTION * n_realizations:
        raise EstimateRejectedError(
            f"{excluded}/{n_realizations} realizations went non-finite")
    good = rates[ok]
    lam = good.mean(axis=0)
    stderr = good.std(axis=0, ddof=1) / math.sqrt(good.shape[0])
    # batch-rate spread across time windows, averaged over realizations
    batch_rates = []
    for j in range(1, len(edges)):
        dT = (edges[j] - edges[j - 1]) * dt
        if dT > 0:
            batch_rates.append(((snaps[j] - snaps[j - 1]) / dT)[ok].mean(axis=0))
    batch_rates = np.array(batch_rates)
    meta = {
        "scheme": scheme,
        "dt": dt,
        "transient": t0,
        "batch_rate_std": batch_rates.std(axis=0, ddof=1).tolist() if len(batch_rates) > 1 else None,
        "mean_trace_integral": float(traces[-1][ok].mean()),
        "master_seed": spec.master_seed,
    }
    return LEEstimate(lambda_=lam, stderr=stderr, T=T, n_realizations=int(good.shape[0]),
                      batch_count=batch_count, excluded=excluded, meta=meta)


# ----------------------------------------------------------------------
# moment growth rates (log-sum-exp machinery)
# ----------------------------------------------------------------------


def _eta_array(eta_grid, d: int) -> np.ndarray:
    eta = np.atleast_2d(np.asarray(eta_grid, dtype=float))
    if eta.shape[1] != d:
        raise ValueError(f"eta grid has width {eta.shape[1]}, expected {d}")
    return eta


def _extrapolation_row(T_arr: np.ndarray) -> np.ndarray:
    """Least-squares row h with w_inf = h . w(T) for the fit w = w_inf + c/T."""
    x = 1.0 / T_arr
    X = np.stack([np.ones_like(x), x], axis=1)
    return np.linalg.pinv(X)[0]


def _gle_reduce(snaps: np.ndarray, T_list, eta: np.ndarray, n_boot: int,
                boot_seed: int, n_realizations: int, meta: dict) -> GLEEstimate:
    """Shared log-sum-exp reduction: per-horizon rates, extrapolation, bootstrap."""
    T_arr = np.asarray(T_list, dtype=float)
    nT = T_arr.size
    M = snaps.shape[1]
    ok = np.all(np.isfinite(snaps), axis=(0, 2))
    excluded = int(M - np.count_nonzero(ok))
    if excluded > MAX_EXCLUDED_FRACTION * M:
        raise EstimateRejectedError(f"{excluded}/{M} realizations went non-finite")
    S = snaps[:, ok, :]
    M_ok = S.shape[1]
    s = np.einsum("tmd,ed->tem", S, eta)
    logM = math.log(M_ok)
    w_by_T = (logsumexp(s, axis=2) - logM) / T_arr[:, None]
    if nT >= 2:
        h = _extrapolation_row(T_arr)
        w = h @ w_by_T
        slope = _fit_slope(T_arr, w_by_T)
        fit_residual = np.max(np.abs(w_by_T - (w[None, :] + np.outer(1.0 / T_arr, slope))), axis=0)
    else:
        w = w_by_T[0].copy()
        fit_residual = np.zeros_like(w)
    s_last = s[-1]
    ess = np.exp(2.0 * logsumexp(s_last, axis=1) - logsumexp(2.0 * s_last, axis=1))
    # bootstrap over realizations, chunked so the resampled slice stays
    # around a hundred MB regardless of ensemble size
    rng = realization_rng(boot_seed, 0, TAG_BOOTSTRAP)
    n_eta = eta.shape[0]
    boot = np.empty((n_boot, n_eta))
    done = 0
    h_row = _extrapolation_row(T_arr) if nT >= 2 else None
    nb_max = max(1, int(16_000_000 // max(1, nT * n_eta * M_ok)))
    while done < n_boot:
        nb = min(nb_max, n_boot - done)
        idx = rng.integers(0, M_ok, size=(nb, M_ok))
        sb = s[:, :, idx]  # (nT, n_eta, nb, M)
        wb = (logsumexp(sb, axis=3) - logM) / T_arr[:, None, None]
        boot[done:done + nb] = (np.einsum("t,teb->eb", h_row, wb).T if nT >= 2 else wb[0].T)
        done += nb
    ci_low = np.percentile(boot, 2.5, axis=0)
    ci_high = np.percentile(boot, 97.5, axis=0)
    # eta = 0 rows are identically zero by construction; pin them exactly
    zero_rows = np.all(eta == 0.0, axis=1)
    w[zero_rows] = 0.0
    ci_low[zero_rows] = 0.0
    ci_high[zero_rows] = 0.0
    unreliable = ess < ESS_UNRELIABLE
    if np.any(unreliable):
        warnings.warn(
            f"{int(unreliable.sum())} grid point(s) have effective sample size below "
            f"{ESS_UNRELIABLE:g} and are marked unreliable", RuntimeWarning, stacklevel=3)
    elif np.any(ess < ESS_WARN):
        warnings.warn(
            f"minimum effective sample size {ess.min():.3g} is below {ESS_WARN:g}; "
            "tail-dominated moments", RuntimeWarning, stacklevel=3)
    meta = dict(meta)
    meta["excluded"] = excluded
    return GLEEstimate(
        eta_grid=eta, w=w, ci_low=ci_low, ci_high=ci_high, ess=ess,
        T_list=tuple(T_arr.tolist()), w_by_T=w_by_T, fit_residual=fit_residual,
        unreliable=unreliable, n_realizations=M_ok, meta=meta,
    )


def _fit_slope(T_arr, w_by_T):
    x = 1.0 / T_arr
    xc = x - x.mean()
    denom = (xc**2).sum()
    return (xc[:, None] * (w_by_T - w_by_T.mean(axis=0))).sum(axis=0) / denom


def estimate_gle(spec: ProcessSpec, scheme: str = "midpoint", dt: float = 0.01,
                 T_list=(10.0, 20.0, 40.0), n_realizations: int = 10_000,
                 eta_grid=None, workers: int | None = None, eta_cap: float = 2.0,
                 n_boot: int = DEFAULT_BOOTSTRAP,
                 chunk_size: int = DEFAULT_CHUNK_SIZE) -> GLEEstimate:
    """Growth rates of ensemble moments of the diagonal Iwasawa factors.

    For each grid vector eta, w(eta; T) is the log-sum-exp average of
    sum_k eta_k logD_k(T) over realizations divided by T; the reported value
    extrapolates linearly in 1/T across T_list.  Confidence intervals come
    from a bootstrap over realizations and every point carries its effective
    sample size: moments are dominated by rare events once |eta| or T grows,
    and that failure mode must stay visible.
    """
    if eta_grid is None:
        raise ValueError("eta_grid is required")
    if len(T_list) < 2:
        raise ValueError("T_list needs at least two horizons for the 1/T extrapolation")
    eta = _eta_array(eta_grid, spec.dim)
    if np.max(np.abs(eta)) > eta_cap + 1e-12:
        raise ValueError(f"|eta| exceeds the configured cap {eta_cap}")
    _dt_guard(spec, dt)
    steps = _steps_for(sorted(T_list), dt)
    snaps, _ = _evolve_snapshots(spec, scheme, dt, steps, n_realizations, workers, chunk_size)
    meta = {"scheme": scheme, "dt": dt, "master_seed": spec.master_seed}
    return _gle_reduce(snaps, sorted(T_list), eta, n_boot, spec.master_seed,
                       n_realizations, meta)


def estimate_scalar_cgf(samples: np.ndarray, dt: float, eta_grid,
                        T_list, n_boot: int = DEFAULT_BOOTSTRAP,
                        bootstrap_seed: int = 0, eta_cap: float = 2.0) -> GLEEstimate:
    """Growth function of scalar (or diagonal-vector) paths without any
    matrix evolution.

    samples has shape (M, n+1) or (M, n+1, d); the estimator applies the same
    log-sum-exp reduction to the trapezoidal integrals of sum_k eta_k x_k(t).
    This is the cheap route for checking the diagonal reduction against the
    full matrix run.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    M, n_pts, d = arr.shape
    eta = _eta_array(eta_grid, d)
    if np.max(np.abs(eta)) > eta_cap + 1e-12:
        raise ValueError(f"|eta| exceeds the configured cap {eta_cap}")
    if len(T_list) < 2:
        raise ValueError("T_list needs at least two horizons for the 1/T extrapolation")
    T_sorted = sorted(T_list)
    steps = _steps_for(T_sorted, dt)
    if steps[-1] > n_pts - 1:
        raise ValueError("samples are shorter than the largest horizon")
    # cumulative trapezoid, then pick the snapshot indices
    mids = 0.5 * (arr[:, 1:, :] + arr[:, :-1, :]) * dt
    cum = np.cumsum(mids, axis=1)
    snaps = np.stack([cum[:, k - 1, :] for k in steps], axis=0)
    meta = {"dt": dt, "source": "scalar-paths"}
    return _gle_reduce(snaps, T_sorted, eta, n_boot, bootstrap_seed, M, meta)


def estimate_scalar_cgf_from_spec(spec: ProcessSpec, dt: float, T_list,
                                  n_realizations: int, eta_grid,
                                  workers: int | None = None,
                                  n_boot: int = DEFAULT_BOOTSTRAP,
                                  eta_cap: float = 2.0,
                                  chunk_size: int = DEFAULT_CHUNK_SIZE) -> GLEEstimate:
    """Streamed variant of estimate_scalar_cgf fed by diagonal entries of the
    process; avoids materializing full paths for large ensembles."""
    eta = _eta_array(eta_grid, spec.dim)
    if np.max(np.abs(eta)) > eta_cap + 1e-12:
        raise ValueError(f"|eta| exceeds the configured cap {eta_cap}")
    if len(T_list) < 2:
        raise ValueError("T_list needs at least two horizons for the 1/T extrapolation")
    _dt_guard(spec, dt)
    T_sorted = sorted(T_list)
    steps = _steps_for(T_sorted, dt)
    args = [(spec, dt, tuple(steps), lo, hi)
            for lo, hi in _chunk_ranges(n_realizations, chunk_size)]
    parts = _run_chunked(_scalar_chunk_job, args, workers)
    snaps = np.concatenate(parts, axis=1)
    meta = {"dt": dt, "source": "diagonal-stream", "master_seed": spec.master_seed}
    return _gle_reduce(snaps, T_sorted, eta, n_boot, spec.master_seed, n_realizations, meta)


# ----------------------------------------------------------------------
# rate functions
# ----------------------------------------------------------------------


def convex_hull_regularize(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Lower convex hull of (grid, values) evaluated back on the grid."""
    pts = list(zip(grid, values))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    hx = np.array([p[0] for p in hull])
    hy = np.array([p[1] for p in hull])
    return np.interp(grid, hx, hy)


def empirical_rate_function(samples: np.ndarray, T: float, n_bins: int = 0) -> RateFunctionTable:
    """Rate function of the time average from a histogram of path averages.

    J(a) = -(1/T) log density, shifted so min J = 0, then regularized to its
    lower convex hull.  Bins the histogram with Scott's rule unless n_bins is
    given (then n_bins >= 16).  Sparse outer bins are marked extrapolated;
    interior empty bins trigger adaptive widening.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2:
        raise ValueError("samples must be (M, n_points) scalar paths")
    M, n_pts = arr.shape
    dx = T / (n_pts - 1)
    xbar = np.trapz(arr, dx=dx, axis=1) / T
    spread = xbar.std(ddof=1)
    if spread == 0.0:
        # deterministic point mass: J = 0 there, undefined (marked) elsewhere
        return RateFunctionTable(
            grid=np.array([xbar[0]]), J=np.array([0.0]),
            extrapolated=np.array([False]), T=T, n_samples=M)
    if n_bins:
        if n_bins < 16:
            raise ValueError("n_bins must be >= 16")
        bins = n_bins
    else:
        scott = 3.49 * spread * M ** (-1.0 / 3.0)
        bins = max(16, int(math.ceil((xbar.max() - xbar.min()) / scott)))
    counts, edges = np.histogram(xbar, bins=bins)
    while _has_interior_zero(counts) and len(counts) > 16:
        bins = max(16, bins // 2)
        counts, edges = np.histogram(xbar, bins=bins)
        if bins == 16:
            break
    centers = 0.5 * (edges[:-1] + edges[1:])
    _warn_if_multimodal(counts)
    keep = counts > 0
    density = counts[keep] / (M * np.diff(edges)[keep])
    grid = centers[keep]
    J = -np.log(density) / T
    J -= J.min()
    J = convex_hull_regularize(grid, J)
    extrapolated = counts[keep] < 5
    return RateFunctionTable(grid=grid, J=J, extrapolated=extrapolated, T=T, n_samples=M)


def _has_interior_zero(counts: np.ndarray) -> bool:
    nz = np.nonzero(counts)[0]
    if nz.size == 0:
        return False
    inner = counts[nz[0]:nz[-1] + 1]
    return bool(np.any(inner == 0))


def _warn_if_multimodal(counts: np.ndarray) -> None:
    if counts.size < 5:
        return
    sm = np.convolve(counts, np.ones(3) / 3.0, mode="same")
    peaks = 0
    for i in range(1, sm.size - 1):
        if sm[i] > sm[i - 1] and sm[i] >= sm[i + 1] and sm[i] > 0.05 * sm.max():
            peaks += 1
    if peaks > 1:
        warnings.warn("histogram of time averages is not unimodal; "
                      "T may be too short for the rate-function regime",
                      RuntimeWarning, stacklevel=3)


# ----------------------------------------------------------------------
# spectrum from the growth function
# ----------------------------------------------------------------------


def lyapunov_from_gle(gle: GLEEstimate) -> LEEstimate:
    """Central differences of w at the origin: lambda_k = dw/deta_k(0).

    Requires the grid to contain +-h e_k for every coordinate direction;
    confidence intervals propagate through the difference quotient.
    """
    eta = gle.eta_grid
    d = eta.shape[1]
    lam = np.empty(d)
    se = np.empty(d)
    for k in range(d):
        plus = minus = None
        h = None
        for i, row in enumerate(eta):
            if row[k] != 0.0 and np.all(row[np.arange(d) != k] == 0.0):
                if row[k] > 0 and plus is None:
                    plus, h = i, row[k]
                elif row[k] < 0 and minus is None:
                    minus = i
        if plus is None or minus is None or abs(eta[minus][k] + h) > 1e-12:
            raise ValueError(f"grid lacks the +-h stencil for coordinate {k + 1}")
        lam[k] = (gle.w[plus] - gle.w[minus]) / (2.0 * h)
        sig_p = (gle.ci_high[plus] - gle.ci_low[plus]) / (2.0 * 1.96)
        sig_m = (gle.ci_high[minus] - gle.ci_low[minus]) / (2.0 * 1.96)
        se[k] = math.sqrt(sig_p**2 + sig_m**2) / (2.0 * h)
    return LEEstimate(
        lambda_=lam, stderr=se, T=max(gle.T_list), n_realizations=gle.n_realizations,
        batch_count=0, excluded=int(gle.meta.get("excluded", 0)),
        meta={"source": "gle-gradient", "h": float(h)},
    )
