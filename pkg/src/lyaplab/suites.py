"""Named verification suites: each one checks a quantitative acceptance
criterion end-to-end and reports measured values, expectations, tolerances
and the seeds that reproduce the run.

The suites are deliberately runnable both from the CLI (``lyaplab verify``)
and from the test suite; they share heavy ensemble runs through a context
cache so ``verify all`` does not repeat work.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    analytic_gle_gaussian,
    fn_delta_check_integrals,
    legendre_transform,
)
from .estimators import (
    _scalar_chunk_job,
    estimate_gle,
    estimate_le,
    estimate_scalar_cgf_from_spec,
)
from .evolution import SCHEMES, BatchEvolver
from .processes import (
    CorrelationShape,
    IsotropicKernel,
    ProcessSpec,
    open_stream,
    telegraph_cgf_oracle,
)

# one fixed seed per suite so every reported number is reproducible
SEEDS = {
    "gaussian-le": 20260801,
    "eps-0.05": 20260803,
    "eps-0.2": 20260804,
    "gaussian-gle": 20260805,
    "scalar-ou": 20260806,
    "scalar-telegraph": 20260807,
    "shift-matrix": 20260808,
    "shift-diagonal": 20260809,
    "scheme-path": 20260810,
    "liouville": 20260811,
    "fn-delta": 20260812,
    "properties": 20260813,
}

# Liouville residual envelopes |res| <= C * T * dt^2, C measured once on the
# pinned configurations below (max over realizations and step sizes) and
# frozen with a x4 margin; the frame scheme tracks the trace identically and
# only accumulates rounding noise.
LIOUVILLE_C = {"midpoint": 8.0, "ito": 15.0, "iwasawa-direct": 0.5}


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    notes: str = ""

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.notes})" if self.notes else ""
        return f"{status}  {self.name}{extra}"

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "details": _jsonable(self.details), "notes": self.notes}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


class VerifyContext:
    """Shared cache so composite runs reuse heavy ensembles."""

    def __init__(self, workers: int | None = None):
        self.workers = workers
        self.cache: dict = {}

    def get(self, key, builder):
        if key not in self.cache:
            self.cache[key] = builder()
        return self.cache[key]


# ----------------------------------------------------------------------
# pinned experiment definitions
# ----------------------------------------------------------------------


def _gaussian_d3_spec(epsilon: float, seed: int) -> ProcessSpec:
    return ProcessSpec(
        kind="gaussian-isotropic-matrix",
        dim=3,
        kernel=IsotropicKernel(a=1.0 / 3.0, b=0.5, c=0.5, traceless=True),
        shape=CorrelationShape(epsilon),
        master_seed=seed,
    )


def _c1_estimate(ctx: VerifyContext):
    spec = _gaussian_d3_spec(0.1, SEEDS["gaussian-le"])
    return ctx.get(
        ("c1", "midpoint"),
        lambda: estimate_le(spec, "midpoint", dt=0.005, T=100.0, n_realizations=200,
                            workers=ctx.workers),
    )


def suite_gaussian_le(ctx: VerifyContext) -> CriterionResult:
    """d=3 traceless Gaussian spectrum vs the stated target (2, 0, -2)."""
    est = _c1_estimate(ctx)
    expected = np.array([2.0, 0.0, -2.0])
    dev = np.abs(est.lambda_ - expected)
    within_3se = bool(np.all(dev <= 3.0 * est.stderr))
    within_abs = bool(np.all(dev <= 0.1))
    return CriterionResult(
        name="gaussian-le",
        passed=within_3se and within_abs,
        details={
            "lambda": est.lambda_, "stderr": est.stderr, "expected": expected,
            "within_3_stderr": within_3se, "within_0.1": within_abs,
            "seed": SEEDS["gaussian-le"],
            "config": {"dim": 3, "a": 1 / 3, "b": 0.5, "c": 0.5, "epsilon": 0.1,
                       "dt": 0.005, "T": 100.0, "n_realizations": 200},
        },
        notes=f"measured {np.array2string(est.lambda_, precision=4)}",
    )


def suite_sum_rule(ctx: VerifyContext) -> CriterionResult:
    """Traceless kernel: the exponents must sum to zero."""
    est = _c1_estimate(ctx)
    total = float(np.sum(est.lambda_))
    tol = 3.0 * float(np.sqrt(np.sum(est.stderr**2)))
    return CriterionResult(
        name="sum-rule",
        passed=bool(abs(total) <= tol),
        details={"sum": total, "tolerance": tol, "lambda": est.lambda_},
        notes=f"sum = {total:+.5f}, tol = {tol:.5f}",
    )


def suite_eps_independence(ctx: VerifyContext) -> CriterionResult:
    """Spectra at matched kernel for three correlation times."""
    runs = {}
    for eps, seed_key in ((0.05, "eps-0.05"), (0.1, "gaussian-le"), (0.2, "eps-0.2")):
        if eps == 0.1:
            runs[eps] = _c1_estimate(ctx)
            continue
        spec = _gaussian_d3_spec(eps, SEEDS[seed_key])
        runs[eps] = ctx.get(
            ("c3", eps),
            lambda spec=spec, eps=eps: estimate_le(
                spec, "midpoint", dt=eps / 20.0, T=100.0, n_realizations=200,
                workers=ctx.workers),
        )
    expected = np.array([2.0, 0.0, -2.0])
    eps_vals = sorted(runs)
    mutual_ok = True
    pair_stats = []
    for i, ei in enumerate(eps_vals):
        for ej in eps_vals[i + 1:]:
            a, b = runs[ei], runs[ej]
            gap = np.abs(a.lambda_ - b.lambda_)
            tol = 3.0 * np.sqrt(a.stderr**2 + b.stderr**2)
            ok = bool(np.all(gap <= tol))
            mutual_ok &= ok
            pair_stats.append({"eps_pair": (ei, ej), "gap": gap, "tol": tol, "ok": ok})
    expected_ok = True
    for eps in eps_vals:
        est = runs[eps]
        expected_ok &= bool(np.all(np.abs(est.lambda_ - expected) <= 3.0 * est.stderr))
    return CriterionResult(
        name="eps-independence",
        passed=bool(mutual_ok and expected_ok),
        details={
            "lambda_by_eps": {str(e): runs[e].lambda_ for e in eps_vals},
            "stderr_by_eps": {str(e): runs[e].stderr for e in eps_vals},
            "pairwise": pair_stats, "expected": expected,
            "mutual_ok": mutual_ok, "expected_ok": expected_ok,
        },
        notes="; ".join(
            f"eps={e}: {np.array2string(runs[e].lambda_, precision=3)}" for e in eps_vals),
    )


def suite_gaussian_gle(ctx: VerifyContext) -> CriterionResult:
    """d=2 Gaussian growth rates vs the closed-form quadratic."""
    kernel = IsotropicKernel(a=0.5, b=0.5, c=0.5, traceless=True)
    eps = 0.05
    spec = ProcessSpec(kind="gaussian-isotropic-matrix", dim=2, kernel=kernel,
                       shape=CorrelationShape(eps), master_seed=SEEDS["gaussian-gle"])
    eta = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0)]
    est = ctx.get(
        ("c4",),
        lambda: estimate_gle(spec, "midpoint", dt=eps / 10.0, T_list=(10.0, 20.0, 40.0),
                             n_realizations=20_000, eta_grid=eta, workers=ctx.workers,
                             chunk_size=2048),
    )
    ctx.cache[("c4", "est")] = est
    closed = np.array([analytic_gle_gaussian(kernel, 2, e) for e in eta])
    sigma = (est.ci_high - est.ci_low) / (2.0 * 1.96)
    tol = np.maximum(3.0 * sigma, 0.10 * np.abs(closed))
    dev = np.abs(est.w - closed)
    point_ok = dev <= tol
    return CriterionResult(
        name="gaussian-gle",
        passed=bool(np.all(point_ok)),
        details={"eta": eta, "w": est.w, "closed_form": closed, "deviation": dev,
                 "tolerance": tol, "ess": est.ess, "point_ok": point_ok,
                 "seed": SEEDS["gaussian-gle"], "epsilon": eps},
        notes=f"w(1,0) = {est.w[0]:.4f} vs {closed[0]:.4f}",
    )


def suite_scalar_cgf(ctx: VerifyContext) -> CriterionResult:
    """Scalar growth functions: exact-quadratic and telegraph-oracle checks."""
    eta = [(x,) for x in np.linspace(-2.0, 2.0, 11)]
    ou_spec = ProcessSpec(kind="scalar-ou", dim=1, shape=CorrelationShape(0.05),
                          master_seed=SEEDS["scalar-ou"])
    ou = ctx.get(
        ("c5", "ou"),
        lambda: estimate_scalar_cgf_from_spec(
            ou_spec, dt=0.005, T_list=(1.0, 2.0, 4.0), n_realizations=300_000,
            eta_grid=eta, workers=ctx.workers, chunk_size=8192),
    )
    ou_closed = np.array([0.5 * e[0] ** 2 for e in eta])
    ou_sigma = (ou.ci_high - ou.ci_low) / (2.0 * 1.96)
    ou_tol = np.maximum(3.0 * ou_sigma, 0.05 * np.abs(ou_closed))
    ou_ok = np.abs(ou.w - ou_closed) <= ou_tol

    tg_spec = ProcessSpec(kind="scalar-telegraph", dim=1, sigma=1.0, nu=1.0,
                          master_seed=SEEDS["scalar-telegraph"])
    tg = ctx.get(
        ("c5", "telegraph"),
        lambda: estimate_scalar_cgf_from_spec(
            tg_spec, dt=0.01, T_list=(3.0, 6.0, 12.0), n_realizations=200_000,
            eta_grid=eta, workers=ctx.workers, chunk_size=8192),
    )
    tg_closed = np.array([telegraph_cgf_oracle(1.0, 1.0, e[0]) for e in eta])
    tg_sigma = (tg.ci_high - tg.ci_low) / (2.0 * 1.96)
    tg_tol = np.maximum(3.0 * tg_sigma, 0.05 * np.abs(tg_closed))
    tg_ok = np.abs(tg.w - tg_closed) <= tg_tol
    return CriterionResult(
        name="scalar-cgf",
        passed=bool(np.all(ou_ok) and np.all(tg_ok)),
        details={
            "eta": [e[0] for e in eta],
            "ou": {"w": ou.w, "closed": ou_closed, "tol": ou_tol, "ok": ou_ok,
                   "ess": ou.ess},
            "telegraph": {"w": tg.w, "closed": tg_closed, "tol": tg_tol, "ok": tg_ok,
                          "ess": tg.ess},
        },
        notes=f"ou max dev {np.max(np.abs(ou.w - ou_closed)):.4f}; "
              f"telegraph max dev {np.max(np.abs(tg.w - tg_closed)):.4f}",
    )


def _modulated_spec(seed: int) -> ProcessSpec:
    return ProcessSpec(
        kind="modulated-gaussian-matrix", dim=2,
        kernel=IsotropicKernel(a=0.5, b=0.5, c=0.5, traceless=True),
        shape=CorrelationShape(0.05),
        mod_amplitude=0.5, mod_epsilon=0.1, master_seed=seed)


def suite_shift_identity(ctx: VerifyContext) -> CriterionResult:
    """Headline check: matrix growth rates against the shifted diagonal
    growth function, both estimated by Monte Carlo on the non-Gaussian
    modulated process."""
    eta = [(0.4, 0.0), (0.0, 0.4), (-0.4, 0.0), (0.0, -0.4), (0.4, -0.4)]
    shift = np.array([0.5, -0.5])
    spec_m = _modulated_spec(SEEDS["shift-matrix"])
    matrix = ctx.get(
        ("c6", "matrix"),
        lambda: estimate_gle(spec_m, "midpoint", dt=0.005, T_list=(6.0, 12.0, 24.0),
                             n_realizations=20_000, eta_grid=eta, workers=ctx.workers,
                             chunk_size=2048),
    )
    spec_d = _modulated_spec(SEEDS["shift-diagonal"])
    shifted_grid = [tuple(np.asarray(e) + shift) for e in eta] + [tuple(shift)]
    diag = ctx.get(
        ("c6", "diag"),
        lambda: estimate_scalar_cgf_from_spec(
            spec_d, dt=0.005, T_list=(2.0, 4.0, 8.0), n_realizations=150_000,
            eta_grid=shifted_grid, workers=ctx.workers, chunk_size=8192),
    )
    sig_m = (matrix.ci_high - matrix.ci_low) / (2.0 * 1.96)
    sig_d = (diag.ci_high - diag.ci_low) / (2.0 * 1.96)
    w_shift_ref = diag.w[-1]
    sig_ref = sig_d[-1]
    pred = diag.w[:-1] - w_shift_ref
    sig_pred = np.sqrt(sig_d[:-1] ** 2 + sig_ref**2)
    gap = np.abs(matrix.w - pred)
    tol = 3.0 * np.sqrt(sig_m**2 + sig_pred**2)
    ok = gap <= tol
    return CriterionResult(
        name="shift-identity",
        passed=bool(np.all(ok)),
        details={"eta": eta, "w_matrix": matrix.w, "w_shift_predicted": pred,
                 "gap": gap, "tolerance": tol, "ok": ok,
                 "ess_matrix": matrix.ess, "ess_diagonal": diag.ess,
                 "seeds": [SEEDS["shift-matrix"], SEEDS["shift-diagonal"]]},
        notes=f"max gap {np.max(gap):.4f} vs tol {np.min(tol):.4f}..{np.max(tol):.4f}",
    )


def _smooth_field(spec: ProcessSpec, seed: int, n_freq: int = 48,
                  omega_cap: float = 8.0):
    """One smooth band-limited realization matched to the process statistics.

    Random trigonometric field whose frequencies follow the Lorentzian
    spectrum of the exponential correlation profile (truncated at
    omega_cap/eps).  Pointwise samples of the true rough path cannot show
    deterministic second-order convergence on a fixed realization (the path
    has structure below any step size), so integrator order is measured on
    this resolvable stand-in with the same amplitude and time scale.
    """
    from .processes import matrix_sector_basis

    d = spec.dim
    eps = spec.shape.epsilon
    phi0 = spec.shape.phi0
    basis, sector = matrix_sector_basis(d)
    tr_var, sym_var, anti_var = spec.kernel.sector_variances(d)
    amp = np.where(sector == 0, np.sqrt(max(tr_var, 0.0)),
                   np.where(sector == 1, np.sqrt(max(sym_var, 0.0)),
                            np.sqrt(max(anti_var, 0.0))))
    scaled = basis * amp[:, None, None]
    rng = np.random.default_rng(seed)
    omega_max = omega_cap / eps
    n_modes = len(basis)
    om = np.empty((n_modes, n_freq))
    for m in range(n_modes):
        draws: list[float] = []
        while len(draws) < n_freq:
            cand = rng.standard_cauchy(n_freq) / eps
            draws += [x for x in cand if abs(x) < omega_max]
        om[m] = draws[:n_freq]
    ca = rng.normal(size=(n_modes, n_freq))
    cb = rng.normal(size=(n_modes, n_freq))

    def at(ts: np.ndarray) -> np.ndarray:
        phase = np.atleast_1d(ts)[:, None, None] * om[None]
        vals = np.sqrt(phi0 / n_freq) * (np.cos(phase) * ca + np.sin(phase) * cb).sum(axis=2)
        return np.einsum("nm,mij->nij", vals, scaled)

    return at


def _convergence_ratio(spec: ProcessSpec, scheme: str, T: float, dt_levels) -> float:
    """Richardson-style ratio of logD(T) differences on one fixed smooth
    realization; 4.0 means clean second order."""
    at = _smooth_field(spec, SEEDS["scheme-path"])
    logDs = []
    for dt in dt_levels:
        n_steps = int(round(T / dt))
        mids = at((np.arange(n_steps) + 0.5) * dt)[:, None]
        ev = BatchEvolver(spec.dim, 1, scheme, dt, track_z=False)
        ev.step_block(mids)
        logDs.append(ev.logD[0].copy())
    e_coarse = float(np.max(np.abs(logDs[0] - logDs[1])))
    e_fine = float(np.max(np.abs(logDs[1] - logDs[2])))
    return e_coarse / e_fine


def suite_scheme_agreement(ctx: VerifyContext) -> CriterionResult:
    """All schemes agree statistically and converge at second order."""
    spec = _gaussian_d3_spec(0.1, SEEDS["gaussian-le"])
    ests = {"midpoint": _c1_estimate(ctx)}
    for scheme in ("ito", "iwasawa-direct"):
        ests[scheme] = ctx.get(
            ("c7", scheme),
            lambda scheme=scheme: estimate_le(
                spec, scheme, dt=0.005, T=100.0, n_realizations=200,
                workers=ctx.workers),
        )
    pair_ok = True
    pairs = []
    names = list(ests)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            gap = np.abs(ests[a].lambda_ - ests[b].lambda_)
            tol = 3.0 * np.sqrt(ests[a].stderr**2 + ests[b].stderr**2)
            ok = bool(np.all(gap <= tol))
            pair_ok &= ok
            pairs.append({"schemes": (a, b), "gap": gap, "tol": tol, "ok": ok})
    conv_spec = _gaussian_d3_spec(0.1, SEEDS["scheme-path"])
    eps = 0.1
    ratios = {
        scheme: _convergence_ratio(conv_spec, scheme, T=5.0,
                                   dt_levels=(eps / 10, eps / 20, eps / 40))
        for scheme in SCHEMES
    }
    conv_ok = all(r >= 3.5 for r in ratios.values())
    return CriterionResult(
        name="scheme-agreement",
        passed=bool(pair_ok and conv_ok),
        details={"lambda": {k: v.lambda_ for k, v in ests.items()},
                 "pairwise": pairs, "halving_ratios": ratios,
                 "ratio_threshold": 3.5},
        notes="ratios " + ", ".join(f"{k}={v:.2f}" for k, v in ratios.items()),
    )


def suite_liouville(ctx: VerifyContext) -> CriterionResult:
    """Determinant bookkeeping: residual envelopes per scheme."""
    # exact case: traceless d=2, midpoint; the per-step determinant is exact
    kernel = IsotropicKernel(a=0.5, b=0.5, c=0.5, traceless=True)
    spec = ProcessSpec(kind="gaussian-isotropic-matrix", dim=2, kernel=kernel,
                       shape=CorrelationShape(0.1), master_seed=SEEDS["liouville"])
    res_exact = _liouville_residuals(spec, "midpoint", dt=0.005, T=10.0, n=4)
    exact_ok = bool(np.max(np.abs(res_exact)) <= 1e-10)
    # generic case: kernel with an open trace sector, envelope C*T*dt^2
    kernel2 = IsotropicKernel(a=0.0, b=1.0, c=0.0)
    spec2 = ProcessSpec(kind="gaussian-isotropic-matrix", dim=2, kernel=kernel2,
                        shape=CorrelationShape(0.1), master_seed=SEEDS["liouville"])
    envelope = {}
    envelope_ok = True
    for scheme in SCHEMES:
        rows = {}
        for dt in (0.01, 0.005):
            res = _liouville_residuals(spec2, scheme, dt=dt, T=10.0, n=4)
            bound = LIOUVILLE_C[scheme] * 10.0 * dt**2
            ok = bool(np.max(np.abs(res)) <= bound)
            envelope_ok &= ok
            rows[dt] = {"max_residual": float(np.max(np.abs(res))),
                        "bound": bound, "ok": ok}
        envelope[scheme] = rows
    return CriterionResult(
        name="liouville",
        passed=bool(exact_ok and envelope_ok),
        details={"traceless_midpoint_max": float(np.max(np.abs(res_exact))),
                 "traceless_bound": 1e-10, "envelope": envelope,
                 "pinned_C": LIOUVILLE_C},
        notes=f"traceless residual {np.max(np.abs(res_exact)):.2e}",
    )


def _liouville_residuals(spec, scheme, dt, T, n):
    n_steps = int(round(T / dt))
    stream = open_stream(spec, dt / 2.0, range(n), 2 * n_steps)
    ev = BatchEvolver(spec.dim, n, scheme, dt, track_z=False)
    done = 0
    while done < n_steps:
        nb = min(512, n_steps - done)
        pts = stream.advance(2 * nb)
        ev.step_block(pts[0::2])
        done += nb
    return ev.logD.sum(axis=1) - ev.trace_integral


def suite_legendre_roundtrip(ctx: VerifyContext) -> CriterionResult:
    """Double transform returns the table within its secant bound; quadratic
    self-duality is exact at grid vertices."""
    sigma, nu = 1.0, 1.0
    eta_grid = np.linspace(-3.0, 3.0, 241)
    w_vals = np.array([telegraph_cgf_oracle(sigma, nu, e) for e in eta_grid])
    a_grid = np.linspace(-0.999 * sigma, 0.999 * sigma, 241)
    J = legendre_transform((eta_grid, w_vals), a_grid)
    back = legendre_transform((a_grid, J.values), eta_grid)
    # piecewise-linear secant gaps of both tables bound the round-trip error
    bound = _secant_bound(eta_grid, w_vals) + _secant_bound(a_grid, J.values)
    interior = slice(2, -2)
    roundtrip_err = float(np.max(np.abs(back.values[interior] - w_vals[interior])))
    roundtrip_ok = bool(roundtrip_err <= bound)
    quad_grid = np.linspace(-3.0, 3.0, 241)
    f = 0.5 * quad_grid**2
    g = legendre_transform((quad_grid, f), quad_grid)
    inner = ~g.extrapolated
    quad_err = float(np.max(np.abs(g.values[inner] - 0.5 * quad_grid[inner] ** 2)))
    quad_ok = bool(quad_err <= 1e-15)
    return CriterionResult(
        name="legendre-roundtrip",
        passed=bool(roundtrip_ok and quad_ok),
        details={"roundtrip_error": roundtrip_err, "secant_bound": bound,
                 "quadratic_vertex_error": quad_err},
        notes=f"roundtrip err {roundtrip_err:.2e} <= bound {bound:.2e}; "
              f"quadratic vertex err {quad_err:.1e}",
    )


def _secant_bound(grid: np.ndarray, vals: np.ndarray) -> float:
    mid_true = vals[1:-1]
    mid_secant = 0.5 * (vals[:-2] + vals[2:])
    return float(np.max(np.abs(mid_secant - mid_true)))


def suite_fn_delta(ctx: VerifyContext) -> CriterionResult:
    """Simultaneous-time splitting convention: growth of <x> is w2/2, and the
    naive convention w2 is rejected."""
    eps = 0.02
    spec = ProcessSpec(kind="scalar-ou", dim=1, shape=CorrelationShape(eps),
                       master_seed=SEEDS["fn-delta"])
    dt = eps / 10.0
    T = 6.0
    steps = (int(round(0.5 * T / dt)), int(round(T / dt)))
    n = 100_000
    snaps_parts = []
    for lo in range(0, n, 8192):
        hi = min(lo + 8192, n)
        snaps_parts.append(_scalar_chunk_job((spec, dt, steps, lo, hi)))
    snaps = np.concatenate(snaps_parts, axis=1)
    check = fn_delta_check_integrals(
        w2=1.0, I_half=snaps[0, :, 0], I_full=snaps[1, :, 0],
        dT=0.5 * T, w1=0.0, bootstrap_seed=SEEDS["fn-delta"])
    return CriterionResult(
        name="fn-delta",
        passed=bool(check.passed and check.rejects_naive),
        details={"rate": check.rate, "sigma": check.rate_sigma,
                 "predicted": check.predicted, "naive": check.predicted_naive,
                 "z_predicted": check.z_predicted, "z_naive": check.z_naive,
                 "epsilon": eps, "n_realizations": n},
        notes=f"rate {check.rate:.4f} vs {check.predicted:.1f} "
              f"(z={check.z_predicted:.2f}); naive z={check.z_naive:.1f}",
    )


def suite_properties(ctx: VerifyContext) -> CriterionResult:
    """Structural property battery: orthogonality, factor consistency,
    ordering, fixed-horizon convexity, worker-count determinism."""
    spec = _gaussian_d3_spec(0.1, SEEDS["properties"])
    checks = {}

    # orthogonality drift over a long-ish run, every scheme
    ok = True
    drift = {}
    for scheme in SCHEMES:
        ev = _evolve_small(spec, scheme, dt=0.005, T=5.0, n=8)
        r = ev.R @ np.swapaxes(ev.R, -1, -2) - np.eye(3)
        drift[scheme] = float(np.max(np.abs(r)))
        ok &= drift[scheme] <= 1e-10
    checks["orthogonality"] = {"ok": ok, "max_drift": drift}

    # factor consistency against the brute-force propagator product
    fc = {}
    fc_ok = True
    for scheme in ("midpoint", "ito"):
        err = _factor_consistency_error(spec, scheme, dt=0.01, T=2.0)
        fc[scheme] = err
        fc_ok &= err <= 1e-8
    checks["factor_consistency"] = {"ok": fc_ok, "relative_error": fc}

    # ordering of the estimated spectrum
    est = _c1_estimate(ctx)
    order_ok = bool(np.all(np.diff(est.lambda_) <= 3.0 * (est.stderr[:-1] + est.stderr[1:])))
    checks["ordering"] = {"ok": order_ok, "lambda": est.lambda_}

    # fixed-horizon convexity of the growth function along a line (exact)
    line = [(x,) for x in np.linspace(-1.5, 1.5, 13)]
    ou_spec = ProcessSpec(kind="scalar-ou", dim=1, shape=CorrelationShape(0.05),
                          master_seed=SEEDS["properties"])
    gle = estimate_scalar_cgf_from_spec(ou_spec, dt=0.005, T_list=(2.0, 4.0),
                                        n_realizations=20_000, eta_grid=line,
                                        workers=ctx.workers, n_boot=100)
    convex_ok = True
    for t_idx, T in enumerate(gle.T_list):
        second = np.diff(gle.w_by_T[t_idx] * T, 2)
        convex_ok &= bool(np.all(second >= -1e-9))
    checks["fixed_T_convexity"] = {"ok": convex_ok}

    # determinism across worker counts (fixed chunking)
    a = estimate_le(spec, "midpoint", dt=0.01, T=2.0, n_realizations=48,
                    workers=None, chunk_size=16)
    b = estimate_le(spec, "midpoint", dt=0.01, T=2.0, n_realizations=48,
                    workers=2, chunk_size=16)
    det_ok = bool(np.array_equal(a.lambda_, b.lambda_)
                  and np.array_equal(a.stderr, b.stderr))
    checks["worker_determinism"] = {"ok": det_ok}

    passed = all(c["ok"] for c in checks.values())
    return CriterionResult(
        name="properties", passed=bool(passed), details=checks,
        notes=", ".join(f"{k}:{'ok' if v['ok'] else 'FAIL'}" for k, v in checks.items()),
    )


def _evolve_small(spec, scheme, dt, T, n):
    n_steps = int(round(T / dt))
    stream = open_stream(spec, dt / 2.0, range(n), 2 * n_steps)
    ev = BatchEvolver(spec.dim, n, scheme, dt, track_z=False)
    done = 0
    while done < n_steps:
        nb = min(512, n_steps - done)
        pts = stream.advance(2 * nb)
        ev.step_block(pts[0::2])
        done += nb
    return ev


def _factor_consistency_error(spec, scheme, dt, T) -> float:
    n_steps = int(round(T / dt))
    stream = open_stream(spec, dt / 2.0, [0], 2 * n_steps)
    ev = BatchEvolver(spec.dim, 1, scheme, dt, track_z=True)
    eye = np.eye(spec.dim)
    Q = eye.copy()
    for _ in range(n_steps):
        pts = stream.advance(2)
        A = pts[0, 0]
        if scheme == "midpoint":
            P = np.linalg.solve(eye - 0.5 * dt * A, eye + 0.5 * dt * A)
        else:
            P = eye + dt * A + 0.5 * (dt * A) @ (dt * A)
        Q = P @ Q
        ev.step_block(pts[0:1])
    Q_regit = ev.R[0] @ np.diag(np.exp(ev.logD[0])) @ ev.Z[0]
    return float(np.max(np.abs(Q_regit - Q)) / np.max(np.abs(Q)))


SUITES = {
    "gaussian-le": suite_gaussian_le,
    "sum-rule": suite_sum_rule,
    "eps-independence": suite_eps_independence,
    "gaussian-gle": suite_gaussian_gle,
    "scalar-cgf": suite_scalar_cgf,
    "shift-identity": suite_shift_identity,
    "scheme-agreement": suite_scheme_agreement,
    "liouville": suite_liouville,
    "legendre-roundtrip": suite_legendre_roundtrip,
    "fn-delta": suite_fn_delta,
    "properties": suite_properties,
}

SUITE_NAMES = tuple(SUITES)


def run_suites(which: str, workers: int | None = None,
               ctx: VerifyContext | None = None) -> list[CriterionResult]:
    """Run one named suite, or all of them, sharing heavy ensembles."""
    if ctx is None:
        ctx = VerifyContext(workers=workers)
    if which == "all":
        names = list(SUITE_NAMES)
    elif which in SUITES:
        names = [which]
    else:
        raise ValueError(f"unknown suite {which!r}; expected one of {SUITE_NAMES} or 'all'")
    return [SUITES[name](ctx) for name in names]
