"""Stationary isotropic matrix and scalar noise processes with exact sampling.

Matrix processes are assembled from independent scalar Ornstein-Uhlenbeck
modes attached to an orthonormal basis of matrix space, split into the three
conjugation-invariant sectors (trace, symmetric-traceless, antisymmetric).
The sector amplitudes are chosen so that the two-point function of the
assembled matrix equals the isotropic coupling tensor

    K_(ij)(kp) = -a d_ij d_kp + b d_ik d_jp + c d_ip d_jk

times the exponential correlation profile Phi(t) = exp(-|t|/eps) / (2 eps),
which integrates to one.  Ornstein-Uhlenbeck modes are stepped with the exact
conditional law, so the sampled noise carries no time-discretization bias at
any step size.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "IsotropicKernel",
    "CorrelationShape",
    "ProcessSpec",
    "SamplePath",
    "KernelReport",
    "KernelValidationError",
    "CumulantIntegral",
    "kernel_validate",
    "sample_path",
    "cumulant_integrals",
    "telegraph_cgf_oracle",
    "realization_rng",
    "matrix_sector_basis",
    "open_stream",
    "RNG_VERSION",
    "TAG_NOISE",
    "TAG_ENVELOPE",
    "TAG_BOOTSTRAP",
]

MATRIX_KINDS = ("gaussian-isotropic-matrix", "modulated-gaussian-matrix")
SCALAR_KINDS = ("scalar-ou", "scalar-telegraph")
ALL_KINDS = MATRIX_KINDS + SCALAR_KINDS + ("constant-diag",)

# Stream tags for per-realization substreams.  A realization's generator is
# Generator(PCG64(SeedSequence((master_seed, tag, realization_index)))), so
# paths are bit-reproducible regardless of scheduling or block size.
TAG_NOISE = 0
TAG_ENVELOPE = 1
TAG_BOOTSTRAP = 100

RNG_VERSION = "pcg64-seedseq-v1"

# dt larger than eps/DT_GUARD_RATIO earns a warning (not an error, so
# convergence studies can violate it deliberately).
DT_GUARD_RATIO = 10.0


def realization_rng(master_seed: int, realization_index: int, tag: int = TAG_NOISE) -> np.random.Generator:
    """Deterministic per-realization generator; see RNG_VERSION for the pinning."""
    ss = np.random.SeedSequence((int(master_seed), int(tag), int(realization_index)))
    return np.random.Generator(np.random.PCG64(ss))


class KernelValidationError(ValueError):
    """Raised when sampling is requested for an invalid coupling kernel."""


@dataclass(frozen=True)
class IsotropicKernel:
    """Coupling coefficients (a, b, c) of the isotropic two-point tensor."""

    a: float
    b: float
    c: float
    traceless: bool = False

    def sector_variances(self, dim: int) -> tuple[float, float, float]:
        """(trace, symmetric-traceless, antisymmetric) sector variances."""
        return (self.b + self.c - self.a * dim, self.b + self.c, self.b - self.c)

    def tensor(self, dim: int) -> np.ndarray:
        """The (d, d, d, d) coupling tensor K[i, j, k, p]."""
        d = dim
        eye = np.eye(d)
        return (
            -self.a * np.einsum("ij,kp->ijkp", eye, eye)
            + self.b * np.einsum("ik,jp->ijkp", eye, eye)
            + self.c * np.einsum("ip,jk->ijkp", eye, eye)
        )

    def coupling_matrix(self, dim: int) -> np.ndarray:
        """K reshaped to the (d^2, d^2) covariance of vec(A) (per unit Phi)."""
        d = dim
        return self.tensor(d).reshape(d * d, d * d)

    @staticmethod
    def traceless_for(b: float, c: float, dim: int) -> "IsotropicKernel":
        """Kernel with the trace sector closed exactly: a = (b + c) / d."""
        return IsotropicKernel(a=(b + c) / dim, b=b, c=c, traceless=True)


@dataclass(frozen=True)
class KernelReport:
    """Outcome of kernel_validate; a report, never an exception."""

    dim: int
    antisymmetric_ok: bool
    symmetric_ok: bool
    trace_ok: bool
    trace_sector_zero: bool
    min_eigenvalue: float
    valid: bool


def kernel_validate(kernel: IsotropicKernel, dim: int) -> KernelReport:
    """Check the three sector inequalities of an isotropic kernel.

    The kernel is valid iff the d^2 x d^2 covariance of vec(A) is positive
    semidefinite, which happens exactly when all three sector variances are
    nonnegative.  Both the sector inequalities and the smallest eigenvalue of
    the assembled covariance are reported so they can be cross-checked.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    tr_var, sym_var, anti_var = kernel.sector_variances(dim)
    tol = 1e-12 * max(1.0, abs(kernel.a) * dim, abs(kernel.b), abs(kernel.c))
    min_eig = float(np.linalg.eigvalsh(kernel.coupling_matrix(dim)).min())
    anti_ok = anti_var >= -tol
    sym_ok = sym_var >= -tol
    tr_ok = tr_var >= -tol
    report = KernelReport(
        dim=dim,
        antisymmetric_ok=bool(anti_ok),
        symmetric_ok=bool(sym_ok),
        trace_ok=bool(tr_ok),
        trace_sector_zero=bool(abs(tr_var) <= tol),
        min_eigenvalue=min_eig,
        valid=bool(anti_ok and sym_ok and tr_ok),
    )
    if kernel.traceless and not report.trace_sector_zero:
        # flagged-traceless kernel whose coefficients do not close the trace
        # sector is inconsistent, hence invalid as specified
        report = KernelReport(
            dim=report.dim,
            antisymmetric_ok=report.antisymmetric_ok,
            symmetric_ok=report.symmetric_ok,
            trace_ok=report.trace_ok,
            trace_sector_zero=False,
            min_eigenvalue=report.min_eigenvalue,
            valid=False,
        )
    return report


@dataclass(frozen=True)
class CorrelationShape:
    """Correlation profile Phi of the noise; exponential kind only for now."""

    epsilon: float
    kind: str = "exponential"

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("correlation time epsilon must be positive")
        if self.kind != "exponential":
            raise ValueError(f"unsupported correlation shape kind: {self.kind!r}")

    def phi(self, t) -> np.ndarray:
        """Phi(t) = exp(-|t|/eps) / (2 eps); even, unit integral."""
        t = np.asarray(t, dtype=float)
        return np.exp(-np.abs(t) / self.epsilon) / (2.0 * self.epsilon)

    @property
    def phi0(self) -> float:
        return 1.0 / (2.0 * self.epsilon)

    @property
    def integral(self) -> float:
        """Analytic value of the time integral of Phi (exact per kind)."""
        return 1.0


@dataclass(frozen=True)
class ProcessSpec:
    """Full description of a stationary noise process.

    kind selects the process family:
      gaussian-isotropic-matrix   zero-mean Gaussian d x d matrices, kernel K
      modulated-gaussian-matrix   g(t) * B(t): positive two-state scalar
                                  envelope times an isotropic Gaussian matrix;
                                  non-Gaussian but still exactly isotropic
      scalar-ou                   unit-integral Ornstein-Uhlenbeck scalar
      scalar-telegraph            two-state (+-sigma) jump process, rate nu
      constant-diag               frozen diagonal matrix (deterministic flow)
    """

    kind: str
    dim: int = 1
    kernel: IsotropicKernel | None = None
    shape: CorrelationShape | None = None
    sigma: float | None = None
    nu: float | None = None
    mod_amplitude: float | None = None
    mod_epsilon: float | None = None
    diag: tuple[float, ...] | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown process kind: {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind in MATRIX_KINDS:
            if self.kernel is None or self.shape is None:
                raise ValueError(f"{self.kind} requires kernel and shape")
        if self.kind == "modulated-gaussian-matrix":
            if self.mod_amplitude is None or self.mod_epsilon is None:
                raise ValueError("modulated kind requires mod_amplitude and mod_epsilon")
            if not (0.0 <= self.mod_amplitude < 1.0):
                raise ValueError("mod_amplitude must lie in [0, 1) to keep the envelope positive")
            if self.mod_epsilon <= 0:
                raise ValueError("mod_epsilon must be positive")
        if self.kind == "scalar-ou":
            if self.shape is None:
                raise ValueError("scalar-ou requires shape")
            if self.dim != 1:
                raise ValueError("scalar-ou is one-dimensional")
        if self.kind == "scalar-telegraph":
            if self.sigma is None or self.nu is None:
                raise ValueError("scalar-telegraph requires sigma and nu")
            if self.nu <= 0:
                raise ValueError("telegraph switching rate nu must be positive")
            if self.dim != 1:
                raise ValueError("scalar-telegraph is one-dimensional")
        if self.kind == "constant-diag":
            if self.diag is None or len(self.diag) != self.dim:
                raise ValueError("constant-diag requires diag of length dim")

    @property
    def is_matrix(self) -> bool:
        return self.kind in MATRIX_KINDS or self.kind == "constant-diag"

    @property
    def epsilon(self) -> float | None:
        return self.shape.epsilon if self.shape is not None else None


@dataclass
class SamplePath:
    """One realization on a uniform grid: values[j] is the state at t = j*dt."""

    dt: float
    values: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.values.shape[0])


def matrix_sector_basis(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of d x d matrix space grouped by isotropy sector.

    Returns (basis, sector) where basis has shape (d^2, d, d) and sector maps
    each mode to 0 (trace), 1 (symmetric-traceless) or 2 (antisymmetric).
    The diagonal traceless modes use exact dyadic-free entries so that
    assembled traceless matrices have floating-point trace exactly zero.
    """
    d = dim
    mats, sectors = [], []
    mats.append(np.eye(d) / math.sqrt(d))
    sectors.append(0)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d))
            m[i, j] = m[j, i] = inv_sqrt2
            mats.append(m)
            sectors.append(1)
    for k in range(1, d):
        v = np.zeros(d)
        v[:k] = 1.0
        v[k] = -float(k)
        mats.append(np.diag(v) / math.sqrt(k * (k + 1)))
        sectors.append(1)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d))
            m[i, j] = inv_sqrt2
            m[j, i] = -inv_sqrt2
            mats.append(m)
            sectors.append(2)
    return np.array(mats), np.array(sectors)


# ----------------------------------------------------------------------
# streaming generation
# ----------------------------------------------------------------------


class _GaussianMatrixStream:
    """Exact OU-mode sampler for the Gaussian isotropic matrix process."""

    def __init__(self, spec: ProcessSpec, h: float, indices):
        d = spec.dim
        basis, sector = matrix_sector_basis(d)
        tr_var, sym_var, anti_var = spec.kernel.sector_variances(d)
        amp = np.where(sector == 0, math.sqrt(max(tr_var, 0.0)),
                       np.where(sector == 1, math.sqrt(max(sym_var, 0.0)),
                                math.sqrt(max(anti_var, 0.0))))
        self._basis = basis * amp[:, None, None]
        self._n_modes = basis.shape[0]
        eps = spec.shape.epsilon
        self._rho = math.exp(-h / eps)
        self._std0 = math.sqrt(spec.shape.phi0)
        self._innov = math.sqrt((1.0 - self._rho**2) * spec.shape.phi0)
        self._rngs = [realization_rng(spec.master_seed, int(m), TAG_NOISE) for m in indices]
        self._x = np.stack([g.normal(0.0, self._std0, size=self._n_modes) for g in self._rngs])
        self.current = np.einsum("mk,kij->mij", self._x, self._basis)

    def advance(self, n: int) -> np.ndarray:
        M = len(self._rngs)
        z = np.empty((M, n, self._n_modes))
        for m, g in enumerate(self._rngs):
            z[m] = g.normal(0.0, self._innov, size=(n, self._n_modes))
        out_modes = np.empty((n, M, self._n_modes))
        x = self._x
        for j in range(n):
            x = self._rho * x + z[:, j]
            out_modes[j] = x
        self._x = x
        return np.einsum("nmk,kij->nmij", out_modes, self._basis)


class _OUStream:
    """Unit-integral scalar Ornstein-Uhlenbeck sampler (exact stepping)."""

    def __init__(self, spec: ProcessSpec, h: float, indices):
        eps = spec.shape.epsilon
        self._rho = math.exp(-h / eps)
        std0 = math.sqrt(spec.shape.phi0)
        self._innov = math.sqrt((1.0 - self._rho**2) * spec.shape.phi0)
        self._rngs = [realization_rng(spec.master_seed, int(m), TAG_NOISE) for m in indices]
        self._x = np.array([g.normal(0.0, std0) for g in self._rngs])
        self.current = self._x.copy()

    def advance(self, n: int) -> np.ndarray:
        M = len(self._rngs)
        z = np.empty((M, n))
        for m, g in enumerate(self._rngs):
            z[m] = g.normal(0.0, self._innov, size=n)
        out = np.empty((n, M))
        x = self._x
        for j in range(n):
            x = self._rho * x + z[:, j]
            out[j] = x
        self._x = x
        return out


def _stationary_jump_times(rng: np.random.Generator, rate: float, t_end: float):
    """Initial sign and cumulative jump times of a stationary two-state process."""
    sign = 1.0 if rng.random() < 0.5 else -1.0
    jumps = []
    t = 0.0
    block = max(8, int(rate * t_end) + 8)
    while t <= t_end:
        gaps = rng.exponential(scale=1.0 / rate, size=block)
        cum = t + np.cumsum(gaps)
        jumps.append(cum)
        t = cum[-1]
    return sign, np.concatenate(jumps)


class _TelegraphStream:
    """Two-state jump sampler evaluated on the grid via pregenerated jump times."""

    def __init__(self, spec: ProcessSpec, h: float, indices, n_total: int,
                 rate: float | None = None, values=None, tag: int = TAG_NOISE):
        rate = spec.nu if rate is None else rate
        self._values = (-spec.sigma, spec.sigma) if values is None else values
        self._h = h
        self._pos = 0
        t_end = h * n_total + h
        self._signs = []
        self._jumps = []
        for m in indices:
            g = realization_rng(spec.master_seed, int(m), tag)
            s, j = _stationary_jump_times(g, rate, t_end)
            self._signs.append(s)
            self._jumps.append(j)
        self._signs = np.array(self._signs)
        self.current = self._at_points(np.array([0.0]))[0]

    def _at_points(self, ts: np.ndarray) -> np.ndarray:
        M = len(self._jumps)
        out = np.empty((ts.size, M))
        lo, hi = self._values
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for m in range(M):
            counts = np.searchsorted(self._jumps[m], ts, side="right")
            tau = self._signs[m] * np.where(counts % 2 == 0, 1.0, -1.0)
            out[:, m] = mid + half * tau
        return out

    def advance(self, n: int) -> np.ndarray:
        ts = self._h * np.arange(self._pos + 1, self._pos + n + 1)
        self._pos += n
        return self._at_points(ts)


class _ModulatedStream:
    """Envelope-times-Gaussian sampler: A(t) = g(t) B(t).

    The envelope g is an independent two-state process with values 1 -+ m and
    correlation time mod_epsilon; conjugation acts only on B, so the law stays
    exactly isotropic while cumulants of all orders become nonzero.
    """

    def __init__(self, spec: ProcessSpec, h: float, indices, n_total: int):
        self._gauss = _GaussianMatrixStream(spec, h, indices)
        m = spec.mod_amplitude
        self._env = _TelegraphStream(
            spec, h, indices, n_total,
            rate=1.0 / (2.0 * spec.mod_epsilon),
            values=(1.0 - m, 1.0 + m),
            tag=TAG_ENVELOPE,
        )
        self.current = self._env.current[:, None, None] * self._gauss.current

    def advance(self, n: int) -> np.ndarray:
        return self._env.advance(n)[:, :, None, None] * self._gauss.advance(n)


class _ConstantStream:
    """Deterministic frozen diagonal matrix."""

    def __init__(self, spec: ProcessSpec, h: float, indices):
        self._mat = np.diag(np.asarray(spec.diag, dtype=float))
        self._M = len(list(indices))
        self.current = np.tile(self._mat, (self._M, 1, 1))

    def advance(self, n: int) -> np.ndarray:
        return np.tile(self._mat, (n, self._M, 1, 1))


def open_stream(spec: ProcessSpec, h: float, indices, n_total: int):
    """Open a block-streaming sampler for a batch of realizations.

    Yields values on the uniform grid with spacing h: `.current` holds the
    stationary draw at t = 0 and `.advance(n)` returns the next n grid values
    with shape (n, M, d, d) for matrix kinds or (n, M) for scalar kinds.
    Blocked and unblocked generation are bit-identical because every
    realization consumes its own substreams in a fixed order.
    """
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    indices = list(indices)
    if spec.kind in MATRIX_KINDS:
        report = kernel_validate(spec.kernel, spec.dim)
        if not report.valid:
            raise KernelValidationError(f"invalid isotropic kernel: {report}")
    if spec.kind == "gaussian-isotropic-matrix":
        return _GaussianMatrixStream(spec, h, indices)
    if spec.kind == "modulated-gaussian-matrix":
        return _ModulatedStream(spec, h, indices, n_total)
    if spec.kind == "scalar-ou":
        return _OUStream(spec, h, indices)
    if spec.kind == "scalar-telegraph":
        return _TelegraphStream(spec, h, indices, n_total)
    if spec.kind == "constant-diag":
        return _ConstantStream(spec, h, indices)
    raise ValueError(f"unknown process kind: {spec.kind!r}")


def sample_path(spec: ProcessSpec, dt: float, n_steps: int, realization_index: int = 0) -> SamplePath:
    """Draw one stationary realization on the grid t = 0, dt, ..., n_steps*dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    eps = spec.epsilon
    if eps is not None and dt > eps / DT_GUARD_RATIO * (1 + 1e-12):
        warnings.warn(
            f"dt = {dt:g} exceeds epsilon/{DT_GUARD_RATIO:g} = {eps / DT_GUARD_RATIO:g}; "
            "the noise is under-resolved",
            RuntimeWarning,
            stacklevel=2,
        )
    stream = open_stream(spec, dt, [realization_index], n_steps)
    vals = np.concatenate([stream.current[None], stream.advance(n_steps)], axis=0)
    return SamplePath(dt=dt, values=vals[:, 0])


# ----------------------------------------------------------------------
# cumulant integrals
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CumulantIntegral:
    """Time-integrated connected correlator of order n.

    tensor is None when no closed form exists for the (kind, order) pair; the
    provenance marker then reads "empirical-required" so a missing value can
    never be mistaken for zero.
    """

    order: int
    tensor: np.ndarray | None
    provenance: str  # "closed-form" or "empirical-required"


def _telegraph_w_n(sigma: float, nu: float, order: int) -> float:
    """n-th derivative at 0 of the telegraph growth function -nu + sqrt(nu^2 + s^2 e^2).

    From the binomial series sqrt(1+x) = sum_k C(1/2, k) x^k with
    x = (sigma*eta/nu)^2: odd orders vanish and
    w^(2k) = (2k)! * nu * C(1/2, k) * (sigma/nu)^(2k).
    """
    if order % 2 == 1:
        return 0.0
    k = order // 2
    from scipy.special import binom

    return float(math.factorial(order) * nu * binom(0.5, k) * (sigma / nu) ** order)


def cumulant_integrals(spec: ProcessSpec, max_order: int) -> list[CumulantIntegral]:
    """Closed-form cumulant integrals up to max_order, with explicit markers.

    Gaussian kinds have exactly zero integrals beyond order two.  The
    telegraph integrals come from derivatives of its closed-form growth
    function.  For the modulated matrix kind only orders one and two are
    closed-form (the envelope boosts the order-two integral by
    m^2 * eps_env / (eps_env + eps)); higher orders must be estimated
    empirically and are marked as such.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    d = spec.dim
    out: list[CumulantIntegral] = []
    for order in range(1, max_order + 1):
        if spec.kind == "scalar-ou":
            val = 1.0 if order == 2 else 0.0
            out.append(CumulantIntegral(order, np.asarray(val), "closed-form"))
        elif spec.kind == "scalar-telegraph":
            out.append(CumulantIntegral(
                order, np.asarray(_telegraph_w_n(spec.sigma, spec.nu, order)), "closed-form"))
        elif spec.kind == "gaussian-isotropic-matrix":
            if order == 2:
                tensor = spec.kernel.tensor(d) * spec.shape.integral
            else:
                tensor = np.zeros((d,) * (2 * order))
            out.append(CumulantIntegral(order, tensor, "closed-form"))
        elif spec.kind == "modulated-gaussian-matrix":
            if order == 1:
                out.append(CumulantIntegral(order, np.zeros((d, d)), "closed-form"))
            elif order == 2:
                eps = spec.shape.epsilon
                boost = 1.0 + spec.mod_amplitude**2 * spec.mod_epsilon / (spec.mod_epsilon + eps)
                out.append(CumulantIntegral(order, spec.kernel.tensor(d) * boost, "closed-form"))
            elif order == 3:
                # odd in the sign-symmetric Gaussian factor
                out.append(CumulantIntegral(order, np.zeros((d,) * 6), "closed-form"))
            else:
                out.append(CumulantIntegral(order, None, "empirical-required"))
        elif spec.kind == "constant-diag":
            if order == 1:
                out.append(CumulantIntegral(order, np.diag(np.asarray(spec.diag, float)), "closed-form"))
            else:
                out.append(CumulantIntegral(order, np.zeros((d,) * (2 * order)), "closed-form"))
        else:
            out.append(CumulantIntegral(order, None, "empirical-required"))
    return out


def telegraph_cgf_oracle(sigma: float, nu: float, eta: float) -> float:
    """Exact growth function of the telegraph process.

    Top eigenvalue of the 2 x 2 tilted generator
        [[eta*sigma - nu, nu], [nu, -eta*sigma - nu]],
    namely -nu + sqrt(nu^2 + sigma^2 eta^2).  Serves as the independent
    oracle for every non-Gaussian scalar check.
    """
    if nu <= 0:
        raise ValueError("telegraph switching rate nu must be positive")
    return -nu + math.sqrt(nu * nu + (sigma * eta) ** 2)
