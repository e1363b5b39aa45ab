"""Discrete spectral backend on a periodic box.

Realises the velocity kernel (heat factor times transverse projection,
written with the explicit component numerators), the initial-condition
propagator, and the pressure kernel as Fourier multipliers on
[-L, L]^dim, then runs the fixed-point iteration

    u_j = u_1 - S[(u_{j-1} . grad) u_{j-1}],   u_1 = S[f] + B[u_0]

for arbitrary decaying forcing in 2-D and 3-D.  The box stands in for the
whole plane/space; forcing must decay enough that its boundary values are
negligible (the decay certificate), while the time convolution uses exact
per-mode exponentials and composite-Simpson weights, so the linear part
carries no stepping error.  Nonlinear products are formed pseudo-
spectrally with 2/3-rule dealiasing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import quadrature

__all__ = [
    "SpectralGrid",
    "SpectralField",
    "GridForcing",
    "ResolutionWarning",
    "fourier_divergence",
    "apply_S_kernel_2d",
    "apply_S_kernel_3d",
    "apply_B",
    "pressure_from_force",
    "convective_term",
    "project_solenoidal",
    "iterate",
    "SolveResult",
    "taylor_green",
]


class ResolutionWarning(UserWarning):
    """A nonlinear product was formed from an under-resolved field."""


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on [-L, L]^dim with M points per axis."""

    dim: int
    L: float
    M: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.M < 4 or self.M % 2:
            raise ValueError("M must be an even integer >= 4")
        if not self.L > 0:
            raise ValueError("box halfwidth L must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.M

    def axes(self):
        """Physical coordinates along one axis (cell-left convention)."""
        return np.linspace(-self.L, self.L, self.M, endpoint=False)

    def meshgrid(self):
        ax = self.axes()
        return np.meshgrid(*([ax] * self.dim), indexing="ij")

    def wavenumbers(self):
        """Angular wavenumbers per axis, broadcast-shaped."""
        k = 2.0 * math.pi * np.fft.fftfreq(self.M, d=self.spacing)
        out = []
        for axis in range(self.dim):
            shape = [1] * self.dim
            shape[axis] = self.M
            out.append(k.reshape(shape))
        return out

    def k_squared(self):
        ks = self.wavenumbers()
        out = sum(k * k for k in ks)
        return np.broadcast_to(out, (self.M,) * self.dim).copy()

    def dealias_mask(self):
        """2/3-rule mask: keep modes with index magnitude < M/3 per axis."""
        idx = np.abs(np.fft.fftfreq(self.M, d=1.0 / self.M))
        keep = idx < self.M / 3.0
        mask = np.ones((self.M,) * self.dim, dtype=bool)
        for axis in range(self.dim):
            shape = [1] * self.dim
            shape[axis] = self.M
            mask &= keep.reshape(shape)
        return mask


@dataclass
class SpectralField:
    """Velocity (or force) field as per-component Fourier coefficients."""

    grid: SpectralGrid
    coeffs: np.ndarray  # (dim, M, ..., M) complex

    @classmethod
    def from_physical(cls, grid: SpectralGrid, u_phys) -> "SpectralField":
        u_phys = np.asarray(u_phys)
        axes = tuple(range(1, grid.dim + 1))
        return cls(grid, np.fft.fftn(u_phys, axes=axes))

    def to_physical(self) -> np.ndarray:
        axes = tuple(range(1, self.grid.dim + 1))
        return np.real(np.fft.ifftn(self.coeffs, axes=axes))

    def conjugate_symmetry_defect(self) -> float:
        """max |U(-k) - conj U(k)| relative to max |U| (0 for real fields)."""
        axes = tuple(range(1, self.grid.dim + 1))
        flipped = self.coeffs.copy()
        for ax in axes:
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        top = float(np.max(np.abs(flipped - np.conj(self.coeffs))))
        return top / max(float(np.max(np.abs(self.coeffs))), 1e-300)


def fourier_divergence(grid: SpectralGrid, coeffs) -> float:
    """Spectral incompressibility defect: max over k != 0 of
    |k . U(k)| / (|k| sup_k |U|).  Normalising by the peak coefficient
    keeps rounding-level modes from dominating the measure."""
    ks = grid.wavenumbers()
    coeffs = np.asarray(coeffs)
    dot = sum(k * c for k, c in zip(ks, coeffs))
    kmag = np.sqrt(grid.k_squared())
    peak = float(np.max(np.abs(coeffs)))
    if peak == 0.0:
        return 0.0
    good = kmag > 0.0
    return float(np.max(np.abs(dot)[good] / (kmag[good] * peak)))


@dataclass
class GridForcing:
    """Time-dependent force sampled on the grid via a callable sample(t)
    returning a (dim, M, ..., M) physical array.  The decay certificate
    bounds the boundary magnitude against the interior maximum."""

    grid: SpectralGrid
    sample: object  # callable t -> physical array
    decay_threshold: float = 1e-6

    def certificate(self, t: float) -> dict:
        f = np.asarray(self.sample(t))
        interior = float(np.max(np.abs(f)))
        edge = 0.0
        for axis in range(1, self.grid.dim + 1):
            edge = max(edge, float(np.max(np.abs(np.take(f, 0, axis=axis)))))
        ok = interior == 0.0 or edge <= self.decay_threshold * interior
        return {"boundary_max": edge, "interior_max": interior, "pass": ok}


# ---------------------------------------------------------------------------
# Fourier-multiplier kernels
# ---------------------------------------------------------------------------

def _safe_ksq(grid: SpectralGrid):
    ksq = grid.k_squared()
    safe = ksq.copy()
    safe[ksq == 0.0] = 1.0
    return ksq, safe


def _project_numerators(grid: SpectralGrid, f_hat):
    """Transverse numerators divided by |k|^2, with the zero mode zeroed.

    2-D: ((ky^2 F1 - kx ky F2), (kx^2 F2 - kx ky F1)) / |k|^2
    3-D: ((ky^2+kz^2) F1 - kx ky F2 - kx kz F3, ...) / |k|^2
    """
    ks = grid.wavenumbers()
    ksq, safe = _safe_ksq(grid)
    f_hat = np.asarray(f_hat)
    if grid.dim == 2:
        kx, ky = ks
        n1 = (ky * ky * f_hat[0] - kx * ky * f_hat[1]) / safe
        n2 = (kx * kx * f_hat[1] - kx * ky * f_hat[0]) / safe
        out = np.stack([n1, n2])
    else:
        kx, ky, kz = ks
        f1, f2, f3 = f_hat
        n1 = ((ky * ky + kz * kz) * f1 - kx * ky * f2 - kx * kz * f3) / safe
        n2 = ((kz * kz + kx * kx) * f2 - ky * kz * f3 - ky * kx * f1) / safe
        n3 = ((kx * kx + ky * ky) * f3 - kz * kx * f1 - kz * ky * f2) / safe
        out = np.stack([n1, n2, n3])
    out[:, ksq == 0.0] = 0.0
    return out


def project_solenoidal(grid: SpectralGrid, f_hat):
    """Divergence-free (transverse) part of a spectral field."""
    return _project_numerators(grid, f_hat)


def _apply_S(grid: SpectralGrid, f_hat_nodes, nu, t, taus):
    """Heat-damped time convolution of the projected force.

    f_hat_nodes: (n_tau, dim, ...) spectral force at the Simpson nodes of
    [0, t]; returns the kernel output at time t.
    """
    taus = np.asarray(taus, dtype=float)
    n = taus.size
    if n < 3 or n % 2 == 0:
        raise ValueError("time nodes must be an odd count >= 3")
    ksq = grid.k_squared()
    w = quadrature.simpson_weights(n, t / (n - 1))
    out = np.zeros_like(np.asarray(f_hat_nodes)[0])
    for i in range(n):
        proj = _project_numerators(grid, f_hat_nodes[i])
        out = out + w[i] * np.exp(-nu * ksq * (t - taus[i])) * proj
    return out


def apply_S_kernel_2d(grid: SpectralGrid, f_hat_nodes, nu, t, taus):
    """2-D velocity kernel: integral_0^t e^{-nu |k|^2 (t-tau)} times the
    transverse numerators of the force, Simpson in tau."""
    if grid.dim != 2:
        raise ValueError("grid must be 2-D")
    return _apply_S(grid, f_hat_nodes, nu, t, taus)


def apply_S_kernel_3d(grid: SpectralGrid, f_hat_nodes, nu, t, taus):
    """3-D velocity kernel; componentwise numerators
    (k_j^2 + k_l^2) F_i - k_i k_j F_j - k_i k_l F_l over |k|^2."""
    if grid.dim != 3:
        raise ValueError("grid must be 3-D")
    return _apply_S(grid, f_hat_nodes, nu, t, taus)


def apply_B(grid: SpectralGrid, u0_hat, nu, t, divergence_tol=1e-8):
    """Initial-condition propagator: U0(k) e^{-nu |k|^2 t}.

    Identity at t = 0 and for nu = 0.  Rejects initial data whose spectral
    divergence defect exceeds ``divergence_tol``.
    """
    defect = fourier_divergence(grid, u0_hat)
    if defect > divergence_tol:
        raise ValueError(f"initial data is not divergence-free "
                         f"(defect {defect:.2e} > {divergence_tol:.0e})")
    return np.asarray(u0_hat) * np.exp(-nu * grid.k_squared() * t)


def pressure_from_force(grid: SpectralGrid, f_hat):
    """Pressure coefficients -i (k . F)/|k|^2 (zero mode gauged to 0).

    Equivalent to solving Lap p = div f; the gradient part of the force is
    exactly what the velocity kernel discards.
    """
    ks = grid.wavenumbers()
    ksq, safe = _safe_ksq(grid)
    p_hat = -1j * sum(k * f for k, f in zip(ks, np.asarray(f_hat))) / safe
    p_hat[ksq == 0.0] = 0.0
    return p_hat


def spectral_tail_fraction(grid: SpectralGrid, coeffs) -> float:
    """max |U| outside the dealias band over max |U|; a resolution proxy."""
    mask = grid.dealias_mask()
    peak = float(np.max(np.abs(coeffs)))
    if peak == 0.0:
        return 0.0
    outside = np.abs(np.asarray(coeffs))[:, ~mask]
    if outside.size == 0:
        return 0.0
    return float(np.max(outside)) / peak


def convective_term(grid: SpectralGrid, u_hat, tail_tol=1e-8):
    """Spectral coefficients of (u . grad) u, dealiased by the 2/3 rule.

    The velocity and its spectral derivatives are inverse-transformed,
    multiplied pointwise, re-transformed and masked.  Emits a
    ResolutionWarning when the field's spectral tail exceeds ``tail_tol``
    of its peak coefficient.
    """
    u_hat = np.asarray(u_hat)
    if spectral_tail_fraction(grid, u_hat) > tail_tol:
        warnings.warn("velocity spectral tail above resolution threshold",
                      ResolutionWarning, stacklevel=2)
    ks = grid.wavenumbers()
    axes = tuple(range(1, grid.dim + 1))
    mask = grid.dealias_mask()
    u_phys = np.fft.ifftn(u_hat * mask, axes=axes)
    out = np.zeros_like(u_hat)
    for comp in range(grid.dim):
        acc = np.zeros_like(u_phys[0])
        for j in range(grid.dim):
            du = np.fft.ifftn(1j * ks[j] * u_hat[comp] * mask)
            acc = acc + u_phys[j] * du
        out[comp] = np.fft.fftn(acc)
    out *= mask
    return out


# ---------------------------------------------------------------------------
# Fixed-point iteration
# ---------------------------------------------------------------------------

def _prefix_weight_matrix(n: int, h: float) -> np.ndarray:
    """W[m, i]: weight of node i when integrating [0, tau_m] (Simpson on
    even prefixes, Simpson + 3/8 on odd ones, trapezoid for m = 1)."""
    W = np.zeros((n, n))
    if n >= 2:
        W[1, 0] = W[1, 1] = 0.5 * h
    for m in range(2, n):
        if m % 2 == 0:
            W[m, : m + 1] = quadrature.simpson_weights(m + 1, h)
        else:
            if m >= 5:
                W[m, : m - 2] = quadrature.simpson_weights(m - 2, h)
            W[m, m - 3: m + 1] += (3.0 * h / 8.0) * np.array([1.0, 3.0, 3.0, 1.0])
    return W


@dataclass
class SolveResult:
    """Outcome of the fixed-point iteration."""

    grid: SpectralGrid
    taus: np.ndarray
    u_hat_nodes: np.ndarray       # (n_tau, dim, ...) final iterate
    u1_hat_nodes: np.ndarray      # first iterate, same layout
    pressure_hat: np.ndarray      # at the final time
    correction_norms: list
    converged: bool
    diverged: bool
    iterations: int
    energy: float

    def velocity(self, node: int = -1) -> np.ndarray:
        axes = tuple(range(1, self.grid.dim + 1))
        return np.real(np.fft.ifftn(self.u_hat_nodes[node], axes=axes))

    def velocity_sup(self, node: int = -1) -> float:
        return float(np.max(np.abs(self.velocity(node))))


def iterate(forcing: GridForcing | None, u0_phys, nu, t, j_max=12, tol=1e-10,
            n_tau=33, grid: SpectralGrid | None = None,
            enforce_certificate=True) -> SolveResult:
    """Run the fixed-point iteration up to time t.

    The velocity is carried spectrally on an odd Simpson grid of [0, t];
    each step applies the heat-projection kernel to the current convective
    force correction at every node.  Stops when the sup-norm of the latest
    correction falls below ``tol``; three consecutive norm increases are
    reported as divergence.  The forcing mean is removed per component
    (the zero mode is outside the kernel's range), and its decay
    certificate is checked at t unless disabled.
    """
    if grid is None:
        if forcing is None:
            raise ValueError("either forcing or grid must be given")
        grid = forcing.grid
    if nu < 0:
        raise ValueError("nu must be non-negative")
    if n_tau % 2 == 0 or n_tau < 3:
        raise ValueError("n_tau must be an odd count >= 3")
    taus = np.linspace(0.0, t, n_tau)
    shape = (grid.dim,) + (grid.M,) * grid.dim
    axes = tuple(range(1, grid.dim + 1))
    ksq = grid.k_squared()
    W = _prefix_weight_matrix(n_tau, t / (n_tau - 1))

    certificate = None
    f_hat_nodes = np.zeros((n_tau,) + shape, dtype=complex)
    if forcing is not None:
        if enforce_certificate:
            certificate = forcing.certificate(float(taus[-1]))
            if not certificate["pass"]:
                raise ValueError(
                    "forcing decay certificate failed: boundary magnitude "
                    f"{certificate['boundary_max']:.3e} vs interior "
                    f"{certificate['interior_max']:.3e}")
        for i, tau in enumerate(taus):
            f_phys = np.asarray(forcing.sample(float(tau)), dtype=float)
            f_phys = f_phys - f_phys.mean(axis=axes, keepdims=True)
            f_hat_nodes[i] = np.fft.fftn(f_phys, axes=axes)

    if u0_phys is None:
        u0_hat = np.zeros(shape, dtype=complex)
    else:
        u0_hat = np.fft.fftn(np.asarray(u0_phys, dtype=float), axes=axes)

    def convolve(n_hat_nodes):
        """Kernel output at every node from projected numerators."""
        proj = np.stack([_project_numerators(grid, n_hat_nodes[i])
                         for i in range(n_tau)])
        out = np.zeros_like(proj)
        for m in range(1, n_tau):
            acc = np.zeros(shape, dtype=complex)
            for i in range(m + 1):
                if W[m, i] != 0.0:
                    acc += W[m, i] * np.exp(-nu * ksq * (taus[m] - taus[i])) * proj[i]
            out[m] = acc
        return out

    b_nodes = np.stack([apply_B(grid, u0_hat, nu, float(tau)) for tau in taus])
    u1_nodes = convolve(f_hat_nodes) + b_nodes

    u_prev = u1_nodes
    norms = []
    converged = diverged = False
    iterations = 1
    grow = 0
    for j in range(2, j_max + 1):
        conv_nodes = np.stack([convective_term(grid, u_prev[i])
                               for i in range(n_tau)])
        u_next = u1_nodes - convolve(conv_nodes)
        diff = u_next - u_prev
        corr = float(np.max(np.abs(np.fft.ifftn(diff, axes=tuple(a + 1 for a in axes)))))
        norms.append(corr)
        iterations = j
        u_prev = u_next
        if corr < tol:
            converged = True
            break
        if len(norms) >= 2 and corr > norms[-2]:
            grow += 1
            if grow >= 3:
                diverged = True
                break
        else:
            grow = 0

    conv_final = convective_term(grid, u_prev[-1])
    p_hat = pressure_from_force(grid, f_hat_nodes[-1] - conv_final)
    u_final_phys = np.real(np.fft.ifftn(u_prev[-1], axes=axes))
    energy = float(np.sum(u_final_phys**2) * grid.spacing**grid.dim)
    return SolveResult(grid, taus, u_prev, u1_nodes, p_hat, norms,
                       converged, diverged, iterations, energy)


def taylor_green(grid: SpectralGrid, nu=0.0, t=0.0) -> np.ndarray:
    """The single-mode vortex (sin x cos y, -cos x sin y) e^{-2 nu t} on a
    2-D grid (its convection term is a pure gradient, so it solves the
    nonlinear equations with zero force)."""
    if grid.dim != 2:
        raise ValueError("the vortex fixture is 2-D")
    x, y = grid.meshgrid()
    decay = math.exp(-2.0 * nu * t)
    return np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)]) * decay
