"""Viscous (Navier-Stokes) modal solution in 2-D.

The radial force family here is Gaussian in radius,

    f_r(r, phi, tau) = F r^{n+1} e^{-mu^2 r^2} e^{i n phi} w(tau; t),

whose Hankel image is again Gaussian, so the first iterate u1 comes out in
closed form as brackets of confluent hypergeometric functions Phi.  The
time profile w is specified in the substituted variable
y(tau; t) = 1 / (4 mu^2 nu (t - tau) + 1) as w = y^2, i.e. it is anchored
at the evaluation time t; `u1_force_drift` returns the extra convolution
term this anchoring adds to the momentum balance.

The convective first correction u2* has no closed form: its profiles are
the nested (rho, rtilde, tau) integrals evaluated by the composite-Simpson
protocol of `quadrature.PrecisionPolicy`, with the inner Bessel-pair
integral replaced by its discontinuous analytic value on the tau = t node.
The Bessel factor at the middle nodes is sampled once per sweep and reused
across the outer nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature, specfun
from .euler2d import VelocitySample, assemble_modal_sample

__all__ = [
    "NsForcing",
    "attenuation",
    "ns_inner_hankel",
    "ns_profiles_R1",
    "ns_profile_derivatives",
    "ns_u1",
    "u1_force_drift",
    "ns_correction_force",
    "ns_correction_force_products",
    "U2StarProfiles",
    "u2star_profiles",
    "ns_u2star",
    "ns_u2",
]


@dataclass(frozen=True)
class NsForcing:
    """Modal radial force F r^{n+1} e^{-mu^2 r^2} e^{i n phi} with viscosity nu."""

    n: int
    F_n: float
    mu_n: float
    nu: float

    def __post_init__(self):
        if self.n < 1 or self.n != int(self.n):
            raise ValueError("mode index n must be a positive integer")
        if not 0 < self.F_n < math.inf:
            raise ValueError("F_n must be positive and finite")
        if not 1 <= self.mu_n < math.inf:
            raise ValueError("mu_n must be >= 1 and finite")
        if not self.nu > 0:
            raise ValueError("nu must be positive (use the inviscid modal"
                             " backend for nu = 0)")

    @property
    def convergent_regime(self) -> bool:
        return self.F_n <= 1.0 / self.n


def _phi(a, c, x):
    """Phi with a term budget sized to the largest argument in x."""
    x = np.asarray(x, dtype=float)
    biggest = float(np.max(np.abs(x))) if x.size else 0.0
    prec = specfun.EvalPrecision(max_terms=int(1.5 * biggest) + 600)
    return specfun.kummer_phi(a, c, x, prec)


def attenuation(forcing: NsForcing, t):
    """The variable y1(t) = 1 / (4 mu^2 nu t + 1) in (0, 1]."""
    return 1.0 / (4.0 * forcing.mu_n**2 * forcing.nu * np.asarray(t, dtype=float) + 1.0)


def _bracket(forcing: NsForcing, a, c, p, r, t):
    """Phi(a,c;-mu^2 r^2) - Phi(a,c;-mu^2 r^2 y1) * y1^p, broadcast over r, t."""
    mu = forcing.mu_n
    r = np.asarray(r, dtype=float)
    y1 = attenuation(forcing, t)
    x = -(mu * mu) * r * r
    return _phi(a, c, x * np.ones_like(y1 * r)) - _phi(a, c, x * y1) * y1**p


# ---------------------------------------------------------------------------
# First iterate
# ---------------------------------------------------------------------------

def ns_inner_hankel(forcing: NsForcing, rho, tau_weight=1.0):
    """Hankel image of the radial force profile:
    integral_0^inf F s^{n+1} e^{-mu^2 s^2} J_n(s rho) ds
      = F rho^n e^{-rho^2/(4 mu^2)} / (2 mu^2)^{n+1},
    scaled by the time-profile value ``tau_weight``."""
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    rho = np.asarray(rho, dtype=float)
    out = (F * tau_weight * rho**n / (2.0 * mu * mu) ** (n + 1)
           * np.exp(-rho * rho / (4.0 * mu * mu)))
    return float(out) if out.ndim == 0 else out


def ns_profiles_R1(forcing: NsForcing, r, t):
    """Closed-form profile pair of the first iterate.

    R_minus = F r^{n-1} / (8 mu^4 nu (n+1)) * [Phi(n+1,n+2) bracket, power n+1]
    R_plus  = F r^{n+1} / (8 mu^2 nu (n+1)(n+2)) * [Phi(n+1,n+3) bracket, power n+2]

    Both vanish identically at t = 0 (the bracket cancels exactly).
    """
    n, F, mu, nu = forcing.n, forcing.F_n, forcing.mu_n, forcing.nu
    r = np.asarray(r, dtype=float)
    rpow_m = r ** (n - 1) if n >= 2 else np.ones_like(r)
    minus = (F * rpow_m / (8.0 * mu**4 * nu * (n + 1))
             * _bracket(forcing, n + 1, n + 2, n + 1, r, t))
    plus = (F * r ** (n + 1) / (8.0 * mu**2 * nu * (n + 1) * (n + 2))
            * _bracket(forcing, n + 1, n + 3, n + 2, r, t))
    return minus, plus


def ns_profile_derivatives(forcing: NsForcing, r, t):
    """Radial derivatives of the profile pair (closed forms)."""
    n, F, mu, nu = forcing.n, forcing.F_n, forcing.mu_n, forcing.nu
    r = np.asarray(r, dtype=float)
    lead = (n - 1) * r ** (n - 2) if n >= 2 else 0.0
    d_minus = (F * lead / (8.0 * mu**4 * nu * (n + 1))
               * _bracket(forcing, n + 1, n + 2, n + 1, r, t)
               - F * r**n / (4.0 * mu**2 * nu * (n + 2))
               * _bracket(forcing, n + 2, n + 3, n + 2, r, t))
    d_plus = (F * r**n / (8.0 * mu**2 * nu * (n + 2))
              * _bracket(forcing, n + 1, n + 3, n + 2, r, t)
              - F * r ** (n + 2) / (4.0 * nu * (n + 2) * (n + 3))
              * _bracket(forcing, n + 2, n + 4, n + 3, r, t))
    return d_minus, d_plus


def ns_u1(forcing: NsForcing, r, phi, t) -> VelocitySample:
    """First iterate u1 at (r, phi, t); the profiles carry the whole time
    dependence, so u1(., ., 0) = 0 exactly."""
    minus, plus = ns_profiles_R1(forcing, r, t)
    return VelocitySample(*assemble_modal_sample(forcing.n, minus, plus, phi,
                                                 float(forcing.n)))


def u1_force_drift(forcing: NsForcing, r, phi, t, panels=201) -> VelocitySample:
    """Convolution of the t-derivative of the anchored time profile.

    Because the force's time profile y(tau; t)^2 moves with the evaluation
    time t, the momentum balance of u1 reads
        du1/dt = nu Lap u1 + P f(., t) + drift,
    and this function returns the drift term.  Its profile pair follows
    from the same substitution as the u1 profiles with the weight
    d/dt [y^2] = -8 mu^2 nu y^3:
        drift_minus = -(F r^{n-1}/mu^2) integral y^{n+1} e^{-mu^2 r^2 y} dy
        drift_plus  = -(F r^{n+1}/(n+1)) integral y^{n+2} Phi(n+1,n+2;-mu^2 r^2 y) dy
    over y in [y1(t), 1], evaluated by Simpson on ``panels`` nodes.
    """
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = float(t)
    y1 = float(attenuation(forcing, t))
    if t == 0.0:
        z = np.zeros(r.shape, dtype=complex)
        return VelocitySample(z, z, z, z)
    y = np.linspace(y1, 1.0, panels)
    w = quadrature.simpson_weights(panels, (1.0 - y1) / (panels - 1))
    x = -(mu * mu) * r[:, None] ** 2 * y[None, :]
    rpow_m = r ** (n - 1) if n >= 2 else np.ones_like(r)
    minus = -(F * rpow_m / mu**2) * ((y ** (n + 1) * np.exp(x)) @ w)
    plus = -(F * r ** (n + 1) / (n + 1.0)) * (
        (y ** (n + 2) * _phi(n + 1, n + 2, x)) @ w)
    return VelocitySample(*assemble_modal_sample(n, minus, plus, phi, float(n)))


# ---------------------------------------------------------------------------
# First correction of the force
# ---------------------------------------------------------------------------

def ns_correction_force(forcing: NsForcing, r, t):
    """Spatial-temporal factors of the convective force correction.

    Returns (T_r, T_phi, T_phiphi), each broadcast over (r, t):
      - T_r: the radial factor, as the expanded four-term Phi combination;
      - T_phi: the tangential factor (difference of two Phi-bracket
        products);
      - T_phiphi: the part of d(r T_phi)/dr left after removing
        2n T_r (the split d(r T_phi)/dr = T_phiphi + 2n T_r holds
        identically), again as the expanded four-term combination.

    The full correction force components are (n^2/4) T_r e^{i 2n phi} and
    (i n^2/4) T_phi e^{i 2n phi}.
    """
    n, F, mu, nu = forcing.n, forcing.F_n, forcing.mu_n, forcing.nu
    r = np.asarray(r, dtype=float)
    y1 = attenuation(forcing, t)
    x0 = -(mu * mu) * r * r * np.ones_like(y1 * r)
    xy = -(mu * mu) * r * r * y1

    def pair(a, c):
        return _phi(a, c, x0), _phi(a, c, xy)

    A0, Ay = pair(n + 1, n + 2)
    B0, By = pair(n + 1, n + 3)
    C0, Cy = pair(n, n + 2)
    D0, Dy = pair(n + 2, n + 3)
    E0, Ey = pair(n + 3, n + 4)

    def expanded(P0, Py, pa, Q0, Qy, qb):
        return (P0 * Q0 - P0 * Qy * y1**qb - Py * Q0 * y1**pa
                + Py * Qy * y1 ** (pa + qb))

    t_r = (-F * F * r ** (2 * n - 1) / (16.0 * mu**6 * nu**2 * (n + 1) ** 2 * (n + 2))
           * expanded(A0, Ay, n + 1, B0, By, n + 2))
    t_phi = (-F * F * r ** (2 * n - 1) / (16.0 * mu**6 * nu**2 * (n + 1) * (n + 2))
             * (C0 - Cy * y1 ** (n + 1)) * (D0 - Dy * y1 ** (n + 2))
             + F * F * n * r ** (2 * n - 1) / (16.0 * mu**6 * nu**2 * (n + 1) ** 2 * (n + 2))
             * (A0 - Ay * y1 ** (n + 1)) * (B0 - By * y1 ** (n + 2)))
    t_phiphi = (-F * F * n * r ** (2 * n + 1) / (8.0 * mu**4 * nu**2 * (n + 1) * (n + 2) ** 2)
                * expanded(B0, By, n + 2, D0, Dy, n + 2)
                + F * F * r ** (2 * n + 1) / (8.0 * mu**4 * nu**2 * (n + 1) * (n + 3))
                * expanded(C0, Cy, n + 1, E0, Ey, n + 3))
    return t_r, t_phi, t_phiphi


def ns_correction_force_products(forcing: NsForcing, r, t):
    """T_r and T_phiphi as plain products of two Phi brackets (the compact
    printed forms); cross-checked against the expanded forms in tests."""
    n, F, mu, nu = forcing.n, forcing.F_n, forcing.mu_n, forcing.nu
    r = np.asarray(r, dtype=float)
    t_r = (-F * F * r ** (2 * n - 1) / (16.0 * mu**6 * nu**2 * (n + 1) ** 2 * (n + 2))
           * _bracket(forcing, n + 1, n + 2, n + 1, r, t)
           * _bracket(forcing, n + 1, n + 3, n + 2, r, t))
    t_phiphi = (-F * F * n * r ** (2 * n + 1) / (8.0 * mu**4 * nu**2 * (n + 1) * (n + 2) ** 2)
                * _bracket(forcing, n + 1, n + 3, n + 2, r, t)
                * _bracket(forcing, n + 2, n + 3, n + 2, r, t)
                + F * F * r ** (2 * n + 1) / (8.0 * mu**4 * nu**2 * (n + 1) * (n + 3))
                * _bracket(forcing, n, n + 2, n + 1, r, t)
                * _bracket(forcing, n + 3, n + 4, n + 3, r, t))
    return t_r, t_phiphi


# ---------------------------------------------------------------------------
# First correction of the velocity (nested quadrature)
# ---------------------------------------------------------------------------

@dataclass
class U2StarProfiles:
    """Correction profile pair at angular mode 2n, plus verification data.

    ``minus``/``plus`` are the tangential-tangential profile values (purely
    imaginary: -i n^2/4 times a real triple integral).  ``radial_minus``/
    ``radial_plus`` are the corresponding radial-force profiles (real),
    kept as a surface for the cross-term cancellation check.  ``checks``
    holds the measured refinement differences when verification ran.
    """

    r: np.ndarray
    minus: np.ndarray
    plus: np.ndarray
    radial_minus: np.ndarray | None = None
    radial_plus: np.ndarray | None = None
    checks: dict = field(default_factory=dict)


def _ws_analytic_inner(lower_order: bool, n, r_values, rt):
    """Closed values of integral_0^inf J_{2n -/+ 1}(r rho) J_{2n}(rt rho) drho
    on the (r, rt) grid, from the discontinuous Bessel-pair integral.  The
    value jumps across r = rt; the diagonal carries the mean 1/(2r)."""
    r = r_values[:, None]
    s = rt[None, :]
    safe_r = np.where(r > 0, r, 1.0)
    safe_s = np.where(s > 0, s, 1.0)
    if lower_order:  # order 2n-1 against 2n: r^{2n-1}/rt^{2n} when r < rt
        vals = np.where(r < s, r ** (2 * n - 1) / safe_s ** (2 * n), 0.0)
        vals = np.where((r == s) & (r > 0), 0.5 / safe_r, vals)
    else:            # order 2n+1 against 2n: rt^{2n}/r^{2n+1} when rt < r
        vals = np.where(s < r, s ** (2 * n) / safe_r ** (2 * n + 1), 0.0)
        vals = np.where((r == s) & (s > 0), 0.5 / safe_s, vals)
    return vals


def _triple_pair(forcing, r_values, t, kernel_matrix, taus, A1, n1, A2, n2,
                 inner_probe=None):
    """Triple integrals for both Bessel orders 2n-1 and 2n+1.

    kernel_matrix has shape (n2, n_tau) (middle kernel at the rtilde nodes
    for each outer node).  Returns (M_lo, M_hi) of shape (len(r_values),)
    and, when ``inner_probe`` lists outer-node indices, the inner-integral
    matrices at those nodes for refinement checks.
    """
    n, nu = forcing.n, forcing.nu
    rho = np.linspace(0.0, A1, n1)
    rt = np.linspace(0.0, A2, n2)
    w_rho = quadrature.simpson_weights(n1, A1 / (n1 - 1))
    w_rt = quadrature.simpson_weights(n2, A2 / (n2 - 1))

    j_mid = specfun.bessel_jn(2 * n, rt[:, None] * rho[None, :])        # (n2, n1)
    j_lo = specfun.bessel_jn(2 * n - 1, r_values[:, None] * rho[None, :])
    j_hi = specfun.bessel_jn(2 * n + 1, r_values[:, None] * rho[None, :])

    n_tau = taus.size
    mid_lo = np.empty((r_values.size, n_tau))
    mid_hi = np.empty((r_values.size, n_tau))
    probes = {}
    for i, tau in enumerate(taus):
        if i == n_tau - 1:
            inner_lo = _ws_analytic_inner(True, n, r_values, rt)
            inner_hi = _ws_analytic_inner(False, n, r_values, rt)
        else:
            damp = np.exp(-nu * rho * rho * (t - tau)) * w_rho
            inner_lo = (j_lo * damp) @ j_mid.T
            inner_hi = (j_hi * damp) @ j_mid.T
        if inner_probe is not None and i in inner_probe:
            probes[i] = (inner_lo.copy(), inner_hi.copy())
        wk = w_rt * kernel_matrix[:, i]
        mid_lo[:, i] = inner_lo @ wk
        mid_hi[:, i] = inner_hi @ wk
    w_tau = quadrature.simpson_weights(n_tau, t / (n_tau - 1))
    return mid_lo @ w_tau, mid_hi @ w_tau, mid_lo, mid_hi, probes


def u2star_profiles(forcing: NsForcing, r, t,
                    policy: quadrature.PrecisionPolicy | None = None,
                    verify: bool = False,
                    radial_parts: bool = False) -> U2StarProfiles:
    """Correction profiles at mode 2n by the nested-Simpson protocol.

    With ``verify=True`` the levels of the quadrature ladder are re-run at
    enlarged truncations / refined node counts and the differences recorded
    in ``checks`` (keys inner/middle/outer: measured max deviation, the
    level tolerance, and a pass flag).  ``radial_parts`` additionally
    evaluates the radial-force profile pair (same machinery, middle kernel
    T_r) for the cross-term cancellation surface.
    """
    policy = policy or quadrature.PrecisionPolicy()
    r_values = np.atleast_1d(np.asarray(r, dtype=float))
    t = float(t)
    pref = -1j * forcing.n**2 / 4.0
    if t == 0.0:
        z = np.zeros(r_values.shape, dtype=complex)
        return U2StarProfiles(r_values, z, z,
                              z.real.copy() if radial_parts else None,
                              z.real.copy() if radial_parts else None)

    taus = np.linspace(0.0, t, policy.outer_panels)
    rt = np.linspace(0.0, policy.middle_limit, policy.middle_panels)

    def kernel_phiphi(rt_nodes, tau_nodes):
        return ns_correction_force(forcing, rt_nodes[:, None], tau_nodes[None, :])[2]

    kern = kernel_phiphi(rt, taus)
    probe_idx = {0, policy.outer_panels // 2, policy.outer_panels - 2} if verify else None
    m_lo, m_hi, mid_lo, mid_hi, probes = _triple_pair(
        forcing, r_values, t, kern, taus,
        policy.inner_limit, policy.inner_panels,
        policy.middle_limit, policy.middle_panels,
        inner_probe=probe_idx)
    out = U2StarProfiles(r_values, pref * m_lo, pref * m_hi)

    if radial_parts:
        def kernel_r(rt_nodes, tau_nodes):
            return ns_correction_force(forcing, rt_nodes[:, None], tau_nodes[None, :])[0]
        kr = kernel_r(rt, taus)
        r_lo, r_hi, _, _, _ = _triple_pair(
            forcing, r_values, t, kr, taus,
            policy.inner_limit, policy.inner_panels,
            policy.middle_limit, policy.middle_panels)
        out.radial_minus = forcing.n**2 / 4.0 * r_lo
        out.radial_plus = forcing.n**2 / 4.0 * r_hi

    if verify:
        checks = {}
        fac = policy.refine_factor
        # inner level: enlarge A1, refine node count; compare the inner
        # integrals themselves at the probe nodes (the analytic last node
        # is exact by construction and not probed)
        a1r = policy.inner_limit * fac
        n1r = quadrature.refined_panels(policy.inner_panels, fac)
        _, _, _, _, probes_ref = _triple_pair(
            forcing, r_values, t, kern, taus, a1r, n1r,
            policy.middle_limit, policy.middle_panels, inner_probe=probe_idx)
        inner_diff = max(
            float(np.max(np.abs(probes[i][k] - probes_ref[i][k])))
            for i in probes for k in (0, 1))
        checks["inner"] = {"diff": inner_diff, "tol": policy.inner_tol,
                           "pass": inner_diff <= policy.inner_tol}
        # middle level: enlarge A2, refine node count; compare the middle
        # integral values at all outer nodes
        a2r = policy.middle_limit * fac
        n2r = quadrature.refined_panels(policy.middle_panels, fac)
        rt_r = np.linspace(0.0, a2r, n2r)
        kern_r = kernel_phiphi(rt_r, taus)
        _, _, mid_lo_r, mid_hi_r, _ = _triple_pair(
            forcing, r_values, t, kern_r, taus,
            policy.inner_limit, policy.inner_panels, a2r, n2r)
        middle_diff = float(max(np.max(np.abs(mid_lo - mid_lo_r)),
                                np.max(np.abs(mid_hi - mid_hi_r))))
        checks["middle"] = {"diff": middle_diff, "tol": policy.middle_tol,
                            "pass": middle_diff <= policy.middle_tol}
        # outer level: double the node count on the same [0, t]
        n3r = quadrature.refined_panels(policy.outer_panels, 2.0)
        taus_r = np.linspace(0.0, t, n3r)
        kern_o = kernel_phiphi(rt, taus_r)
        m_lo_r, m_hi_r, mid_lo_o, mid_hi_o, _ = _triple_pair(
            forcing, r_values, t, kern_o, taus_r,
            policy.inner_limit, policy.inner_panels,
            policy.middle_limit, policy.middle_panels)
        outer_diff = float(max(np.max(np.abs(m_lo - m_lo_r)),
                               np.max(np.abs(m_hi - m_hi_r))))
        checks["outer"] = {"diff": outer_diff, "tol": policy.outer_tol,
                           "pass": outer_diff <= policy.outer_tol}
        # approach of the outer integrand's last quadrature node to its
        # analytic endpoint value: the gap must shrink as the outer step
        # halves (the endpoint layer scales with the step)
        scale = max(float(np.max(np.abs(mid_lo))), 1e-300)
        gap_base = float(np.max(np.abs(mid_lo[:, -2] - mid_lo[:, -1]))) / scale
        gap_half = float(np.max(np.abs(mid_lo_o[:, -2] - mid_lo_o[:, -1]))) / scale
        checks["endpoint_gap"] = {"at_step": gap_base, "at_half_step": gap_half,
                                  "pass": gap_half <= gap_base}
        out.checks = checks
    return out


def ns_u2star(forcing: NsForcing, r, phi, t,
              policy: quadrature.PrecisionPolicy | None = None,
              profiles: U2StarProfiles | None = None) -> VelocitySample:
    """First velocity correction u2* at (r, phi, t).

    u2*_r   = -(i/2) (P_minus + P_plus) e^{i 2n phi}
    u2*_phi =  (1/2) (P_minus - P_plus) e^{i 2n phi}

    where P_-/+ are the tangential-tangential correction profiles.  Pass a
    precomputed ``profiles`` (for the same r and t) to reuse a sweep.
    """
    if profiles is None:
        profiles = u2star_profiles(forcing, r, t, policy)
    m, p = profiles.minus, profiles.plus
    phi_arr = np.asarray(phi, dtype=float)
    e2n = np.exp(1j * 2 * forcing.n * phi_arr)
    em = np.exp(1j * (2 * forcing.n - 1) * phi_arr)
    ep = np.exp(1j * (2 * forcing.n + 1) * phi_arr)
    u_r = -0.5j * (m + p) * e2n
    u_phi = 0.5 * (m - p) * e2n
    u_x1 = -0.5j * (m * em + p * ep)
    u_x2 = 0.5 * (m * em - p * ep)
    return VelocitySample(u_r, u_phi, u_x1, u_x2)


def cross_term_samples(forcing: NsForcing, profiles: U2StarProfiles, phi):
    """u2* assembled through the radial/tangential split with the explicit
    -2ni cross terms; algebraically those cancel against the radial parts,
    so the result must match `ns_u2star` to rounding."""
    if profiles.radial_minus is None:
        raise ValueError("profiles must be computed with radial_parts=True")
    n = forcing.n
    rm = profiles.radial_minus
    rp = profiles.radial_plus
    # tangential profiles including the cross terms
    tm = profiles.minus - 2j * n * rm
    tp = profiles.plus - 2j * n * rp
    bracket_m = n * rm - 0.5j * tm
    bracket_p = n * rp - 0.5j * tp
    phi_arr = np.asarray(phi, dtype=float)
    e2n = np.exp(1j * 2 * n * phi_arr)
    u_r = (bracket_m + bracket_p) * e2n
    u_phi = 1j * (bracket_m - bracket_p) * e2n
    return u_r, u_phi


def ns_u2(forcing: NsForcing, r, phi, t,
          policy: quadrature.PrecisionPolicy | None = None,
          profiles: U2StarProfiles | None = None) -> VelocitySample:
    """Second iterate u2 = u1 - u2*, componentwise."""
    a = ns_u1(forcing, r, phi, t)
    b = ns_u2star(forcing, r, phi, t, policy, profiles)
    return VelocitySample(a.u_r - b.u_r, a.u_phi - b.u_phi,
                          a.u_x1 - b.u_x1, a.u_x2 - b.u_x2)
