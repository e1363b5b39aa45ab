"""Closed-form inviscid (nu = 0) modal solution in 2-D.

A single-circumferential-mode radial force

    f_r(r, phi, tau) = F r^{n+1} e^{-mu r} e^{i n phi} e^{-sigma tau}

drives the first iterate u1 through a pair of radial profiles built from
incomplete gamma functions; the convective first correction u2* follows in
closed form as well, with one bracket given by an infinite series of upper
incomplete gammas (terms decay like 2^-l) and the other by a finite
combination of lower incomplete gammas.  Generic profile builders for
arbitrary decaying radial/tangential force profiles are also provided;
they evaluate the half-line Bessel-pair integrals that the closed forms
collapse, and back the quadrature cross-checks of the closed brackets.

Angular dependence is kept complex (e^{i n phi}); callers take real or
imaginary parts as needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature, specfun

__all__ = [
    "EulerForcing",
    "VelocitySample",
    "modal_radial_profiles",
    "modal_tangential_profiles",
    "u1_profiles",
    "u1_profile_derivatives",
    "u1_time_factor",
    "u2star_time_factor",
    "euler_u1",
    "euler_correction_force",
    "correction_profile_pair",
    "u2star_brackets",
    "u2star_brackets_quadrature",
    "euler_u2star",
    "euler_u2",
    "assemble_modal_sample",
]


@dataclass(frozen=True)
class EulerForcing:
    """Modal radial force F r^{n+1} e^{-mu r} e^{i n phi} e^{-sigma t}."""

    n: int
    F_n: float
    mu_n: float
    sigma_n: float

    def __post_init__(self):
        if self.n < 1 or self.n != int(self.n):
            raise ValueError("mode index n must be a positive integer")
        if not 0 < self.F_n < math.inf:
            raise ValueError("F_n must be positive and finite")
        if not 1 <= self.mu_n < math.inf:
            raise ValueError("mu_n must be >= 1 and finite")
        if not 1 <= self.sigma_n < math.inf:
            raise ValueError("sigma_n must be >= 1 and finite")

    @property
    def convergent_regime(self) -> bool:
        """True when the amplitude satisfies F_n <= 1/n, the condition under
        which the first correction stays below the first iterate."""
        return self.F_n <= 1.0 / self.n


@dataclass(frozen=True)
class VelocitySample:
    """Velocity at (r, phi, t): polar and Cartesian complex components."""

    u_r: complex | np.ndarray
    u_phi: complex | np.ndarray
    u_x1: complex | np.ndarray
    u_x2: complex | np.ndarray

    @property
    def magnitude(self):
        return np.sqrt(np.abs(self.u_r) ** 2 + np.abs(self.u_phi) ** 2)


def assemble_modal_sample(n_phase, r_minus, r_plus, phi, time_factor):
    """Build the four components from a profile pair at angular mode n_phase.

    The x1/x2 components carry e^{i(n-1)phi} and e^{i(n+1)phi}; the polar
    components carry a single e^{i n phi}.
    """
    em = np.exp(1j * (n_phase - 1) * np.asarray(phi, dtype=float))
    ep = np.exp(1j * (n_phase + 1) * np.asarray(phi, dtype=float))
    en = np.exp(1j * n_phase * np.asarray(phi, dtype=float))
    u_x1 = 0.5 * (r_minus * em + r_plus * ep) * time_factor
    u_x2 = 0.5j * (r_minus * em - r_plus * ep) * time_factor
    u_r = 0.5 * (r_minus + r_plus) * en * time_factor
    u_phi = 0.5j * (r_minus - r_plus) * en * time_factor
    return u_r, u_phi, u_x1, u_x2


# ---------------------------------------------------------------------------
# Generic modal profiles (arbitrary decaying force profile, by quadrature)
# ---------------------------------------------------------------------------

def modal_radial_profiles(n, f_r, r, limit=200.0, panels=4001):
    """Profile pair produced by a radial modal force profile f_r.

    R_minus(r) = r^{n-1} * integral_r^inf f_r(s) / s^n ds
    R_plus(r)  = r^{-(n+1)} * integral_0^r s^n f_r(s) ds

    The upper integral is truncated ``limit`` past r (caller guarantees
    decay).  n = 0 is accepted and yields zero profiles: the mode carries
    no transverse part, so the velocity it would generate vanishes.
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if n == 0:
        z = np.zeros_like(r_arr)
        return (z, z) if np.ndim(r) else (0.0, 0.0)
    minus = np.empty_like(r_arr)
    plus = np.empty_like(r_arr)
    for i, ri in enumerate(r_arr):
        minus[i] = ri ** (n - 1) * quadrature.simpson(
            lambda s: np.asarray(f_r(s)) / s**n, max(ri, 1e-12), ri + limit, panels)
        plus[i] = (
            quadrature.simpson(lambda s: s**n * np.asarray(f_r(s)), 0.0, ri, panels)
            / ri ** (n + 1) if ri > 0 else 0.0
        )
    if np.ndim(r):
        return minus, plus
    return float(minus[0]), float(plus[0])


def modal_tangential_profiles(n, f_phi, r, d_f_phi=None, limit=200.0,
                              panels=4001, fd_step=1e-6):
    """Profile pair produced by a tangential modal force profile f_phi.

    R_minus(r) = -r^{n-1} * integral_r^inf (s f_phi(s))' / s^n ds
    R_plus(r)  = -r^{-(n+1)} * integral_0^r (s f_phi(s))' s^n ds

    The derivative of s * f_phi(s) is taken from ``d_f_phi`` when supplied,
    otherwise by central differences at step ``fd_step``.
    """
    if n < 1:
        raise ValueError("tangential profiles need n >= 1")

    if d_f_phi is None:
        def dprod(s):
            s = np.asarray(s, dtype=float)
            up = (s + fd_step) * np.asarray(f_phi(s + fd_step))
            dn = np.where(s > fd_step, (s - fd_step) * np.asarray(f_phi(np.maximum(s - fd_step, 0.0))), 0.0)
            return (up - dn) / (2.0 * fd_step)
    else:
        def dprod(s):
            s = np.asarray(s, dtype=float)
            return np.asarray(f_phi(s)) + s * np.asarray(d_f_phi(s))

    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    minus = np.empty_like(r_arr)
    plus = np.empty_like(r_arr)
    for i, ri in enumerate(r_arr):
        minus[i] = -(ri ** (n - 1)) * quadrature.simpson(
            lambda s: dprod(s) / s**n, max(ri, 1e-12), ri + limit, panels)
        plus[i] = (
            -quadrature.simpson(lambda s: dprod(s) * s**n, 0.0, ri, panels)
            / ri ** (n + 1) if ri > 0 else 0.0
        )
    if np.ndim(r):
        return minus, plus
    return float(minus[0]), float(plus[0])


# ---------------------------------------------------------------------------
# First iterate
# ---------------------------------------------------------------------------

def u1_profiles(forcing: EulerForcing, r):
    """Closed-form profile pair for the particular radial force.

    R_minus(r) = F r^{n-1} Gamma(2, mu r) / mu^2
    R_plus(r)  = F gamma(2n+2, mu r) / (r^{n+1} mu^{2n+2})
    with the removable limits R_minus(0) = F/mu^2 for n = 1 (0 for n >= 2)
    and R_plus(0) = 0.
    """
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    r = np.asarray(r, dtype=float)
    if n == 1:
        minus = F * specfun.upper_gamma_int(2, mu * r) / mu**2
    else:
        minus = F * r ** (n - 1) * specfun.upper_gamma_int(2, mu * r) / mu**2
    plus = np.where(
        r > 0,
        F * specfun.lower_gamma_int(2 * n + 2, mu * r)
        / (np.where(r > 0, r, 1.0) ** (n + 1) * mu ** (2 * n + 2)),
        0.0,
    )
    return minus, plus


def u1_profile_derivatives(forcing: EulerForcing, r):
    """Radial derivatives of the u1 profile pair (r > 0)."""
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    r = np.asarray(r, dtype=float)
    e = np.exp(-mu * r)
    lead = (n - 1) * r ** (n - 2) if n >= 2 else 0.0
    d_minus = F * (lead * specfun.upper_gamma_int(2, mu * r) / mu**2 - r**n * e)
    d_plus = F * (-(n + 1) * specfun.lower_gamma_int(2 * n + 2, mu * r)
                  / (r ** (n + 2) * mu ** (2 * n + 2)) + r**n * e)
    return d_minus, d_plus


def u1_time_factor(forcing: EulerForcing, t):
    """Time factor of u1: gamma(1, sigma t) / sigma (zero at t = 0)."""
    out = np.asarray(specfun.lower_gamma_int(1, forcing.sigma_n * np.asarray(t, dtype=float)))
    out = out / forcing.sigma_n
    return float(out) if out.ndim == 0 else out


def euler_u1(forcing: EulerForcing, r, phi, t) -> VelocitySample:
    """First iterate u1 at (r, phi, t); broadcasts over array arguments."""
    minus, plus = u1_profiles(forcing, r)
    tf = forcing.n * u1_time_factor(forcing, t)
    return VelocitySample(*assemble_modal_sample(forcing.n, minus, plus, phi, tf))


# ---------------------------------------------------------------------------
# First correction of the force
# ---------------------------------------------------------------------------

def euler_correction_force(forcing: EulerForcing, r, t):
    """Radial/tangential spatial factors of the convective force correction
    plus its time factor.

    T_r(r)   = -4 F^2 gamma(2n+2, mu r) Gamma(2, mu r) / (r^3 mu^{2n+4})
    T_phi(r) = -F^2 [ 2 r^{2n-1} e^{-mu r} Gamma(2, mu r)/mu^2
                      - 4 n gamma(2n+2, mu r) Gamma(2, mu r)/(r^3 mu^{2n+4})
                      + 2 e^{-mu r} gamma(2n+2, mu r)/(r mu^{2n+2}) ]
    T_time(t) = (gamma(1, sigma t)/sigma)^2

    Both spatial factors have the removable limit 0 at r = 0 (n >= 1).
    The full correction force components are (n^2/4) T_r e^{i 2n phi} T_time
    and (i n^2/4) T_phi e^{i 2n phi} T_time.
    """
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t_r = np.zeros_like(r)
    t_phi = np.zeros_like(r)
    m = r > 0
    rm = r[m]
    g = specfun.lower_gamma_int(2 * n + 2, mu * rm)
    G = specfun.upper_gamma_int(2, mu * rm)
    e = np.exp(-mu * rm)
    t_r[m] = -4.0 * F * F * g * G / (rm**3 * mu ** (2 * n + 4))
    t_phi[m] = -F * F * (
        2.0 * rm ** (2 * n - 1) * e * G / mu**2
        - 4.0 * n * g * G / (rm**3 * mu ** (2 * n + 4))
        + 2.0 * e * g / (rm * mu ** (2 * n + 2))
    )
    t_time = np.asarray(u1_time_factor(forcing, t)) ** 2
    if scalar:
        t_r, t_phi = float(t_r[0]), float(t_phi[0])
    return t_r, t_phi, float(t_time) if t_time.ndim == 0 else t_time


def correction_profile_pair(forcing: EulerForcing, r):
    """The two addends T_minus, T_plus with T_r = T_minus + T_plus and
    T_phi = T_minus - T_plus; kept separate as a consistency surface."""
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    minus = np.zeros_like(r)
    plus = np.zeros_like(r)
    m = r > 0
    rm = r[m]
    g = specfun.lower_gamma_int(2 * n + 2, mu * rm)
    G = specfun.upper_gamma_int(2, mu * rm)
    e = np.exp(-mu * rm)
    minus[m] = F * F * (
        -(rm ** (2 * n - 1)) * e * G / mu**2
        + 2.0 * (n - 1) * g * G / (rm**3 * mu ** (2 * n + 4))
        - e * g / (rm * mu ** (2 * n + 2))
    )
    plus[m] = F * F * (
        rm ** (2 * n - 1) * e * G / mu**2
        - 2.0 * (n + 1) * g * G / (rm**3 * mu ** (2 * n + 4))
        + e * g / (rm * mu ** (2 * n + 2))
    )
    if scalar:
        return float(minus[0]), float(plus[0])
    return minus, plus


# ---------------------------------------------------------------------------
# First correction of the velocity
# ---------------------------------------------------------------------------

def u2star_time_factor(forcing: EulerForcing, t):
    """Time factor of u2*: the running integral of T_time,
    [t - (2/sigma) gamma(1, sigma t) + (1/(2 sigma)) gamma(1, 2 sigma t)] / sigma^2."""
    s = forcing.sigma_n
    t = np.asarray(t, dtype=float)
    out = np.asarray(
        (t - 2.0 / s * np.asarray(specfun.lower_gamma_int(1, s * t))
         + 0.5 / s * np.asarray(specfun.lower_gamma_int(1, 2.0 * s * t))) / s**2
    )
    return float(out) if out.ndim == 0 else out


def u2star_brackets(forcing: EulerForcing, r, series_tol=1e-15, max_terms=500):
    """Closed-form bracket pair combining the radial and tangential parts of
    the correction profiles at angular mode 2n.

    bracket_minus carries the prefactor F^2 n^2 r^{2n-1}/4 times a series of
    upper incomplete gammas at argument 2 mu r whose terms fall off like
    2^-l; the series is summed until a term drops below ``series_tol``
    relative to the running total.  bracket_plus is the finite combination
    -n(2n+1) gamma(4n, 2 mu r)/(2^{4n-2} mu^{4n+2})
    + 2n(2n+1) gamma(2n, mu r) r^{2n} e^{-mu r}/mu^{2n+2}
    with prefactor F^2 n^2/(4 r^{2n+1}).  Both vanish at r = 0.
    """
    n, F, mu = forcing.n, forcing.F_n, forcing.mu_n
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    minus = np.zeros_like(r)
    plus = np.zeros_like(r)
    m = r > 0
    rm = r[m]
    x2 = 2.0 * mu * rm

    total = (-specfun.upper_gamma_int(1, x2) / (2.0 * mu**2)
             - specfun.upper_gamma_int(2, x2) / (4.0 * mu**2))
    converged = False
    for l in range(max_terms):
        p = specfun.pochhammer(2 * n + 2, l + 1)
        term = (n * specfun.upper_gamma_int(l + 2, x2) / (p * 2.0 ** (l + 1) * mu**2)
                - specfun.upper_gamma_int(l + 3, x2) / (p * 2.0 ** (l + 3) * mu**2))
        total = total + term
        if np.all(np.abs(term) <= series_tol * np.abs(total)):
            converged = True
            break
    if not converged:
        raise specfun.PrecisionError(
            f"correction bracket series did not converge in {max_terms} terms")
    minus[m] = F * F * n * n * rm ** (2 * n - 1) / 4.0 * total

    finite = (-n * (2 * n + 1) / (2.0 ** (4 * n - 2) * mu ** (4 * n + 2))
              * specfun.lower_gamma_int(4 * n, x2)
              + 2.0 * n * (2 * n + 1) / mu ** (2 * n + 2)
              * specfun.lower_gamma_int(2 * n, mu * rm) * rm ** (2 * n)
              * np.exp(-mu * rm))
    plus[m] = F * F * n * n / (4.0 * rm ** (2 * n + 1)) * finite
    if scalar:
        return float(minus[0]), float(plus[0])
    return minus, plus


def u2star_brackets_quadrature(forcing: EulerForcing, r, limit=200.0,
                               panels=8001):
    """Bracket pair evaluated directly from the correction-force profiles.

    bracket_minus(r) = (n^2 r^{2n-1}/4) [ n I_minus(T_r) - (1/2) I_minus((s T_phi)') ]
    bracket_plus(r)  = (n^2/(4 r^{2n+1})) [ n I_plus(T_r) - (1/2) I_plus((s T_phi)') ]
    with I_minus(g) = integral_r^inf g(s)/s^{2n} ds and
    I_plus(g) = integral_0^r s^{2n} g(s) ds.  The derivative integrals are
    reduced by parts (the boundary terms at 0 and infinity vanish), so this
    path shares nothing with the closed brackets beyond the T profiles, and
    serves as their independent oracle.
    """
    n = forcing.n
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    minus = np.zeros_like(r_arr)
    plus = np.zeros_like(r_arr)

    def t_r_of(s):
        return euler_correction_force(forcing, s, 0.0)[0]

    def t_phi_of(s):
        return euler_correction_force(forcing, s, 0.0)[1]

    for i, ri in enumerate(r_arr):
        if ri <= 0:
            continue
        i1 = quadrature.simpson(lambda s: t_r_of(s) / s ** (2 * n), ri, ri + limit, panels)
        i2 = quadrature.simpson(lambda s: t_phi_of(s) / s ** (2 * n), ri, ri + limit, panels)
        tphi_r = float(t_phi_of(np.array([ri]))[0])
        minus[i] = (n * n * ri ** (2 * n - 1) / 4.0) * (
            n * i1 - 0.5 * (-tphi_r * ri ** (1 - 2 * n) + 2 * n * i2))
        j1 = quadrature.simpson(lambda s: s ** (2 * n) * t_r_of(s), 0.0, ri, panels)
        j2 = quadrature.simpson(lambda s: s ** (2 * n) * t_phi_of(s), 0.0, ri, panels)
        plus[i] = (n * n / (4.0 * ri ** (2 * n + 1))) * (
            n * j1 - 0.5 * (ri ** (2 * n + 1) * tphi_r - 2 * n * j2))
    if np.ndim(r):
        return minus, plus
    return float(minus[0]), float(plus[0])


def euler_u2star(forcing: EulerForcing, r, phi, t,
                 method: str = "series") -> VelocitySample:
    """First velocity correction u2* at (r, phi, t).

    u2*_r   = (bracket_minus + bracket_plus) e^{i 2n phi} T2(t)
    u2*_phi = i (bracket_minus - bracket_plus) e^{i 2n phi} T2(t)

    ``method`` selects the closed brackets ("series") or the quadrature
    oracle ("quadrature"); both agree to around 1e-7 relative where the
    oracle is well-conditioned.
    """
    if method == "series":
        minus, plus = u2star_brackets(forcing, r)
    elif method == "quadrature":
        minus, plus = u2star_brackets_quadrature(forcing, r)
    else:
        raise ValueError("method must be 'series' or 'quadrature'")
    tf = 2.0 * u2star_time_factor(forcing, t)
    return VelocitySample(*assemble_modal_sample(2 * forcing.n, minus, plus, phi, tf))


def euler_u2(forcing: EulerForcing, r, phi, t) -> VelocitySample:
    """Second iterate u2 = u1 - u2*, componentwise."""
    a = euler_u1(forcing, r, phi, t)
    b = euler_u2star(forcing, r, phi, t)
    return VelocitySample(a.u_r - b.u_r, a.u_phi - b.u_phi,
                          a.u_x1 - b.u_x1, a.u_x2 - b.u_x2)
