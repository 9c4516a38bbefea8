"""Drive synthesis: given a bare identity-channel Hamiltonian and a target
band Hamiltonian, construct the time-periodic drive whose stroboscopic
evolution reproduces the target exactly at any driving frequency.

Coefficient vectors follow the ladder ordering (S+, S-, Sz): the first slot
multiplies S+, the second S-, the third Sz.  The drive solves

    f(t) = M1(m_plus) . dm + M2(m_plus, mz_real) . h_target

with m_plus = mu_plus(t) e^{ik}, mz_real = p*w*t, and dm the derivative
triple (dm_plus, conj(dm_plus), dmz_real).  Both transformation matrices are
the identity at t = nT, which is what makes the protocol exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra
from .algebra import HamiltonianSpec
from .errors import HermiticityError, NonPeriodicGauge
from .gauge import GaugeParams, boundary_report, ladder_phase_angle, mu_functions

METHOD_GENERAL = "general-m1m2"
METHOD_CLOSED_CROSSSTITCH = "closed-crossstitch"
METHOD_CLOSED_SU3 = "closed-su3-comparison"

IMAG_LEAK_TOL = 1e-10

#: Samples per period for the static-harmonic quadrature; the integrand is a
#: low-order trigonometric polynomial, so this is far beyond spectral accuracy.
RESIDUAL_SAMPLES = 2048


def transform_m1(m_plus) -> np.ndarray:
    """Derivative-to-coefficient matrix; identity at m_plus = 0.

    Broadcasts over array-valued ``m_plus`` to shape (..., 3, 3).
    """
    m = np.asarray(m_plus, dtype=complex)
    denom = 1.0 + np.abs(m) ** 2
    out = np.zeros(m.shape + (3, 3), dtype=complex)
    out[..., 0, 0] = 1.0
    out[..., 0, 2] = 1j * m
    out[..., 1, 1] = 1.0
    out[..., 1, 2] = -1j * np.conj(m)
    out[..., 2, 0] = 1j * np.conj(m)
    out[..., 2, 1] = -1j * m
    out[..., 2, 2] = 1.0 - np.abs(m) ** 2
    return out / denom[..., None, None]


def transform_m2(m_plus, mz_real) -> np.ndarray:
    """Target-conjugation matrix; columns expand P S_a P^dagger in the
    ladder basis.  Identity at m_plus = 0, mz_real in 2*pi*Z."""
    m = np.asarray(m_plus, dtype=complex)
    zr = np.asarray(mz_real, dtype=float)
    m, zr = np.broadcast_arrays(m, zr)
    denom = 1.0 + np.abs(m) ** 2
    q = 1j * m * np.exp(1j * zr)
    out = np.zeros(m.shape + (3, 3), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * zr)
    out[..., 0, 1] = -1j * q * m
    out[..., 0, 2] = 1j * m
    out[..., 1, 0] = 1j * np.conj(q) * np.conj(m)
    out[..., 1, 1] = np.exp(1j * zr)
    out[..., 1, 2] = -1j * np.conj(m)
    out[..., 2, 0] = -2 * np.conj(q)
    out[..., 2, 1] = -2 * q
    out[..., 2, 2] = 1.0 - np.abs(m) ** 2
    return out / denom[..., None, None]


@dataclass(frozen=True)
class DriveSample:
    """Drive coefficients at one (k, t): V = f0*I + fx*Sx + fy*Sy + fz*Sz."""

    f0: float
    fx: float
    fy: float
    fz: float


def _drive_general(target: HamiltonianSpec, static: HamiltonianSpec,
                   g: GaugeParams, k, t):
    """Ladder-basis synthesis via the M1/M2 matrices, returned as the real
    Cartesian arrays (f0, fx, fy, fz).

    Momentum and time follow plain numpy broadcasting; to mesh a k-grid
    against a t-grid pass k with a trailing singleton axis.
    """
    k = np.asarray(k, dtype=float)
    t = np.asarray(t, dtype=float)
    kang = ladder_phase_angle(k, target.dimension)
    kphase = np.exp(1j * kang)

    h0t, hxt, hyt, hzt = target.coeffs(k)
    h0s, hxs, hys, hzs = static.coeffs(k)
    if np.max(np.abs([hxs, hys, hzs])) > 0:
        raise ValueError("static Hamiltonian must be identity-channel only")

    mu0, mu_plus, mu_zr, dmu0, dmu_plus, dmu_zr = mu_functions(g, t)
    m_plus = kphase * mu_plus
    shape = np.broadcast_shapes(m_plus.shape, np.shape(hxt),
                                np.shape(mu_zr), np.shape(hzt))

    def bc(a):
        return np.broadcast_to(np.asarray(a, dtype=complex), shape)

    dm = np.stack([
        bc(kphase * dmu_plus),
        bc(np.conj(kphase) * np.conj(dmu_plus)),
        bc(dmu_zr),
    ], axis=-1)
    h_pm = np.stack([
        bc((hxt - 1j * hyt) / 2),
        bc((hxt + 1j * hyt) / 2),
        bc(hzt),
    ], axis=-1)

    m1 = transform_m1(np.broadcast_to(m_plus, shape))
    m2 = transform_m2(np.broadcast_to(m_plus, shape),
                      np.broadcast_to(mu_zr, shape))
    f_pm = np.einsum("...ij,...j->...i", m1, dm) + \
        np.einsum("...ij,...j->...i", m2, h_pm)

    conj_gap = np.max(np.abs(f_pm[..., 1] - np.conj(f_pm[..., 0])))
    imag_leak = np.max(np.abs(np.imag(f_pm[..., 2])))
    scale = max(1.0, float(np.max(np.abs(f_pm))))
    if max(conj_gap, imag_leak) > IMAG_LEAK_TOL * scale:
        raise HermiticityError(
            f"ladder components lost conjugate pairing by {max(conj_gap, imag_leak):.3e}"
        )

    fx = 2 * np.real(f_pm[..., 0])
    fy = -2 * np.imag(f_pm[..., 0])
    fz = np.real(f_pm[..., 2])
    f0 = np.broadcast_to(
        np.real(g.phi0(k) * dmu0 + h0t - h0s) + np.zeros(shape), shape)
    return f0, fx, fy, fz


def synth_drive_general(static: HamiltonianSpec, target: HamiltonianSpec,
                        g: GaugeParams, k, t) -> DriveSample:
    """One drive sample from the general synthesis path.

    Requires a ladder/z-free static Hamiltonian and a gauge that passes the
    boundary check (raises :class:`NonPeriodicGauge` otherwise).
    """
    boundary_report(g)
    f0, fx, fy, fz = _drive_general(target, static, g, k, t)
    return DriveSample(float(f0), float(fx), float(fy), float(fz))


def crossstitch_drive_components(alpha, delta, omega, a_plus, p, k, t):
    """Closed-form drive for the flat-band chain target, as arrays.

    The three components share the envelope f_e = 1/(1 + a_plus^2 sin^2 wt).
    x and y are twice the real and negated imaginary parts of the ladder
    coefficient; z is the Sz coefficient directly.
    """
    k = np.asarray(k, dtype=float)
    t = np.asarray(t, dtype=float)
    h = -(2 * alpha * np.cos(k) + delta)
    wt = omega * t
    s, c = np.sin(wt), np.cos(wt)
    fe = 1.0 / (1.0 + a_plus**2 * s**2)
    fx = 2 * fe * (
        a_plus * omega * c * np.cos(k)
        - a_plus * p * omega * s * np.sin(k)
        + h * np.cos(p * wt)
        + a_plus**2 * h * s**2 * np.cos(2 * k + p * wt)
    )
    fy = -2 * fe * (
        a_plus * omega * c * np.sin(k)
        + a_plus * p * omega * s * np.cos(k)
        - h * np.sin(p * wt)
        + a_plus**2 * h * s**2 * np.sin(2 * k + p * wt)
    )
    fz = fe * (
        p * omega * (1 - a_plus**2 / 2)
        + 0.5 * p * omega * a_plus**2 * np.cos(2 * wt)
        + 4 * a_plus * h * s * np.sin(k + p * wt)
    )
    f0 = np.zeros(np.broadcast_shapes(k.shape, t.shape))
    return f0, fx, fy, fz


def synth_drive_crossstitch(alpha, delta, omega, a_plus, p, k, t) -> DriveSample:
    """Closed-form sample; f0 vanishes identically in this gauge."""
    if float(p) != int(round(float(p))):
        raise NonPeriodicGauge(f"winding p must be an integer, got {p}")
    f0, fx, fy, fz = crossstitch_drive_components(alpha, delta, omega,
                                                  a_plus, int(round(p)), k, t)
    return DriveSample(float(f0), float(fx), float(fy), float(fz))


def su3_closed_form_components(eta_fn, omega, a_plus, p, k, t):
    """Secondary closed-form three-band evaluator, kept only so drive tables
    can report a per-entry discrepancy column against the primary path.

    Only the general transformation-matrix path is propagation-verified;
    this evaluator is not a source of truth and disagrees with it for
    generic targets.
    """
    k = np.asarray(k, dtype=float)
    t = np.asarray(t, dtype=float)
    ex, ey, ez = (np.asarray(a, dtype=float) for a in eta_fn(k))
    wt = omega * t
    s, c = np.sin(wt), np.cos(wt)
    fe = 1.0 / (1.0 + a_plus**2 * s**2)
    fx = 2 * fe * (
        a_plus * omega * c * np.cos(k)
        - a_plus * p * omega * c * np.sin(k)
        + ex * np.cos(p * wt)
        - ey * np.sin(p * wt)
        + a_plus**2 * s**2 * (np.cos(2 * k + p * wt) * ex - np.sin(2 * k + p * wt) * ey)
        - a_plus * s * np.cos(k) * ez
    )
    fy = -2 * fe * (
        a_plus * omega * c * np.sin(k)
        + a_plus * p * omega * c * np.cos(k)
        - ey * np.cos(p * wt)
        - ex * np.sin(p * wt)
        + a_plus * s**2 * (np.sin(2 * k + p * wt) * ex - np.cos(2 * k + p * wt) * ey)
        + a_plus * s * np.cos(k) * ez
    )
    fz = fe * (
        2 * a_plus * s * ey
        + p * omega * (1 - a_plus**2 / 2)
        + 0.5 * p * omega * a_plus**2 * np.cos(2 * wt)
        + ((1 - a_plus**2 / 2) + 0.5 * a_plus**2 * np.cos(2 * wt)) * ez
    )
    f0 = np.zeros(np.broadcast_shapes(k.shape, t.shape))
    return f0, fx, fy, fz


@dataclass(frozen=True)
class DrivingProtocol:
    """An evaluable drive f(k, t) plus everything needed to verify it.

    ``fz_scale`` deliberately detunes the z component and exists only so
    sensitivity tests can confirm that verification catches a broken drive.
    """

    target: HamiltonianSpec
    static: HamiltonianSpec
    gauge: GaugeParams
    method: str = METHOD_GENERAL
    fz_scale: float = 1.0

    def __post_init__(self):
        boundary_report(self.gauge)

    @property
    def band_count(self) -> int:
        return self.target.band_count

    @property
    def period(self) -> float:
        return self.gauge.period

    def drive_components(self, k, t):
        """Arrays (f0, fx, fy, fz) broadcast over momentum and time."""
        if self.method == METHOD_CLOSED_CROSSSTITCH:
            pars = _crossstitch_params(self.target)
            f0, fx, fy, fz = crossstitch_drive_components(
                pars["alpha"], pars["delta"], self.gauge.omega,
                self.gauge.a_plus, self.gauge.p, k, t)
        else:
            f0, fx, fy, fz = _drive_general(self.target, self.static, self.gauge, k, t)
        if self.fz_scale != 1.0:
            fz = self.fz_scale * fz
        return f0, fx, fy, fz

    def sample(self, k, t) -> DriveSample:
        f0, fx, fy, fz = self.drive_components(k, t)
        return DriveSample(float(f0), float(fx), float(fy), float(fz))

    def drive_table(self, k_grid, t_grid):
        """Mesh a momentum grid against a time grid: (n_k, n_t) arrays."""
        k = np.asarray(k_grid, dtype=float)
        t = np.asarray(t_grid, dtype=float)
        km = k[:, None, :] if self.target.dimension == 2 else k[:, None]
        return self.drive_components(km, t[None, :])

    def hamiltonian(self, k, t) -> np.ndarray:
        """Full driven Hamiltonian H0 + V(t) as a (..., d, d) stack."""
        f0, fx, fy, fz = self.drive_components(k, t)
        h0s, _, _, _ = self.static.coeffs(k)
        return algebra.assemble_batch(h0s + f0, fx, fy, fz,
                                      bands=self.band_count)

    def hamiltonian_fn(self, k) -> Callable:
        """Time-only closure over a fixed momentum grid, for propagation.

        Scalar times give a (n_k, d, d) stack; 1D time arrays give
        (n_t, n_k, d, d) so the propagator can batch whole step blocks.
        """
        k = np.asarray(k, dtype=float)
        km = k[:, None, :] if self.target.dimension == 2 else k[:, None]

        def fn(t):
            t = np.asarray(t, dtype=float)
            if t.ndim == 0:
                return self.hamiltonian(k, float(t))
            h = self.hamiltonian(km, t[None, :])
            return np.moveaxis(h, 1, 0)

        return fn

    def target_matrices(self, k) -> np.ndarray:
        return self.target.matrices(k)


def _crossstitch_params(spec: HamiltonianSpec) -> dict:
    """Recover (alpha, delta) from a flat-band chain coefficient table."""
    if spec.name != "crossstitch":
        raise ValueError("closed-form evaluator requires the crossstitch target")
    h0_0, hx_0, _, _ = spec.coeffs(0.0)
    h0_pi, _, _, _ = spec.coeffs(np.pi)
    alpha = float(h0_0 - h0_pi) / -4.0
    delta = float(-hx_0 / 2 - 2 * alpha)
    return {"alpha": alpha, "delta": delta}


def crossstitch_protocol(alpha=1.0, delta=2.0, omega=8.0, a_plus=np.sqrt(2.0),
                         p=3, method=METHOD_CLOSED_CROSSSTITCH) -> DrivingProtocol:
    """Standard flat-band engineering setup: bare uncoupled chains driven to
    the cross-linked flat-band spectrum."""
    g = GaugeParams(a0=0.0, a_plus=float(a_plus), theta=0.0, p=p, omega=float(omega))
    return DrivingProtocol(
        target=algebra.cross_stitch(alpha, delta),
        static=algebra.uncoupled_chains(alpha),
        gauge=g,
        method=method,
    )


def general_protocol(static: HamiltonianSpec, target: HamiltonianSpec,
                     g: GaugeParams) -> DrivingProtocol:
    return DrivingProtocol(target=target, static=static, gauge=g,
                           method=METHOD_GENERAL)


def su3_protocol(eta_spec: HamiltonianSpec, omega=8.0, a_plus=np.sqrt(2.0),
                 p=3) -> DrivingProtocol:
    """Three-band protocol on the embedded block; requires a flat-band offset
    of zero so that no static Hamiltonian is needed."""
    h0, _, _, _ = eta_spec.coeffs(np.linspace(-np.pi, np.pi, 7))
    if np.max(np.abs(h0)) > 0:
        raise ValueError("three-band synthesis requires a zero identity channel")
    g = GaugeParams(a0=0.0, a_plus=float(a_plus), theta=0.0, p=p, omega=float(omega))
    zero_static = algebra.custom(
        lambda k: (np.zeros_like(k),) * 4, band_count=3, name="zero3")
    return DrivingProtocol(target=eta_spec, static=zero_static, gauge=g,
                           method=METHOD_GENERAL)


def static_harmonic_residual(protocol: DrivingProtocol, k,
                             samples: int = RESIDUAL_SAMPLES) -> np.ndarray:
    """Zero-frequency harmonic of the drive numerator g(t) = f(t)/f_e(t).

    The static-part criterion lives on the numerator polynomial: the envelope
    f_e reweights harmonics, so a plain time average of f itself would not
    isolate the constant monomial.  Returns the per-component averages
    (x, y, z) over one period by trapezoid quadrature.
    """
    T = protocol.period
    t = np.linspace(0.0, T, samples + 1)
    _, fx, fy, fz = protocol.drive_components(np.asarray(k, dtype=float), t)
    s = np.sin(protocol.gauge.omega * t)
    numerator = np.stack([fx, fy, fz], axis=0) * (1.0 + protocol.gauge.a_plus**2 * s**2)
    return np.trapezoid(numerator, t, axis=-1) / T
