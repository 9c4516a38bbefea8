"""Three-band drive engineering on the embedded two-level operator block.

The operators (L+, L-, Lz) act on the first two levels of a three-level
system and close the same commutator table as the spin-1/2 set, so the
synthesis machinery carries over verbatim; the third level never couples and
hosts the flat band of the engineered spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra
from .algebra import L_MINUS, L_PLUS, LX, LY, LZ, HamiltonianSpec
from .propagate import VerificationReport, verify_protocol
from .synth import (
    DriveSample,
    DrivingProtocol,
    su3_protocol,
    su3_closed_form_components,
)


def lambda_operators():
    """The embedded block operators (L+, L-, Lz, Lx, Ly) as 3x3 arrays."""
    return L_PLUS, L_MINUS, LZ, LX, LY


@dataclass(frozen=True)
class EtaProfile:
    """Momentum profile of the three-band target coefficients.

    ``fn(k) -> (eta_x, eta_y, eta_z)``; ``eta0`` shifts all bands rigidly and
    must be zero for drive synthesis (no static Hamiltonian is available).
    """

    fn: Callable
    eta0: float = 0.0

    def spec(self) -> HamiltonianSpec:
        return algebra.su3_flat(eta_fn=self.fn, eta0=self.eta0)


def flat_band_profile(delta: float = 2.0) -> EtaProfile:
    """The worked three-band case: eta_x = -eta_y = 2 cos k + delta, eta_z = 0."""

    def fn(k):
        base = 2 * np.cos(k) + delta
        return base, -base, np.zeros_like(k)

    return EtaProfile(fn=fn)


def synth_drive_su3(eta: EtaProfile, omega, a_plus, p, k, t) -> DriveSample:
    """One three-band drive sample from the general synthesis path."""
    proto = su3_protocol(eta.spec(), omega=omega, a_plus=a_plus, p=p)
    return proto.sample(k, t)


def verify_su3(eta: EtaProfile, omega, a_plus, p, k_grid,
               tol: float = 1e-9, periods: int = 1) -> VerificationReport:
    """Propagate the three-band drive and compare against the target.

    The strobe sign from the z-channel winding applies to the embedded block
    only; the third level of the comparison target stays at unity.
    """
    if eta.eta0 != 0.0:
        raise ValueError("three-band verification requires eta0 = 0")
    proto = su3_protocol(eta.spec(), omega=omega, a_plus=a_plus, p=p)
    return verify_protocol(proto, k_grid, periods=periods, tol=tol)


def su3_drive_table(eta: EtaProfile, omega, a_plus, p, k_grid, t_grid):
    """Field table over a (k, t) mesh with a closed-form comparison column.

    Returns a dict of arrays shaped (n_k, n_t): the general-path components
    (primary), the secondary closed-form components, and the per-entry max
    discrepancy between the two.  A nonzero discrepancy flags the secondary
    evaluator, never the general path.
    """
    proto = su3_protocol(eta.spec(), omega=omega, a_plus=a_plus, p=p)
    k = np.asarray(k_grid, dtype=float)[:, None]
    t = np.asarray(t_grid, dtype=float)[None, :]
    _, fx, fy, fz = proto.drive_table(k_grid, t_grid)
    _, gx, gy, gz = su3_closed_form_components(eta.fn, omega, a_plus, p, k, t)
    disc = np.max(np.abs(np.stack([fx - gx, fy - gy, fz - gz])), axis=0)
    return {
        "k": np.broadcast_to(k, fx.shape),
        "t": np.broadcast_to(t, fx.shape),
        "fx": fx, "fy": fy, "fz": fz,
        "fx_closed": gx, "fy_closed": gy, "fz_closed": gz,
        "discrepancy": disc,
    }
