import numpy as np
import pytest

from floqueng.errors import HermiticityError
from floqueng.lattice import (
    MAX_RANGE,
    LatticeTerm,
    assemble_lattice_hamiltonian,
    expand_to_lattice,
    lattice_vs_momentum_check,
    momentum_block,
    reconstruct_momentum_drive,
)
from floqueng.synth import crossstitch_drive_components

SQRT2 = np.sqrt(2.0)
DEFAULTS = dict(alpha=1.0, delta=2.0, omega=8.0, a_plus=SQRT2, p=3)


def terms_default():
    return expand_to_lattice(**DEFAULTS)


def test_ranges_bounded_by_three():
    terms = terms_default()
    assert max(t.m for t in terms) == MAX_RANGE
    assert all(0 <= t.m <= MAX_RANGE for t in terms)


def test_no_weight_beyond_range_three():
    # independent check in momentum space: the drive numerator is a
    # degree-3 trigonometric polynomial in k
    k = 2 * np.pi * np.arange(128) / 128
    for t in (0.0, 0.11, 0.37):
        _, fx, fy, fz = crossstitch_drive_components(k=k, t=t, **{
            "alpha": 1.0, "delta": 2.0, "omega": 8.0, "a_plus": SQRT2, "p": 3})
        fe = 1.0 / (1.0 + 2.0 * np.sin(8.0 * t) ** 2)
        for comp in (fx, fy, fz):
            spec = np.abs(np.fft.rfft(comp / fe)) / 128
            assert np.max(spec[MAX_RANGE + 1:]) <= 1e-12


def test_onsite_z_term_inventory():
    terms = terms_default()
    z0 = [t for t in terms if t.channel == "z" and t.m == 0]
    labels = {t.time_label: t.coefficient for t in z0}
    # the 1 - a_plus^2/2 constant drops out exactly at a_plus^2 = 2
    assert "1" not in labels
    assert labels["cos(2wt)"] == pytest.approx(3 * 8.0 * 2.0 / 2)
    assert labels["sin(wt)sin(pwt)"] == pytest.approx(-4 * SQRT2)


def test_z_channel_range_two_terms():
    terms = terms_default()
    z2 = {t.time_label for t in terms if t.channel == "z" and t.m == 2}
    assert z2 == {"sin(wt)cos(pwt)", "sin(wt)sin(pwt)"}


def test_x_channel_longest_hop_amplitudes():
    terms = terms_default()
    x3 = {(t.k_harmonic, t.time_label): t.coefficient
          for t in terms if t.channel == "x" and t.m == 3}
    assert x3[("cos", "sin2(wt)cos(pwt)")] == pytest.approx(-2 * 2.0 * 1.0)
    assert x3[("sin", "sin2(wt)sin(pwt)")] == pytest.approx(2 * 2.0 * 1.0)


def test_pure_dimer_coupling_without_gauge():
    # no micro-motion, no flat-band offset: only the hopping-born coupling
    terms = expand_to_lattice(alpha=1.0, delta=0.0, omega=8.0, a_plus=0.0, p=0)
    assert {(t.channel, t.m) for t in terms} == {("x", 1), ("y", 1)}
    x1 = [t for t in terms if t.channel == "x"][0]
    assert x1.coefficient == pytest.approx(-4.0)
    assert x1.amplitude(0.123) == pytest.approx(-4.0)
    # y channel amplitude must vanish for all t: sin(p w t) = 0 at p = 0
    y1 = [t for t in terms if t.channel == "y"][0]
    assert y1.amplitude(0.123) == pytest.approx(0.0)


def test_onsite_imbalance_assembly():
    g = 1.7
    term = LatticeTerm("z", 0, "cos", "1", g, lambda t: g)
    mat = assemble_lattice_hamiltonian([term], L=8, t=0.0)
    assert np.allclose(mat, np.diag([g / 2] * 8 + [-g / 2] * 8))


def test_assembled_matrix_is_hermitian_and_banded():
    terms = terms_default()
    mat = assemble_lattice_hamiltonian(terms, L=12, t=0.05)
    assert np.max(np.abs(mat - mat.conj().T)) <= 1e-13
    # range bound: circulant distance beyond 3 carries nothing
    for i in range(12):
        for j in range(12):
            dist = min((i - j) % 12, (j - i) % 12)
            if dist > MAX_RANGE:
                assert mat[i, j] == 0
                assert mat[12 + i, 12 + j] == 0
                assert mat[i, 12 + j] == 0


def test_minimum_size_enforced():
    with pytest.raises(ValueError):
        assemble_lattice_hamiltonian(terms_default(), L=6, t=0.0)


def test_reconstruction_matches_drive():
    terms = terms_default()
    k = 2 * np.pi * np.arange(16) / 16
    for t in (0.0, 0.2, 0.4):
        recon = reconstruct_momentum_drive(terms, k, t)
        _, fx, fy, fz = crossstitch_drive_components(k=k, t=t, **{
            "alpha": 1.0, "delta": 2.0, "omega": 8.0, "a_plus": SQRT2, "p": 3})
        assert np.max(np.abs(recon["x"] - fx)) <= 1e-11
        assert np.max(np.abs(recon["y"] - fy)) <= 1e-11
        assert np.max(np.abs(recon["z"] - fz)) <= 1e-11


def test_fourier_roundtrip_at_allowed_momenta():
    t_grid = (2 * np.pi / 8.0) * np.arange(16) / 16
    dev = lattice_vs_momentum_check(L=8, t_grid=t_grid, **DEFAULTS)
    assert dev <= 1e-10


def test_roundtrip_independent_of_chain_length():
    t_grid = (2 * np.pi / 8.0) * np.array([0.0, 0.3, 0.77])
    dev8 = lattice_vs_momentum_check(L=8, t_grid=t_grid, **DEFAULTS)
    dev12 = lattice_vs_momentum_check(L=12, t_grid=t_grid, **DEFAULTS)
    assert dev8 <= 1e-10 and dev12 <= 1e-10


def test_zero_drive_roundtrip():
    dev = lattice_vs_momentum_check(alpha=1.0, delta=0.0, omega=8.0,
                                    a_plus=0.0, p=0, L=8,
                                    t_grid=np.array([0.0, 0.1]))
    assert dev <= 1e-12


def test_momentum_block_projection():
    # single x-channel cos(k) hopping projects back to cos(k) * Sx
    term = LatticeTerm("x", 1, "cos", "1", 2.0, lambda t: 2.0)
    mat = assemble_lattice_hamiltonian([term], L=8, t=0.0)
    for n in range(8):
        k = 2 * np.pi * n / 8
        block = momentum_block(mat, 8, k)
        assert np.allclose(block, 2.0 * np.cos(k) * np.array([[0, 0.5], [0.5, 0]]),
                           atol=1e-12)
