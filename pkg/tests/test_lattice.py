"""Tests for the tight-binding lattice"""

import numpy as np
import pytest

from src.lattice import (
    LatticeSpec,
    Operator,
    Parity,
    analytic_eigensystem,
    build_hamiltonian,
    numeric_eigensystem,
    parity_of_level,
    site_projector,
)


@pytest.mark.parametrize("n_sites", [1, 2, 5, 21, 64])
def test_numeric_matches_closed_form(n_sites):
    """Test dense diagonalization against the closed-form eigensystem"""
    spec = LatticeSpec(n_sites=n_sites, coupling=1.0)
    analytic = analytic_eigensystem(spec)
    numeric = numeric_eigensystem(build_hamiltonian(spec))

    assert np.max(np.abs(analytic.energies - numeric.energies)) < 1e-10
    assert np.max(np.abs(analytic.states - numeric.states)) < 1e-8


def test_closed_form_solves_eigen_equation():
    """Test H |w_k> = e_k |w_k> for every level"""
    spec = LatticeSpec(n_sites=7, coupling=0.7)
    h = build_hamiltonian(spec).entries
    eig = analytic_eigensystem(spec)
    for k in range(1, 8):
        assert np.allclose(h @ eig.state(k), eig.energies[k - 1] * eig.state(k), atol=1e-12)


def test_energies_descend_with_index():
    """Test e_1 is the largest energy for positive hopping"""
    eig = analytic_eigensystem(LatticeSpec(n_sites=5, coupling=1.0))
    assert np.all(np.diff(eig.energies) < 0)
    assert eig.energies[0] == pytest.approx(2.0 * np.cos(np.pi / 6))


def test_parity_under_reflection():
    """Test <N+1-n|w_k> = (-1)^(k+1) <n|w_k>"""
    eig = analytic_eigensystem(LatticeSpec(n_sites=6, coupling=1.0))
    for k in range(1, 7):
        w = eig.state(k)
        assert np.max(np.abs(w[::-1] - (-1) ** (k + 1) * w)) < 1e-12


def test_parity_labels():
    """Test odd eigen-indices are symmetric and even ones antisymmetric"""
    assert parity_of_level(1) == Parity.EVEN
    assert parity_of_level(2) == Parity.ODD
    eig = analytic_eigensystem(LatticeSpec(n_sites=5, coupling=1.0))
    assert eig.indices_with_parity(Parity.ODD) == [2, 4]
    assert eig.indices_with_parity(Parity.EVEN) == [1, 3, 5]


def test_single_site_chain():
    """Test N=1 has a single zero-energy level"""
    spec = LatticeSpec(n_sites=1, coupling=1.0)
    assert build_hamiltonian(spec).entries.shape == (1, 1)
    assert abs(analytic_eigensystem(spec).energies[0]) < 1e-12


def test_zero_coupling():
    """Test J=0 gives a zero Hamiltonian and degenerate zero energies"""
    spec = LatticeSpec(n_sites=4, coupling=0.0)
    assert np.all(build_hamiltonian(spec).entries == 0)
    assert np.allclose(analytic_eigensystem(spec).energies, 0.0)


def test_invalid_lattice():
    """Test non-positive size and non-finite coupling are rejected"""
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=0, coupling=1.0)
    with pytest.raises(ValueError):
        LatticeSpec(n_sites=3, coupling=float("nan"))


def test_site_projector():
    """Test projector diagonal, idempotence and range checks"""
    spec = LatticeSpec(n_sites=5, coupling=1.0)
    p = site_projector(spec, [2, 4])
    assert np.allclose(np.diag(p.entries), [0, 1, 0, 1, 0])
    assert np.allclose(p.entries @ p.entries, p.entries)
    assert p.hermitian

    with pytest.raises(ValueError):
        site_projector(spec, [6])
    with pytest.raises(ValueError):
        site_projector(spec, [])


def test_middle_site_and_bounds():
    """Test middle site and 1-based index checks"""
    spec = LatticeSpec(n_sites=9, coupling=1.0)
    assert spec.middle_site == 5
    assert spec.check_site(1) == 0
    with pytest.raises(ValueError):
        spec.check_level(10)


def test_operator_validation():
    """Test operators reject non-square input and false Hermitian flags"""
    with pytest.raises(ValueError):
        Operator(entries=np.zeros((2, 3)))
    with pytest.raises(ValueError):
        Operator(entries=np.array([[0, 1], [0, 0]]), hermitian=True)
    assert not Operator(entries=np.array([[0, 1], [0, 0]])).is_hermitian()
