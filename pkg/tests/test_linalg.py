import numpy as np
import pytest
import scipy.linalg

from corrwitness.errors import InvalidInputError, NotPositiveSemidefiniteError
from corrwitness.linalg import (
    Propagator,
    clamp_spectrum,
    concurrence_pure,
    evolve_unitary,
    fidelity,
    hermitian_eigs,
    partial_trace,
    psd_sqrt,
    purity,
    random_density_matrix,
    random_pure_state,
    reduce_mixed,
    reduce_pure,
    von_neumann_entropy,
)
from corrwitness.sampling import haar_unitary
from corrwitness.types import Bipartition, DensityMatrix, HermitianOperator, Keep, StateVector

rng = np.random.default_rng(233)


def test_density_matrix_validation():
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotPositiveSemidefiniteError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.ones(3) / 3)
    rho = DensityMatrix.maximally_mixed(4)
    assert rho.dim == 4
    assert abs(np.trace(rho.entries) - 1) < 1e-15


def test_state_vector_validation():
    with pytest.raises(InvalidInputError):
        StateVector(np.array([1.0, 1.0]))
    psi = StateVector.normalized([1.0, 1.0j])
    assert abs(np.vdot(psi.amplitudes, psi.amplitudes) - 1) < 1e-15
    assert np.abs(psi.projector().entries - np.array([[0.5, -0.5j], [0.5j, 0.5]])).max() < 1e-15
    with pytest.raises(InvalidInputError):
        StateVector.normalized([0.0, 0.0])


def test_bipartition_validation():
    assert Bipartition(2, 3).dim == 6
    with pytest.raises(InvalidInputError):
        Bipartition(0, 3)


def test_hermitian_eigs_descending():
    rho = random_density_matrix(5, rng)
    w, v = hermitian_eigs(rho)
    assert np.all(np.diff(w) <= 0)
    assert np.abs(v @ np.diag(w) @ v.conj().T - rho).max() < 1e-12
    with pytest.raises(InvalidInputError):
        hermitian_eigs(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_clamp_spectrum():
    assert np.array_equal(clamp_spectrum(np.array([-1e-13, 0.5])), np.array([0.0, 0.5]))
    with pytest.raises(NotPositiveSemidefiniteError):
        clamp_spectrum(np.array([-1e-9, 1.0]))


def test_psd_sqrt():
    rho = random_density_matrix(4, rng)
    s = psd_sqrt(rho)
    assert np.abs(s @ s - rho).max() < 1e-12
    batch = np.stack([random_density_matrix(3, rng) for _ in range(5)])
    sb = psd_sqrt(batch)
    assert sb.shape == (5, 3, 3)
    assert np.abs(sb @ sb - batch).max() < 1e-12


def test_von_neumann_entropy():
    assert abs(von_neumann_entropy(np.eye(2) / 2, log_base=2) - 1) < 1e-14
    assert abs(von_neumann_entropy(np.eye(4) / 4) - np.log(4)) < 1e-14
    psi = random_pure_state(3, rng)
    assert abs(von_neumann_entropy(np.outer(psi, psi.conj()))) < 1e-10
    batch = np.stack([np.eye(2) / 2, np.diag([1.0, 0.0])])
    assert np.abs(von_neumann_entropy(batch, log_base=2) - np.array([1.0, 0.0])).max() < 1e-14


def test_partial_trace_product():
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    part = Bipartition(2, 3)
    ab = np.kron(a, b)
    assert np.abs(partial_trace(ab, part).entries - a).max() < 1e-13
    assert np.abs(partial_trace(ab, part, Keep.ENVIRONMENT).entries - b).max() < 1e-13


def test_partial_trace_pure_matches_mixed():
    psi = random_pure_state(6, rng)
    part = Bipartition(2, 3)
    rho = np.outer(psi, psi.conj())
    for keep in Keep:
        ret_ = partial_trace(psi, part, keep).entries
        ret0 = partial_trace(rho, part, keep).entries
        assert np.abs(ret_ - ret0).max() < 1e-13
    assert np.abs(reduce_pure(psi, part) - partial_trace(rho, part).entries).max() < 1e-13
    with pytest.raises(InvalidInputError):
        partial_trace(np.eye(5) / 5, part)


def test_fidelity():
    rho = random_density_matrix(3, rng)
    sigma = random_density_matrix(3, rng)
    assert abs(fidelity(rho, rho) - 1) < 1e-10
    assert abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-10
    assert fidelity(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) < 1e-14
    # pure states: |<psi|phi>|^2
    psi, phi = random_pure_state(3, rng), random_pure_state(3, rng)
    ret_ = fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj()))
    assert abs(ret_ - abs(np.vdot(psi, phi)) ** 2) < 1e-7


def test_purity_and_concurrence():
    part = Bipartition(2, 2)
    bell = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    assert abs(concurrence_pure(bell, part) - 1) < 1e-12
    assert abs(concurrence_pure(np.kron([1.0, 0.0], [0.6, 0.8]), part)) < 1e-7
    assert abs(purity(np.eye(2) / 2) - 0.5) < 1e-15
    with pytest.raises(InvalidInputError):
        concurrence_pure(np.ones(9) / 3, Bipartition(3, 3))


def test_propagator_matches_expm():
    h = random_density_matrix(4, rng) * 3.0
    psi = random_pure_state(4, rng)
    prop = Propagator(HermitianOperator(h))
    for t in (0.0, 0.3, 2.5):
        ret0 = scipy.linalg.expm(-1j * h * t) @ psi
        assert np.abs(prop.evolve(psi, t) - ret0).max() < 1e-12
    rows = prop.evolve_many(psi, [0.0, 1.0, 2.0])
    assert rows.shape == (3, 4)
    assert np.abs(np.linalg.norm(rows, axis=1) - 1).max() < 1e-12
    out = evolve_unitary(psi, h, 1.7)
    assert isinstance(out, StateVector)
    with pytest.raises(InvalidInputError):
        prop.evolve(np.ones(3) / np.sqrt(3), 1.0)


def test_random_density_matrix_rank():
    rho = random_density_matrix(4, rng, rank=1)
    assert abs(purity(rho) - 1) < 1e-12
    DensityMatrix(random_density_matrix(5, rng))


def _qubit_batch(n):
    g = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def test_psd_sqrt_squares_back_on_many_qubits():
    rho = _qubit_batch(10_000)
    s = psd_sqrt(rho)
    assert np.abs(s @ s - rho).max() < 1e-12
    assert np.abs(s - np.conj(np.swapaxes(s, -1, -2))).max() < 1e-14
    assert np.linalg.eigvalsh(s).min() > -1e-14


@pytest.mark.parametrize("dim_e", [2, 3, 8, 64])
def test_partial_trace_keeps_trace_and_positivity(dim_e):
    part = Bipartition(2, dim_e)
    for _ in range(5):
        rho = random_density_matrix(2 * dim_e, rng)
        for keep in (Keep.SYSTEM, Keep.ENVIRONMENT):
            ret_ = partial_trace(rho, part, keep).entries
            assert abs(np.trace(ret_) - 1) < 1e-12
            assert np.linalg.eigvalsh(ret_).min() > -1e-12


def test_reduce_mixed_batched():
    part = Bipartition(2, 3)
    rho = np.stack([random_density_matrix(6, rng) for _ in range(4)])
    ret_ = reduce_mixed(rho, part, Keep.ENVIRONMENT)
    assert ret_.shape == (4, 3, 3)
    for r, x in zip(rho, ret_):
        assert np.abs(partial_trace(r, part, Keep.ENVIRONMENT).entries - x).max() < 1e-15
    with pytest.raises(InvalidInputError):
        reduce_mixed(rho, Bipartition(2, 2))


def test_fidelity_and_entropy_are_unitary_invariant():
    for dim in (2, 3, 4):
        for _ in range(20):
            rho1 = random_density_matrix(dim, rng)
            rho2 = random_density_matrix(dim, rng)
            u = haar_unitary(rng, dim)
            rot1, rot2 = (u @ r @ u.conj().T for r in (rho1, rho2))
            assert abs(fidelity(rot1, rot2) - fidelity(rho1, rho2)) < 1e-10
            assert abs(von_neumann_entropy(rot1) - von_neumann_entropy(rho1)) < 1e-12


@pytest.mark.parametrize("dim_e", [2, 3, 8])
def test_concurrence_vanishes_iff_schmidt_rank_one(dim_e):
    part = Bipartition(2, dim_e)
    for _ in range(20):
        product = np.kron(random_pure_state(2, rng), random_pure_state(dim_e, rng))
        assert concurrence_pure(product, part) < 1e-7
        psi = random_pure_state(2 * dim_e, rng)
        sv = np.linalg.svd(psi.reshape(2, dim_e), compute_uv=False)
        ret_ = concurrence_pure(psi, part)
        # qubit system: C = 2 s_0 s_1 over the Schmidt coefficients
        assert abs(ret_ - 2 * sv[0] * sv[1]) < 1e-10
        assert ret_ > 1e-6
