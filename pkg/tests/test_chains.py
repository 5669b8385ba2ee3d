import math

import numpy as np
import pytest

from entlab.chains import (
    build_aklt,
    build_cluster,
    build_mg,
    build_xy,
    block_entropy_scan,
    classical_gibbs_mutual_info,
    free_energy,
    free_fermion_entropy_scan,
    ground_state,
    markov_violation,
    mutual_info_area_check,
    spin1_matrices,
    thermal_state,
)
from entlab.linalg import PAULI_X, PAULI_Z, kron
from entlab.mps import aklt_mps, cluster_mps, majumdar_ghosh_mps
from entlab.states import DensityMatrix, PureState, random_density


def test_builders_are_hermitian():
    for ham in (build_xy(0.7, 0.9, 6), build_aklt(4), build_mg(6), build_cluster(-1, 6)):
        h = ham.dense()
        assert np.abs(h - h.conj().T).max() <= 1e-12


def test_build_xy_two_site_matrix():
    ham = build_xy(1.0, 0.0, 2, bc="open")
    target = -0.5 * kron(PAULI_X, PAULI_X).real
    assert np.allclose(ham.dense(), target, atol=1e-14)


def test_build_xy_xx_model_has_no_xx_anisotropy():
    # gamma = 0: XX and YY enter with equal weight, U(1) symmetric
    ham = build_xy(0.0, 0.3, 6)
    total_z = sum(
        kron(*[PAULI_Z if i == j else np.eye(2) for i in range(6)]) for j in range(6)
    )
    h = ham.dense()
    assert np.abs(h @ total_z - total_z @ h).max() <= 1e-12


def test_xy_field_reversal_symmetry():
    # global spin flip conjugates h into -h, so the spectra coincide
    n = 8
    h_plus = build_xy(0.6, 0.8, n).dense()
    h_minus = build_xy(0.6, -0.8, n).dense()
    flip = kron(*([PAULI_X.real] * n))
    assert np.abs(flip @ h_plus @ flip - h_minus).max() <= 1e-12
    w_plus = np.linalg.eigvalsh(h_plus)
    w_minus = np.linalg.eigvalsh(h_minus)
    assert np.abs(np.sort(w_plus) - np.sort(w_minus)).max() <= 1e-10


def test_ground_state_polarized():
    n = 6
    ham = build_xy(0.0, 0.0, n)
    ham.terms.clear()
    for i in range(n):
        ham.add(-1.0, [(i, PAULI_Z)])
    w, v = ground_state(ham)
    assert w[0] == pytest.approx(-n)
    assert abs(v[0, 0]) == pytest.approx(1.0)


def test_ground_state_dense_vs_lanczos():
    ham = build_xy(1.0, 1.0, 10)
    wd, _ = ground_state(ham, k=2, method="dense")
    wl, _ = ground_state(ham, k=2, method="lanczos")
    assert np.abs(wd - wl).max() <= 1e-9


def test_sparse_matches_dense():
    for ham in (build_xy(0.4, 1.2, 6), build_mg(6), build_aklt(4)):
        assert np.abs(ham.sparse().toarray() - ham.dense()).max() <= 1e-12


def test_aklt_ground_energy_and_gap():
    for n in (4, 6):
        ham = build_aklt(n)
        w, _ = ground_state(ham, k=2)
        assert w[0] == pytest.approx(-2 * n / 3, abs=1e-8)
        assert w[1] - w[0] > 0.1


def test_aklt_mps_is_exact_ground_state():
    n = 6
    ham = build_aklt(n)
    h = ham.dense()
    psi, _ = aklt_mps(n).to_dense()
    e = float(np.real(psi.amplitudes.conj() @ h @ psi.amplitudes))
    w, _ = ground_state(ham, k=1)
    assert e == pytest.approx(w[0], abs=1e-8)
    assert np.linalg.norm(h @ psi.amplitudes - w[0] * psi.amplitudes) <= 1e-8


def test_mg_mps_is_exact_ground_state():
    n = 6
    ham = build_mg(n)
    h = ham.dense()
    w = np.linalg.eigvalsh(h)
    psi, _ = majumdar_ghosh_mps(n).to_dense()
    resid = np.linalg.norm(h @ psi.amplitudes - w[0] * psi.amplitudes)
    assert resid <= 1e-8
    assert w[0] == pytest.approx(-3 * n, abs=1e-10)


def test_cluster_mps_matches_stabilizer_hamiltonian():
    from entlab.mps import CLUSTER_STABILIZER_SIGN

    n = 6
    sign = CLUSTER_STABILIZER_SIGN
    ham = build_cluster(sign, n)
    psi, _ = cluster_mps(n).to_dense()
    e = float(np.real(psi.amplitudes.conj() @ ham.dense() @ psi.amplitudes))
    # the state is the sign-eigenstate of every term, so the energy is sign^2 * n
    assert e == pytest.approx(sign * sign * n, abs=1e-9)
    w, _ = ground_state(build_cluster(-sign, n), k=1)
    assert w[0] == pytest.approx(-n, abs=1e-8)


def test_block_entropy_scan_product_and_ghz():
    n = 8
    amp = np.zeros(2 ** n, dtype=complex)
    amp[0] = 1.0
    scan = block_entropy_scan(PureState((2,) * n, amp), range(1, n))
    assert max(scan.entropies_bits) <= 1e-10
    assert scan.slope == pytest.approx(0.0, abs=1e-10)

    amp[-1] = 1 / math.sqrt(2)
    amp[0] = 1 / math.sqrt(2)
    scan = block_entropy_scan(PureState((2,) * n, amp), range(1, n))
    assert np.allclose(scan.entropies_bits, 1.0, atol=1e-10)
    assert scan.slope == pytest.approx(0.0, abs=1e-10)


def test_block_entropy_complement_symmetry():
    # S(first n) equals S(complement) for pure states
    rng = np.random.default_rng(0)
    from entlab.states import partial_trace_pure, random_pure, von_neumann_entropy

    psi = random_pure((2,) * 8, rng)
    scan = block_entropy_scan(psi, range(1, 8))
    for n_block in range(1, 8):
        s_right = von_neumann_entropy(partial_trace_pure(psi, n_block, "B"))
        assert scan.entropies_bits[n_block - 1] == pytest.approx(s_right, abs=1e-9)


def test_free_fermion_matches_dense_grid():
    n = 10
    for gamma in (0.0, 0.5, 1.0):
        for h in (0.25, 0.8, 1.5):
            ham = build_xy(gamma, h, n)
            _, v = ground_state(ham, k=1, method="dense")
            psi = PureState((2,) * n, v[:, 0])
            dense_scan = block_entropy_scan(psi, [2, 3, 5])
            ff_scan = free_fermion_entropy_scan(gamma, h, n, [2, 3, 5], abscissa="log2n")
            assert np.abs(
                np.array(dense_scan.entropies_bits) - np.array(ff_scan.entropies_bits)
            ).max() <= 1e-6


def test_free_fermion_matches_dense_n12():
    # gapped points so the sparse eigensolver's vector is clean
    n = 12
    for gamma, h in ((1.0, 1.0), (0.5, 1.2)):
        ham = build_xy(gamma, h, n)
        _, v = ground_state(ham, k=1, method="lanczos")
        psi = PureState((2,) * n, v[:, 0])
        dense_scan = block_entropy_scan(psi, [3, 6])
        ff_scan = free_fermion_entropy_scan(gamma, h, n, [3, 6], abscissa="log2n")
        assert np.abs(
            np.array(dense_scan.entropies_bits) - np.array(ff_scan.entropies_bits)
        ).max() <= 1e-6


def test_free_fermion_open_boundary():
    from entlab.freefermion import xy_ground_energy_free_fermion

    n = 8
    ham = build_xy(0.9, 0.7, n, bc="open")
    w, _ = ground_state(ham, k=1)
    assert xy_ground_energy_free_fermion(0.9, 0.7, n, bc="open") == pytest.approx(
        w[0], abs=1e-10
    )


def test_deep_paramagnet_is_nearly_product():
    s = free_fermion_entropy_scan(1.0, 20.0, 32, [4, 8, 16])
    assert max(s.entropies_bits) <= 0.01
    # saturated: block-size independent to high accuracy
    assert max(s.entropies_bits) - min(s.entropies_bits) <= 1e-8
    s = free_fermion_entropy_scan(1.0, 100.0, 32, [4, 8, 16])
    assert max(s.entropies_bits) <= 3e-4


@pytest.mark.slow
def test_critical_slopes_n128():
    scan = free_fermion_entropy_scan(1.0, 1.0, 128, range(8, 65), abscissa="chord")
    assert abs(scan.slope - 1 / 6) <= 0.02
    scan = free_fermion_entropy_scan(0.0, 0.0, 128, range(8, 65), abscissa="chord")
    assert abs(scan.slope - 1 / 3) <= 0.03


def test_thermal_state_limits():
    ham = build_xy(1.0, 1.5, 4)  # gapped point
    rho0 = thermal_state(ham, 0.0)
    assert np.allclose(rho0.matrix, np.eye(16) / 16, atol=1e-12)
    rho_cold = thermal_state(ham, 60.0)
    w, v = np.linalg.eigh(ham.dense())
    degeneracy = int((w < w[0] + 1e-10).sum())
    projector = v[:, :degeneracy] @ v[:, :degeneracy].conj().T
    assert np.abs(rho_cold.matrix - projector / degeneracy).max() <= 1e-6


def test_thermal_state_minimizes_free_energy():
    rng = np.random.default_rng(1)
    ham = build_xy(0.8, 0.6, 4)
    beta = 0.9
    rho_beta = thermal_state(ham, beta)
    f_star = free_energy(ham, rho_beta, beta)
    for _ in range(20):
        ra = random_density((2, 2), rng)
        rb = random_density((2, 2), rng)
        product = DensityMatrix((2,) * 4, np.kron(ra.matrix, rb.matrix))
        assert f_star <= free_energy(ham, product, beta) + 1e-10


def test_mutual_info_area_check():
    ham = build_xy(1.0, 1.0, 8)
    for beta in (0.1, 1.0):
        info, boundary, simple = mutual_info_area_check(ham, beta, 4)
        assert info >= -1e-9
        assert info <= boundary + 1e-9
        assert boundary <= simple + 1e-9
    info0, boundary0, _ = mutual_info_area_check(ham, 1e-12, 4)
    assert info0 == pytest.approx(0.0, abs=1e-8)
    assert boundary0 == pytest.approx(0.0, abs=1e-8)


def test_mutual_info_product_hamiltonian():
    # no crossing terms: thermal state factorizes and I = 0
    n = 6
    ham = build_xy(0.0, 0.0, n, bc="open")
    ham.terms.clear()
    for i in range(n):
        ham.add(-0.7, [(i, PAULI_Z)])
        if i + 1 < n and (i + 1) != 3:
            ham.add(-0.4, [(i, PAULI_X), ((i + 1), PAULI_X)])
    info, boundary, simple = mutual_info_area_check(ham, 1.0, 3)
    assert info == pytest.approx(0.0, abs=1e-10)
    assert boundary == pytest.approx(0.0, abs=1e-10)
    assert simple == 0.0


def test_classical_gibbs_mutual_info():
    coupling = lambda a, b: -a * b
    info, bound, boundary_gap = classical_gibbs_mutual_info(coupling, 0.5, 12, 6)
    assert info <= bound + 1e-12
    assert bound == pytest.approx(2.0)
    assert boundary_gap <= 1e-9
    info0, _, gap0 = classical_gibbs_mutual_info(coupling, 0.0, 10, 5)
    assert info0 == pytest.approx(0.0, abs=1e-12)
    assert gap0 <= 1e-12


def test_markov_factorization():
    coupling = lambda a, b: -a * b
    assert markov_violation(coupling, 0.7, 10, 0, 5) <= 1e-12
    assert markov_violation(coupling, 1.3, 8, 2, 6) <= 1e-12


def test_spin1_algebra():
    s = spin1_matrices()
    comm = s["x"] @ s["y"] - s["y"] @ s["x"]
    assert np.abs(comm - 1j * s["z"]).max() <= 1e-12
    casimir = s["x"] @ s["x"] + s["y"] @ s["y"] + s["z"] @ s["z"]
    assert np.allclose(casimir, 2 * np.eye(3), atol=1e-12)
