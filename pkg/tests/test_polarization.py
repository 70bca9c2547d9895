import math

import numpy as np
import pytest

from ppqnd import (
    Operator,
    PolarizationQubit,
    PolUnitary,
    basis_state,
    check_invariance,
    lift_unitary,
    lr_to_hv,
    make_space,
    number_op,
    polarization_dephasing,
    ppqnd_hamiltonian,
    stokes_vector,
)


def haar_unitary(rng):
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return PolUnitary(q * (np.diagonal(r) / np.abs(np.diagonal(r))))


class TestPolarizationQubit:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PolarizationQubit(1.0, 1.0)

    def test_normalized_constructor(self):
        q = PolarizationQubit.normalized(3.0, 4.0)
        assert abs(q.c_l) == pytest.approx(0.6)
        assert abs(q.c_r) == pytest.approx(0.8)


class TestLrToHv:
    def test_unitary(self):
        u = lr_to_hv().matrix
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-15

    def test_fixed_entries(self):
        u = lr_to_hv().matrix
        s = 1 / math.sqrt(2)
        assert np.allclose(u, [[s, 1j * s], [s, -1j * s]])

    def test_left_photon_in_linear_basis(self):
        # states carry the conjugate of the mode-operator map:
        # c_HV = u^+ c_LR, so |1_L> reads (|1_H> - i |1_V>)/sqrt(2)
        u = lr_to_hv().matrix
        c_hv = u.conj().T @ np.array([1.0, 0.0])
        s = 1 / math.sqrt(2)
        assert np.allclose(c_hv, [s, -1j * s])

    def test_round_trip_on_states(self):
        rng = np.random.default_rng(0)
        u = lr_to_hv().matrix
        c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        c /= np.linalg.norm(c)
        back = u @ (u.conj().T @ c)
        assert np.max(np.abs(back - c)) < 1e-12


class TestLiftUnitary:
    def test_identity_lifts_to_identity(self):
        space = make_space(1, [3, 3, 2])
        lift = lift_unitary(PolUnitary(np.eye(2)), space, (0, 1))
        assert np.max(np.abs(lift.matrix - np.eye(space.total_dim))) < 1e-12

    def test_single_photon_sector_action(self):
        # the active lift transforms single-photon amplitude columns by u
        space = make_space(1, [2, 2])
        u = lr_to_hv()
        lift = lift_unitary(u, space, (0, 1))
        i10 = space.index_of(0, (1, 0))
        i01 = space.index_of(0, (0, 1))
        for k, i_in in enumerate((i10, i01)):
            vec = np.zeros(space.total_dim, dtype=complex)
            vec[i_in] = 1.0
            out = lift.matrix @ vec
            assert out[i10] == pytest.approx(u.matrix[0, k], abs=1e-12)
            assert out[i01] == pytest.approx(u.matrix[1, k], abs=1e-12)

    def test_preserves_total_photon_number(self):
        rng = np.random.default_rng(1)
        space = make_space(1, [3, 3])
        n_tot = number_op(space, 0).matrix + number_op(space, 1).matrix
        for _ in range(5):
            lift = lift_unitary(haar_unitary(rng), space, (0, 1))
            comm = lift.matrix @ n_tot - n_tot @ lift.matrix
            assert np.max(np.abs(comm)) < 1e-10

    def test_is_unitary(self):
        rng = np.random.default_rng(2)
        space = make_space(1, [4, 4])
        lift = lift_unitary(haar_unitary(rng), space, (0, 1)).matrix
        assert np.max(np.abs(lift.conj().T @ lift - np.eye(space.total_dim))) < 1e-10

    def test_homomorphism_on_complete_sectors(self):
        # lift(u1 u2) = lift(u1) lift(u2) exactly on every photon-number
        # sector that fits under the cutoff; boundary sectors are
        # truncation artifacts and carry no representation content
        rng = np.random.default_rng(3)
        space = make_space(1, [4, 4])
        sector_idx = [space.index_of(0, (k, n - k))
                      for n in range(4) for k in range(n + 1)]
        sel = np.ix_(sector_idx, sector_idx)
        for _ in range(5):
            u1, u2 = haar_unitary(rng), haar_unitary(rng)
            lhs = lift_unitary(u1 @ u2, space, (0, 1)).matrix
            rhs = lift_unitary(u1, space, (0, 1)).matrix @ lift_unitary(u2, space, (0, 1)).matrix
            assert np.max(np.abs(lhs[sel] - rhs[sel])) < 1e-9

    def test_branch_cut_eigenvalue_minus_one(self):
        # u with eigenvalue -1 lands on the principal-log branch cut; the
        # lift stays a faithful similarity transform regardless
        space = make_space(1, [3, 3])
        u = PolUnitary(np.diag([1.0, -1.0]))
        lift = lift_unitary(u, space, (0, 1)).matrix
        assert np.max(np.abs(lift.conj().T @ lift - np.eye(space.total_dim))) < 1e-10

    def test_rejects_unequal_cutoffs(self):
        space = make_space(1, [3, 4])
        with pytest.raises(ValueError):
            lift_unitary(PolUnitary(np.eye(2)), space, (0, 1))

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            PolUnitary(np.array([[1.0, 0.1], [0.0, 1.0]]))


class TestInvariance:
    def test_ppqnd_invariant_under_lr_to_hv(self):
        h = ppqnd_hamiltonian(-1e-3, 4, 4, 4)
        assert check_invariance(h, lr_to_hv(), (0, 1)) <= 1e-10

    def test_ppqnd_invariant_under_random_unitaries(self):
        rng = np.random.default_rng(4)
        h = ppqnd_hamiltonian(-1e-3, 3, 3, 3)
        for _ in range(20):
            assert check_invariance(h, haar_unitary(rng), (0, 1)) <= 1e-10

    def test_sensitive_hamiltonian_is_not_invariant(self):
        space = make_space(1, [3, 3, 3])
        chi = -1e-3
        h = Operator(space, chi * (number_op(space, 0).matrix @ number_op(space, 2).matrix))
        assert check_invariance(h, lr_to_hv(), (0, 1)) > 1e-3 * abs(chi) / 1e-3


class TestStokes:
    def test_poles_and_equator(self):
        assert stokes_vector(PolarizationQubit.left()) == pytest.approx((0.0, 0.0, 1.0))
        assert stokes_vector(PolarizationQubit.right()) == pytest.approx((0.0, 0.0, -1.0))
        assert stokes_vector(PolarizationQubit.horizontal()) == pytest.approx((1.0, 0.0, 0.0))

    def test_unit_norm(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            q = PolarizationQubit.normalized(c[0], c[1])
            assert np.linalg.norm(stokes_vector(q)) == pytest.approx(1.0, abs=1e-12)


class TestDephasingBasisIndependence:
    def test_fidelity_invariant_under_prerotation(self):
        rng = np.random.default_rng(6)
        base = PolarizationQubit.horizontal()
        ref = polarization_dephasing(base, 1.5, -0.2, 3.0).fidelity
        for _ in range(5):
            rotated = base.apply(haar_unitary(rng))
            fid = polarization_dephasing(rotated, 1.5, -0.2, 3.0).fidelity
            assert abs(fid - ref) < 1e-10
