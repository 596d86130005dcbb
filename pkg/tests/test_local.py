import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlan.errors import DiagonalOutOfRange, GapTooSmall, IndexMismatch, NotLocal
from qlan.local import (
    CenterState,
    LocalParams,
    extract_local_params,
    first_order_state,
    local_state,
    mode_index,
    quadratic_loss_check,
    random_local_params,
    rotation,
    su_generators,
    theta_loss,
)
from qlan.states import random_unitary


def random_center(d, r, rng):
    mu = np.sort(rng.dirichlet(np.ones(r) * 2))[::-1]
    while r > 1 and (np.min(-np.diff(mu)) < 0.02 or mu[-1] < 0.02):
        mu = np.sort(rng.dirichlet(np.ones(r) * 2))[::-1]
    return CenterState.create(mu, d, random_unitary(d, rng))


class TestGenerators:
    def test_qubit(self):
        h, t12, t21 = (g.entries for g in su_generators(2))
        assert np.array_equal(h, np.diag([1, -1]))
        assert np.array_equal(t12, [[0, 1j], [-1j, 0]])
        assert np.array_equal(t21, [[0, 1], [1, 0]])

    @pytest.mark.parametrize("d", range(2, 7))
    def test_trace_orthogonality(self, d):
        gens = [g.entries for g in su_generators(d)]
        assert len(gens) == d * d - 1
        gram = np.array([[np.trace(a @ b).real for b in gens] for a in gens])
        cartan = d - 1
        expected = np.zeros_like(gram)
        for j in range(cartan):
            expected[j, j] = 2
            if j + 1 < cartan:
                expected[j, j + 1] = expected[j + 1, j] = -1
        expected[cartan:, cartan:] = 2 * np.eye(len(gens) - cartan)
        assert np.allclose(gram, expected)
        assert all(abs(np.trace(g)) < 1e-15 for g in gens)


class TestCenter:
    def test_rejects_small_gap(self):
        with pytest.raises(GapTooSmall):
            CenterState.create([0.5, 0.5 - 1e-9, 1e-9], 3)

    def test_kappa_uses_zero_beyond_rank(self):
        c = CenterState.create([0.6, 0.4], 3)
        assert mode_index(3, 2) == ((0, 1), (0, 2), (1, 2))
        assert np.allclose(c.kappa, [0.2, 0.6, 0.4])

    def test_parameter_count(self):
        for d in range(1, 6):
            for r in range(1, d + 1):
                real_dim = (r - 1) + 2 * len(mode_index(d, r))
                assert real_dim == 2 * r * d - r * r - 1


class TestStates:
    def test_zero_rotation(self):
        c = CenterState.create([0.6, 0.4], 3)
        assert np.allclose(rotation(c, LocalParams.zeros(3, 2), 0.1), np.eye(3))

    def test_rotation_unitary(self, rng):
        c = random_center(4, 2, rng)
        u = rotation(c, random_local_params(4, 2, rng, 3.0), 0.2)
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)

    def test_zero_theta_is_center(self, rng):
        c = random_center(4, 3, rng)
        assert np.allclose(local_state(c, LocalParams.zeros(4, 3), 0.1).entries, c.state().entries)

    def test_diagonal_shift(self):
        c = CenterState.create([0.6, 0.4], 2)
        rho = local_state(c, LocalParams.create([0.1], [0], 2, 2), 1.0)
        assert np.allclose(rho.entries, np.diag([0.7, 0.3]))

    def test_diagonal_out_of_range(self):
        c = CenterState.create([0.6, 0.4], 2)
        with pytest.raises(DiagonalOutOfRange):
            local_state(c, LocalParams.create([0.5], [0], 2, 2), 1.0)

    def test_first_order_at_zero(self):
        c = CenterState.create([0.5, 0.3, 0.2], 4)
        assert np.allclose(first_order_state(c, LocalParams.zeros(4, 3), 0.3), np.diag([0.5, 0.3, 0.2, 0]))

    def test_first_order_lower_triangle_convention(self):
        c = CenterState.create([0.75, 0.25], 2)
        m = first_order_state(c, LocalParams.create([0], [1 + 2j], 2, 2), 0.1)
        assert m[1, 0] == pytest.approx(0.1 * (1 + 2j) * np.sqrt(0.5))
        assert m[0, 1] == pytest.approx(np.conj(m[1, 0]))

    def test_first_order_is_tangent(self, rng):
        c = random_center(3, 2, rng)
        theta = random_local_params(3, 2, rng)
        for scale in (1e-3, 1e-4):
            gap = np.abs(local_state(c, theta, scale).entries - first_order_state(c, theta, scale)).max()
            assert gap <= 10 * scale**2

    def test_mismatched_parameters(self):
        with pytest.raises(IndexMismatch):
            local_state(CenterState.create([1.0], 2), LocalParams.zeros(3, 1), 0.1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 5), st.data())
    def test_rank_preserved(self, d, data):
        r = data.draw(st.integers(1, d))
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        c = random_center(d, r, rng)
        rho = local_state(c, random_local_params(d, r, rng, 2.0), 0.01)
        assert rho.rank == r


class TestExtraction:
    def test_center_gives_zero(self, rng):
        c = random_center(3, 2, rng)
        assert extract_local_params(c.state(), c, 0.01).norm() <= 1e-12

    def test_first_order_round_trip(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 6))
            r = int(rng.integers(1, d + 1))
            c = random_center(d, r, rng)
            theta = random_local_params(d, r, rng)
            back = extract_local_params(first_order_state(c, theta, 0.01), c, 0.01)
            assert (back - theta).norm() <= 1e-10

    def test_second_order_residual(self, rng):
        c = random_center(4, 2, rng)
        theta = random_local_params(4, 2, rng)
        errs = [(extract_local_params(local_state(c, theta, s), c, s) - theta).norm() for s in (1e-2, 1e-3)]
        # residual is linear in scale at fixed theta
        assert errs[0] / errs[1] == pytest.approx(10, rel=0.05)
        assert errs[0] <= 1e-2 * theta.norm() ** 2 * 10

    def test_refined_inverse_is_exact(self, rng):
        c = random_center(4, 3, rng)
        theta = random_local_params(4, 3, rng, 20.0)
        rho = local_state(c, theta, 1e-3)
        assert (extract_local_params(rho, c, 1e-3, refine=50) - theta).norm() <= 1e-9

    def test_not_local(self, rng):
        c = CenterState.create([0.7, 0.3], 2)
        with pytest.raises(NotLocal):
            extract_local_params(np.diag([0.3, 0.7]), c, 0.1)


class TestLoss:
    def test_equal(self):
        c = CenterState.create([0.6, 0.4], 3)
        t = LocalParams.create([0.3], [1, 2j, 3], 3, 2)
        assert theta_loss(c, t, t) == 0

    def test_classical_shift(self):
        c = CenterState.create([0.6, 0.4], 2)
        assert theta_loss(c, LocalParams.create([1], [0], 2, 2), LocalParams.zeros(2, 2)) == pytest.approx(2)

    def test_pure_mode(self):
        c = CenterState.create([1.0], 2)
        assert theta_loss(c, LocalParams.create([], [1], 2, 1), LocalParams.zeros(2, 1)) == pytest.approx(2)

    def test_r_term_form(self, rng):
        for _ in range(50):
            r = int(rng.integers(2, 6))
            c = random_center(r, r, rng)
            t1, t2 = random_local_params(r, r, rng), random_local_params(r, r, rng)
            du = (t1 - t2).u_full()
            zero_z = LocalParams.create(t1.u, t2.z, r, r)
            assert abs(theta_loss(c, zero_z, t2) - np.sum(du**2)) <= 1e-12


class TestQuadraticLoss:
    def test_identical(self):
        c = CenterState.create([0.6, 0.4], 2)
        t = LocalParams.create([0.2], [0.5j], 2, 2)
        for row in quadratic_loss_check(c, t, t, [1e2, 1e4]):
            assert row["hs2"] == 0 and row["loss_over_n"] == 0

    def test_diagonal_exact(self):
        c = CenterState.create([0.5, 0.3, 0.2], 3)
        t1 = LocalParams.create([0.4, -0.2], [0, 0, 0], 3, 3)
        t2 = LocalParams.create([-0.1, 0.3], [0, 0, 0], 3, 3)
        for row in quadratic_loss_check(c, t1, t2, [1e2, 1e4, 1e6]):
            assert row["ratio"] == pytest.approx(1.0, abs=1e-9)

    def test_random_converges(self, rng):
        c = CenterState.create([0.5, 0.3, 0.2], 4)
        t1, t2 = random_local_params(4, 3, rng), random_local_params(4, 3, rng)
        gaps = [abs(row["ratio"] - 1) for row in quadratic_loss_check(c, t1, t2, [1e2, 1e4, 1e6])]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-2
