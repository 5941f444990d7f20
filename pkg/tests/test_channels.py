import itertools
import math

import numpy as np
import pytest
from conftest import random_circuit, random_cp_channel_ops, random_density, random_pure
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsandwich.channels import (
    KrausChannel,
    PauliExpansion,
    apply,
    depolarizing_kraus,
    mitigated_state,
    pauli_expand,
    pauli_transfer_matrix,
    postselect_probability,
    transform_multilayer,
    transform_single_layer,
    twirl,
)
from pcsandwich.checks import checks_from_candidates, find_checks, generator_candidates
from pcsandwich.circuit import Circuit, unitary, x
from pcsandwich.density import DensityMatrix, postselect_zeros, simulate, trace_distance
from pcsandwich.pauli import PauliString, all_paulis, commutes, dense_matrix
from pcsandwich.sandwich import build

P = PauliString.from_label
X, Y, Z = (dense_matrix(P(l)) for l in "XYZ")


def is_identity_multiple(op, tol=1e-10):
    return np.allclose(op, op[0, 0] * np.eye(op.shape[0]), atol=tol)


def sandwich_with_error(u, checks, ch, rho0):
    """Simulate the sandwich noiselessly with ``ch`` inserted right after U."""
    sw = build(u, checks)
    big = ch.embed_low(sw.n)
    hooks = {sw.u_span[1]: lambda r: apply(big, r)}
    full = rho0.tensor_high(DensityMatrix.zero_state(sw.ancilla_m))
    return postselect_zeros(simulate(sw, full, hooks=hooks), sw.ancillas)


class TestKrausChannel:
    def test_depolarizing_is_trace_preserving(self):
        assert depolarizing_kraus(0.3).is_trace_preserving()

    def test_identity_leaves_state(self):
        rho = random_density(2, np.random.default_rng(0))
        np.testing.assert_array_equal(apply(KrausChannel.identity(2), rho).data, rho.data)

    def test_ncp_output(self):
        rho = DensityMatrix.zero_state(1)
        ch = KrausChannel.from_ops([np.eye(2), math.sqrt(0.5) * X], signs=[1, -1])
        out = apply(ch, rho)
        assert not ch.is_cp
        assert np.linalg.eigvalsh(out.data)[0] < 0
        assert out.trace() == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            KrausChannel(1, ((2, np.eye(2)),))
        with pytest.raises(ValueError):
            KrausChannel(2, ((1, np.eye(2)),))
        with pytest.raises(ValueError):
            apply(KrausChannel.identity(1), DensityMatrix.zero_state(2))

    def test_random_cp_channel_is_trace_preserving(self):
        ops = random_cp_channel_ops(2, 3, np.random.default_rng(1))
        assert KrausChannel.from_ops(ops).is_trace_preserving()


class TestSingleLayer:
    def test_check_itself_survives(self):
        ch = transform_single_layer(KrausChannel.from_ops([Z]), P("Z"))
        np.testing.assert_allclose(ch.ops[0], Z)

    def test_anticommuting_term_vanishes(self):
        ch = transform_single_layer(KrausChannel.from_ops([X]), P("Z"))
        assert ch.terms == ()

    def test_mixed_term(self):
        ch = transform_single_layer(KrausChannel.from_ops([(X + Z) / math.sqrt(2)]), P("Z"))
        np.testing.assert_allclose(ch.ops[0], Z / math.sqrt(2), atol=1e-15)

    @pytest.mark.parametrize("n", [1, 2])
    def test_exhaustive_cancellation(self, n):
        for c2, e in itertools.product(list(all_paulis(n))[1:], all_paulis(n)):
            out = transform_single_layer(KrausChannel.from_ops([dense_matrix(e)]), c2)
            if commutes(c2, e):
                np.testing.assert_array_equal(out.ops[0], dense_matrix(e))
            else:
                assert out.terms == ()

    def test_signs_carried(self):
        ch = KrausChannel.from_ops([np.eye(2), Z], signs=[1, -1])
        out = transform_single_layer(ch, P("Z"))
        assert [eta for eta, _ in out.terms] == [1, -1]


class TestMultilayer:
    @pytest.mark.parametrize("seed", range(10))
    def test_xx_zz_pair_removes_weight_one_errors(self, seed):
        rng = np.random.default_rng(seed)
        n = 3
        ops = []
        for local in random_cp_channel_ops(1, 2, rng):
            q = int(rng.integers(n))
            ops.append(np.kron(np.kron(np.eye(1 << (n - 1 - q)), local), np.eye(1 << q)))
        out = transform_multilayer(KrausChannel.from_ops(ops), [P("XXX"), P("ZZZ")])
        assert all(is_identity_multiple(op) for op in out.ops)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_generators_remove_every_error(self, n, num_ops, seed):
        ops = random_cp_channel_ops(n, num_ops, np.random.default_rng(seed))
        out = transform_multilayer(KrausChannel.from_ops(ops), generator_candidates(n))
        assert all(is_identity_multiple(op) for op in out.ops)

    @pytest.mark.parametrize("w", ["X", "Y", "Z"])
    def test_single_layer_keeps_its_own_error(self, w):
        ch = KrausChannel.from_ops([dense_matrix(P(w))])
        out = transform_multilayer(ch, [P(w)])
        np.testing.assert_array_equal(out.ops[0], ch.ops[0])

    def test_accepts_check_set(self):
        u = Circuit(2)
        checks = checks_from_candidates(u, generator_candidates(2), 4)
        ops = random_cp_channel_ops(2, 2, np.random.default_rng(0))
        a = transform_multilayer(KrausChannel.from_ops(ops), checks)
        b = transform_multilayer(KrausChannel.from_ops(ops), [l.c2 for l in checks])
        for x, y in zip(a.ops, b.ops):
            np.testing.assert_array_equal(x, y)


class TestPostselectProbability:
    def test_identity_error(self):
        u = random_circuit(2, 10, np.random.default_rng(0))
        rho = random_density(2, np.random.default_rng(1))
        assert postselect_probability(KrausChannel.identity(2), u, rho) == pytest.approx(1)

    def test_traceless_errors_are_never_kept(self):
        ch = KrausChannel.from_ops([math.sqrt(0.5) * X, math.sqrt(0.5) * Y])
        out = transform_multilayer(ch, generator_candidates(1))
        assert postselect_probability(out, Circuit(1), DensityMatrix.zero_state(1)) == 0
        assert mitigated_state(out, Circuit(1), DensityMatrix.zero_state(1)) is None

    def test_depolarizing_keeps_identity_weight(self):
        p = 0.2
        out = transform_multilayer(depolarizing_kraus(p), generator_candidates(1))
        rho = random_pure(1, np.random.default_rng(3))
        prob = postselect_probability(out, Circuit(1), rho)
        alpha = pauli_expand(depolarizing_kraus(p).ops[0]).coefficients[P("I")]
        assert prob == pytest.approx(abs(alpha) ** 2, abs=1e-12)
        assert prob == pytest.approx(1 - 3 * p / 4, abs=1e-12)


class TestCircuitEquivalence:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_transformed_map_predicts_circuit(self, n, m, seed):
        rng = np.random.default_rng(seed)
        u = random_circuit(n, 12, rng)
        checks = find_checks(u, m)
        if len(checks) == 0:
            return
        ch = KrausChannel.from_ops(random_cp_channel_ops(n, 3, rng))
        rho0 = random_density(n, rng)
        res = sandwich_with_error(u, checks, ch, rho0)
        transformed = transform_multilayer(ch, checks)
        prob = postselect_probability(transformed, u, rho0)
        assert res.prob == pytest.approx(prob, abs=1e-9)
        predicted = mitigated_state(transformed, u, rho0)
        assert (predicted is None) == (res.state is None)
        if predicted is not None:
            assert trace_distance(res.state, predicted) <= 1e-9


class TestPauliExpand:
    def test_x(self):
        assert pauli_expand(X).nonzero() == {P("X"): 1}

    def test_hadamard(self):
        hm = (X + Z) / math.sqrt(2)
        coeffs = pauli_expand(hm).nonzero()
        assert set(coeffs) == {P("X"), P("Z")}
        assert coeffs[P("X")] == pytest.approx(1 / math.sqrt(2))
        assert coeffs[P("Z")] == pytest.approx(1 / math.sqrt(2))

    def test_zero(self):
        assert pauli_expand(np.zeros((4, 4))).nonzero() == {}

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_reconstructs(self, n, seed):
        rng = np.random.default_rng(seed)
        e = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
        np.testing.assert_allclose(pauli_expand(e).reconstruct(), e, atol=1e-10)

    @pytest.mark.parametrize("shape", [(3, 3), (2, 4), (1, 1)])
    def test_rejects_bad_shape(self, shape):
        with pytest.raises(ValueError):
            pauli_expand(np.zeros(shape))

    def test_reconstruct_type(self):
        exp = PauliExpansion(1, {P("Z"): 2.0})
        np.testing.assert_array_equal(exp.reconstruct(), 2 * Z)


class TestTwirl:
    def test_identity_set(self):
        ch = KrausChannel.from_ops(random_cp_channel_ops(1, 2, np.random.default_rng(0)))
        out = twirl(ch, [P("I")])
        for a, b in zip(out.ops, ch.ops):
            np.testing.assert_allclose(a, b)

    @pytest.mark.parametrize("seed", range(5))
    def test_full_group_gives_pauli_channel(self, seed):
        ch = KrausChannel.from_ops(random_cp_channel_ops(1, 3, np.random.default_rng(seed)))
        ptm = pauli_transfer_matrix(twirl(ch, list(all_paulis(1))))
        np.testing.assert_allclose(ptm, np.diag(np.diag(ptm)), atol=1e-12)
        assert not np.allclose(pauli_transfer_matrix(ch), np.diag(np.diag(pauli_transfer_matrix(ch))))

    def test_z_conjugates_x_rotation(self):
        theta = 0.4
        rx = math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * X
        out = twirl(KrausChannel.from_ops([rx]), [P("Z")])
        np.testing.assert_allclose(out.ops[0], Z @ rx @ Z, atol=1e-15)
        np.testing.assert_allclose(out.ops[0], rx.conj(), atol=1e-15)

    def test_twirl_differs_from_checks(self):
        # a twirl keeps anticommuting components, a check layer removes them
        ch = KrausChannel.from_ops([X])
        assert twirl(ch, [P("I"), P("Z")]).is_trace_preserving()
        assert transform_single_layer(ch, P("Z")).terms == ()

    def test_empty_set(self):
        with pytest.raises(ValueError):
            twirl(KrausChannel.identity(1), [])


def test_ptm_of_depolarizing():
    p = 0.3
    np.testing.assert_allclose(pauli_transfer_matrix(depolarizing_kraus(p)), np.diag([1, 1 - p, 1 - p, 1 - p]), atol=1e-15)


def test_embed_low_matches_unitary_layout():
    ch = KrausChannel.from_ops([X])
    big = ch.embed_low(2)
    np.testing.assert_array_equal(big.ops[0], unitary(Circuit(2, (x(0),))))
