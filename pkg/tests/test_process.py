import math

import numpy as np
import pytest

from altcausal.qcore import (
    Channel,
    ComplexOperator,
    DensityMatrix,
    PAULI_X,
    PAULI_Z,
    apply_channel,
    ket,
    projector,
    random_channel,
    random_density_matrix,
    random_unitary,
    spectral_norm,
)
from altcausal.process import (
    ProcessMatrix,
    ProcessTensor,
    ac_vs_ico_entropy,
    build_alternating_family,
    build_quantum_switch,
    check_duality,
    check_two_way,
    control_interference_probabilities,
    decompose_process_tensor,
    from_channel_order,
    marginal_state,
    route_state,
    switch_output,
    switch_process_matrix,
    switch_unitary,
    traced_target_channel,
    validate_ocb,
    with_skew_perturbation,
)


def _plus():
    return DensityMatrix.from_state_vector(np.array([1.0, 1.0]) / math.sqrt(2), (2,))


# ---------------------------------------------------------------------------
# validity and routing
# ---------------------------------------------------------------------------

def test_validity_for_random_channels():
    rng = np.random.default_rng(0)
    for order in ("AB", "BA"):
        for _ in range(10):
            w = from_channel_order(random_channel(2, 2, rng), order)
            rep = validate_ocb(w)
            assert rep.valid
            assert rep.normalization_deviation < 1e-9
            assert rep.hermiticity_deviation < 1e-9
            assert rep.min_eigenvalue > -1e-9


def test_validity_for_nonsquare_channel():
    rng = np.random.default_rng(1)
    assert validate_ocb(from_channel_order(random_channel(2, 3, rng), "AB")).valid


def test_process_matrix_rejects_wrong_wire_count():
    with pytest.raises(ValueError):
        ProcessMatrix(ComplexOperator(np.eye(4), (2, 2)))


def test_route_state_reproduces_channel():
    rng = np.random.default_rng(2)
    for order in ("AB", "BA"):
        c = random_channel(2, 2, rng)
        w = from_channel_order(c, order)
        rho = random_density_matrix(2, rng)
        np.testing.assert_allclose(route_state(w, rho).entries,
                                   apply_channel(c, rho).entries, atol=1e-12)


def test_route_state_bit_flip_oracle():
    w = from_channel_order(Channel.bit_flip(0.3), "AB")
    out = route_state(w, projector(ket(0)))
    np.testing.assert_allclose(np.diag(out.entries).real, [0.7, 0.3], atol=1e-12)


def test_fully_depolarizing_routes_to_mixed():
    w = from_channel_order(Channel.depolarizing(1.0), "AB")
    rng = np.random.default_rng(3)
    for _ in range(3):
        out = route_state(w, random_density_matrix(2, rng))
        np.testing.assert_allclose(out.entries, np.eye(2) / 2, atol=1e-12)


def test_two_way_identity_pair():
    cid = Channel.identity(2)
    mixed = DensityMatrix.maximally_mixed((2,))
    dev = check_two_way(from_channel_order(cid, "AB"), from_channel_order(cid, "BA"),
                        mixed, mixed)
    assert dev < 1e-12


def test_two_way_mismatch_is_half():
    dep = Channel.depolarizing(1.0)
    w_ab, w_ba = from_channel_order(dep, "AB"), from_channel_order(dep, "BA")
    mixed = DensityMatrix.maximally_mixed((2,))
    dev = check_two_way(w_ab, w_ba, mixed, projector(ket(0)))
    assert dev == pytest.approx(0.5, abs=1e-12)


def test_two_way_self_consistency():
    rng = np.random.default_rng(4)
    c = random_channel(2, 2, rng)
    w_ab, w_ba = from_channel_order(c, "AB"), from_channel_order(c, "BA")
    rho_b = marginal_state(w_ab, w_ab.delivery_role)
    rho_a = marginal_state(w_ba, w_ba.delivery_role)
    assert check_two_way(w_ab, w_ba, rho_a, rho_b) < 1e-12


# ---------------------------------------------------------------------------
# alternating family and duality
# ---------------------------------------------------------------------------

def test_family_starts_at_forward_member():
    rng = np.random.default_rng(5)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = build_alternating_family(w, omega=1.0)
    np.testing.assert_allclose(fam.forward(0.0).w.entries, w.w.entries, atol=0)


def test_duality_exact_on_grid():
    rng = np.random.default_rng(6)
    for omega in (0.5, 1.0, 2.0):
        w = from_channel_order(random_channel(2, 2, rng), "AB")
        fam = build_alternating_family(w, omega=omega)
        ts = np.linspace(-2 * fam.period, 2 * fam.period, 64)
        assert check_duality(fam, ts) < 1e-12


def test_family_is_periodic():
    rng = np.random.default_rng(7)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = build_alternating_family(w, omega=1.3)
    for t in (0.0, 0.4, 2.2):
        gap = spectral_norm(fam.forward(t + fam.period).w.entries - fam.forward(t).w.entries)
        assert gap < 1e-12


def test_family_members_stay_valid():
    rng = np.random.default_rng(8)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = build_alternating_family(w, omega=2.0)
    for t in np.linspace(0, fam.period, 9):
        assert validate_ocb(fam.forward(float(t))).valid
        assert validate_ocb(fam.backward(float(t))).valid


def test_backward_swaps_roles():
    rng = np.random.default_rng(9)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = build_alternating_family(w, omega=1.0)
    back = fam.backward(0.7)
    assert back.emission_role == w.delivery_role
    assert back.delivery_role == w.emission_role


def test_discrete_phase_mode_duality():
    rng = np.random.default_rng(10)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = build_alternating_family(w, omega=1.0, phase_mode="discrete")
    ts = np.linspace(-7, 7, 40)
    assert check_duality(fam, ts) < 1e-12


@pytest.mark.parametrize("eps", [1e-3, 1e-2])
def test_skew_perturbation_window(eps):
    rng = np.random.default_rng(11)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    fam = with_skew_perturbation(build_alternating_family(w, omega=1.0), eps, seed=1)
    dev = check_duality(fam, np.linspace(0, 6, 13))
    assert 0.5 * eps <= dev <= 2.0 * eps


def test_family_rejects_bad_omega():
    rng = np.random.default_rng(12)
    w = from_channel_order(random_channel(2, 2, rng), "AB")
    with pytest.raises(ValueError):
        build_alternating_family(w, omega=0.0)


# ---------------------------------------------------------------------------
# process tensor split
# ---------------------------------------------------------------------------

def test_decomposition_reconstructs():
    rng = np.random.default_rng(13)
    for k in (1, 2, 3, 4):
        for d in (2, 3, 4):
            steps = [ComplexOperator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), (d,))
                     for _ in range(k)]
            t_plus, t_minus = decompose_process_tensor(ProcessTensor(steps))
            for s, p, m in zip(steps, t_plus.steps, t_minus.steps):
                assert np.abs(p.entries + m.entries - s.entries).max() < 1e-12


def test_decomposition_hermitian_single_step():
    rng = np.random.default_rng(14)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = ComplexOperator((g + g.conj().T) / 2, (3,))
    t_plus, t_minus = decompose_process_tensor(ProcessTensor([h]))
    np.testing.assert_allclose(t_plus.steps[0].entries, h.entries / 2, atol=1e-14)
    np.testing.assert_allclose(t_minus.steps[0].entries, h.entries / 2, atol=1e-14)


def test_decomposition_symmetric_tensor():
    # a tensor equal to its dagger-reversed self splits into dual halves
    rng = np.random.default_rng(15)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    steps = [ComplexOperator(a, (3,)), ComplexOperator(a.conj().T, (3,))]
    tens = ProcessTensor(steps)
    t_plus, t_minus = decompose_process_tensor(tens)
    for m, p_rev in zip(t_minus.steps, reversed(t_plus.steps)):
        np.testing.assert_allclose(m.entries, p_rev.entries.conj().T, atol=1e-14)
    for s, p, m in zip(steps, t_plus.steps, t_minus.steps):
        np.testing.assert_allclose(p.entries + m.entries, s.entries, atol=0)


def test_tensor_rejects_mixed_dims():
    with pytest.raises(ValueError):
        ProcessTensor([ComplexOperator(np.eye(2), (2,)), ComplexOperator(np.eye(3), (3,))])


# ---------------------------------------------------------------------------
# quantum switch
# ---------------------------------------------------------------------------

def _oracle_interference(u_a, u_b, target, control_vec):
    # independent dense 4-dim evolution: joint = S (target (x) ctrl) S^dag
    s = np.kron(u_b @ u_a, np.diag([1.0, 0.0])) + np.kron(u_a @ u_b, np.diag([0.0, 1.0]))
    ctrl = np.outer(control_vec, control_vec.conj())
    joint = s @ np.kron(target, ctrl) @ s.conj().T
    probs = []
    for sign in (1.0, -1.0):
        v = np.array([1.0, sign]) / math.sqrt(2)
        proj = np.kron(np.eye(2), np.outer(v, v.conj()))
        probs.append(float(np.real(np.trace(proj @ joint))))
    return tuple(probs)


def test_switch_identity_pair_gives_plus():
    model = build_quantum_switch(np.eye(2), np.eye(2))
    p_plus, p_minus = control_interference_probabilities(
        model, DensityMatrix.maximally_mixed((2,)), _plus())
    assert p_plus == pytest.approx(1.0, abs=1e-10)
    assert p_minus == pytest.approx(0.0, abs=1e-10)


def test_switch_anticommuting_pair():
    model = build_quantum_switch(PAULI_X, PAULI_Z)
    target = DensityMatrix.maximally_mixed((2,))
    p_plus, p_minus = control_interference_probabilities(model, target, _plus())
    assert p_minus == pytest.approx(1.0, abs=1e-10)
    oracle = _oracle_interference(PAULI_X, PAULI_Z, np.eye(2) / 2,
                                  np.array([1.0, 1.0]) / math.sqrt(2))
    assert (p_plus, p_minus) == pytest.approx(oracle, abs=1e-10)


def test_switch_commuting_pair():
    model = build_quantum_switch(PAULI_Z, PAULI_Z)
    p_plus, p_minus = control_interference_probabilities(
        model, DensityMatrix.maximally_mixed((2,)), _plus())
    assert p_plus == pytest.approx(1.0, abs=1e-10)


def test_switch_matches_oracle_for_random_unitaries():
    rng = np.random.default_rng(16)
    for _ in range(5):
        u_a, u_b = random_unitary(2, rng), random_unitary(2, rng)
        target = random_density_matrix(2, rng)
        model = build_quantum_switch(u_a, u_b)
        got = control_interference_probabilities(model, target, _plus())
        want = _oracle_interference(u_a, u_b, target.entries,
                                    np.array([1.0, 1.0]) / math.sqrt(2))
        assert got == pytest.approx(want, abs=1e-10)


def test_switch_unitary_is_unitary():
    rng = np.random.default_rng(17)
    model = build_quantum_switch(random_unitary(2, rng), random_unitary(2, rng))
    s = switch_unitary(model).entries
    np.testing.assert_allclose(s @ s.conj().T, np.eye(4), atol=1e-12)


def test_switch_rejects_nonunitary():
    with pytest.raises(ValueError):
        build_quantum_switch(np.diag([1.0, 0.5]), PAULI_Z)


def test_definite_control_reduces_to_composition():
    model = build_quantum_switch(PAULI_X, PAULI_Z)
    rng = np.random.default_rng(18)
    rho = random_density_matrix(2, rng)
    out0 = apply_channel(traced_target_channel(model, projector(ket(0))), rho)
    u = PAULI_Z @ PAULI_X
    np.testing.assert_allclose(out0.entries, u @ rho.entries @ u.conj().T, atol=1e-12)
    out1 = apply_channel(traced_target_channel(model, projector(ket(1))), rho)
    v = PAULI_X @ PAULI_Z
    np.testing.assert_allclose(out1.entries, v @ rho.entries @ v.conj().T, atol=1e-12)


def test_switch_process_matrix_is_valid():
    rng = np.random.default_rng(19)
    model = build_quantum_switch(random_unitary(2, rng), random_unitary(2, rng))
    for ctrl in (projector(ket(0)), projector(ket(1)), _plus()):
        assert validate_ocb(switch_process_matrix(model, ctrl)).valid


def test_switch_output_dims():
    model = build_quantum_switch(PAULI_X, PAULI_Z)
    out = switch_output(model, DensityMatrix.maximally_mixed((2,)), _plus())
    assert out.dims == (2, 2)


# ---------------------------------------------------------------------------
# alternating vs coherent order
# ---------------------------------------------------------------------------

def test_ac_vs_ico_no_noise_is_flat():
    rep = ac_vs_ico_entropy(PAULI_X, PAULI_Z, noise=0.0, steps=5)
    assert max(rep.ac_entropies) < 1e-10
    assert max(rep.ico_entropies) < 1e-10


def test_ac_vs_ico_full_noise_saturates():
    rep = ac_vs_ico_entropy(PAULI_X, PAULI_Z, noise=1.0, steps=1)
    assert rep.final_ac == pytest.approx(2.0, abs=1e-10)
    assert rep.final_ico == pytest.approx(2.0, abs=1e-10)


def test_ac_vs_ico_series_monotone():
    rep = ac_vs_ico_entropy(PAULI_X, PAULI_Z, noise=0.05, steps=20)
    assert len(rep.ac_entropies) == 21
    for seq in (rep.ac_entropies, rep.ico_entropies):
        diffs = np.diff(seq)
        assert diffs.min() > -1e-10


def test_ac_vs_ico_rejects_bad_args():
    with pytest.raises(ValueError):
        ac_vs_ico_entropy(PAULI_X, PAULI_Z, noise=1.5, steps=3)
    with pytest.raises(ValueError):
        ac_vs_ico_entropy(PAULI_X, PAULI_Z, noise=0.1, steps=0)
