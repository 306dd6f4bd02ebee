import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relq import qsim
from relq.errors import IncompleteOracle, InvalidBit, InvalidValue, NotNormalized, UnknownRegister
from relq.qsim import Circuit, Diffusion, FunctionOracle, HadamardAll, RegisterLayout

import worked_states as ps

H1 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


# -- independent dense-matrix route ------------------------------------------


def kron_all(mats):
    return reduce(np.kron, mats)


def dense_register_op(layout, register, op):
    """Full-space matrix acting with ``op`` on one register, identity elsewhere."""
    mats = [op if name == register else np.eye(1 << w) for name, w in layout.registers]
    return kron_all(mats)


def dense_oracle(layout, inputs, output, table):
    """Permutation matrix of |in>|o> -> |in>|o ^ table(in)> built by index arithmetic."""
    dim = layout.dim
    U = np.zeros((dim, dim))
    widths = dict(layout.registers)
    for idx in range(dim):
        vals, shift = {}, layout.total_qubits
        for name, w in layout.registers:
            shift -= w
            vals[name] = (idx >> shift) & ((1 << w) - 1)
        joint = 0
        for r in inputs:
            joint = (joint << widths[r]) | vals[r]
        vals[output] ^= table[joint]
        new = 0
        for name, w in layout.registers:
            new = (new << w) | vals[name]
        U[new, idx] = 1
    return U


def random_state(layout, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return qsim.StateVector(layout, v / np.linalg.norm(v))


LAYOUT = RegisterLayout.of(K=2, X=2, V=1)


# -- layout / construction ---------------------------------------------------


def test_layout_rejects_duplicates_and_bad_widths():
    with pytest.raises(InvalidValue):
        RegisterLayout((("X", 1), ("X", 2)))
    with pytest.raises(InvalidValue):
        RegisterLayout.of(X=0)
    with pytest.raises(InvalidValue):
        RegisterLayout.of(A=12, B=13)


def test_basis_state_single_qubit():
    s = qsim.new_basis_state(RegisterLayout.of(X=1), {"X": "0"})
    assert np.array_equal(s.amplitudes, [1, 0])


def test_basis_state_multi_register_big_endian():
    s = qsim.new_basis_state(LAYOUT, {"K": "00", "X": "00", "V": "0"})
    assert s.amplitudes[0] == 1
    s = qsim.new_basis_state(LAYOUT, {"K": "10", "X": "01", "V": "1"})
    # K=10 -> 2, X=01 -> 1, V=1: index 2*8 + 1*2 + 1
    assert s.amplitudes[19] == 1


def test_basis_state_width_mismatch():
    with pytest.raises(InvalidValue):
        qsim.new_basis_state(RegisterLayout.of(X=1), {"X": "01"})


def test_unnormalized_amplitudes_rejected():
    with pytest.raises(NotNormalized):
        qsim.StateVector(RegisterLayout.of(X=1), [1, 1])


# -- hadamard ----------------------------------------------------------------


def test_hadamard_single_qubit():
    s = qsim.apply_hadamard_all(qsim.new_basis_state(RegisterLayout.of(X=1), {"X": 0}), "X")
    assert np.allclose(s.amplitudes, [1 / math.sqrt(2)] * 2)


def test_hadamard_two_qubits_gives_uniform_x_factor():
    layout = RegisterLayout.of(X=2, F=1)
    s = qsim.apply_hadamard_all(qsim.new_basis_state(layout, {"X": 0, "F": 0}), "X")
    assert qsim.max_deviation_up_to_phase(s.amplitudes, ps.simon_initial().amplitudes) < 1e-12


@pytest.mark.parametrize("register", ["K", "X", "V"])
def test_hadamard_matches_dense_matrix(register):
    s = random_state(LAYOUT, 1)
    w = LAYOUT.width(register)
    U = dense_register_op(LAYOUT, register, kron_all([H1] * w))
    assert np.allclose(qsim.apply_hadamard_all(s, register).amplitudes, U @ s.amplitudes, atol=1e-12)


def test_hadamard_twice_is_identity():
    s = random_state(LAYOUT, 2)
    back = qsim.apply_hadamard_all(qsim.apply_hadamard_all(s, "X"), "X")
    assert np.linalg.norm(back.amplitudes - s.amplitudes) < 1e-12


def test_unknown_register():
    s = random_state(LAYOUT, 3)
    with pytest.raises(UnknownRegister):
        qsim.apply_hadamard_all(s, "Q")
    with pytest.raises(UnknownRegister):
        qsim.apply_diffusion(s, "Q")


# -- oracle ------------------------------------------------------------------


def test_grover_oracle_then_diffusion_gives_out_state():
    s = ps.grover_in()
    table = [int(x == 0b01) for x in range(4)]
    s = qsim.apply_function_oracle(s, ["X"], "V", table)
    s = qsim.apply_diffusion(s, "X")
    assert qsim.max_deviation_up_to_phase(s.amplitudes, ps.grover_out().amplitudes) < 1e-12


def test_simon_oracle_gives_evaluation_state():
    s = qsim.apply_function_oracle(ps.simon_initial(), ["X"], "F", [0, 1, 0, 1])
    assert qsim.max_deviation_up_to_phase(s.amplitudes, ps.simon_evaluation_k10().amplitudes) < 1e-12


def test_oracle_matches_dense_permutation():
    rng = np.random.default_rng(4)
    table = rng.integers(0, 2, size=16).tolist()
    s = random_state(LAYOUT, 5)
    U = dense_oracle(LAYOUT, ["K", "X"], "V", table)
    got = qsim.apply_function_oracle(s, ["K", "X"], "V", table)
    assert np.allclose(got.amplitudes, U @ s.amplitudes, atol=1e-12)


def test_oracle_input_order_matters_and_matches_dense():
    layout = RegisterLayout.of(A=1, B=2, C=2)
    rng = np.random.default_rng(6)
    table = rng.integers(0, 4, size=8).tolist()
    s = random_state(layout, 7)
    U = dense_oracle(layout, ["B", "A"], "C", table)
    got = qsim.apply_function_oracle(s, ["B", "A"], "C", table)
    assert np.allclose(got.amplitudes, U @ s.amplitudes, atol=1e-12)


def test_oracle_twice_is_identity():
    table = list(range(4)) * 4
    layout = RegisterLayout.of(K=2, X=2, Y=2)
    s = random_state(layout, 8)
    twice = qsim.apply_function_oracle(qsim.apply_function_oracle(s, ["K", "X"], "Y", table), ["K", "X"], "Y", table)
    assert np.linalg.norm(twice.amplitudes - s.amplitudes) < 1e-12


def test_incomplete_oracle():
    s = random_state(LAYOUT, 9)
    with pytest.raises(IncompleteOracle):
        qsim.apply_function_oracle(s, ["X"], "V", [0, 1, 0])
    with pytest.raises(IncompleteOracle):
        qsim.apply_function_oracle(s, ["X"], "V", {"00": 1, "01": 0})
    with pytest.raises(IncompleteOracle):
        qsim.apply_function_oracle(s, ["X"], "V", [0, 1, 2, 0])


# -- diffusion ---------------------------------------------------------------


def test_diffusion_fixes_uniform_state():
    s = qsim.StateVector(RegisterLayout.of(X=3), qsim.uniform_vector(3))
    assert np.allclose(qsim.apply_diffusion(s, "X").amplitudes, s.amplitudes, atol=1e-12)


def test_diffusion_on_basis_vector():
    # oracle: the matrix 2|u><u| - I written out
    u = np.full(4, 0.5)
    D = 2 * np.outer(u, u) - np.eye(4)
    expected = D @ np.array([1, 0, 0, 0])
    assert np.allclose(expected, [-0.5, 0.5, 0.5, 0.5])
    s = qsim.new_basis_state(RegisterLayout.of(X=2), {"X": "00"})
    assert np.allclose(qsim.apply_diffusion(s, "X").amplitudes, expected, atol=1e-15)


def test_diffusion_matches_dense_and_is_self_inverse():
    u = np.full(4, 0.5)
    D = dense_register_op(LAYOUT, "X", 2 * np.outer(u, u) - np.eye(4))
    s = random_state(LAYOUT, 10)
    once = qsim.apply_diffusion(s, "X")
    assert np.allclose(once.amplitudes, D @ s.amplitudes, atol=1e-12)
    assert np.linalg.norm(qsim.apply_diffusion(once, "X").amplitudes - s.amplitudes) < 1e-12


# -- measurement -------------------------------------------------------------


def test_measure_out_state_gives_solution():
    m = qsim.measure_register(ps.grover_out(), "X", np.random.default_rng(0))
    assert m.value == "01"
    assert m.probability == pytest.approx(1.0, abs=1e-12)


def test_measure_uniform_register_probabilities():
    s = qsim.StateVector(RegisterLayout.of(X=2), qsim.uniform_vector(2))
    assert qsim.distribution(s, "X") == pytest.approx({v: 0.25 for v in ("00", "01", "10", "11")})
    m = qsim.measure_register(s, "X", np.random.default_rng(1))
    assert m.probability == pytest.approx(0.25)


def test_measure_simon_hadamard_state():
    s = ps.simon_hadamard_k10()
    for seed in range(20):
        m = qsim.measure_register(s, "X", np.random.default_rng(seed))
        assert m.value in ("00", "01")
        assert m.probability == pytest.approx(0.5)
        # collapsed state lives in the measured subspace only
        assert qsim.distribution(m.collapsed, "X") == pytest.approx({m.value: 1.0})


def test_measure_bit_on_final_state_collapses_to_column():
    m = qsim.project_bit(ps.grover_final(), "X", 2, 1)
    assert m.probability == pytest.approx(0.5)
    d = qsim.distribution(m.collapsed, ["K", "X"])
    assert d == pytest.approx({("01", "01"): 0.5, ("11", "11"): 0.5})


def test_measure_bit_of_basis_state_is_sharp():
    s = qsim.new_basis_state(LAYOUT, {"K": "10", "X": "01", "V": "0"})
    for bit, expected in ((1, "1"), (2, "0")):
        m = qsim.measure_bit(s, "K", bit, np.random.default_rng(0))
        assert (m.value, m.probability) == (expected, 1.0)


def test_measure_bit_out_of_range():
    s = qsim.new_basis_state(LAYOUT, {"K": "10", "X": "01", "V": "0"})
    with pytest.raises(InvalidBit):
        qsim.measure_bit(s, "X", 3, np.random.default_rng(0))
    with pytest.raises(InvalidBit):
        qsim.populations(s, "X", 0)


def test_distribution_of_final_state():
    d = qsim.distribution(ps.grover_final(), ["K", "X"])
    assert d == pytest.approx({(k, k): 0.25 for k in ("00", "01", "10", "11")}, abs=1e-12)


def test_distribution_respects_requested_register_order():
    s = qsim.new_basis_state(LAYOUT, {"K": "10", "X": "01", "V": "0"})
    assert qsim.distribution(s, ["X", "K"]) == {("01", "10"): 1.0}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_distribution_sums_to_one(seed):
    s = random_state(LAYOUT, seed)
    for regs in (["K"], ["X", "V"], ["K", "X", "V"]):
        assert abs(sum(qsim.distribution(s, regs).values()) - 1) < 1e-9


def test_born_histogram_converges():
    s = random_state(RegisterLayout.of(X=3), 11)
    exact = qsim.distribution(s, "X")
    T = 5000
    rng = np.random.default_rng(12)
    counts = {}
    for _ in range(T):
        v = qsim.measure_register(s, "X", rng).value
        counts[v] = counts.get(v, 0) + 1
    bound = 4 * math.sqrt(math.log(T) / T)
    assert max(abs(counts.get(v, 0) / T - p) for v, p in exact.items()) <= bound


# -- populations -------------------------------------------------------------


@pytest.mark.parametrize("delta", [0.0, 0.7, math.pi, 5.1])
def test_populations_entangled_pair(delta):
    layout = RegisterLayout.of(X=1, Y=1)
    s = qsim.from_amplitudes(layout, {("0", "1"): 1, ("1", "0"): np.exp(1j * delta)})
    assert qsim.populations(s, "X", 1) == pytest.approx((0.5, 0.5))
    assert qsim.populations(s, "Y", 1) == pytest.approx((0.5, 0.5))
    after = qsim.project(s, "X", "0").collapsed
    assert qsim.populations(after, "X", 1)[0] == pytest.approx(1.0)
    assert qsim.populations(after, "Y", 1)[0] == pytest.approx(0.0)


def test_populations_of_basis_one():
    s = qsim.new_basis_state(RegisterLayout.of(X=1), {"X": "1"})
    assert qsim.populations(s, "X", 1) == (0.0, 1.0)


# -- circuits and backdating -------------------------------------------------


def _random_circuit(seed):
    rng = np.random.default_rng(seed)
    c = Circuit(tables={"t": rng.integers(0, 2, size=16).tolist()})
    for _ in range(6):
        kind = rng.integers(3)
        if kind == 0:
            c.add(HadamardAll(str(rng.choice(["K", "X", "V"]))))
        elif kind == 1:
            c.add(Diffusion(str(rng.choice(["K", "X"]))))
        else:
            c.add(FunctionOracle(("K", "X"), "V", "t"))
    return c


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_forward_then_backdate_is_identity(seed):
    s = random_state(LAYOUT, seed)
    c = _random_circuit(seed)
    fwd = qsim.run_circuit(s, c)
    for _, st_ in fwd.checkpoints:
        assert abs(st_.norm_squared() - 1) < 1e-9
    back = qsim.backdate(fwd.final, c)
    assert np.max(np.abs(back.initial.amplitudes - s.amplitudes)) < 1e-10
    # every backward checkpoint retraces the forward one
    for t, st_ in fwd.checkpoints:
        assert np.max(np.abs(back.at(t).amplitudes - st_.amplitudes)) < 1e-10


def test_backdate_empty_circuit():
    s = random_state(LAYOUT, 13)
    rec = qsim.backdate(s, Circuit())
    assert rec.direction == "backward"
    assert rec.initial is s


def test_trajectory_checkpoints_differ_by_one_gate():
    s = random_state(LAYOUT, 14)
    c = _random_circuit(14)
    rec = qsim.run_circuit(s, c)
    times = [t for t, _ in rec.checkpoints]
    assert times == list(range(len(c) + 1))
    for (t0, a), (t1, b), g in zip(rec.checkpoints, rec.checkpoints[1:], c.gates):
        assert np.allclose(qsim.apply_gate(a, g, c.tables).amplitudes, b.amplitudes)


def test_phases_on_k_branches_leave_distributions_unchanged():
    s = ps.grover_preparation()
    rng = np.random.default_rng(15)
    s2 = qsim.apply_phases(s, "K", rng.uniform(0, 2 * np.pi, 4))
    assert qsim.distribution(s2, ["K", "X", "V"]) == pytest.approx(qsim.distribution(s, ["K", "X", "V"]))
