"""Deutsch, Grover and Simon in their conventional and extended forms.

The extended form puts the oracle's hidden parameter in a register ``K``
prepared in superposition, so a single circuit holds every instance of the
problem at once. Measuring ``K`` then picks the instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import qsim
from .errors import InvalidHiddenString, InvalidValue
from .gf2 import dot, gf2_solve
from .qsim import (
    Circuit,
    Diffusion,
    FunctionOracle,
    HadamardAll,
    RegisterLayout,
    StateVector,
)


@dataclass
class RunResult:
    answer: Optional[str]
    oracle_queries: int
    iterations: int
    success: bool
    # exact Born probability that the final readout gives the correct answer
    success_probability: Optional[float] = None
    samples: list = field(default_factory=list)


@dataclass
class ExtendedRun:
    k: str
    x: Optional[str]
    result: RunResult
    state: StateVector  # pre-measurement output state


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _minus_state(state: StateVector, register: str) -> StateVector:
    """Put a |0> ancilla into (|0> - |1>)/sqrt(2)."""
    return qsim.apply_hadamard_all(qsim.apply_pauli_x(state, register), register)


def _run(state: StateVector, circuit: Circuit) -> StateVector:
    return qsim.run_circuit(state, circuit).final


# -- Deutsch -----------------------------------------------------------------


@dataclass(frozen=True)
class DeutschFunction:
    """f_k on one bit, with k = f(0) f(1)."""

    k: str

    def __post_init__(self) -> None:
        qsim.to_bits(self.k, 2)

    @property
    def table(self) -> dict[int, int]:
        return {0: int(self.k[0]), 1: int(self.k[1])}

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def constant(self) -> bool:
        return self.k in ("00", "11")


def verdict(x_bit: str) -> str:
    return "constant" if x_bit == "0" else "balanced"


def deutsch_circuit(f: DeutschFunction) -> Circuit:
    c = Circuit(tables={"f": [f(0), f(1)]})
    c.add(FunctionOracle(("X",), "V", "f")).add(HadamardAll("X"))
    return c


def deutsch_input_state() -> StateVector:
    layout = RegisterLayout.of(X=1, V=1)
    st = qsim.new_basis_state(layout, {"X": "0", "V": "0"})
    return _minus_state(qsim.apply_hadamard_all(st, "X"), "V")


def deutsch_run(f: DeutschFunction, rng=None) -> RunResult:
    circuit = deutsch_circuit(f)
    out = _run(deutsch_input_state(), circuit)
    m = qsim.measure_register(out, "X", _rng(rng))
    answer = verdict(m.value)
    expected = "0" if f.constant else "1"
    p = qsim.distribution(out, "X").get(expected, 0.0)
    return RunResult(answer, circuit.oracle_count(), 1, answer == verdict(expected), p)


def deutsch_joint_table() -> list[int]:
    """f(k, x) = f_k(x) indexed by the joint value k*2 + x."""
    return [int(format(k, "02b")[x]) for k in range(4) for x in range(2)]


def deutsch_extended_setup() -> tuple[StateVector, Circuit]:
    layout = RegisterLayout.of(K=2, X=1, V=1)
    st = qsim.new_basis_state(layout, {"K": "00", "X": "0", "V": "0"})
    st = qsim.apply_hadamard_all(qsim.apply_hadamard_all(st, "K"), "X")
    st = _minus_state(st, "V")
    c = Circuit(tables={"f": deutsch_joint_table()})
    c.add(FunctionOracle(("K", "X"), "V", "f")).add(HadamardAll("X"))
    return st, c


def deutsch_extended_run(rng=None, k_phases=None) -> ExtendedRun:
    rng = _rng(rng)
    st, circuit = deutsch_extended_setup()
    if k_phases is not None:
        st = qsim.apply_phases(st, "K", k_phases)
    out = _run(st, circuit)
    mk = qsim.measure_register(out, "K", rng)
    mx = qsim.measure_register(mk.collapsed, "X", rng)
    f = DeutschFunction(mk.value)
    ok = verdict(mx.value) == ("constant" if f.constant else "balanced")
    res = RunResult(verdict(mx.value), circuit.oracle_count(), 1, ok, mx.probability)
    return ExtendedRun(mk.value, mx.value, res, out)


# -- Grover ------------------------------------------------------------------


@dataclass(frozen=True)
class GroverInstance:
    n: int
    k: str

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidValue("n must be >= 1")
        qsim.to_bits(self.k, self.n)

    def delta(self, x: int) -> int:
        return int(x == int(self.k, 2))


def grover_iterations(n: int) -> int:
    """floor(pi/4 * sqrt(2**n)): the oracle-call count of the exact optimum for n <= 12."""
    if n < 1:
        raise InvalidValue("n must be >= 1")
    return max(1, int(math.floor(math.pi / 4 * math.sqrt(2**n))))


def grover_circuit(inputs: tuple[str, ...], table, iterations: int, search: str = "X") -> Circuit:
    c = Circuit(tables={"delta": table})
    for _ in range(iterations):
        c.add(FunctionOracle(inputs, "V", "delta")).add(Diffusion(search))
    return c


def grover_input_state(n: int) -> StateVector:
    layout = RegisterLayout.of(X=n, V=1)
    st = qsim.new_basis_state(layout, {"X": 0, "V": 0})
    return _minus_state(qsim.apply_hadamard_all(st, "X"), "V")


def grover_output_state(inst: GroverInstance, iterations: Optional[int] = None) -> tuple[StateVector, Circuit]:
    its = grover_iterations(inst.n) if iterations is None else iterations
    table = [inst.delta(x) for x in range(1 << inst.n)]
    circuit = grover_circuit(("X",), table, its)
    return _run(grover_input_state(inst.n), circuit), circuit


def grover_run(inst: GroverInstance, rng=None, iterations: Optional[int] = None) -> RunResult:
    if inst.n > 12:
        raise InvalidValue("grover_run is capped at n = 12")
    out, circuit = grover_output_state(inst, iterations)
    m = qsim.measure_register(out, "X", _rng(rng))
    p = qsim.distribution(out, "X").get(inst.k, 0.0)
    its = len(circuit) // 2
    return RunResult(m.value, circuit.oracle_count(), its, m.value == inst.k, p)


def grover_success_probability(n: int, iterations: int) -> float:
    """Exact success probability, identical for every k by symmetry."""
    out, _ = grover_output_state(GroverInstance(n, "0" * n), iterations)
    return qsim.distribution(out, "X").get("0" * n, 0.0)


def grover_extended_setup(n: int) -> tuple[StateVector, Circuit]:
    layout = RegisterLayout.of(K=n, X=n, V=1)
    st = qsim.new_basis_state(layout, {"K": 0, "X": 0, "V": 0})
    st = qsim.apply_hadamard_all(qsim.apply_hadamard_all(st, "K"), "X")
    st = _minus_state(st, "V")
    size = 1 << n
    table = (np.arange(size)[:, None] == np.arange(size)[None, :]).astype(int).reshape(-1)
    return st, grover_circuit(("K", "X"), table, grover_iterations(n))


def grover_extended_run(n: int, rng=None, k_phases=None) -> ExtendedRun:
    if n > 8:
        raise InvalidValue("grover_extended_run is capped at n = 8")
    rng = _rng(rng)
    st, circuit = grover_extended_setup(n)
    if k_phases is not None:
        st = qsim.apply_phases(st, "K", k_phases)
    out = _run(st, circuit)
    mk = qsim.measure_register(out, "K", rng)
    mx = qsim.measure_register(mk.collapsed, "X", rng)
    p = qsim.distribution(mk.collapsed, "X").get(mk.value, 0.0)
    res = RunResult(mx.value, circuit.oracle_count(), len(circuit) // 2, mx.value == mk.value, p)
    return ExtendedRun(mk.value, mx.value, res, out)


def grover_row_game(n: int, k: Optional[str] = None, rng=None) -> RunResult:
    """Grover over the rows of a sqrt(N) x sqrt(N) drawer matrix.

    The column (the last n/2 bits of k) is known in advance, so only the
    n/2-bit row index is searched.
    """
    if n % 2 or not 2 <= n <= 12:
        raise InvalidValue("row game needs an even n in 2..12")
    rng = _rng(rng)
    if k is None:
        k = format(int(rng.integers(1 << n)), f"0{n}b")
    half = n // 2
    row, col = k[:half], k[half:]
    res = grover_run(GroverInstance(half, row), rng)
    answer = res.answer + col
    return RunResult(answer, res.oracle_queries, res.iterations, answer == k, res.success_probability)


# -- Simon -------------------------------------------------------------------


@dataclass(frozen=True)
class SimonInstance:
    n: int
    k: str
    table: tuple[int, ...]  # f_k(x) for x = 0 .. 2**n - 1, values of m = n-1 bits

    @property
    def m(self) -> int:
        return max(1, self.n - 1)

    def __call__(self, x: int) -> int:
        return self.table[x]


def simon_build_function(n: int, k: str, rng=None, canonical: bool = False) -> SimonInstance:
    """Two-to-one function with f(x) = f(x XOR k).

    Cosets {x, x^k} are ordered by their smaller element. ``canonical`` gives
    coset j the value j; otherwise the values are a random permutation.
    """
    if not 2 <= n <= 10:
        raise InvalidValue("Simon instances need 2 <= n <= 10")
    kk = int(qsim.to_bits(k, n), 2)
    if kk == 0:
        raise InvalidHiddenString("hidden string must be nonzero")
    reps = [x for x in range(1 << n) if x < (x ^ kk)]
    values = np.arange(len(reps)) if canonical else _rng(rng).permutation(len(reps))
    table = [0] * (1 << n)
    for rep, v in zip(reps, values):
        table[rep] = table[rep ^ kk] = int(v)
    return SimonInstance(n, k, tuple(table))


def simon_setup(inst: SimonInstance) -> tuple[StateVector, Circuit]:
    layout = RegisterLayout.of(X=inst.n, F=inst.m)
    st = qsim.apply_hadamard_all(qsim.new_basis_state(layout, {"X": 0, "F": 0}), "X")
    c = Circuit(tables={"f": list(inst.table)})
    c.add(FunctionOracle(("X",), "F", "f")).add(HadamardAll("X"))
    return st, c


@lru_cache(maxsize=4096)
def simon_output_state(inst: SimonInstance) -> StateVector:
    st, c = simon_setup(inst)
    return _run(st, c)


def simon_sample_h(inst: SimonInstance, rng=None) -> str:
    return qsim.measure_register(simon_output_state(inst), "X", _rng(rng)).value


def simon_run(inst: SimonInstance, iterations: int, rng=None, prior: tuple[str, ...] = ()) -> RunResult:
    """Iterate the quantum subroutine and post-process over GF(2).

    Every iteration prepares the same state, so the ``iterations`` readouts
    are drawn as independent Born samples of one simulated output state.
    ``prior`` readouts (from an extended run) count toward the total.
    """
    if iterations < 1:
        raise InvalidValue("iterations must be >= 1")
    rng = _rng(rng)
    todo = iterations - len(prior)
    samples = list(prior)
    if todo > 0:
        samples += qsim.sample_register(simon_output_state(inst), "X", rng, todo)
    k = gf2_solve(samples, inst.n)
    _, c = simon_setup(inst)
    return RunResult(k, c.oracle_count() * iterations, iterations, k == inst.k, samples=samples)


def simon_joint_table(n: int) -> list[int]:
    """f(k, x) = f_k(x) using canonical tables; the k = 0 row is a dummy."""
    table = []
    for kk in range(1 << n):
        if kk == 0:
            table += [0] * (1 << n)
        else:
            table += list(simon_build_function(n, format(kk, f"0{n}b"), canonical=True).table)
    return table


def simon_extended_setup(n: int) -> tuple[StateVector, Circuit]:
    m = max(1, n - 1)
    layout = RegisterLayout.of(K=n, X=n, F=m)
    st = qsim.new_basis_state(layout, {"K": 0, "X": 0, "F": 0})
    st = qsim.apply_hadamard_all(st, "X")
    # K uniform over the nonzero strings only
    k_amps = qsim.uniform_vector(n, range(1, 1 << n))
    t = st.tensor()[0][None, ...] * k_amps.reshape(-1, 1, 1)
    st = StateVector(layout, t)
    c = Circuit(tables={"f": simon_joint_table(n)})
    c.add(FunctionOracle(("K", "X"), "F", "f")).add(HadamardAll("X"))
    return st, c


def simon_extended_run(n: int, iterations: int, rng=None, k_phases=None) -> ExtendedRun:
    if not 2 <= n <= 6:
        raise InvalidValue("simon_extended_run needs 2 <= n <= 6")
    rng = _rng(rng)
    st, c = simon_extended_setup(n)
    if k_phases is not None:
        st = qsim.apply_phases(st, "K", k_phases)
    out = _run(st, c)
    mk = qsim.measure_register(out, "K", rng)
    mx = qsim.measure_register(mk.collapsed, "X", rng)
    inst = simon_build_function(n, mk.value, canonical=True)
    res = simon_run(inst, iterations, rng, prior=(mx.value,))
    return ExtendedRun(mk.value, mx.value, res, out)


def orthogonal(h: str, k: str) -> bool:
    return dot(int(h, 2), int(k, 2)) == 0
