"""Dense state-vector simulation of named qubit registers.

Layout convention: registers occupy qubit blocks in declaration order, the
first register being the most significant. Inside a register, bit 1 is the
most significant bit, so the bit string ``"01"`` of a 2-qubit register is the
basis index 1. Bit positions passed to :func:`measure_bit` and
:func:`populations` are 1-based for the same reason.

All operations return new :class:`StateVector` objects; inputs are never
mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    IncompleteOracle,
    InvalidBit,
    InvalidValue,
    NotNormalized,
    UnknownRegister,
)

MAX_QUBITS = 24
NORM_TOL = 1e-9
# Probabilities below this are treated as exact zeros in reported distributions.
ZERO_PROB = 1e-14

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.registers]
        if len(set(names)) != len(names):
            raise InvalidValue(f"duplicate register names in {names}")
        for name, width in self.registers:
            if int(width) < 1:
                raise InvalidValue(f"register {name!r} has width {width} < 1")
        if self.total_qubits > MAX_QUBITS:
            raise InvalidValue(
                f"{self.total_qubits} qubits exceeds the cap of {MAX_QUBITS}"
            )

    @classmethod
    def of(cls, **widths: int) -> "RegisterLayout":
        """``RegisterLayout.of(K=2, X=2, V=1)``; keyword order is register order."""
        return cls(tuple((name, int(w)) for name, w in widths.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    @property
    def total_qubits(self) -> int:
        return sum(w for _, w in self.registers)

    @property
    def dim(self) -> int:
        return 1 << self.total_qubits

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(1 << w for _, w in self.registers)

    def index(self, name: str) -> int:
        for i, (reg, _) in enumerate(self.registers):
            if reg == name:
                return i
        raise UnknownRegister(f"no register named {name!r} in {list(self.names)}")

    def width(self, name: str) -> int:
        return self.registers[self.index(name)][1]

    def offset(self, name: str) -> int:
        """Global qubit position (0 = most significant) of the register's bit 1."""
        i = self.index(name)
        return sum(w for _, w in self.registers[:i])


class StateVector:
    """Normalized complex amplitudes over the computational basis of a layout."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes, *, check: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != layout.dim:
            raise InvalidValue(
                f"expected {layout.dim} amplitudes for {layout.total_qubits} qubits, got {amps.size}"
            )
        amps.setflags(write=False)
        self.layout = layout
        self.amplitudes = amps
        if check:
            norm = self.norm_squared()
            if abs(norm - 1.0) > NORM_TOL:
                raise NotNormalized(f"squared norm {norm!r} differs from 1")

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        """Amplitudes viewed with one axis per register."""
        return self.amplitudes.reshape(self.layout.shape)

    def amplitude(self, values: Mapping[str, str]) -> complex:
        return complex(self.amplitudes[_basis_index(self.layout, values)])

    def __repr__(self) -> str:
        terms = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > 1e-12)[:8]:
            terms.append(f"{self.amplitudes[idx]:.4g}|{_label(self.layout, int(idx))}>")
        more = " + ..." if np.count_nonzero(np.abs(self.amplitudes) > 1e-12) > 8 else ""
        return f"StateVector({' + '.join(terms)}{more})"


Bits = Union[str, int]


def to_bits(value: Bits, width: int) -> str:
    if isinstance(value, str):
        if len(value) != width or set(value) - {"0", "1"}:
            raise InvalidValue(f"{value!r} is not a {width}-bit string")
        return value
    if not 0 <= int(value) < (1 << width):
        raise InvalidValue(f"{value} does not fit in {width} bits")
    return format(int(value), f"0{width}b")


def _basis_index(layout: RegisterLayout, values: Mapping[str, Bits]) -> int:
    missing = set(layout.names) - set(values)
    extra = set(values) - set(layout.names)
    if extra:
        raise UnknownRegister(f"unknown registers {sorted(extra)}")
    if missing:
        raise InvalidValue(f"no value given for registers {sorted(missing)}")
    idx = 0
    for name, width in layout.registers:
        idx = (idx << width) | int(to_bits(values[name], width), 2)
    return idx


def _label(layout: RegisterLayout, idx: int) -> str:
    parts = []
    shift = layout.total_qubits
    for _, width in layout.registers:
        shift -= width
        parts.append(format((idx >> shift) & ((1 << width) - 1), f"0{width}b"))
    return ",".join(parts)


def new_basis_state(layout: RegisterLayout, values: Mapping[str, Bits]) -> StateVector:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[_basis_index(layout, values)] = 1.0
    return StateVector(layout, amps)


def from_amplitudes(layout: RegisterLayout, terms: Mapping[tuple, complex]) -> StateVector:
    """Build a state from ``{(bits_reg1, bits_reg2, ...): amplitude}``; normalizes."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for key, amp in terms.items():
        if isinstance(key, str):
            key = (key,)
        amps[_basis_index(layout, dict(zip(layout.names, key)))] += amp
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise InvalidValue("all amplitudes are zero")
    return StateVector(layout, amps / norm)


# -- gates -------------------------------------------------------------------


def apply_hadamard_all(state: StateVector, register: str) -> StateVector:
    layout = state.layout
    start = layout.offset(register)
    amps = state.amplitudes.copy()
    for q in range(start, start + layout.width(register)):
        a = amps.reshape(1 << q, 2, -1)
        lo, hi = a[:, 0, :].copy(), a[:, 1, :].copy()
        a[:, 0, :] = (lo + hi) * _SQRT_HALF
        a[:, 1, :] = (lo - hi) * _SQRT_HALF
    return StateVector(layout, amps, check=False)


def apply_pauli_x(state: StateVector, register: str) -> StateVector:
    """Flip every qubit of a register (used to prepare |1> before a Hadamard)."""
    layout = state.layout
    t = state.tensor()
    axis = layout.index(register)
    idx = np.arange(layout.shape[axis]) ^ (layout.shape[axis] - 1)
    return StateVector(layout, np.take(t, idx, axis=axis), check=False)


def as_table(table, n_inputs: int, out_width: int) -> np.ndarray:
    """Normalize an oracle table to an int array indexed by the joint input value.

    Accepts a sequence of length ``2**n_inputs`` or a mapping keyed by input
    bit strings or ints. Values may be ints or bit strings.
    """
    size = 1 << n_inputs
    if isinstance(table, Mapping):
        arr = np.full(size, -1, dtype=np.int64)
        for key, val in table.items():
            i = int(to_bits(key, n_inputs), 2) if isinstance(key, str) else int(key)
            if not 0 <= i < size:
                raise IncompleteOracle(f"input {key!r} outside {n_inputs}-bit range")
            arr[i] = int(val, 2) if isinstance(val, str) else int(val)
        if (arr < 0).any():
            missing = np.flatnonzero(arr < 0)[:4]
            raise IncompleteOracle(f"table has no value for inputs {missing.tolist()} ...")
    else:
        vals = [int(v, 2) if isinstance(v, str) else int(v) for v in table]
        if len(vals) != size:
            raise IncompleteOracle(f"table has {len(vals)} entries, expected {size}")
        arr = np.array(vals, dtype=np.int64)
    if ((arr < 0) | (arr >= (1 << out_width))).any():
        raise IncompleteOracle(f"table values must fit in {out_width} bits")
    return arr


def apply_function_oracle(
    state: StateVector, inputs: Sequence[str], output: str, table
) -> StateVector:
    """Apply |in>|o> -> |in>|o XOR table(in)>.

    The joint input value concatenates the ``inputs`` registers in the order
    given, first register most significant.
    """
    layout = state.layout
    in_axes = [layout.index(r) for r in inputs]
    out_axis = layout.index(output)
    if out_axis in in_axes or len(set(in_axes)) != len(in_axes):
        raise InvalidValue("oracle inputs must be distinct and exclude the output")
    n_in = sum(layout.width(r) for r in inputs)
    tab = as_table(table, n_in, layout.width(output))

    others = [a for a in range(len(layout.registers)) if a not in in_axes and a != out_axis]
    perm = others + in_axes + [out_axis]
    t = np.transpose(state.tensor(), perm)
    permuted_shape = t.shape
    n_out = layout.shape[out_axis]
    flat = t.reshape(-1, 1 << n_in, n_out)
    src = np.arange(n_out)[None, :] ^ tab[:, None]
    new = np.take_along_axis(flat, src[None, :, :], axis=2)
    new = new.reshape(permuted_shape).transpose(np.argsort(perm))
    return StateVector(layout, new, check=False)


def apply_diffusion(state: StateVector, register: str) -> StateVector:
    """Inversion about the mean, 2|u><u| - I, on one register."""
    layout = state.layout
    axis = layout.index(register)
    t = state.tensor()
    mean = t.mean(axis=axis, keepdims=True)
    return StateVector(layout, 2.0 * mean - t, check=False)


def apply_phases(state: StateVector, register: str, phases: Sequence[float]) -> StateVector:
    """Multiply each basis branch ``|v>`` of a register by ``exp(i*phases[v])``."""
    layout = state.layout
    axis = layout.index(register)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (layout.shape[axis],):
        raise InvalidValue(f"need {layout.shape[axis]} phases for register {register!r}")
    shape = [1] * len(layout.registers)
    shape[axis] = -1
    return StateVector(layout, state.tensor() * np.exp(1j * phases).reshape(shape), check=False)


# -- circuits ----------------------------------------------------------------


@dataclass(frozen=True)
class HadamardAll:
    register: str

    def inverse(self) -> "HadamardAll":
        return self


@dataclass(frozen=True)
class FunctionOracle:
    inputs: tuple[str, ...]
    output: str
    table: str  # key into Circuit.tables

    def inverse(self) -> "FunctionOracle":
        return self


@dataclass(frozen=True)
class Diffusion:
    register: str

    def inverse(self) -> "Diffusion":
        return self


Gate = Union[HadamardAll, FunctionOracle, Diffusion]


@dataclass
class Circuit:
    gates: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def add(self, gate: Gate) -> "Circuit":
        self.gates.append(gate)
        return self

    def oracle_count(self) -> int:
        return sum(isinstance(g, FunctionOracle) for g in self.gates)

    def inverse(self) -> "Circuit":
        return Circuit([g.inverse() for g in reversed(self.gates)], dict(self.tables))

    def __len__(self) -> int:
        return len(self.gates)


def apply_gate(state: StateVector, gate: Gate, tables: Mapping[str, object]) -> StateVector:
    if isinstance(gate, HadamardAll):
        return apply_hadamard_all(state, gate.register)
    if isinstance(gate, Diffusion):
        return apply_diffusion(state, gate.register)
    if isinstance(gate, FunctionOracle):
        if gate.table not in tables:
            raise IncompleteOracle(f"circuit has no table {gate.table!r}")
        return apply_function_oracle(state, gate.inputs, gate.output, tables[gate.table])
    raise TypeError(f"not a gate: {gate!r}")


@dataclass
class TrajectoryRecord:
    checkpoints: list  # [(time index, StateVector)]
    direction: str  # "forward" | "backward"

    def at(self, t: int) -> StateVector:
        for time, st in self.checkpoints:
            if time == t:
                return st
        raise KeyError(t)

    @property
    def initial(self) -> StateVector:
        return self.at(0)

    @property
    def final(self) -> StateVector:
        return max(self.checkpoints, key=lambda c: c[0])[1]


def run_circuit(state: StateVector, circuit: Circuit) -> TrajectoryRecord:
    """Forward evolution, one checkpoint per gate (time 0 is the input)."""
    checkpoints = [(0, state)]
    for t, gate in enumerate(circuit.gates, start=1):
        state = apply_gate(state, gate, circuit.tables)
        checkpoints.append((t, state))
    return TrajectoryRecord(checkpoints, "forward")


def backdate(final: StateVector, circuit: Circuit) -> TrajectoryRecord:
    """Propagate a (typically post-measurement) state back to time 0.

    Inverse gates are applied in reverse order; checkpoint ``t`` holds the
    backward-evolution state at the time the forward run held its ``t``-th
    checkpoint.
    """
    t = len(circuit)
    checkpoints = [(t, final)]
    state = final
    for gate in reversed(circuit.gates):
        state = apply_gate(state, gate.inverse(), circuit.tables)
        t -= 1
        checkpoints.append((t, state))
    return TrajectoryRecord(checkpoints, "backward")


# -- measurement -------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementOutcome:
    register: str
    bit: Union[int, None]
    value: str
    probability: float
    collapsed: StateVector


def _marginal(state: StateVector, registers: Sequence[str]) -> np.ndarray:
    layout = state.layout
    axes = [layout.index(r) for r in registers]
    probs = np.abs(state.tensor()) ** 2
    rest = tuple(a for a in range(len(layout.registers)) if a not in axes)
    marg = probs.sum(axis=rest) if rest else probs
    # sum keeps remaining axes in ascending order; reorder to the requested order
    order = np.argsort(np.argsort(axes))
    return np.transpose(marg, order) if len(axes) > 1 else marg


def distribution(state: StateVector, registers: Union[str, Sequence[str]]) -> dict:
    """Exact Born marginal over the listed registers.

    Keys are bit strings for a single register and tuples of bit strings for
    several. Outcomes with probability below ``ZERO_PROB`` are omitted.
    """
    if isinstance(registers, str):
        registers = [registers]
    registers = list(registers)
    marg = _marginal(state, registers)
    widths = [state.layout.width(r) for r in registers]
    out = {}
    for idx in zip(*np.nonzero(marg > ZERO_PROB)):
        key = tuple(format(int(v), f"0{w}b") for v, w in zip(idx, widths))
        out[key[0] if len(key) == 1 else key] = float(marg[idx])
    return out


def project(state: StateVector, register: str, value: Bits) -> MeasurementOutcome:
    """Reduction on a given register value (post-selection, no sampling)."""
    layout = state.layout
    axis = layout.index(register)
    bits = to_bits(value, layout.width(register))
    mask_shape = [1] * len(layout.registers)
    mask_shape[axis] = -1
    mask = (np.arange(layout.shape[axis]) == int(bits, 2)).reshape(mask_shape)
    return _collapse(state, state.tensor() * mask, register, None, bits)


def project_bit(state: StateVector, register: str, bit: int, value: int) -> MeasurementOutcome:
    layout = state.layout
    width = layout.width(register)
    if not 1 <= bit <= width:
        raise InvalidBit(f"bit {bit} outside 1..{width} of register {register!r}")
    if value not in (0, 1):
        raise InvalidValue(f"bit value must be 0 or 1, got {value!r}")
    q = layout.offset(register) + bit - 1
    a = state.amplitudes.reshape(1 << q, 2, -1).copy()
    a[:, 1 - value, :] = 0.0
    return _collapse(state, a, register, bit, str(value))


def _collapse(state, amps, register, bit, value) -> MeasurementOutcome:
    amps = np.asarray(amps).reshape(-1)
    p = float(np.vdot(amps, amps).real)
    if p <= ZERO_PROB:
        raise InvalidValue(f"outcome {value!r} of {register!r} has probability 0")
    collapsed = StateVector(state.layout, amps / math.sqrt(p))
    return MeasurementOutcome(register, bit, value, p, collapsed)


def _draw(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    return int(min(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"), len(cdf) - 1))


def measure_register(state: StateVector, register: str, rng: np.random.Generator) -> MeasurementOutcome:
    probs = _marginal(state, [register])
    return project(state, register, _draw(probs, rng))


def measure_bit(
    state: StateVector, register: str, bit: int, rng: np.random.Generator
) -> MeasurementOutcome:
    p0, p1 = populations(state, register, bit)
    return project_bit(state, register, bit, _draw(np.array([p0, p1]), rng))


def sample_register(
    state: StateVector, register: str, rng: np.random.Generator, size: int
) -> list[str]:
    """``size`` independent Born samples from identical copies of ``state``."""
    probs = _marginal(state, [register])
    width = state.layout.width(register)
    draws = rng.choice(len(probs), size=size, p=probs / probs.sum())
    return [format(int(d), f"0{width}b") for d in draws]


# -- reduced states ----------------------------------------------------------


def reduced_density_matrix(state: StateVector, registers: Union[str, Sequence[str]]) -> np.ndarray:
    """Partial trace onto the listed registers (joint basis, first listed most significant)."""
    if isinstance(registers, str):
        registers = [registers]
    layout = state.layout
    axes = [layout.index(r) for r in registers]
    rest = [a for a in range(len(layout.registers)) if a not in axes]
    t = np.transpose(state.tensor(), axes + rest)
    d = int(np.prod([layout.shape[a] for a in axes]))
    m = t.reshape(d, -1)
    return m @ m.conj().T


def populations(state: StateVector, register: str, bit: int) -> tuple[float, float]:
    """Diagonal (p0, p1) of one qubit's reduced density operator."""
    layout = state.layout
    width = layout.width(register)
    if not 1 <= bit <= width:
        raise InvalidBit(f"bit {bit} outside 1..{width} of register {register!r}")
    q = layout.offset(register) + bit - 1
    probs = (np.abs(state.amplitudes) ** 2).reshape(1 << q, 2, -1).sum(axis=(0, 2))
    return float(probs[0]), float(probs[1])


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """<t|rho|t> for a pure target vector (normalized here)."""
    t = np.asarray(target, dtype=np.complex128)
    t = t / np.linalg.norm(t)
    return float(np.vdot(t, rho @ t).real)


def equal_up_to_phase(a: StateVector, b: StateVector, atol: float = 1e-10) -> bool:
    return max_deviation_up_to_phase(a.amplitudes, b.amplitudes) < atol


def max_deviation_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    i = int(np.argmax(np.abs(b)))
    if abs(a[i]) == 0:
        return float(np.max(np.abs(a - b)))
    phase = (a[i] / abs(a[i])) / (b[i] / abs(b[i]))
    return float(np.max(np.abs(a - phase * b)))


def uniform_vector(width: int, support: Iterable[int] | None = None) -> np.ndarray:
    """Uniform superposition over ``support`` (all values by default)."""
    v = np.zeros(1 << width, dtype=np.complex128)
    idx = list(range(1 << width)) if support is None else list(support)
    v[idx] = 1.0 / math.sqrt(len(idx))
    return v
