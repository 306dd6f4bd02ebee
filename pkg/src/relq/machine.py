"""Nondeterministic constraint machine over partial-OR (POR) gate networks.

A POR gate is satisfied when exactly one of its three slots is 0. Each gate
owns three moving parts, one per satisfying row: part ``j`` moves when slot
``j`` is the zero slot. A solution of the network is therefore the same thing
as a choice of one moving part per gate whose row labels agree on shared
variables. The machine produces a solution with probability proportional to
the mass it moves: ``q_mass`` for the input part plus the mass of every
selected part.

Gates, slots and parts are indexed from 0 here; ``part_label`` renders the
1-based ``X_{i,j}`` names.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import InvalidValue, Jammed

POR_ROWS: tuple[tuple[int, int, int], ...] = ((0, 1, 1), (1, 0, 1), (1, 1, 0))

MAX_VARS = 24
MAX_GATES = 32


@dataclass(frozen=True)
class Slot:
    var: int
    neg: bool = False


@dataclass(frozen=True)
class PorNetwork:
    num_vars: int
    gates: tuple[tuple[Slot, Slot, Slot], ...]
    var_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= self.num_vars <= MAX_VARS:
            raise InvalidValue(f"num_vars must be in 1..{MAX_VARS}")
        if len(self.gates) > MAX_GATES:
            raise InvalidValue(f"at most {MAX_GATES} gates")
        seen = set()
        for i, gate in enumerate(self.gates):
            if len(gate) != 3:
                raise InvalidValue(f"gate {i} has {len(gate)} slots, expected 3")
            for s in gate:
                if not 0 <= s.var < self.num_vars:
                    raise InvalidValue(f"gate {i} references variable {s.var}")
                seen.add(s.var)
        unused = sorted(set(range(self.num_vars)) - seen)
        if unused:
            # a free variable would break the selection <-> assignment bijection
            raise InvalidValue(f"variables {unused} appear in no gate")
        if self.var_names and len(self.var_names) != self.num_vars:
            raise InvalidValue("var_names length must equal num_vars")

    @classmethod
    def build(cls, gates: Sequence[Sequence], var_names: Sequence[str] = ()) -> "PorNetwork":
        """Gates as triples of variable ids, or of ``(id, neg)`` pairs."""
        norm = []
        for g in gates:
            norm.append(tuple(s if isinstance(s, Slot) else Slot(*s) if isinstance(s, tuple) else Slot(s) for s in g))
        n = 1 + max(s.var for g in norm for s in g)
        return cls(len(var_names) or n, tuple(norm), tuple(var_names))

    @property
    def num_gates(self) -> int:
        return len(self.gates)

    def name(self, var: int) -> str:
        return self.var_names[var] if self.var_names else f"v{var}"


@dataclass(frozen=True)
class MachineSpec:
    network: PorNetwork
    part_masses: tuple[tuple[float, float, float], ...]
    q_mass: float = 0.0

    def __post_init__(self) -> None:
        if len(self.part_masses) != self.network.num_gates:
            raise InvalidValue("need one mass triple per gate")
        for i, triple in enumerate(self.part_masses):
            if len(triple) != 3:
                raise InvalidValue(f"gate {i} needs 3 part masses")
            if any(not np.isfinite(m) or m < 0 for m in triple):
                raise InvalidValue(f"gate {i} masses must be finite and >= 0")
            if all(m == 0 for m in triple):
                raise InvalidValue(f"gate {i} has three massless parts")
        if not np.isfinite(self.q_mass) or self.q_mass < 0:
            raise InvalidValue("q_mass must be finite and >= 0")

    @classmethod
    def unit(cls, network: PorNetwork, q_mass: float = 0.0) -> "MachineSpec":
        return cls(network, tuple((1.0, 1.0, 1.0) for _ in network.gates), q_mass)


Assignment = tuple[int, ...]  # one bit per variable id
PartSelection = tuple[int, ...]  # chosen part per gate


def slot_value(assignment: Assignment, slot: Slot) -> int:
    return assignment[slot.var] ^ int(slot.neg)


def satisfies(network: PorNetwork, assignment: Assignment) -> bool:
    return all(
        tuple(slot_value(assignment, s) for s in g) in POR_ROWS for g in network.gates
    )


def enumerate_solutions(network: PorNetwork, chunk: int = 1 << 18) -> list[Assignment]:
    """Exhaustive scan of all 2**num_vars assignments (variable 0 is the top bit)."""
    nv = network.num_vars
    found = []
    for start in range(0, 1 << nv, chunk):
        idx = np.arange(start, min(start + chunk, 1 << nv), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for g in network.gates:
            zeros = np.zeros(idx.shape, dtype=np.int8)
            for s in g:
                bit = (idx >> (nv - 1 - s.var)) & 1
                zeros += (bit ^ int(s.neg)) == 0
            ok &= zeros == 1
        for v in idx[ok]:
            found.append(tuple(int(c) for c in format(int(v), f"0{nv}b")))
    return found


def selection_of(network: PorNetwork, assignment: Assignment) -> PartSelection:
    """The parts that move for a satisfying assignment."""
    sel = []
    for g in network.gates:
        row = tuple(slot_value(assignment, s) for s in g)
        sel.append(POR_ROWS.index(row))
    return tuple(sel)


def all_selections(network: PorNetwork) -> Iterator[PartSelection]:
    return itertools.product(range(3), repeat=network.num_gates)


# -- wires -------------------------------------------------------------------


@dataclass(frozen=True)
class LinearEquation:
    """sum of ``lhs`` part coordinates == sum of ``rhs`` part coordinates."""

    lhs: tuple[tuple[int, int], ...]
    rhs: tuple[tuple[int, int], ...]

    def holds(self, coords: dict, tol: float = 0.0) -> bool:
        left = sum(coords.get(p, 0.0) for p in self.lhs)
        right = sum(coords.get(p, 0.0) for p in self.rhs)
        return abs(left - right) <= tol

    def __str__(self) -> str:
        def side(parts):
            return " + ".join(part_label(*p) for p in parts) or "0"

        return f"{side(self.lhs)} = {side(self.rhs)}"


def part_label(gate: int, part: int) -> str:
    return f"X_{{{gate + 1},{part + 1}}}"


def wire_equations(
    network: PorNetwork, wire: tuple[int, int, int, int], complement: Optional[bool] = None
) -> list[LinearEquation]:
    """Equations on part coordinates enforcing the wire ``x[i][j] == x[h][l]``.

    For each slot value b, the parts of gate i whose row puts b in slot j
    must move together with the parts of gate h whose row puts the matching
    value in slot l. The matching value is b itself unless the two slots carry
    opposite polarities of their variable (or ``complement`` says so).
    """
    i, j, h, l = wire
    for g, s in ((i, j), (h, l)):
        if not (0 <= g < network.num_gates and 0 <= s < 3):
            raise InvalidValue(f"no slot ({g}, {s}) in the network")
    if complement is None:
        complement = network.gates[i][j].neg != network.gates[h][l].neg
    eqs = []
    for b in (0, 1):
        lhs = tuple((i, p) for p, row in enumerate(POR_ROWS) if row[j] == b)
        rhs = tuple((h, p) for p, row in enumerate(POR_ROWS) if row[l] == b ^ int(complement))
        eqs.append(LinearEquation(lhs, rhs))
    return eqs


def network_wires(network: PorNetwork) -> list[tuple[int, int, int, int]]:
    """Wires implied by shared variables: first occurrence to every later one."""
    first: dict[int, tuple[int, int]] = {}
    wires = []
    for i, g in enumerate(network.gates):
        for j, s in enumerate(g):
            if s.var in first:
                wires.append(first[s.var] + (i, j))
            else:
                first[s.var] = (i, j)
    return wires


def selection_coords(network: PorNetwork, sel: PartSelection, q: float = 1.0) -> dict:
    return {(i, p): (q if p == sel[i] else 0.0) for i in range(network.num_gates) for p in range(3)}


def _merge_labels(network: PorNetwork, sel: PartSelection) -> Optional[Assignment]:
    values: list[Optional[int]] = [None] * network.num_vars
    for i, (g, part) in enumerate(zip(network.gates, sel)):
        for slot, v in zip(g, POR_ROWS[part]):
            val = v ^ int(slot.neg)
            if values[slot.var] is None:
                values[slot.var] = val
            elif values[slot.var] != val:
                return None
    return tuple(values)  # type: ignore[arg-type]


def selection_consistent(network: PorNetwork, sel: PartSelection) -> Optional[Assignment]:
    """Assignment induced by a part selection, or None when the parts conflict.

    Both the label merge and the wire equations are evaluated; they must agree.
    """
    if len(sel) != network.num_gates or any(p not in (0, 1, 2) for p in sel):
        raise InvalidValue("selection needs one part index in 0..2 per gate")
    merged = _merge_labels(network, sel)
    coords = selection_coords(network, sel)
    wired = all(eq.holds(coords) for w in network_wires(network) for eq in wire_equations(network, w))
    if wired != (merged is not None):
        raise AssertionError(f"wire equations and label merge disagree on {sel}")
    return merged


def conserved_sums(network: PorNetwork, sel: PartSelection, var: int, q: float = 1.0) -> list[float]:
    """Per occurrence of ``var``: summed coordinates of parts labelling it 0."""
    coords = selection_coords(network, sel, q)
    sums = []
    for i, g in enumerate(network.gates):
        for j, s in enumerate(g):
            if s.var == var:
                zero_slot_value = int(s.neg)  # slot value that means var == 0
                sums.append(sum(coords[(i, p)] for p, row in enumerate(POR_ROWS) if row[j] == zero_slot_value))
    return sums


# -- statistics --------------------------------------------------------------


@dataclass
class SolutionDistribution:
    entries: list  # [(Assignment, probability)]
    weights: list = field(default_factory=list)  # exact Fraction weights

    def as_dict(self) -> dict:
        return dict(self.entries)


def solution_weight(spec: MachineSpec, assignment: Assignment) -> Fraction:
    sel = selection_of(spec.network, assignment)
    w = Fraction(spec.q_mass)
    for i, part in enumerate(sel):
        w += Fraction(spec.part_masses[i][part])
    return w


def exact_distribution(spec: MachineSpec) -> SolutionDistribution:
    sols = enumerate_solutions(spec.network)
    if not sols:
        raise Jammed("the network has no solution; the machine is jammed")
    weights = [solution_weight(spec, a) for a in sols]
    z = sum(weights)
    if z == 0:
        raise InvalidValue("every solution moves zero mass")
    return SolutionDistribution([(a, float(w / z)) for a, w in zip(sols, weights)], weights)


def sample_solution(spec: MachineSpec, rng: np.random.Generator, size: Optional[int] = None):
    dist = exact_distribution(spec)
    probs = np.array([p for _, p in dist.entries])
    picks = rng.choice(len(probs), size=size if size is not None else 1, p=probs / probs.sum())
    out = [dist.entries[int(i)][0] for i in picks]
    return out if size is not None else out[0]


# -- the two-part NOT machine ------------------------------------------------


@dataclass
class NotMachineRun:
    x: int
    y: int
    before: tuple[float, float]  # (X/Q, Y/Q) before the motion
    after: tuple[float, float]
    p_x_moves: float


def not_machine_probability(masses: tuple[float, float], q_mass: float = 0.0) -> float:
    mx, my = masses
    if mx < 0 or my < 0 or mx + my <= 0:
        raise InvalidValue("NOT machine needs non-negative masses with a positive sum")
    return (q_mass + mx) / (2 * q_mass + mx + my)


def not_machine(masses: tuple[float, float], q_mass: float, rng: np.random.Generator) -> NotMachineRun:
    """Solve y = not x by moving either X or Y together with Q.

    With Q = 1 after the motion, exactly one of X, Y equals 1, which is the
    only way to satisfy Q = X + Y and Q**2 = X**2 + Y**2 together.
    """
    p = not_machine_probability(masses, q_mass)
    x_moves = rng.random() < p
    X, Y = (1.0, 0.0) if x_moves else (0.0, 1.0)
    Q = 1.0
    assert Q == X + Y and Q**2 == X**2 + Y**2
    return NotMachineRun(int(x_moves), int(not x_moves), (0.5, 0.5), (X / Q, Y / Q), p)


def not_network(m_x: float = 1.0, m_y: float = 1.0, q_mass: float = 0.0) -> MachineSpec:
    """y = not x as a POR network; ``m_x`` weighs the x = 1 solution.

    Gate 1 is POR(z, z, w), forcing z = 1 (and w = 0). Gate 0 is POR(x, y, z),
    so exactly one of x, y is 0. Parts that never move carry mass 0 or filler.
    """
    net = PorNetwork.build([(0, 1, 2), (2, 2, 3)], ("x", "y", "z", "w"))
    # gate 0: part 0 moves when x = 0 (the Y solution), part 1 when y = 0 (X solution)
    return MachineSpec(net, ((m_y, m_x, 0.0), (1.0, 0.0, 0.0)), q_mass)


# -- exactly-one-in-three SAT ------------------------------------------------


def compile_x3sat(clauses: Sequence[Sequence[int]], num_vars: Optional[int] = None, var_names=()) -> PorNetwork:
    """Exactly-one-true clauses over DIMACS literals (1-based, negative = negated).

    A literal is true exactly when its complemented slot is 0, so each clause
    becomes one POR gate on the complemented literals.
    """
    gates = []
    for c in clauses:
        if len(c) != 3 or any(l == 0 for l in c):
            raise InvalidValue(f"clause {c!r} must have three nonzero literals")
        gates.append(tuple(Slot(abs(l) - 1, neg=l > 0) for l in c))
    n = num_vars or max(abs(l) for c in clauses for l in c)
    return PorNetwork(n, tuple(gates), tuple(var_names))


def x3sat_satisfied(clauses: Sequence[Sequence[int]], assignment: Assignment) -> bool:
    def lit(l):
        v = assignment[abs(l) - 1]
        return v if l > 0 else 1 - v

    return all(sum(lit(l) for l in c) == 1 for c in clauses)
