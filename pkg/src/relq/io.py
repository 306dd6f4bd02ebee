"""JSON formats: circuits, oracle instances, machine networks, reports.

Function tables are stored as arrays of lowercase hex strings, one per joint
input value in ascending order.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import jsonschema

from . import algorithms as alg
from .errors import NetworkFormatError
from .harness import ExperimentReport
from .machine import MachineSpec, PorNetwork, Slot
from .qsim import Circuit, Diffusion, FunctionOracle, HadamardAll, RegisterLayout

# -- tables ------------------------------------------------------------------


def table_to_hex(table: Iterable[int]) -> list[str]:
    return [format(int(v), "x") for v in table]


def table_from_hex(values: Sequence[str]) -> list[int]:
    return [int(v, 16) for v in values]


# -- circuits ----------------------------------------------------------------


def circuit_to_json(circuit: Circuit, layout: RegisterLayout) -> dict:
    gates = []
    for g in circuit.gates:
        if isinstance(g, HadamardAll):
            gates.append({"op": "hadamard_all", "register": g.register})
        elif isinstance(g, Diffusion):
            gates.append({"op": "diffusion", "register": g.register})
        else:
            gates.append({"op": "oracle", "inputs": list(g.inputs), "output": g.output, "table": g.table})
    return {
        "layout": [[name, width] for name, width in layout.registers],
        "tables": {tid: table_to_hex(t) for tid, t in circuit.tables.items()},
        "gates": gates,
    }


def circuit_from_json(doc: Mapping) -> tuple[Circuit, RegisterLayout]:
    layout = RegisterLayout(tuple((str(n), int(w)) for n, w in doc["layout"]))
    c = Circuit(tables={tid: table_from_hex(t) for tid, t in doc.get("tables", {}).items()})
    for g in doc["gates"]:
        op = g["op"]
        if op == "hadamard_all":
            c.add(HadamardAll(g["register"]))
        elif op == "diffusion":
            c.add(Diffusion(g["register"]))
        elif op == "oracle":
            c.add(FunctionOracle(tuple(g["inputs"]), g["output"], g["table"]))
        else:
            raise ValueError(f"unknown gate op {op!r}")
    return c, layout


# -- instances ---------------------------------------------------------------


def instance_to_json(inst) -> dict:
    if isinstance(inst, alg.SimonInstance):
        return {"problem": "simon", "n": inst.n, "k": inst.k, "table": table_to_hex(inst.table)}
    if isinstance(inst, alg.GroverInstance):
        return {"problem": "grover", "n": inst.n, "k": inst.k}
    if isinstance(inst, alg.DeutschFunction):
        return {"problem": "deutsch", "k": inst.k, "table": table_to_hex([inst(0), inst(1)])}
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def instance_from_json(doc: Mapping):
    problem = doc["problem"]
    if problem == "simon":
        inst = alg.SimonInstance(int(doc["n"]), doc["k"], tuple(table_from_hex(doc["table"])))
        kk = int(inst.k, 2)
        if kk == 0 or any(inst(x) != inst(x ^ kk) for x in range(1 << inst.n)):
            raise ValueError("table is not periodic under k")
        return inst
    if problem == "grover":
        return alg.GroverInstance(int(doc["n"]), doc["k"])
    if problem == "deutsch":
        return alg.DeutschFunction(doc["k"])
    raise ValueError(f"unknown problem {problem!r}")


# -- networks ----------------------------------------------------------------

_MASS = {"type": "number", "minimum": 0}
_TRIPLE = {"type": "array", "items": _MASS, "minItems": 3, "maxItems": 3}

NETWORK_SCHEMA = {
    "type": "object",
    "required": ["variables", "gates"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "variables": {"type": "array", "items": {"type": "string"}, "minItems": 1, "uniqueItems": True},
        "gates": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 3,
                "maxItems": 3,
                "items": {
                    "type": "object",
                    "required": ["var"],
                    "additionalProperties": False,
                    "properties": {"var": {"type": "string"}, "neg": {"type": "boolean"}},
                },
            },
        },
        "masses": {
            "oneOf": [
                {"type": "object", "patternProperties": {"^[0-9]+$": _TRIPLE}, "additionalProperties": False},
                {"type": "array", "items": _TRIPLE},
            ]
        },
        "q_mass": _MASS,
    },
}


def _json_path(parts: Iterable[Union[str, int]]) -> str:
    out = ""
    for p in parts:
        if isinstance(p, int) or str(p).isdigit():
            out += f"[{p}]"
        else:
            out += f".{p}" if out else str(p)
    return out or "$"


def _deepest(error: jsonschema.ValidationError) -> jsonschema.ValidationError:
    # oneOf failures hide the informative branch error in context
    best = error
    for sub in error.context or ():
        cand = _deepest(sub)
        if len(cand.absolute_path) > len(best.absolute_path):
            best = cand
    return best


def spec_from_json(doc) -> MachineSpec:
    try:
        jsonschema.validate(doc, NETWORK_SCHEMA)
    except jsonschema.ValidationError as e:
        err = _deepest(e)
        raise NetworkFormatError(_json_path(err.absolute_path), err.message) from None
    names = list(doc["variables"])
    index = {name: i for i, name in enumerate(names)}
    gates = []
    for gi, g in enumerate(doc["gates"]):
        slots = []
        for si, s in enumerate(g):
            if s["var"] not in index:
                raise NetworkFormatError(f"gates[{gi}][{si}].var", f"undeclared variable {s['var']!r}")
            slots.append(Slot(index[s["var"]], bool(s.get("neg", False))))
        gates.append(tuple(slots))
    masses_doc = doc.get("masses", {})
    if isinstance(masses_doc, list):
        masses_doc = {str(i): m for i, m in enumerate(masses_doc)}
    for key in masses_doc:
        if int(key) >= len(gates):
            raise NetworkFormatError(f"masses[{key}]", f"no gate {key}")
    masses = tuple(tuple(float(m) for m in masses_doc.get(str(i), (1.0, 1.0, 1.0))) for i in range(len(gates)))
    try:
        net = PorNetwork(len(names), tuple(gates), tuple(names))
    except ValueError as e:
        raise NetworkFormatError("gates", str(e)) from None
    try:
        return MachineSpec(net, masses, float(doc.get("q_mass", 0.0)))
    except ValueError as e:
        raise NetworkFormatError("masses", str(e)) from None


def spec_to_json(spec: MachineSpec) -> dict:
    net = spec.network
    names = [net.name(v) for v in range(net.num_vars)]
    return {
        "variables": names,
        "gates": [[{"var": names[s.var], "neg": s.neg} for s in g] for g in net.gates],
        "masses": {str(i): list(m) for i, m in enumerate(spec.part_masses)},
        "q_mass": spec.q_mass,
    }


def load_network(path: Union[str, Path]) -> MachineSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise NetworkFormatError("$", f"invalid JSON: {e}") from None
    return spec_from_json(doc)


def save_network(spec: MachineSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(spec_to_json(spec), indent=2) + "\n")


# -- reports -----------------------------------------------------------------


def report_to_json(report: ExperimentReport, timing: bool = False) -> dict:
    d = report.to_dict()
    if not timing:
        # wall-clock time would break byte-identical reruns
        d["runtime_ms"] = None
    return d


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return repr(v)  # shortest string that round-trips exactly
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def rows_to_csv(rows: Sequence[Mapping]) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [f for f in r if f not in fields]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({f: _cell(r.get(f)) for f in fields})
    return buf.getvalue()
