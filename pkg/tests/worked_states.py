"""The worked-example states, written out term by term as explicit amplitudes.

Each builder returns a StateVector on the register layout used by the
simulator. V-register factors (|0> - |1>) are expanded into two terms.
"""

import math

from relq import qsim
from relq.qsim import RegisterLayout

S2 = math.sqrt(2)


def _with_minus(terms):
    """Expand each (regs...) -> a into (regs..., '0') -> a and (regs..., '1') -> -a."""
    out = {}
    for key, a in terms.items():
        out[key + ("0",)] = a
        out[key + ("1",)] = -a
    return out


def grover_in():
    layout = RegisterLayout.of(X=2, V=1)
    return qsim.from_amplitudes(layout, _with_minus({(x,): 1 / (2 * S2) for x in ("00", "01", "10", "11")}))


def grover_out():
    layout = RegisterLayout.of(X=2, V=1)
    return qsim.from_amplitudes(layout, _with_minus({("01",): 1 / S2}))


def grover_preparation():
    layout = RegisterLayout.of(K=2, X=2, V=1)
    xs = ("00", "01", "10", "11")
    return qsim.from_amplitudes(layout, _with_minus({(k, x): 1 / (4 * S2) for k in xs for x in xs}))


def grover_final():
    layout = RegisterLayout.of(K=2, X=2, V=1)
    return qsim.from_amplitudes(layout, _with_minus({(k, k): 1 / (2 * S2) for k in ("00", "01", "10", "11")}))


def deutsch_fin():
    layout = RegisterLayout.of(K=2, X=1, V=1)
    c = 1 / (2 * S2)
    return qsim.from_amplitudes(
        layout,
        _with_minus({("00", "0"): c, ("11", "0"): -c, ("01", "1"): c, ("10", "1"): -c}),
    )


def simon_initial():
    layout = RegisterLayout.of(X=2, F=1)
    return qsim.from_amplitudes(layout, {(x, "0"): 0.5 for x in ("00", "01", "10", "11")})


def simon_evaluation_k10():
    layout = RegisterLayout.of(X=2, F=1)
    return qsim.from_amplitudes(
        layout, {("00", "0"): 0.5, ("10", "0"): 0.5, ("01", "1"): 0.5, ("11", "1"): 0.5}
    )


def simon_hadamard_k10():
    layout = RegisterLayout.of(X=2, F=1)
    return qsim.from_amplitudes(
        layout, {("00", "0"): 0.5, ("01", "0"): 0.5, ("00", "1"): 0.5, ("01", "1"): -0.5}
    )


def simon_extended_branch(k):
    """The K = k line of the extended Simon output, as an (X, F) state."""
    h = {"01": "10", "10": "01", "11": "11"}[k]  # the nonzero string orthogonal to k
    layout = RegisterLayout.of(X=2, F=1)
    return qsim.from_amplitudes(
        layout, {("00", "0"): 0.5, (h, "0"): 0.5, ("00", "1"): 0.5, (h, "1"): -0.5}
    )


def simon_einitial():
    layout = RegisterLayout.of(K=2, X=2, F=1)
    xs = ("00", "01", "10", "11")
    return qsim.from_amplitudes(
        layout, {(k, x, "0"): 1 / (2 * math.sqrt(3)) for k in ("01", "10", "11") for x in xs}
    )
