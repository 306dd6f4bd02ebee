"""Linear algebra over GF(2) on bit-string rows.

Rows are n-bit strings, bit 1 leftmost (most significant), matching the
notation used for hidden strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ContradictorySystem, InvalidValue


def dot(a: int, b: int) -> int:
    """Inner product mod 2 of two bit vectors packed as ints."""
    return bin(a & b).count("1") & 1


def parse_row(row, n: int) -> int:
    if isinstance(row, str):
        if len(row) != n or set(row) - {"0", "1"}:
            raise InvalidValue(f"{row!r} is not an {n}-bit row")
        return int(row, 2)
    if not 0 <= int(row) < (1 << n):
        raise InvalidValue(f"row {row} does not fit in {n} bits")
    return int(row)


def reduce_rows(rows: Iterable[int], n: int) -> dict[int, int]:
    """Reduced row echelon basis as ``{pivot bit position: row}``.

    Bit positions count from the least significant end.
    """
    basis: dict[int, int] = {}
    for r in rows:
        for p, b in basis.items():
            if (r >> p) & 1:
                r ^= b
        if r == 0:
            continue
        p = r.bit_length() - 1
        for q in list(basis):
            if (basis[q] >> p) & 1:
                basis[q] ^= r
        basis[p] = r
    return basis


def rank(rows: Iterable, n: int) -> int:
    return len(reduce_rows((parse_row(r, n) for r in rows), n))


@dataclass
class Gf2System:
    n: int
    rows: list = field(default_factory=list)

    def add(self, row) -> None:
        self.rows.append(row)

    def rank(self) -> int:
        return rank(self.rows, self.n)

    def solve(self) -> Optional[str]:
        return gf2_solve(self.rows, self.n)


def gf2_solve(rows: Iterable, n: int) -> Optional[str]:
    """Return the unique nonzero k orthogonal to every row, or None.

    None means the rows have rank below n-1, so several candidates remain.
    A rank-n system admits only k = 0 and raises ContradictorySystem.
    """
    basis = reduce_rows((parse_row(r, n) for r in rows), n)
    r = len(basis)
    if r == n:
        raise ContradictorySystem(f"rank {n} system: no nonzero orthogonal string")
    if r < n - 1:
        return None
    free = next(p for p in range(n) if p not in basis)
    k = 1 << free
    # reduced form: each pivot row holds its pivot plus (possibly) the free bit
    for p, row in basis.items():
        if (row >> free) & 1:
            k |= 1 << p
    return format(k, f"0{n}b")
