"""Dense GF(2) vectors and matrices on Python int bitsets, plus an
incremental reduced-row-echelon solver used by every decoder.

Bit ``j`` of a row int is the coefficient of variable ``j``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class BitVector:
    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bits do not fit in the declared length")

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "BitVector":
        v = 0
        n = 0
        for n, b in enumerate(values, start=1):
            if b not in (0, 1):
                raise ValueError(f"not a bit: {b!r}")
            v |= b << (n - 1)
        return cls(v, n)

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(0, n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, j: int) -> int:
        if not -self.n <= j < self.n:
            raise IndexError(j)
        return (self.bits >> (j % self.n)) & 1

    def __iter__(self):
        b = self.bits
        for _ in range(self.n):
            yield b & 1
            b >>= 1

    def to_list(self) -> list[int]:
        return list(self)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVector(self.bits ^ other.bits, self.n)

    def dot(self, other: "BitVector") -> int:
        return parity(self.bits & other.bits)

    def weight(self) -> int:
        return self.bits.bit_count()


def parity(x: int) -> int:
    return x.bit_count() & 1


class BitMatrix:
    """Row-major GF(2) matrix; each row is packed into one int."""

    def __init__(self, rows: Iterable[int], cols: int):
        self.rows = list(rows)
        self.cols = cols
        limit = 1 << cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row wider than matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.cols

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls([1 << j for j in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls([0] * rows, cols)

    @classmethod
    def random(cls, rows: int, cols: int, rng: random.Random) -> "BitMatrix":
        return cls([rng.getrandbits(cols) if cols else 0 for _ in range(rows)], cols)

    @classmethod
    def from_lists(cls, data: list[list[int]]) -> "BitMatrix":
        cols = len(data[0]) if data else 0
        return cls([BitVector.from_list(r).bits for r in data], cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def matvec(self, v: BitVector) -> BitVector:
        return BitVector.from_list(parity(r & v.bits) for r in self.rows)

    def rank(self) -> int:
        return rank(self)


def rank(m: BitMatrix | list[int]) -> int:
    """GF(2) rank by plain Gaussian elimination (the batch reference)."""
    rows = list(m.rows if isinstance(m, BitMatrix) else m)
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = r
                break
            r ^= p
    return len(pivots)


def batch_solve(rows: list[int], rhs: list[int]) -> dict[int, int]:
    """Variables pinned down by the system, via full elimination. Reference path."""
    pivots: dict[int, tuple[int, int]] = {}
    for r, b in zip(rows, rhs):
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = (r, b)
                break
            pr, pb = pivots[top]
            r ^= pr
            b ^= pb
        else:
            if b:
                raise InconsistentSystem("batch system is inconsistent")
    # back substitution to reduced form
    for top in sorted(pivots):
        r, b = pivots[top]
        j = top
        while True:
            rest = r & ((1 << j) - 1)
            if not rest:
                break
            j = rest.bit_length() - 1
            if j in pivots:
                pr, pb = pivots[j]
                r ^= pr
                b ^= pb
        pivots[top] = (r, b)
    return {top: b for top, (r, b) in pivots.items() if r == 1 << top}


class InsertOutcome(enum.Enum):
    INDEPENDENT = "independent"
    REDUNDANT = "redundant"
    INCONSISTENT = "inconsistent"


class InconsistentSystem(RuntimeError):
    """An equation contradicted earlier ones. Erasures never flip bits, so
    this always means a harness bug."""


def _words(x: int) -> list[tuple[int, int]]:
    """(index, value) of the non-zero 64-bit words of ``x``."""
    lo = ((x & -x).bit_length() - 1) >> 6
    nb = (x.bit_length() + 63) >> 6
    mv = memoryview(x.to_bytes(nb * 8, "little")).cast("Q")
    return [(w, mv[w]) for w in range(lo, nb) if mv[w]]


class _Component:
    # Rows live in a compact local column space: every 64-bit word of global
    # variables the component has touched gets its own local word. Rows are
    # packed as (local_row << 1) | rhs so one XOR updates both sides; keys
    # are local pivot columns.
    __slots__ = ("gwords", "wmap", "support", "rows", "pivots")

    def __init__(self):
        self.gwords: list[int] = []
        self.wmap: dict[int, int] = {}
        self.support = 0  # global mask of unresolved variables seen here
        self.rows: dict[int, int] = {}
        self.pivots = 0

    def to_local(self, row: int, words=None) -> int:
        out = 0
        wmap = self.wmap
        for gw, v in words if words is not None else _words(row):
            lw = wmap.get(gw)
            if lw is None:
                lw = wmap[gw] = len(self.gwords)
                self.gwords.append(gw)
            out |= v << (lw << 6)
        return out

    def to_global(self, local: int) -> int:
        out = 0
        for lw, v in _words(local) if local else ():
            out |= v << (self.gwords[lw] << 6)
        return out

    def var(self, q: int) -> int:
        return (self.gwords[q >> 6] << 6) | (q & 63)

    def absorb(self, other: "_Component") -> None:
        # supports are disjoint, so other's RREF rows stay reduced here
        for q, e in other.rows.items():
            local = self.to_local(other.to_global(e >> 1))
            v = other.var(q)
            lq = (self.wmap[v >> 6] << 6) | (v & 63)
            self.rows[lq] = (local << 1) | (e & 1)
            self.pivots |= 1 << lq
        self.support |= other.support


class IncrementalSolver:
    """GF(2) system kept in reduced row-echelon form, one insert at a time.

    Variables are non-negative ints. Rows over disjoint sets of unresolved
    variables live in separate components so elimination stays local.
    A variable is *resolved* once a reduced row is a single unit vector;
    in RREF that test is complete, so resolution never lags the span.
    """

    def __init__(self):
        self._comps: list[_Component] = []
        # 64-bit word index -> components that have touched it; a cheap
        # prefilter before the exact support test
        self._owners: dict[int, list[_Component]] = {}
        self._known_mask = 0
        self._known_vals = 0
        self.resolved: dict[int, int] = {}
        self.last_resolved: list[int] = []
        self.rank = 0
        self.inserted = 0

    @staticmethod
    def _as_mask(coeffs) -> int:
        if isinstance(coeffs, int):
            if coeffs < 0:
                raise ValueError("negative coefficient mask")
            return coeffs
        if isinstance(coeffs, BitVector):
            return coeffs.bits
        mask = 0
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = ((v, 1) for v in coeffs)
        for v, c in items:
            if v < 0:
                raise ValueError(f"invalid variable id {v}")
            if c & 1:
                mask ^= 1 << v
        return mask

    def value(self, var: int) -> int | None:
        return self.resolved.get(var)

    def insert(self, coeffs, rhs: int) -> InsertOutcome:
        """Add ``sum(coeffs) = rhs``; ``coeffs`` is an int mask, a mapping
        var -> bit, or an iterable of var ids."""
        row = self._as_mask(coeffs)
        rhs &= 1
        self.inserted += 1
        self.last_resolved = []
        hit = row & self._known_mask
        if hit:
            rhs ^= parity(hit & self._known_vals)
            row ^= hit
        if not row:
            return self._degenerate(rhs)

        owners = self._owners
        words = _words(row)
        cands: dict[int, _Component] = {}
        for w, _ in words:
            for c in owners.get(w, ()):
                cands[id(c)] = c
        touching = [c for c in cands.values() if c.support & row]
        if not touching:
            comp = _Component()
            self._comps.append(comp)
        elif len(touching) == 1:
            comp = touching[0]
        else:
            comp = max(touching, key=lambda c: len(c.rows))
            for other in touching:
                if other is not comp:
                    n0 = len(comp.gwords)
                    comp.absorb(other)
                    self._drop(other)
                    self._register(comp, n0)
        comp.support |= row

        rows = comp.rows
        n0 = len(comp.gwords)
        e = (comp.to_local(row, words) << 1) | rhs
        self._register(comp, n0)
        # RREF rows carry no other pivot columns, so each pivot is cleared once
        x = (e >> 1) & comp.pivots
        while x:
            q = x.bit_length() - 1
            e ^= rows[q]
            x ^= 1 << q
        if e <= 1:
            if not rows:
                self._drop(comp)
            return self._degenerate(e)

        local = e >> 1
        p = (local & -local).bit_length() - 1
        pb = 2 << p
        singles = []
        for q in [q for q, r in rows.items() if r & pb]:
            r = rows[q] ^ e
            rows[q] = r
            if (r >> 1) & ((r >> 1) - 1) == 0:
                singles.append(q)
        rows[p] = e
        comp.pivots |= 1 << p
        if local & (local - 1) == 0:
            singles.append(p)
        self.rank += 1

        if singles:
            add_mask = 0
            add_vals = 0
            for q in singles:
                b = rows.pop(q) & 1
                comp.pivots ^= 1 << q
                var = comp.var(q)
                add_mask |= 1 << var
                if b:
                    add_vals |= 1 << var
                self.resolved[var] = b
                self.last_resolved.append(var)
            self._known_mask |= add_mask
            self._known_vals |= add_vals
            comp.support &= ~add_mask
            if not rows:
                self._drop(comp)
        return InsertOutcome.INDEPENDENT

    def _register(self, comp: _Component, start: int) -> None:
        for gw in comp.gwords[start:]:
            self._owners.setdefault(gw, []).append(comp)

    def _drop(self, comp: _Component) -> None:
        self._comps.remove(comp)
        for gw in comp.gwords:
            lst = self._owners[gw]
            lst.remove(comp)
            if not lst:
                del self._owners[gw]

    def _degenerate(self, rhs: int) -> InsertOutcome:
        return InsertOutcome.INCONSISTENT if rhs else InsertOutcome.REDUNDANT

    def pending_rows(self) -> list[tuple[int, int]]:
        """Unresolved reduced rows as (global mask, rhs)."""
        out = []
        for c in self._comps:
            for e in c.rows.values():
                out.append((c.to_global(e >> 1), e & 1))
        return out

    def equation_rows(self) -> list[int]:
        """Basis of the inserted row space (global masks), resolved vars included."""
        rows = [r for r, _ in self.pending_rows()]
        m = self._known_mask
        while m:
            b = m & -m
            rows.append(b)
            m ^= b
        return rows


def solver_insert(s: IncrementalSolver, coeffs, rhs: int) -> InsertOutcome:
    return s.insert(coeffs, rhs)
