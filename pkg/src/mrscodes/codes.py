"""Code families and the symbol descriptors both ends derive from Q.

Message bit ``m`` (1-based) is solver variable ``m - 1``. Block ``b``
(1-based) holds variables ``(b-1)K .. bK-1``. Transmitter ``k`` and symbol
index ``i`` are 1-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

from . import exact
from .prf import derive_prefix, fold, prf_int, word
from .stepfn import GParameter, SamplingAtoms, StepFunction, rate_from_g, sampling_atoms


@dataclass(frozen=True)
class SymbolDescriptor:
    transmitter: int
    time: int
    blocks: tuple  # ((block_id, lo, hi), ...) with variable range [lo, hi)
    coeff_seed: tuple  # PRF coordinates ("coeff", k, i)
    systematic: int | None = None  # variable id when the symbol is an uncoded bit

    @property
    def width(self) -> int:
        return sum(hi - lo for _, lo, hi in self.blocks)

    @property
    def block_ids(self) -> tuple:
        out = []
        for b, _, _ in self.blocks:
            if b not in out:
                out.append(b)
        return tuple(out)


def _check_ki(spec, k: int, i: int):
    if not 1 <= k <= spec.d:
        raise ValueError(f"transmitter {k} out of range 1..{spec.d}")
    if i < 1:
        raise ValueError(f"time index must be >= 1, got {i}")


def _whole(b: int, K: int) -> tuple:
    return (b, (b - 1) * K, b * K)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class Blockwise:
    K: int
    L: int
    variant = "blockwise"

    def __post_init__(self):
        if self.K < 1 or self.L < self.K:
            raise ValueError("blockwise code needs 1 <= K <= L")

    @property
    def d(self) -> int:
        return 1

    def blocks_for(self, q_key: int, k: int, i: int) -> tuple:
        return (_whole(_ceil_div(i, self.L), self.K),)

    def systematic_var(self, k: int, i: int):
        return i - 1 if self.K == self.L else None

    def max_block(self, k: int, i: int) -> int:
        return _ceil_div(i, self.L)

    def g(self) -> GParameter:
        return GParameter((StepFunction.decreasing([Fraction(self.K, self.L)], [Fraction(self.L, self.K)]),))

    def theory(self) -> StepFunction:
        r = Fraction(self.K, self.L)
        return StepFunction.increasing([r], [r])

    def params(self) -> dict:
        return {"K": self.K, "L": self.L}


@dataclass(frozen=True)
class Multiplexed:
    """Two blockwise codes on the same blocks, interleaved: odd times carry
    code 1 (L1 symbols per block), even times code 2 (L2 per block)."""

    K: int
    L1: int
    L2: int
    variant = "multiplexed"

    def __post_init__(self):
        if self.K < 1 or self.L1 < self.K or not self.L1 < self.L2:
            raise ValueError("multiplexed code needs 1 <= K <= L1 < L2")

    @property
    def d(self) -> int:
        return 1

    def _split(self, i: int) -> tuple[int, int]:
        if i % 2:
            return 1, (i + 1) // 2
        return 2, i // 2

    def blocks_for(self, q_key: int, k: int, i: int) -> tuple:
        code, t = self._split(i)
        L = self.L1 if code == 1 else self.L2
        return (_whole(_ceil_div(t, L), self.K),)

    def systematic_var(self, k: int, i: int):
        code, t = self._split(i)
        return t - 1 if code == 1 and self.K == self.L1 else None

    def max_block(self, k: int, i: int) -> int:
        return _ceil_div(_ceil_div(i, 2), self.L1)

    def g(self) -> GParameter:
        K, L1, L2 = self.K, self.L1, self.L2
        return GParameter((StepFunction.decreasing(
            [Fraction(K, 2 * L2), Fraction(K, 2 * L1)],
            [Fraction(L1 + L2, K), Fraction(L1, K)]),))

    def theory(self) -> StepFunction:
        K, L1, L2 = self.K, self.L1, self.L2
        return StepFunction.increasing(
            [Fraction(K, L1 + L2), Fraction(K, L1)],
            [Fraction(K, 2 * L2), Fraction(K, 2 * L1)])

    def params(self) -> dict:
        return {"K": self.K, "L1": self.L1, "L2": self.L2}


@dataclass(frozen=True)
class Superposition:
    """Transmitter k draws a rate A from the law induced by g_k for every
    symbol and encodes block ceil(i * A / K)."""

    K: int
    g: GParameter
    variant = "superposition"
    _atoms: tuple = field(init=False, repr=False, compare=False)
    _ratios: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        g = self.g
        if isinstance(g, StepFunction):
            g = GParameter((g,))
        elif not isinstance(g, GParameter):
            g = GParameter(tuple(g))
        object.__setattr__(self, "g", g)
        atoms = tuple(sampling_atoms(c) for c in g.components)
        object.__setattr__(self, "_atoms", atoms)
        # block = ceil(i * p / (q * K)) for atom rate p/q, in integers
        ratios = []
        for a in atoms:
            rs = [Fraction(x) for x in a.rates]
            ratios.append(tuple((x.numerator, x.denominator * self.K) for x in rs))
        object.__setattr__(self, "_ratios", tuple(ratios))

    @property
    def d(self) -> int:
        return self.g.d

    def atoms(self, k: int) -> SamplingAtoms:
        return self._atoms[k - 1]

    def _rate_index(self, q_key: int, k: int, i: int) -> int:
        u = word(fold(derive_prefix(q_key, "rate", k), i), 0)
        return self._atoms[k - 1].index_for_word(u)

    def rate(self, q_key: int, k: int, i: int) -> Fraction:
        return Fraction(self._atoms[k - 1].rates[self._rate_index(q_key, k, i)])

    def blocks_for(self, q_key: int, k: int, i: int) -> tuple:
        p, qk = self._ratios[k - 1][self._rate_index(q_key, k, i)]
        b = max(1, -(-i * p // qk))
        return (_whole(b, self.K),)

    def systematic_var(self, k: int, i: int):
        return None

    def max_block(self, k: int, i: int) -> int:
        top = Fraction(self._atoms[k - 1].rates[-1])
        return max(1, math.ceil(i * top / self.K))

    def theory(self) -> StepFunction:
        if self.d != 1:
            raise ValueError("closed-form rate curve only for one transmitter")
        return rate_from_g(self.g.components[0])

    def params(self) -> dict:
        return {"K": self.K, "g": self.g.to_json()}


@dataclass(frozen=True)
class ExNonOpt:
    """Two-transmitter code mixing an old block with two new ones per super-slot of 4K times."""

    K: int
    variant = "exnonopt"

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")

    @property
    def d(self) -> int:
        return 2

    @property
    def slot_length(self) -> int:
        return 4 * self.K

    def block_ids(self, k: int, n: int) -> tuple:
        return (2 * n - 2 + k, 4 * n - 1 - k, 4 * n + 1 - k)

    def blocks_for(self, q_key: int, k: int, i: int) -> tuple:
        return _exnonopt_blocks(self.K, k, _ceil_div(i, 4 * self.K))

    def systematic_var(self, k: int, i: int):
        return None

    def max_block(self, k: int, i: int) -> int:
        return 4 * _ceil_div(i, 4 * self.K)

    def params(self) -> dict:
        return {"K": self.K}


@lru_cache(maxsize=4096)
def _exnonopt_blocks(K: int, k: int, n: int) -> tuple:
    ids = (2 * n - 2 + k, 4 * n - 1 - k, 4 * n + 1 - k)
    return tuple(_whole(b, K) for b in sorted(ids))


@dataclass(frozen=True)
class SubBlock:
    """Three-transmitter sub-block code.

    Each block is split into a first sub-block of gamma*K bits and the
    rest. S[a][b][j] gathers sub-block b of the r_a*L/K blocks in slot j.
    Transmitters 1 and 2 project S[1][1][j] + S[2][2][j]; transmitter 3
    projects S[2][1][j]. Transmitter k sends symbol_rates[k] symbols per
    time step, so its symbol i lives in slot ceil(i / (s_k L)).
    """

    K: int
    L: int
    w: tuple
    r1: object
    r2: object
    symbol_rates: tuple = (1, 1, 1)
    variant = "subblock"
    _ints: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = tuple(exact.num(x) for x in self.w)
        r1, r2 = exact.num(self.r1), exact.num(self.r2)
        if not all(isinstance(x, Fraction) for x in (*w, r1, r2)):
            w = tuple(exact.json_num(x) for x in w)
            r1, r2 = exact.json_num(r1), exact.json_num(r2)
        s = tuple(int(x) for x in self.symbol_rates)
        if len(w) != 3 or len(s) != 3:
            raise ValueError("sub-block code has exactly three transmitters")
        if any(x < 1 for x in s):
            raise ValueError("symbol rates must be >= 1")
        if self.K < 1 or self.L <= self.K:
            raise ValueError("sub-block code needs 1 <= K < L")
        if not r1 < r2:
            raise ValueError("sub-block code needs r1 < r2")
        if not w[2] < r2:
            raise ValueError("sub-block code needs w3 < r2")
        gamma = w[2] / r2
        for name, r in (("r1", r1), ("r2", r2)):
            if (r * self.L / self.K).denominator != 1:
                raise ValueError(f"{name} * L / K must be an integer")
        if (gamma * self.K).denominator != 1:
            raise ValueError("gamma * K must be an integer (gamma = w3 / r2)")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "symbol_rates", s)
        object.__setattr__(self, "_ints", (int(gamma * self.K), int(r1 * self.L / self.K),
                                           int(r2 * self.L / self.K)))

    @property
    def d(self) -> int:
        return 3

    @property
    def gamma(self) -> Fraction:
        return self.w[2] / self.r2

    @property
    def split(self) -> int:
        """Bits in the first sub-block of every block."""
        return self._ints[0]

    def blocks_per_slot(self, a: int) -> int:
        return self._ints[a]

    def super_block(self, a: int, b: int, j: int) -> tuple:
        """(block, lo, hi) pieces of S[a][b][j]."""
        return _super_block(self.K, self.split, self.blocks_per_slot(a), b, j)

    def slot(self, k: int, i: int) -> int:
        return _ceil_div(i, self.symbol_rates[k - 1] * self.L)

    def blocks_for(self, q_key: int, k: int, i: int) -> tuple:
        j = self.slot(k, i)
        if k == 3:
            return self.super_block(2, 1, j)
        return self.super_block(1, 1, j) + self.super_block(2, 2, j)

    def systematic_var(self, k: int, i: int):
        return None

    def max_block(self, k: int, i: int) -> int:
        return self.slot(k, i) * self.blocks_per_slot(2)

    def params(self) -> dict:
        return {"K": self.K, "L": self.L, "w": [exact.to_json(x) for x in self.w],
                "r1": exact.to_json(self.r1), "r2": exact.to_json(self.r2),
                "symbol_rates": list(self.symbol_rates)}


@lru_cache(maxsize=4096)
def _super_block(K: int, h: int, n: int, b: int, j: int) -> tuple:
    out = []
    for blk in range((j - 1) * n + 1, j * n + 1):
        base = (blk - 1) * K
        lo, hi = (base, base + h) if b == 1 else (base + h, base + K)
        if hi > lo:
            out.append((blk, lo, hi))
    return tuple(out)


CodeSpec = Blockwise | Multiplexed | Superposition | ExNonOpt | SubBlock

VARIANTS = {c.variant: c for c in (Blockwise, Multiplexed, Superposition, ExNonOpt, SubBlock)}


def default_warmup(spec) -> int:
    """Lossless super-slots granted before measuring; only the two-transmitter
    code leans on earlier blocks being decoded already."""
    return 1 if isinstance(spec, ExNonOpt) else 0


def slot_length(spec) -> int:
    """Time steps per warmup slot."""
    if isinstance(spec, ExNonOpt):
        return spec.slot_length
    if isinstance(spec, SubBlock):
        return spec.L
    if isinstance(spec, Blockwise):
        return spec.L
    if isinstance(spec, Multiplexed):
        return 2 * spec.L2
    return spec.K


def descriptor(spec, q_key: int, k: int, i: int) -> SymbolDescriptor:
    _check_ki(spec, k, i)
    return SymbolDescriptor(k, i, spec.blocks_for(q_key, k, i), ("coeff", k, i),
                            spec.systematic_var(k, i))


def symbol_row(spec, q_key: int, k: int, i: int, desc: SymbolDescriptor | None = None) -> int:
    """Coefficient mask over message variables for symbol (k, i)."""
    if desc is None:
        # hot path: same result as building the descriptor, minus the object
        _check_ki(spec, k, i)
        sv = spec.systematic_var(k, i)
        if sv is not None:
            return 1 << sv
        blocks = spec.blocks_for(q_key, k, i)
        label = "coeff"
    else:
        if desc.systematic is not None:
            return 1 << desc.systematic
        blocks = desc.blocks
        label, k, i = desc.coeff_seed
    if len(blocks) == 1:
        _, lo, hi = blocks[0]
        return prf_int(fold(derive_prefix(q_key, label, k), i), hi - lo) << lo
    bits = prf_int(fold(derive_prefix(q_key, label, k), i), sum(hi - lo for _, lo, hi in blocks))
    row = 0
    for _, lo, hi in blocks:
        n = hi - lo
        row |= (bits & ((1 << n) - 1)) << lo
        bits >>= n
    return row


def spec_to_json(spec) -> dict:
    return {"variant": spec.variant, **spec.params()}


def spec_from_json(obj: dict):
    if not isinstance(obj, dict):
        raise ValueError("code spec must be a JSON object")
    variant = obj.get("variant")
    if variant not in VARIANTS:
        raise ValueError(f"field 'variant' must be one of {sorted(VARIANTS)}, got {variant!r}")
    need = {
        "blockwise": ("K", "L"),
        "multiplexed": ("K", "L1", "L2"),
        "superposition": ("K", "g"),
        "exnonopt": ("K",),
        "subblock": ("K", "L", "w", "r1", "r2"),
    }[variant]
    for f in need:
        if f not in obj:
            raise ValueError(f"code spec is missing field {f!r}")
    if variant == "superposition":
        return Superposition(int(obj["K"]), GParameter.from_json(obj["g"]))
    if variant == "subblock":
        return SubBlock(int(obj["K"]), int(obj["L"]), tuple(exact.from_json(x) for x in obj["w"]),
                        exact.from_json(obj["r1"]), exact.from_json(obj["r2"]),
                        tuple(obj.get("symbol_rates", (1, 1, 1))))
    return VARIANTS[variant](**{f: int(obj[f]) for f in need})
