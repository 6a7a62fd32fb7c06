"""Encoder and sequential decoder sessions shared by every code family."""

from __future__ import annotations

from .codes import descriptor, symbol_row
from .gf2 import BitVector, IncrementalSolver, InconsistentSystem, InsertOutcome, parity

ERASED = None


class NeedMoreMessage(ValueError):
    """The symbol references message bits that have not been supplied yet."""


class EncoderSession:
    def __init__(self, spec, q_key: int, message: BitVector, pad: bool = False):
        self.spec = spec
        self.q_key = q_key
        self.message = message
        self.pad = pad

    def encode(self, k: int, i: int) -> int:
        desc = descriptor(self.spec, self.q_key, k, i)
        top = max(hi for _, _, hi in desc.blocks)
        if top > self.message.n and not self.pad:
            raise NeedMoreMessage(f"symbol ({k},{i}) needs {top} message bits, have {self.message.n}")
        row = symbol_row(self.spec, self.q_key, k, i, desc)
        # bits past the end of the message are zero padding
        return parity(row & self.message.bits)


class DecoderSession:
    """Receives (k, i, bit-or-erasure) and decodes a growing message prefix.

    Variables at or past ``message_len`` are known zero padding and are
    dropped from every equation.
    """

    def __init__(self, spec, q_key: int, message_len: int):
        if message_len < 0:
            raise ValueError("message length must be non-negative")
        self.spec = spec
        self.q_key = q_key
        self.message_len = message_len
        self.solver = IncrementalSolver()
        self._mask = (1 << message_len) - 1
        self._prefix = 0
        self._block_size = getattr(spec, "K", 1)
        self._block_left: dict[int, int] = {}
        self.completed_blocks: list[int] = []

    @property
    def decoded_prefix(self) -> int:
        return self._prefix

    def _block_len(self, b: int) -> int:
        K = self._block_size
        return max(0, min(b * K, self.message_len) - (b - 1) * K)

    def ingest(self, k: int, i: int, observation) -> list[int]:
        """Insert one observation; returns the blocks completed by it."""
        if observation is ERASED:
            return []
        return self.ingest_row(symbol_row(self.spec, self.q_key, k, i), observation, (k, i))

    def ingest_row(self, row: int, bit: int, where=None) -> list[int]:
        """Insert an equation whose coefficients were already derived from Q."""
        outcome = self.solver.insert(row & self._mask, bit)
        if outcome is InsertOutcome.INCONSISTENT:
            raise InconsistentSystem(f"symbol {where} contradicts earlier symbols")
        if outcome is not InsertOutcome.INDEPENDENT or not self.solver.last_resolved:
            return []
        return self._note_resolved(self.solver.last_resolved)

    def _note_resolved(self, variables) -> list[int]:
        done = []
        K = self._block_size
        left = self._block_left
        for v in variables:
            b = v // K + 1
            n = left.get(b)
            if n is None:
                n = self._block_len(b)
            n -= 1
            left[b] = n
            if n == 0:
                done.append(b)
        self.completed_blocks.extend(done)
        resolved = self.solver.resolved
        p = self._prefix
        while p < self.message_len and p in resolved:
            p += 1
        self._prefix = p
        return done

    def value(self, m: int) -> int | None:
        """Decoded value of 1-based message bit ``m``, None while unresolved."""
        return self.solver.resolved.get(m - 1)

    def estimate(self) -> BitVector:
        """Best guess of the whole message; unresolved bits read as 0."""
        bits = 0
        for v, b in self.solver.resolved.items():
            if b:
                bits |= 1 << v
        return BitVector(bits, self.message_len)


def decoded_prefix(dec: DecoderSession) -> int:
    return dec.decoded_prefix


def encode(enc: EncoderSession, k: int, i: int) -> int:
    return enc.encode(k, i)


def decode_ingest(dec: DecoderSession, k: int, i: int, observation) -> list[int]:
    return dec.ingest(k, i, observation)
