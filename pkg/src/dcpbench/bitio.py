"""MSB-first bit packing used by the block codecs and the frame container."""

from __future__ import annotations


class CorruptStreamError(Exception):
    """A compressed payload is inconsistent with its metadata."""


class BitWriter:
    """Accumulates bits most-significant-first into a byte string."""

    def __init__(self):
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0 or value < 0 or value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nbits += nbits

    def write_unary(self, q: int) -> None:
        """q one-bits followed by a terminating zero."""
        self.write((1 << q) - 1, q)
        self.write(0, 1)

    def align_byte(self) -> None:
        pad = -self._nbits % 8
        if pad:
            self.write(0, pad)

    @property
    def bit_length(self) -> int:
        return self._nbits

    def to_bytes(self) -> bytes:
        nbytes = (self._nbits + 7) // 8
        acc = self._acc << (nbytes * 8 - self._nbits)
        return acc.to_bytes(nbytes, "big")


class BitReader:
    """Reads bits most-significant-first from a byte string."""

    def __init__(self, data: bytes, nbits: int | None = None):
        self._data = int.from_bytes(data, "big")
        self._total = len(data) * 8 if nbits is None else nbits
        if nbits is not None and nbits > len(data) * 8:
            raise ValueError("declared bit length exceeds buffer")
        # Drop the right-padding so bit 0 is the first written bit.
        self._data >>= len(data) * 8 - self._total
        self._pos = 0

    def read(self, nbits: int) -> int:
        if nbits < 0:
            raise ValueError("nbits must be non-negative")
        if self._pos + nbits > self._total:
            raise CorruptStreamError("bit stream exhausted")
        shift = self._total - self._pos - nbits
        self._pos += nbits
        return (self._data >> shift) & ((1 << nbits) - 1)

    def read_unary(self, cap: int = 4096) -> int:
        """Count of leading one-bits before a zero; `cap` guards corrupt data."""
        q = 0
        while self.read(1):
            q += 1
            if q > cap:
                raise CorruptStreamError("unary run exceeds cap")
        return q

    def align_byte(self) -> None:
        pad = -self._pos % 8
        if pad:
            self.read(pad)

    def tell(self) -> int:
        return self._pos

    def seek(self, pos: int) -> None:
        if pos < 0 or pos > self._total:
            raise ValueError("seek out of range")
        self._pos = pos

    @property
    def bits_left(self) -> int:
        return self._total - self._pos
