"""Bit/symbol mapping for unit-energy Gray-coded QAM (QPSK shipped)."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputShapeError

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ConstellationSpec:
    """Gray-labeled constellation with unit average symbol energy.

    `points[i]` is the symbol whose label is the bit tuple encoding integer i
    (most significant bit first). Shaped so square QAM beyond QPSK can be
    added without interface changes.
    """

    order: int
    bits_per_symbol: int
    points: tuple
    name: str = "qpsk"
    _pts: np.ndarray = field(init=False, repr=False, compare=False)
    _labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if len(pts) != self.order or 2**self.bits_per_symbol != self.order:
            raise InputShapeError("constellation size does not match its order")
        labels = np.array(
            [[(i >> (self.bits_per_symbol - 1 - k)) & 1 for k in range(self.bits_per_symbol)]
             for i in range(self.order)],
            dtype=np.uint8,
        )
        object.__setattr__(self, "_pts", pts)
        object.__setattr__(self, "_labels", labels)


def qpsk() -> ConstellationSpec:
    """Gray QPSK with Es = 1: bits (b0, b1) -> ((1-2*b0) + j*(1-2*b1))/sqrt(2)."""
    pts = tuple(
        complex(1 - 2 * b0, 1 - 2 * b1) / _SQRT2 for b0 in (0, 1) for b1 in (0, 1)
    )
    return ConstellationSpec(order=4, bits_per_symbol=2, points=pts)


def map_bits(bits: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Map a bit sequence to symbols, bits_per_symbol bits per point."""
    b = np.asarray(bits)
    if b.ndim != 1 or b.size % spec.bits_per_symbol:
        raise InputShapeError(
            f"bit count {b.size} not divisible by {spec.bits_per_symbol}"
        )
    groups = b.reshape(-1, spec.bits_per_symbol).astype(np.int64)
    weights = 1 << np.arange(spec.bits_per_symbol - 1, -1, -1)
    return spec._pts[groups @ weights]


def demap_hard(symbols: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Nearest-point hard decision; ties resolve to the lowest label index.

    Accepts any array shape; the trailing axis of symbols expands by
    bits_per_symbol in the returned bit array.
    """
    sym = np.asarray(symbols, dtype=np.complex128)
    d2 = np.abs(sym[..., None] - spec._pts) ** 2
    idx = np.argmin(d2, axis=-1)
    bits = spec._labels[idx]
    return bits.reshape(*sym.shape[:-1], sym.shape[-1] * spec.bits_per_symbol)


def count_bit_errors(tx_bits: np.ndarray, rx_bits: np.ndarray) -> int:
    tx = np.asarray(tx_bits)
    rx = np.asarray(rx_bits)
    if tx.shape != rx.shape:
        raise InputShapeError(f"bit sequences differ in shape: {tx.shape} vs {rx.shape}")
    return int(np.count_nonzero(tx != rx))
