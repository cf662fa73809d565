"""The palette codecs over 8x8 blocks and the frame-to-frame palette handoff.

Four schemes share one skeleton: a 2x2 sub-block is compressed only when all
four of its pixels encode through the current palette, otherwise the four
raw 32-bit pixels are stored. They differ in how codes are sized:

  DCP      fixed log2(palette size) bits per pixel, 1-bit sub-block status
  ADCP     DCP with the palette size chosen per frame from the ranked
           frequencies (predicted-size minimization)
  VDCP     per-sub-block width v in 0..6, the 3-bit status selects the top
           2**v palette entries (7 marks a raw sub-block)
  HuffDCP  canonical prefix codes built from the frequencies, 1-bit status

Each scheme has a per-block bitstream codec (exact, used for round-trip
verification and the frame container) and a vectorized whole-frame cost
engine used by the benchmark runner; tests pin the two against each other.

Payload bits are packed most-significant-bit first, sub-blocks in raster
order; raw sub-blocks store their four packed pixels the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitio import BitReader, BitWriter
from .fvc import Fvc
from .huffman import HuffmanTable, build_table
from .palette import Ccd, Rccd, build_ccd
from .surface import assemble_sub_blocks, sub_block_pixels

RAW_SUB_BLOCK_BITS = 128      # 4 pixels x 32 bits
VDCP_RAW = 7                  # 3-bit status value marking a raw sub-block
VDCP_MAX_CCD = 64             # widths 0..6 address at most 64 entries

# v for a zero-based max palette index m: the smallest v with 2**v > m.
_VDCP_WIDTH = np.array([m.bit_length() for m in range(VDCP_MAX_CCD)], dtype=np.int64)

SUB_SCHEMES = ("DCP", "ADCP", "VDCP", "HUFFDCP")


@dataclass
class CompressedBlock:
    scheme: str
    csb: tuple[int, ...]       # 16 status entries, sub-block raster order
    payload: bytes
    payload_bits: int


# ---------------------------------------------------------------------------
# Per-block bitstream codecs

def dcp_compress_block(block: np.ndarray, ccd: Ccd | None) -> CompressedBlock:
    groups = sub_block_pixels(block).tolist()
    bits = ccd.bits_per_code if ccd is not None and len(ccd) else None
    w = BitWriter()
    csb = []
    for group in groups:
        codes = None
        if bits is not None:
            codes = [ccd.encode(p) for p in group]
            if any(c is None for c in codes):
                codes = None
        if codes is None:
            csb.append(0)
            for p in group:
                w.write(p, 32)
        else:
            csb.append(1)
            for c in codes:
                w.write(c, bits)
    return CompressedBlock("DCP", tuple(csb), w.to_bytes(), w.bit_length)


def dcp_decompress_block(comp: CompressedBlock, rccd: Rccd) -> np.ndarray:
    bits = rccd.bits_per_code
    r = BitReader(comp.payload, comp.payload_bits)
    groups = []
    for status in comp.csb:
        if status:
            groups.append([rccd.decode(r.read(bits)) for _ in range(4)])
        else:
            groups.append([r.read(32) for _ in range(4)])
    return assemble_sub_blocks(np.array(groups, dtype=np.uint32))


def vdcp_compress_block(block: np.ndarray, ccd: Ccd | None) -> CompressedBlock:
    if ccd is not None and len(ccd) > VDCP_MAX_CCD:
        raise ValueError(f"VDCP palette limited to {VDCP_MAX_CCD} entries, got {len(ccd)}")
    groups = sub_block_pixels(block).tolist()
    usable = ccd is not None and len(ccd) > 0
    w = BitWriter()
    csb = []
    for group in groups:
        codes = None
        if usable:
            codes = [ccd.encode(p) for p in group]
            if any(c is None for c in codes):
                codes = None
        if codes is None:
            csb.append(VDCP_RAW)
            for p in group:
                w.write(p, 32)
        else:
            v = max(codes).bit_length()
            csb.append(v)
            for c in codes:
                w.write(c, v)
    return CompressedBlock("VDCP", tuple(csb), w.to_bytes(), w.bit_length)


def vdcp_decompress_block(comp: CompressedBlock, rccd: Rccd) -> np.ndarray:
    r = BitReader(comp.payload, comp.payload_bits)
    groups = []
    for status in comp.csb:
        if status == VDCP_RAW:
            groups.append([r.read(32) for _ in range(4)])
        else:
            groups.append([rccd.decode(r.read(status)) for _ in range(4)])
    return assemble_sub_blocks(np.array(groups, dtype=np.uint32))


def huffdcp_compress_block(block: np.ndarray, table: HuffmanTable | None) -> CompressedBlock:
    groups = sub_block_pixels(block).tolist()
    usable = table is not None and len(table) > 0
    w = BitWriter()
    csb = []
    for group in groups:
        codes = None
        if usable:
            codes = [table.encode(p) for p in group]
            if any(c is None for c in codes):
                codes = None
        if codes is None:
            csb.append(0)
            for p in group:
                w.write(p, 32)
        else:
            csb.append(1)
            for code, length in codes:
                w.write(code, length)
    return CompressedBlock("HUFFDCP", tuple(csb), w.to_bytes(), w.bit_length)


def huffdcp_decompress_block(comp: CompressedBlock, table: HuffmanTable) -> np.ndarray:
    r = BitReader(comp.payload, comp.payload_bits)
    groups = []
    for status in comp.csb:
        if status:
            groups.append([table.decode_symbol(r) for _ in range(4)])
        else:
            groups.append([r.read(32) for _ in range(4)])
    return assemble_sub_blocks(np.array(groups, dtype=np.uint32))


# ---------------------------------------------------------------------------
# Adaptive palette sizing

def adcp_optimal_ccd_size(frequencies, frame_size_pixels: int,
                          pixel_size_bits: int = 32, max_size: int = 64) -> int:
    """Palette size 2**i minimizing the predicted compressed frame size.

    For each candidate i in 0..log2(max_size) the predictor charges the
    pixel mass covered by the top 2**i colors at i bits per pixel and the
    remainder at the raw pixel width; the initial candidate is the
    uncompressed frame, and ties keep the smaller palette. An empty
    frequency list returns 0, which disables compression.

    Frequencies must already be scaled to frame_size_pixels when they were
    collected under pixel sampling; cumulative mass is clamped to the frame
    so oversampled inputs cannot go negative.
    """
    freqs = list(frequencies)
    if not freqs:
        return 0
    best_bits = frame_size_pixels * pixel_size_bits
    opt = 0
    chosen = False
    cum = 0
    taken = 0
    for i in range(max_size.bit_length()):  # i = 0 .. log2(max_size)
        want = 1 << i
        while taken < min(want, len(freqs)):
            cum += freqs[taken]
            taken += 1
        covered = min(cum, frame_size_pixels)
        bits = covered * i + (frame_size_pixels - covered) * pixel_size_bits
        if bits < best_bits:
            best_bits = bits
            opt = i
            chosen = True
    return (1 << opt) if chosen else 1


# ---------------------------------------------------------------------------
# Vectorized whole-frame costs
#
# All engines return per-block *accounting* payload bits as an
# (nblocks_y, nblocks_x) int64 array. Padded pixels never count: a
# compressed sub-block with r live pixels charges bits_per_pixel * r and a
# raw one charges 32 * r. For fully live frames this equals the exact
# bitstream length of the per-block codecs.

def _sub_block_all(mask: np.ndarray) -> np.ndarray:
    h, w = mask.shape
    return mask.reshape(h // 2, 2, w // 2, 2).all(axis=(1, 3))


def _sub_block_sum(values: np.ndarray) -> np.ndarray:
    h, w = values.shape
    return values.reshape(h // 2, 2, w // 2, 2).sum(axis=(1, 3), dtype=np.int64)


def _block_sum(sb_values: np.ndarray) -> np.ndarray:
    h, w = sb_values.shape
    return sb_values.reshape(h // 4, 4, w // 4, 4).sum(axis=(1, 3), dtype=np.int64)


def dcp_frame_cost(padded: np.ndarray, sb_real: np.ndarray, ccd: Ccd | None) -> np.ndarray:
    if ccd is None or len(ccd) == 0:
        return _block_sum(32 * sb_real)
    _, hit = ccd.lookup(padded)
    compressible = _sub_block_all(hit)
    bits = np.where(compressible, ccd.bits_per_code * sb_real, 32 * sb_real)
    return _block_sum(bits)


def vdcp_frame_cost(padded: np.ndarray, sb_real: np.ndarray, ccd: Ccd | None) -> np.ndarray:
    if ccd is None or len(ccd) == 0:
        return _block_sum(32 * sb_real)
    if len(ccd) > VDCP_MAX_CCD:
        raise ValueError(f"VDCP palette limited to {VDCP_MAX_CCD} entries, got {len(ccd)}")
    codes, hit = ccd.lookup(padded)
    compressible = _sub_block_all(hit)
    h, w = codes.shape
    m = codes.reshape(h // 2, 2, w // 2, 2).max(axis=(1, 3))
    v = _VDCP_WIDTH[np.clip(m, 0, VDCP_MAX_CCD - 1)]
    bits = np.where(compressible, v * sb_real, 32 * sb_real)
    return _block_sum(bits)


def huffdcp_frame_cost(padded: np.ndarray, valid: np.ndarray, sb_real: np.ndarray,
                       table: HuffmanTable | None) -> np.ndarray:
    if table is None or len(table) == 0:
        return _block_sum(32 * sb_real)
    lens, hit = table.lookup(padded)
    compressible = _sub_block_all(hit)
    code_bits = _sub_block_sum(np.where(valid, lens, 0))
    bits = np.where(compressible, code_bits, 32 * sb_real)
    return _block_sum(bits)


# ---------------------------------------------------------------------------
# Frame-to-frame state

@dataclass
class CodecState:
    """Palette state crossing frame boundaries.

    Frame 0 of a trace only populates the collector; the palette built from
    it compresses the following frames. Under frame sampling with period N
    the collector is enabled on frames where index % N == 0 and the palette
    it produces serves the next N frames.
    """

    scheme: str
    fvc: Fvc
    frame_pixels: int
    frame_sampling: int = 1
    coverage_threshold: float | None = None
    ccd_size: int | None = None          # explicit size for DCP/VDCP/HUFFDCP
    ccd: Ccd | None = None
    huffman: HuffmanTable | None = None
    enabled: bool = True
    last_coverage: float = float("nan")
    last_ranked: list = field(default_factory=list)

    def collects_on(self, frame_index: int) -> bool:
        return frame_index % self.frame_sampling == 0


def advance_frame(state: CodecState) -> CodecState:
    """Close a collection frame: gate on coverage, rebuild, reset the FVC.

    When a coverage threshold is set and the collector's coverage falls
    below it, compression is disabled for the next period; blocks pass
    through raw while status metadata stays accounted.
    """
    fvc = state.fvc
    state.last_coverage = fvc.coverage() if fvc.samples_observed else 0.0
    if state.coverage_threshold is not None:
        state.enabled = state.last_coverage >= state.coverage_threshold
    ranked = fvc.ranked_values()
    state.last_ranked = ranked
    scheme = state.scheme
    if scheme == "ADCP":
        n = fvc.config.pixel_sampling
        freqs = [f * n for _, f in ranked]
        size = adcp_optimal_ccd_size(freqs, state.frame_pixels,
                                     max_size=fvc.entry_count)
        state.ccd = build_ccd(ranked, size)
    elif scheme in ("VDCP", "HDCP"):
        size = state.ccd_size or min(fvc.entry_count, VDCP_MAX_CCD)
        state.ccd = build_ccd(ranked, size)
    elif scheme == "HUFFDCP":
        top = ranked[:state.ccd_size] if state.ccd_size else ranked
        state.huffman = build_table(top) if top else None
    elif scheme == "DCP":
        size = state.ccd_size or fvc.entry_count
        state.ccd = build_ccd(ranked, size)
    else:
        raise ValueError(f"scheme {state.scheme!r} carries no palette state")
    fvc.reset()
    return state
