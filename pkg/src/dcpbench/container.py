"""On-disk container for a compressed frame: a round-trip test artifact.

Layout (integers little-endian unless they live in the bit streams):

  magic   4 bytes  b"FBC1"
  scheme  u8       tag from SCHEME_TAGS
  width   u32      real frame width in pixels
  height  u32      real frame height
  rccd    u16 entry count + count x u32 colors (zero entries for RAS/RED)
  table   HUFFDCP only: u16 count + count x (u32 color, u8 code length)
  csb     packed status entries, padded to a byte boundary; palette schemes
          store one entry per sub-block in global raster order, RAS/RED
          store one 2-bit entry per block in block raster order
  payload per-block bit streams in block raster order, each byte-aligned

Bandwidth accounting never reads container bytes; the burst model is the
measurement path and this format exists for losslessness audits.
"""

from __future__ import annotations

import numpy as np

from .bitio import BitReader, BitWriter, CorruptStreamError
from .dcp_codecs import (
    CompressedBlock,
    dcp_compress_block,
    dcp_decompress_block,
    huffdcp_compress_block,
    vdcp_compress_block,
    vdcp_decompress_block,
)
from .huffman import HuffmanTable
from .palette import Ccd, Rccd
from .reference_codecs import (
    GR_K_RAW,
    HDCP_RAS_BASE,
    RasBlock,
    RedBlock,
    golomb_rice_decode,
    hybrid_compress_block,
    ras_compress_block,
    ras_decompress_block,
    red_compress_block,
    red_decompress_block,
)
from .surface import BLOCK, Frame, block_refs

MAGIC = b"FBC1"
SCHEME_TAGS = {"DCP": 1, "ADCP": 2, "VDCP": 3, "HUFFDCP": 4, "RAS": 5, "RED": 6, "HDCP": 7}
_TAG_SCHEMES = {v: k for k, v in SCHEME_TAGS.items()}
_CSB_WIDTH = {"DCP": 1, "ADCP": 1, "VDCP": 3, "HUFFDCP": 1, "HDCP": 5}


def compress_frame(frame: Frame, scheme: str, ccd: Ccd | None = None,
                   table: HuffmanTable | None = None) -> bytes:
    if scheme not in SCHEME_TAGS:
        raise ValueError(f"unknown scheme {scheme!r}")
    padded, _ = frame.padded()
    refs = block_refs(frame.width, frame.height)
    nbx = padded.shape[1] // BLOCK

    blocks = []
    for x0, y0 in refs:
        block = padded[y0:y0 + BLOCK, x0:x0 + BLOCK]
        if scheme in ("DCP", "ADCP"):
            blocks.append(dcp_compress_block(block, ccd))
        elif scheme == "VDCP":
            blocks.append(vdcp_compress_block(block, ccd))
        elif scheme == "HUFFDCP":
            blocks.append(huffdcp_compress_block(block, table))
        elif scheme == "RAS":
            blocks.append(ras_compress_block(block))
        elif scheme == "RED":
            blocks.append(red_compress_block(block))
        else:
            blocks.append(hybrid_compress_block(block, ccd))

    out = bytearray()
    out += MAGIC
    out.append(SCHEME_TAGS[scheme])
    out += frame.width.to_bytes(4, "little")
    out += frame.height.to_bytes(4, "little")
    if ccd is not None and scheme in ("DCP", "ADCP", "VDCP", "HDCP"):
        out += ccd.rccd().to_bytes()
    else:
        out += Rccd([]).to_bytes()
    if scheme == "HUFFDCP":
        tbl = table if table is not None else HuffmanTable([], [])
        out += len(tbl).to_bytes(2, "little")
        for color, length in zip(tbl.colors.tolist(), tbl.lengths.tolist()):
            out += int(color).to_bytes(4, "little")
            out.append(int(length))

    csb = BitWriter()
    if scheme in ("RAS", "RED"):
        for blk in blocks:
            csb.write(blk.size_class if scheme == "RAS" else blk.cls, 2)
    else:
        width = _CSB_WIDTH[scheme]
        cells_y = padded.shape[0] // 2
        cells_x = padded.shape[1] // 2
        entries = np.zeros((cells_y, cells_x), dtype=np.int64)
        for ref_idx, blk in enumerate(blocks):
            by, bx = divmod(ref_idx, nbx)
            entries[by * 4:(by + 1) * 4, bx * 4:(bx + 1) * 4] = \
                np.array(blk.csb, dtype=np.int64).reshape(4, 4)
        for value in entries.reshape(-1).tolist():
            csb.write(value, width)
    csb.align_byte()
    out += csb.to_bytes()

    # Per-block payloads are byte-aligned already, so they just concatenate.
    payload = bytearray()
    for blk in blocks:
        if scheme == "RED":
            w = BitWriter()
            for color in blk.colors:
                w.write(color, 32)
            payload += w.to_bytes()
        elif scheme == "HDCP":
            inner = blk.vdcp if blk.winner == "VDCP" else blk.ras
            payload += inner.payload
        else:
            payload += blk.payload
    out += payload
    return bytes(out)


def decompress_frame(data: bytes) -> Frame:
    if data[:4] != MAGIC:
        raise CorruptStreamError("bad container magic")
    scheme = _TAG_SCHEMES.get(data[4])
    if scheme is None:
        raise CorruptStreamError(f"unknown scheme tag {data[4]}")
    width = int.from_bytes(data[5:9], "little")
    height = int.from_bytes(data[9:13], "little")
    pos = 13
    rccd = Rccd.from_bytes(data[pos:])
    pos += rccd.byte_size
    table = None
    if scheme == "HUFFDCP":
        count = int.from_bytes(data[pos:pos + 2], "little")
        pos += 2
        colors, lengths = [], []
        for _ in range(count):
            colors.append(int.from_bytes(data[pos:pos + 4], "little"))
            lengths.append(data[pos + 4])
            pos += 5
        table = HuffmanTable(colors, lengths)

    refs = block_refs(width, height)
    nbx, nby = -(-width // BLOCK), -(-height // BLOCK)

    if scheme in ("RAS", "RED"):
        csb_bits = len(refs) * 2
    else:
        csb_bits = (nby * 4) * (nbx * 4) * _CSB_WIDTH[scheme]
    csb_bytes = (csb_bits + 7) // 8
    csb = BitReader(data[pos:pos + csb_bytes])
    pos += csb_bytes
    if scheme in ("RAS", "RED"):
        statuses = [csb.read(2) for _ in refs]
        grid = None
    else:
        w = _CSB_WIDTH[scheme]
        grid = np.array([csb.read(w) for _ in range((nby * 4) * (nbx * 4))],
                        dtype=np.int64).reshape(nby * 4, nbx * 4)

    reader = BitReader(data[pos:])
    padded = np.zeros((nby * BLOCK, nbx * BLOCK), dtype=np.uint32)
    for ref_idx, (x0, y0) in enumerate(refs):
        by, bx = divmod(ref_idx, nbx)
        if scheme == "RED":
            block = red_decompress_block(
                _read_red_block(statuses[ref_idx], reader))
        elif scheme == "RAS":
            block = ras_decompress_block(
                _read_ras_block(statuses[ref_idx], reader))
        else:
            entries = tuple(grid[by * 4:(by + 1) * 4, bx * 4:(bx + 1) * 4].reshape(-1).tolist())
            block = _read_palette_block(scheme, entries, reader, rccd, table)
        reader.align_byte()
        padded[y0:y0 + BLOCK, x0:x0 + BLOCK] = block
    return Frame(padded[:height, :width].copy())


def _slice_bits(reader: BitReader, nbits: int) -> bytes:
    value = reader.read(nbits)
    nbytes = (nbits + 7) // 8
    return (value << (nbytes * 8 - nbits)).to_bytes(nbytes, "big")


def _read_palette_block(scheme, entries, reader, rccd, table) -> np.ndarray:
    if scheme == "HDCP" and entries[0] >= HDCP_RAS_BASE:
        return ras_decompress_block(
            _read_ras_block(entries[0] - HDCP_RAS_BASE, reader))
    if scheme == "HUFFDCP":
        return _read_huff_block(entries, reader, table)
    if scheme in ("DCP", "ADCP"):
        bits = sum(4 * rccd.bits_per_code if s else 128 for s in entries)
        comp = CompressedBlock(scheme, entries, _slice_bits(reader, bits), bits)
        return dcp_decompress_block(comp, rccd)
    bits = sum(128 if s == 7 else 4 * s for s in entries)
    comp = CompressedBlock(scheme, entries, _slice_bits(reader, bits), bits)
    return vdcp_decompress_block(comp, rccd)


def _read_huff_block(entries, reader, table) -> np.ndarray:
    # Prefix codes have data-dependent lengths, so decode in place.
    from .surface import assemble_sub_blocks
    groups = []
    for status in entries:
        if status:
            groups.append([table.decode_symbol(reader) for _ in range(4)])
        else:
            groups.append([reader.read(32) for _ in range(4)])
    return assemble_sub_blocks(np.array(groups, dtype=np.uint32))


def _read_red_block(status, reader) -> RedBlock:
    count = {0: 8, 1: 16, 2: 64}[status]
    return RedBlock(status, tuple(reader.read(32) for _ in range(count)))


def _read_ras_block(size_class: int, reader: BitReader) -> RasBlock:
    if size_class == 3:
        return RasBlock(3, _slice_bits(reader, 2048), 2048, 2048)
    # The stream is self-terminating: walk it once to measure, then slice.
    mark = reader.tell()
    for _ in range(4):
        k = reader.read(3)
        if k == GR_K_RAW:
            reader.read(64 * 8)
        else:
            for _ in range(64):
                golomb_rice_decode(reader, k)
    nbits = reader.tell() - mark
    reader.seek(mark)
    return RasBlock(size_class, _slice_bits(reader, nbits), nbits,
                    (size_class + 1) * 512)
