from fractions import Fraction

import numpy as np
import pytest

from conftest import block_pool, ccd_from_blocks

from dcpbench.dcp_codecs import (
    CodecState,
    adcp_optimal_ccd_size,
    advance_frame,
    dcp_compress_block,
    dcp_decompress_block,
    dcp_frame_cost,
    huffdcp_compress_block,
    huffdcp_decompress_block,
    huffdcp_frame_cost,
    vdcp_compress_block,
    vdcp_decompress_block,
    vdcp_frame_cost,
)
from dcpbench.fvc import Fvc, FvcConfig
from dcpbench.huffman import build_table
from dcpbench.palette import Ccd
from dcpbench.surface import Frame, sub_block_valid_counts


def test_dcp_uniform_block_384_bits():
    ccd = Ccd(np.arange(64, dtype=np.uint32))
    block = np.full((8, 8), 11, dtype=np.uint32)
    comp = dcp_compress_block(block, ccd)
    assert comp.payload_bits == 16 * 4 * 6 == 384
    assert comp.csb == (1,) * 16


def test_dcp_single_miss_leaves_one_raw_sub_block():
    ccd = Ccd(np.arange(64, dtype=np.uint32))
    block = np.full((8, 8), 5, dtype=np.uint32)
    block[0, 0] = 0xDEADBEEF
    comp = dcp_compress_block(block, ccd)
    assert comp.csb.count(0) == 1
    assert comp.payload_bits == 15 * 24 + 128


def test_dcp_empty_palette_all_raw():
    block = np.arange(64, dtype=np.uint32).reshape(8, 8)
    comp = dcp_compress_block(block, Ccd([]))
    assert comp.csb == (0,) * 16
    assert comp.payload_bits == 2048
    out = dcp_decompress_block(comp, Ccd([]).rccd())
    assert np.array_equal(out, block)


def test_dcp_size_one_palette_zero_payload():
    ccd = Ccd([9])
    block = np.full((8, 8), 9, dtype=np.uint32)
    comp = dcp_compress_block(block, ccd)
    assert comp.payload_bits == 0
    assert np.array_equal(dcp_decompress_block(comp, ccd.rccd()), block)


@pytest.mark.parametrize("size", [1, 2, 16, 64])
def test_round_trips_random_blocks(size, rng):
    blocks = block_pool(60, seed=size)
    ccd = ccd_from_blocks(blocks, size)
    rccd = ccd.rccd()
    table = build_table([(int(c), 10 + i) for i, c in enumerate(ccd.colors)][::-1])
    for block in blocks:
        assert np.array_equal(dcp_decompress_block(dcp_compress_block(block, ccd), rccd), block)
        assert np.array_equal(vdcp_decompress_block(vdcp_compress_block(block, ccd), rccd), block)
        assert np.array_equal(
            huffdcp_decompress_block(huffdcp_compress_block(block, table), table), block)


def test_vdcp_status_widths():
    ccd = Ccd(np.arange(100, 108, dtype=np.uint32))   # colors C0..C7
    block = np.full((8, 8), 100, dtype=np.uint32)     # all C0
    block[0:2, 0:2] = [[102, 103], [102, 103]]        # first sub-block C2,C3
    block[0:2, 2:4] = [[100, 101], [100, 101]]        # second C0,C1
    block[0:2, 4:6] = 0xDEADBEEF                      # third misses
    comp = vdcp_compress_block(block, ccd)
    assert comp.csb[0] == 2      # max index 3 -> 2 bits per pixel
    assert comp.csb[1] == 1      # max index 1 -> 1 bit
    assert comp.csb[2] == 7      # raw marker
    assert comp.csb[3] == 0      # all C0 -> zero bits
    bits = 4 * 2 + 4 * 1 + 128 + 0 + 12 * 0
    assert comp.payload_bits == bits
    assert np.array_equal(vdcp_decompress_block(comp, ccd.rccd()), block)


def test_vdcp_rejects_oversized_palette():
    with pytest.raises(ValueError):
        vdcp_compress_block(np.zeros((8, 8), dtype=np.uint32),
                            Ccd(np.arange(128, dtype=np.uint32)))


def test_vdcp_never_wider_than_dcp(rng):
    blocks = block_pool(300, seed=9)
    ccd = ccd_from_blocks(blocks, 16)
    b = ccd.bits_per_code
    for block in blocks:
        d = dcp_compress_block(block, ccd)
        v = vdcp_compress_block(block, ccd)
        for ds, vs in zip(d.csb, v.csb):
            if ds == 1:
                assert vs <= b
            else:
                assert vs == 7


def test_adcp_worked_example():
    # masses 80/18/1/1 over a frame: the 2-entry palette wins at 1.62 bpp.
    n = 3200
    freqs = [2560, 576, 32, 32]
    assert adcp_optimal_ccd_size(freqs, n, max_size=64) == 2


def test_adcp_single_color_picks_one_entry():
    assert adcp_optimal_ccd_size([4096], 4096, max_size=64) == 1


def test_adcp_empty_disables():
    assert adcp_optimal_ccd_size([], 4096, max_size=64) == 0


def test_adcp_matches_exhaustive_oracle(rng):
    # Independent minimization with exact rational arithmetic.
    for _ in range(300):
        count = int(rng.integers(1, 65))
        freqs = sorted(rng.integers(1, 2000, size=count).tolist(), reverse=True)
        n = int(sum(freqs) + rng.integers(0, 5000))
        got = adcp_optimal_ccd_size(freqs, n, max_size=64)

        best = (Fraction(n * 32), -1)
        for i in range(7):
            covered = min(sum(freqs[: 1 << i]), n)
            bits = Fraction(covered * i + (n - covered) * 32)
            if bits < best[0]:
                best = (bits, i)
        want = 2 ** best[1] if best[1] >= 0 else 1
        assert got == want


def test_adcp_sampling_scaled_mass_clamps():
    # Scaled frequencies may exceed the frame; the clamp keeps bits >= 0.
    size = adcp_optimal_ccd_size([900 * 16, 200 * 16], 10000, max_size=64)
    assert size >= 1


def frame_cost_fixture(rng, width=64, height=40):
    blocks = block_pool((width // 8) * (height // 8), seed=21)
    rows = []
    nbx = width // 8
    for by in range(height // 8):
        rows.append(np.hstack(blocks[by * nbx:(by + 1) * nbx]))
    pixels = np.vstack(rows)
    return Frame(pixels), blocks


def test_frame_cost_matches_block_codecs(rng):
    frame, _ = frame_cost_fixture(rng)
    padded, valid = frame.padded()
    sb_real = sub_block_valid_counts(valid)
    ccd = ccd_from_blocks([padded], 16)
    table = build_table(
        [(int(c), 100 - i) for i, c in enumerate(ccd.colors)])

    dcp_bits = dcp_frame_cost(padded, sb_real, ccd)
    vdcp_bits = vdcp_frame_cost(padded, sb_real, ccd)
    huff_bits = huffdcp_frame_cost(padded, valid, sb_real, table)
    nby, nbx = dcp_bits.shape
    for by in range(nby):
        for bx in range(nbx):
            block = padded[by * 8:(by + 1) * 8, bx * 8:(bx + 1) * 8]
            assert dcp_compress_block(block, ccd).payload_bits == dcp_bits[by, bx]
            assert vdcp_compress_block(block, ccd).payload_bits == vdcp_bits[by, bx]
            assert huffdcp_compress_block(block, table).payload_bits == huff_bits[by, bx]


def test_frame_cost_excludes_padding():
    # A 12x8 frame: the second block has 4 live columns; raw accounting
    # charges 32 bits per live pixel only.
    frame = Frame(np.arange(96, dtype=np.uint32).reshape(8, 12))
    padded, valid = frame.padded()
    sb_real = sub_block_valid_counts(valid)
    bits = dcp_frame_cost(padded, sb_real, Ccd([]))
    assert bits[0, 0] == 2048
    assert bits[0, 1] == 32 * 32
    assert int(bits.sum()) == 32 * 96


def make_state(scheme, entries=64, **kw):
    return CodecState(scheme=scheme, fvc=Fvc(FvcConfig(entry_count=entries)),
                      frame_pixels=4096, **kw)


def test_advance_frame_gates_on_coverage():
    # 100 samples of which 69 stay resident: coverage 0.69 < CT 0.7.
    state = make_state("DCP", entries=4, coverage_threshold=0.7)
    state.fvc.observe_run(1, 50)
    state.fvc.observe_run(2, 10)
    state.fvc.observe_run(3, 8)
    for c in range(100, 132):   # singletons thrash the fourth slot
        state.fvc.observe(c)
    advance_frame(state)
    assert state.last_coverage == pytest.approx(0.69)
    assert not state.enabled

    state2 = make_state("DCP", entries=2, coverage_threshold=0.7)
    state2.fvc.observe_run(1, 70)
    state2.fvc.observe_run(2, 30)
    advance_frame(state2)
    assert state2.last_coverage == 1.0
    assert state2.enabled


def test_advance_frame_builds_per_scheme():
    colors = np.arange(100, 110, dtype=np.uint32)
    pixels = np.repeat(colors, np.arange(10, 0, -1) * 8)

    for scheme, expect in (("DCP", 8), ("VDCP", 8), ("ADCP", 8)):
        state = make_state(scheme, entries=8)
        state.frame_pixels = pixels.size
        state.fvc.observe_frame(Frame(pixels.reshape(8, -1)))
        advance_frame(state)
        assert len(state.ccd) == expect
        assert state.fvc.samples_observed == 0   # reset happened

    state = make_state("HUFFDCP", entries=8)
    state.fvc.observe_frame(Frame(pixels.reshape(8, -1)))
    advance_frame(state)
    assert len(state.huffman) == 8


def test_advance_frame_respects_explicit_size():
    state = make_state("DCP", entries=64, ccd_size=4)
    state.fvc.observe_frame(Frame(np.arange(64, dtype=np.uint32).reshape(8, 8)))
    advance_frame(state)
    assert len(state.ccd) == 4


def test_collects_on_schedule():
    state = make_state("DCP", frame_sampling=3)
    assert [state.collects_on(t) for t in range(7)] == [
        True, False, False, True, False, False, True]
