"""Replays a trace through one compression scheme and collects statistics.

Frame 0 is warm-up: it populates the first collector and palette and is
never measured. Every later frame is charged through the burst model with
the palette built from the most recent collection frame. Block costs come
from the vectorized frame engines; a seeded sample of blocks additionally
runs through the exact per-block codecs, checking both losslessness and
that the two cost paths agree.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bandwidth, dcp_codecs, reference_codecs
from .bandwidth import ACCOUNTING_MODES, FrameStats, WorkloadStats
from .fvc import Fvc, FvcConfig, is_pow2, relative_coverage
from .palette import Rccd
from .rng import SplitMix64, mix64
from .surface import (
    BLOCK,
    SurfaceTrace,
    block_valid_counts,
    sub_block_valid_counts,
)

SCHEMES = ("DCP", "ADCP", "VDCP", "HUFFDCP", "RAS", "RED", "HDCP")
PALETTE_SCHEMES = ("DCP", "ADCP", "VDCP", "HUFFDCP", "HDCP")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class VerificationError(Exception):
    """A sampled block failed round-trip or cost cross-checking."""


@dataclass
class ExperimentConfig:
    scheme: str = "DCP"
    fvc: FvcConfig = field(default_factory=FvcConfig)
    ccd_size: int | None = None          # explicit palette size where legal
    frame_sampling: int = 1              # reuse one palette for N frames
    coverage_threshold: float | None = None
    accounting: str = "full"
    seed: int = 0
    verify_fraction: float = 0.01
    verify_full: bool = False
    jobs: int = 1
    track_relative_coverage: bool = False

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.accounting not in ACCOUNTING_MODES:
            raise ConfigError(
                f"accounting must be one of {ACCOUNTING_MODES}, got {self.accounting!r}")
        if self.frame_sampling < 1:
            raise ConfigError("frame_sampling must be >= 1")
        if self.ccd_size is not None:
            if self.scheme == "ADCP":
                raise ConfigError("ADCP chooses its own palette size")
            if self.scheme in ("RAS", "RED"):
                raise ConfigError(f"{self.scheme} does not use a palette")
            if not is_pow2(self.ccd_size):
                raise ConfigError("ccd_size must be a power of two")
            if self.ccd_size > self.fvc.entry_count:
                raise ConfigError("ccd_size cannot exceed the FVC entry count")
            if self.scheme in ("VDCP", "HDCP") and self.ccd_size > dcp_codecs.VDCP_MAX_CCD:
                raise ConfigError(
                    f"{self.scheme} status bits address at most "
                    f"{dcp_codecs.VDCP_MAX_CCD} palette entries")
        if self.coverage_threshold is not None and not 0.0 <= self.coverage_threshold <= 1.0:
            raise ConfigError("coverage_threshold must lie in [0, 1]")
        if not 0.0 < self.verify_fraction <= 1.0:
            raise ConfigError("verify_fraction must lie in (0, 1]")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass
class RunResult:
    workload: WorkloadStats
    frames: list[FrameStats]
    blocks_verified: int = 0
    mean_relative_coverage: float = float("nan")


def run_experiment(trace: SurfaceTrace, cfg: ExperimentConfig) -> RunResult:
    cfg.validate()
    width, height = trace.width, trace.height
    _, valid = trace.frames[0].padded()
    sb_real = sub_block_valid_counts(valid)
    block_real = block_valid_counts(valid)
    raw_bursts_per_block = (32 * block_real + 127) // 128
    uncompressed_bits = int(32 * block_real.sum())
    uncompressed_bursts = int(raw_bursts_per_block.sum())
    csb_bits = bandwidth.csb_frame_bits(width, height, cfg.scheme)
    csb_bursts = bandwidth.bursts(csb_bits)

    needs_palette = cfg.scheme in PALETTE_SCHEMES
    state = None
    if needs_palette:
        fvc_cfg = replace(cfg.fvc, rng_seed=cfg.fvc.rng_seed or cfg.seed)
        state = dcp_codecs.CodecState(
            scheme=cfg.scheme,
            fvc=Fvc(fvc_cfg),
            frame_pixels=width * height,
            frame_sampling=cfg.frame_sampling,
            coverage_threshold=cfg.coverage_threshold,
            ccd_size=cfg.ccd_size,
        )

    verify_rng = SplitMix64(mix64(cfg.seed ^ 0xB10C5))
    frames_out: list[FrameStats] = []
    blocks_verified = 0
    rel_covs: list[float] = []
    pending_rccd_bytes = 0

    for t, frame in enumerate(trace.frames):
        padded, _ = frame.padded()
        if t >= 1:
            bits, bursts_arr, v_blocks, r_blocks = _frame_cost(
                cfg, padded, valid, sb_real, block_real, raw_bursts_per_block, state)
            fs = FrameStats(
                frame=t,
                uncompressed_bits=uncompressed_bits,
                payload_bits=int(bits.sum()),
                csb_bits=csb_bits,
                uncompressed_bursts=uncompressed_bursts,
                payload_bursts=int(bursts_arr.sum()),
                csb_bursts=csb_bursts,
                rate=0.0,
                coverage=state.last_coverage if state else float("nan"),
                ccd_size=_palette_size(state),
                rccd_bytes=pending_rccd_bytes,
                compression_enabled=state.enabled if state else True,
                vdcp_blocks=v_blocks,
                ras_blocks=r_blocks,
            )
            pending_rccd_bytes = 0
            fs.rate = bandwidth.frame_rate(fs, cfg.accounting)
            frames_out.append(fs)
            blocks_verified += _verify_frame(cfg, padded, block_real, bits, state, verify_rng)
        if needs_palette and state.collects_on(t):
            state.fvc.observe_frame(frame)
            if cfg.track_relative_coverage:
                rel_covs.append(relative_coverage(state.fvc.ranked_values(), frame,
                                                  top_n=state.fvc.entry_count))
            dcp_codecs.advance_frame(state)
            pending_rccd_bytes = _palette_bytes(state)

    workload = WorkloadStats(
        name=trace.name,
        category=trace.category,
        scheme=cfg.scheme,
        accounting=cfg.accounting,
        frames_measured=len(frames_out),
        uncompressed_bits=sum(f.uncompressed_bits for f in frames_out),
        payload_bits=sum(f.payload_bits for f in frames_out),
        csb_bits=sum(f.csb_bits for f in frames_out),
        uncompressed_bursts=sum(f.uncompressed_bursts for f in frames_out),
        payload_bursts=sum(f.payload_bursts for f in frames_out),
        csb_bursts=sum(f.csb_bursts for f in frames_out),
        rccd_bytes=sum(f.rccd_bytes for f in frames_out),
        vdcp_blocks=sum(f.vdcp_blocks for f in frames_out),
        ras_blocks=sum(f.ras_blocks for f in frames_out),
    )
    workload.rate = bandwidth.workload_rate(frames_out, cfg.accounting)
    mean_rel = float(np.mean(rel_covs)) if rel_covs else float("nan")
    return RunResult(workload, frames_out, blocks_verified, mean_rel)


def _palette_size(state) -> int:
    if state is None:
        return 0
    if state.scheme == "HUFFDCP":
        return len(state.huffman) if state.huffman else 0
    return len(state.ccd) if state.ccd else 0


def _palette_bytes(state) -> int:
    # Reverse-palette serialization: u16 count + u32 per color; the Huffman
    # table additionally carries one length byte per entry.
    n = _palette_size(state)
    return 2 + 5 * n if state.scheme == "HUFFDCP" else 2 + 4 * n


def _frame_cost(cfg, padded, valid, sb_real, block_real, raw_bursts, state):
    """Per-block accounting bits and charged bursts for one frame."""
    scheme = cfg.scheme
    if scheme == "HDCP":
        ccd = state.ccd if state.enabled else None
        bits, bursts_arr, vdcp_wins = _banded(
            lambda p, v, s, b: reference_codecs.hybrid_frame_cost(p, s, b, ccd),
            padded, valid, sb_real, block_real, cfg.jobs, outputs=3)
        v_blocks = int(vdcp_wins.sum())
        return bits, bursts_arr, v_blocks, int(vdcp_wins.size - v_blocks)
    if scheme == "RAS":
        charged, _, _ = _banded(
            lambda p, v, s, b: reference_codecs.ras_frame_cost(p, b),
            padded, valid, sb_real, block_real, cfg.jobs, outputs=3)
        return charged, (charged + 127) // 128, 0, 0
    if scheme == "RED":
        bits, _ = _banded(
            lambda p, v, s, b: reference_codecs.red_frame_cost(p, v, s, b),
            padded, valid, sb_real, block_real, cfg.jobs, outputs=2)
        return bits, np.minimum((bits + 127) // 128, raw_bursts), 0, 0
    if scheme == "HUFFDCP":
        table = state.huffman if state.enabled else None
        bits = _banded(
            lambda p, v, s, b: dcp_codecs.huffdcp_frame_cost(p, v, s, table),
            padded, valid, sb_real, block_real, cfg.jobs)
    else:
        ccd = state.ccd if state.enabled else None
        engine = dcp_codecs.vdcp_frame_cost if scheme == "VDCP" else dcp_codecs.dcp_frame_cost
        bits = _banded(
            lambda p, v, s, b: engine(p, s, ccd),
            padded, valid, sb_real, block_real, cfg.jobs)
    return bits, np.minimum((bits + 127) // 128, raw_bursts), 0, 0


def _banded(fn, padded, valid, sb_real, block_real, jobs, outputs=1):
    """Run a frame-cost engine over horizontal bands of block rows.

    Blocks are self-contained in every scheme, so splitting on block-row
    boundaries is exact; results concatenate in order, which keeps
    multi-worker runs bit-identical to sequential ones.
    """
    nby = padded.shape[0] // BLOCK
    if jobs <= 1 or nby < 2:
        return fn(padded, valid, sb_real, block_real)
    bounds = np.linspace(0, nby, min(jobs, nby) + 1, dtype=int)
    tasks = [
        (padded[lo * BLOCK:hi * BLOCK], valid[lo * BLOCK:hi * BLOCK],
         sb_real[lo * 4:hi * 4], block_real[lo:hi])
        for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi
    ]
    with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
        results = list(pool.map(lambda args: fn(*args), tasks))
    if outputs == 1:
        return np.concatenate(results, axis=0)
    return tuple(np.concatenate([r[i] for r in results], axis=0) for i in range(outputs))


def _verify_frame(cfg, padded, block_real, engine_bits, state, rng) -> int:
    """Round-trip a sample of blocks through the exact per-block codecs.

    Fully live blocks must also reproduce the vectorized engine's
    accounting bits exactly; edge blocks are checked for losslessness only.
    """
    nby, nbx = block_real.shape
    nblocks = nby * nbx
    if cfg.verify_full:
        indices = range(nblocks)
    else:
        want = max(1, round(cfg.verify_fraction * nblocks))
        indices = sorted({rng.next_below(nblocks) for _ in range(want)})
    flat_real = block_real.reshape(-1)
    flat_bits = engine_bits.reshape(-1)
    checked = 0
    for idx in indices:
        by, bx = divmod(idx, nbx)
        block = padded[by * BLOCK:(by + 1) * BLOCK, bx * BLOCK:(bx + 1) * BLOCK]
        out, stream_bits = _block_round_trip(cfg.scheme, block, state)
        if not np.array_equal(out, block):
            raise VerificationError(
                f"{cfg.scheme} round-trip mismatch at block ({bx},{by})")
        if flat_real[idx] == 64 and stream_bits != int(flat_bits[idx]):
            raise VerificationError(
                f"{cfg.scheme} cost mismatch at block ({bx},{by}): "
                f"stream {stream_bits} bits vs engine {int(flat_bits[idx])}")
        checked += 1
    return checked


def _block_round_trip(scheme, block, state):
    """(decoded block, accounting-comparable stream bits)."""
    if scheme == "RAS":
        rb = reference_codecs.ras_compress_block(block)
        return reference_codecs.ras_decompress_block(rb), rb.charged_bits
    if scheme == "RED":
        red = reference_codecs.red_compress_block(block)
        return reference_codecs.red_decompress_block(red), 32 * len(red.colors)
    ccd = state.ccd if state.enabled else None
    if scheme == "HDCP":
        hb = reference_codecs.hybrid_compress_block(block, ccd)
        rccd = ccd.rccd() if ccd is not None else Rccd([])
        decoded = reference_codecs.hybrid_decompress_block(hb, rccd)
        bits = hb.vdcp.payload_bits if hb.winner == "VDCP" else hb.ras.charged_bits
        return decoded, bits
    if scheme == "HUFFDCP":
        table = state.huffman if state.enabled else None
        comp = dcp_codecs.huffdcp_compress_block(block, table)
        return dcp_codecs.huffdcp_decompress_block(comp, table), comp.payload_bits
    rccd = ccd.rccd() if ccd is not None else Rccd([])
    if scheme == "VDCP":
        comp = dcp_codecs.vdcp_compress_block(block, ccd)
        return dcp_codecs.vdcp_decompress_block(comp, rccd), comp.payload_bits
    comp = dcp_codecs.dcp_compress_block(block, ccd)
    return dcp_codecs.dcp_decompress_block(comp, rccd), comp.payload_bits
