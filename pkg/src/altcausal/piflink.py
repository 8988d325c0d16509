"""Reversible slice link and its information accounting.

The protocol moves 8-byte slices across a bidirectional link.  In PIF
mode every received slice is echoed back (byte order reversed,
direction flipped, sequence untouched); the sender inverts the echo and
compares against its retained copy, so any corruption on either leg
surfaces as a mismatch and nothing has to be erased.  FITO mode is the
matched one-way baseline: same noise draws, no echo, corrupted slices
silently overwrite receiver state and are charged the Landauer cost.

Information is tallied per protocol cycle (one slice round trip) from
per-bit empirical flip rates: a cycle's directed information is
64 * (1 - H2(flip fraction)), the uniform-input mutual information of
that cycle's observed channel.  The reflected share is the round-trip
mutual information, clamped by what was transmitted so the data
processing inequality survives finite sampling.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "BOLTZMANN_J_PER_K",
    "SLICE_BYTES",
    "Direction",
    "LinkMode",
    "Slice",
    "JointDistribution",
    "InfoLedger",
    "LinkConfig",
    "LinkReport",
    "binary_entropy",
    "shannon_entropy",
    "mutual_information",
    "conservation_check",
    "symmetry_check",
    "echo",
    "run_link",
    "capacity",
    "capacity_monte_carlo",
    "landauer_cost",
    "unreflected_entropy",
    "encode_frame",
    "decode_frame",
]

BOLTZMANN_J_PER_K = 1.380649e-23    # exact SI value
SLICE_BYTES = 8
SLICE_BITS = 8 * SLICE_BYTES
FRAME_BYTES = 16
_SEQ_MASK = (1 << 48) - 1


class Direction(Enum):
    FORWARD = 0
    BACKWARD = 1

    def flipped(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


class LinkMode(Enum):
    PIF = "pif"      # every slice verified by echo
    FITO = "fito"    # one-way fire and forget


@dataclass(frozen=True)
class Slice:
    """One 8-byte protocol unit."""

    payload: bytes
    seq: int
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        if len(self.payload) != SLICE_BYTES:
            raise ValueError(f"payload must be exactly {SLICE_BYTES} bytes, got {len(self.payload)}")
        if not 0 <= self.seq < 2 ** 64:
            raise ValueError(f"seq must fit in uint64, got {self.seq}")
        if not isinstance(self.direction, Direction):
            raise ValueError(f"direction must be a Direction, got {self.direction!r}")


def echo(s: Slice) -> Slice:
    """Time-reverse a slice: byte order reversed, direction flipped.

    Real byte content is its own conjugate, so applying echo twice gives
    back the original slice.
    """
    return Slice(payload=s.payload[::-1], seq=s.seq, direction=s.direction.flipped())


# ---------------------------------------------------------------------------
# entropy and information
# ---------------------------------------------------------------------------

def binary_entropy(p: float) -> float:
    """H2(p) in bits; exact 0 at the endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def shannon_entropy(dist) -> float:
    """Entropy of a discrete distribution in bits, 0 log 0 = 0."""
    p = np.asarray(dist, dtype=float).reshape(-1)
    if np.any(p < -1e-12):
        raise ValueError("probabilities must be non-negative")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities must sum to 1, got {total}")
    p = np.clip(p, 0.0, None)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability table over two discrete variables."""

    p: np.ndarray

    def __init__(self, p):
        table = np.array(p, dtype=float)
        if table.ndim != 2:
            raise ValueError(f"joint distribution must be 2-dimensional, got shape {table.shape}")
        if np.any(table < -1e-12):
            raise ValueError("joint probabilities must be non-negative")
        if abs(table.sum() - 1.0) > 1e-9:
            raise ValueError(f"joint probabilities must sum to 1, got {table.sum()}")
        table = np.clip(table, 0.0, None)
        table.setflags(write=False)
        object.__setattr__(self, "p", table)

    @classmethod
    def from_counts(cls, counts) -> "JointDistribution":
        c = np.asarray(counts, dtype=float)
        if c.sum() <= 0:
            raise ValueError("counts must be positive")
        return cls(c / c.sum())


def mutual_information(joint: JointDistribution) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y) in bits, clipped at zero."""
    p = joint.p
    hx = shannon_entropy(p.sum(axis=1))
    hy = shannon_entropy(p.sum(axis=0))
    hxy = shannon_entropy(p)
    return max(hx + hy - hxy, 0.0)


def symmetry_check(joint: JointDistribution) -> float:
    """Largest asymmetry |p(x, y) - p(y, x)| of a square joint."""
    p = joint.p
    if p.shape[0] != p.shape[1]:
        raise ValueError("symmetry check needs a square joint distribution")
    return float(np.abs(p - p.T).max())


def landauer_cost(bits: float, temperature_kelvin: float) -> float:
    """Minimum erasure cost k_B T ln2 per bit, in joules."""
    if bits < 0:
        raise ValueError(f"erased bits must be >= 0, got {bits}")
    if temperature_kelvin < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature_kelvin}")
    return bits * BOLTZMANN_J_PER_K * temperature_kelvin * math.log(2)


def unreflected_entropy(i_transmitted: float, i_reflected: float) -> float:
    """Entropy shed to the absorber: transmitted minus reflected."""
    if i_reflected > i_transmitted:
        raise ValueError(
            f"reflected information {i_reflected} exceeds transmitted {i_transmitted}; "
            "accounting is inconsistent")
    return i_transmitted - i_reflected


# ---------------------------------------------------------------------------
# ledgers and configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfoLedger:
    """Directed information tallies, in bits (cost in joules).

    ``delta_s`` is derived, never stored independently, so the balance
    i_reflected + delta_s = i_transmitted holds bit for bit.
    """

    i_plus: float
    i_minus: float
    i_transmitted: float
    i_reflected: float
    h_in: float
    h_out: float
    landauer_joules: float
    delta_s: float = field(init=False)

    def __post_init__(self):
        for name in ("i_plus", "i_minus", "i_transmitted", "i_reflected",
                     "h_in", "h_out", "landauer_joules"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.i_reflected > self.i_transmitted:
            raise ValueError("reflected information exceeds transmitted information")
        object.__setattr__(self, "delta_s", self.i_transmitted - self.i_reflected)


def conservation_check(ledgers: Sequence[InfoLedger]) -> float:
    """Max per-cycle violation of dI_plus + dI_minus = 0.

    Needs at least two cycles; a steadily running verified link scores
    exactly zero because both directed rates are constant.
    """
    if len(ledgers) < 2:
        raise ValueError("conservation check needs at least two cycles")
    worst = 0.0
    for prev, cur in zip(ledgers, ledgers[1:]):
        worst = max(worst, abs((cur.i_plus - prev.i_plus) + (cur.i_minus - prev.i_minus)))
    return worst


@dataclass(frozen=True)
class LinkConfig:
    slice_count: int = 1000
    bit_flip_forward: float = 0.0
    bit_flip_backward: float = 0.0
    echo_loss_probability: float = 0.0
    rng_seed: int = 0
    temperature_kelvin: float = 300.0
    mode: LinkMode = LinkMode.PIF

    def __post_init__(self):
        if self.slice_count < 1:
            raise ValueError(f"slice_count must be >= 1, got {self.slice_count}")
        for name in ("bit_flip_forward", "bit_flip_backward", "echo_loss_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.temperature_kelvin <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature_kelvin}")
        if not isinstance(self.mode, LinkMode):
            raise ValueError(f"mode must be a LinkMode, got {self.mode!r}")


@dataclass(frozen=True)
class LinkReport:
    """Everything observed over one simulated run."""

    config: LinkConfig
    ledger: InfoLedger
    cycles: tuple[InfoLedger, ...]
    detected_mismatches: int
    lost_echoes: int
    undetected_corruptions: int
    injected_forward: int
    injected_backward: int
    joint: JointDistribution
    throughput_slices_per_round_trip: float


# ---------------------------------------------------------------------------
# the simulation
# ---------------------------------------------------------------------------

# Sub-stream tags so tests can replay any single noise source.
_STREAM_PAYLOAD = 0
_STREAM_FORWARD = 1
_STREAM_LOSS = 2
_STREAM_BACKWARD = 3
_STREAM_MC_FORWARD = 4
_STREAM_MC_BACKWARD = 5


def _stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng((seed, tag))


def _byte_reversed_mask(mask: np.ndarray) -> np.ndarray:
    # Bit positions after the byte-order reversal done by echo().
    n = mask.shape[0]
    return mask.reshape(n, SLICE_BYTES, 8)[:, ::-1, :].reshape(n, SLICE_BITS)


def _directed_bits(flips: int) -> float:
    return SLICE_BITS * (1.0 - binary_entropy(flips / SLICE_BITS))


def run_link(cfg: LinkConfig) -> LinkReport:
    """Simulate the link and return its full report.

    All four noise streams are drawn in both modes from sub-seeds of
    ``cfg.rng_seed``, so a FITO run is the exact matched baseline of the
    PIF run with the same seed: identical payloads, identical corruption
    pattern, only the verification leg differs.
    """
    n = cfg.slice_count
    payloads = _stream(cfg.rng_seed, _STREAM_PAYLOAD).integers(
        0, 256, size=(n, SLICE_BYTES), dtype=np.uint8)
    fwd_mask = _stream(cfg.rng_seed, _STREAM_FORWARD).random((n, SLICE_BITS)) < cfg.bit_flip_forward
    lost = _stream(cfg.rng_seed, _STREAM_LOSS).random(n) < cfg.echo_loss_probability
    bwd_mask = _stream(cfg.rng_seed, _STREAM_BACKWARD).random((n, SLICE_BITS)) < cfg.bit_flip_backward

    sent = np.unpackbits(payloads, axis=1).astype(bool)
    received = sent ^ fwd_mask
    roundtrip_mask = fwd_mask ^ _byte_reversed_mask(bwd_mask)
    recovered = sent ^ roundtrip_mask

    f_fwd = fwd_mask.sum(axis=1)
    f_bwd = bwd_mask.sum(axis=1)
    f_rt = roundtrip_mask.sum(axis=1)

    pif = cfg.mode is LinkMode.PIF
    if not pif:
        lost = np.zeros(n, dtype=bool)   # no echo leg exists to lose

    cycles = []
    detected = 0
    lost_echoes = 0
    undetected = 0
    injected_fwd = 0
    injected_bwd = 0
    erased_bits = 0
    for k in range(n):
        i_plus = _directed_bits(int(f_fwd[k]))
        cost = 0.0
        if pif:
            if lost[k]:
                lost_echoes += 1
                i_minus = 0.0
                i_reflected = 0.0
                if f_fwd[k] > 0:
                    injected_fwd += 1
            else:
                i_minus = _directed_bits(int(f_bwd[k]))
                i_reflected = min(_directed_bits(int(f_rt[k])), i_plus)
                if f_rt[k] > 0:
                    detected += 1
                elif f_fwd[k] > 0:
                    undetected += 1   # opposing flips cancelled on the same bit
                if f_fwd[k] > 0:
                    injected_fwd += 1
                if f_bwd[k] > 0:
                    injected_bwd += 1
        else:
            i_minus = 0.0
            i_reflected = 0.0
            if f_fwd[k] > 0:
                injected_fwd += 1
                undetected += 1
                erased_bits += int(f_fwd[k])
                cost = landauer_cost(int(f_fwd[k]), cfg.temperature_kelvin)
        ones_in = int(sent[k].sum())
        ones_out = int(received[k].sum())
        cycles.append(InfoLedger(
            i_plus=i_plus,
            i_minus=i_minus,
            i_transmitted=i_plus,
            i_reflected=i_reflected,
            h_in=SLICE_BITS * binary_entropy(ones_in / SLICE_BITS),
            h_out=SLICE_BITS * binary_entropy(ones_out / SLICE_BITS),
            landauer_joules=cost,
        ))

    totals = {}
    for name in ("i_plus", "i_minus", "i_transmitted", "i_reflected", "landauer_joules"):
        totals[name] = float(sum(getattr(c, name) for c in cycles))
    ones_in_total = int(sent.sum())
    ones_out_total = int(received.sum())
    total_bits = n * SLICE_BITS
    ledger = InfoLedger(
        h_in=total_bits * binary_entropy(ones_in_total / total_bits),
        h_out=total_bits * binary_entropy(ones_out_total / total_bits),
        **totals,
    )

    if pif:
        returned = ~lost
        x, y = sent[returned], recovered[returned]
    else:
        x, y = sent, received
    counts = np.array([
        [int((~x & ~y).sum()), int((~x & y).sum())],
        [int((x & ~y).sum()), int((x & y).sum())],
    ], dtype=float)
    if counts.sum() == 0:
        counts = np.eye(2)   # degenerate run: every echo lost
    joint = JointDistribution.from_counts(counts)

    return LinkReport(
        config=cfg,
        ledger=ledger,
        cycles=tuple(cycles),
        detected_mismatches=detected if pif else 0,
        lost_echoes=lost_echoes,
        undetected_corruptions=undetected,
        injected_forward=injected_fwd,
        injected_backward=injected_bwd,
        joint=joint,
        throughput_slices_per_round_trip=1.0 if pif else 2.0,
    )


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------

def capacity(cfg: LinkConfig) -> tuple[float, float]:
    """Analytic per-cycle capacities (one-way, both directions) in bits.

    Each leg is a binary symmetric channel, so the one-way figure is
    64 * (1 - H2(p)); the verified link carries information on both legs
    and for symmetric noise comes out at exactly twice the one-way
    value.
    """
    c_forward = SLICE_BITS * (1.0 - binary_entropy(cfg.bit_flip_forward))
    c_backward = SLICE_BITS * (1.0 - binary_entropy(cfg.bit_flip_backward))
    return c_forward, c_forward + c_backward


def capacity_monte_carlo(cfg: LinkConfig, n_bits: int = 100_000) -> tuple[float, float]:
    """Empirical counterpart of ``capacity`` from simulated bit streams."""
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")

    def leg(tag: int, p: float) -> float:
        rng = _stream(cfg.rng_seed, tag)
        x = rng.integers(0, 2, size=n_bits).astype(bool)
        y = x ^ (rng.random(n_bits) < p)
        counts = np.array([
            [int((~x & ~y).sum()), int((~x & y).sum())],
            [int((x & ~y).sum()), int((x & y).sum())],
        ], dtype=float)
        return SLICE_BITS * mutual_information(JointDistribution.from_counts(counts))

    c_forward = leg(_STREAM_MC_FORWARD, cfg.bit_flip_forward)
    c_backward = leg(_STREAM_MC_BACKWARD, cfg.bit_flip_backward)
    return c_forward, c_forward + c_backward


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def encode_frame(s: Slice, flags: int = 0) -> bytes:
    """16-byte frame: payload, 6-byte little-endian seq, direction, flags."""
    if not 0 <= flags < 256:
        raise ValueError(f"flags must fit in one byte, got {flags}")
    seq48 = s.seq & _SEQ_MASK
    frame = s.payload + struct.pack("<Q", seq48)[:6] + bytes([s.direction.value, flags])
    assert len(frame) == FRAME_BYTES
    return frame


def decode_frame(frame: bytes) -> tuple[Slice, int]:
    if len(frame) != FRAME_BYTES:
        raise ValueError(f"frame must be {FRAME_BYTES} bytes, got {len(frame)}")
    payload = frame[:SLICE_BYTES]
    seq = struct.unpack("<Q", frame[SLICE_BYTES:SLICE_BYTES + 6] + b"\x00\x00")[0]
    direction = Direction(frame[14])
    return Slice(payload=payload, seq=seq, direction=direction), frame[15]
