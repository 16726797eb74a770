"""Noisy-channel Monte-Carlo link simulation.

The channel is a memoryless binary symmetric channel whose flip probability
comes from hard-decision BPSK over AWGN at the given SNR.  Every codeword
travels in its own frame with the boundary known to the receiver (genie
framing), which isolates per-symbol error effects from desynchronization.

Scoring: a sut (one specified attribute slot of the sent entity) is correct
iff the decoded entity agrees on that slot.  Flat codecs lose every sut of a
message on any wrong decode; semantic codecs are scored per position, so
positions decoded before the first corrupted sub-codeword can survive.  The
parity codec detects corrupted frames (odd flip counts always, plus frames
that no longer parse); detected suts are counted separately from silent sut
errors, and only the silent ones enter the sut error rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import (
    CODEC_KINDS,
    FANO_PARITY,
    FLAT_FANO,
    SEMANTIC_FANO,
    SEMANTIC_FANO_KB,
    Codebook,
    SemanticCodebook,
    decode,
    fano_build,
    fano_parity_build,
    semantic_build,
    semantic_kb_build,
)
from .entropy import classical_entropy
from .errors import DecodeFailure, InvalidParameter, ParityFailure
from .kb import KnowledgeBase
from .space import Perspective, SemanticSpace

#: Default Monte-Carlo base seed for experiment sweeps.
BASE_SEED = 0xC0DEC

FLIP_FLOOR = 1e-15
FLIP_CEIL = 0.5


def snr_to_flip_prob(snr_db: float) -> float:
    """Hard-decision BPSK/AWGN flip probability at the given SNR (dB)."""
    if not math.isfinite(snr_db):
        raise InvalidParameter("snr_db must be finite")
    gamma = 10.0 ** (snr_db / 10.0)
    p = 0.5 * math.erfc(math.sqrt(gamma))
    return min(max(p, FLIP_FLOOR), FLIP_CEIL)


@dataclass(frozen=True)
class ChannelModel:
    """SNR-parameterized memoryless bit-flip channel."""

    snr_db: float
    flip_prob: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "flip_prob", snr_to_flip_prob(self.snr_db))


def transmit(bits: str, channel: ChannelModel, rng_seed: int) -> str:
    """Flip each bit independently with the channel's flip probability."""
    if not bits:
        return bits
    rng = np.random.default_rng(rng_seed)
    return _corrupt(bits, rng.random(len(bits)) < channel.flip_prob)


def _corrupt(bits: str, mask: np.ndarray) -> str:
    arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8).copy()
    arr ^= mask.astype(np.uint8)  # '0' (48) <-> '1' (49)
    return arr.tobytes().decode("ascii")


@dataclass(frozen=True)
class TrialReport:
    """Counters and derived metrics of one Monte-Carlo link trial."""

    codec: str
    snr_db: float
    n_messages: int
    suts_sent: int
    suts_correct: int
    suts_detected: int
    bits_sent: int
    symbols_detected_error: int
    ser: float
    semantic_efficiency: float
    coding_efficiency: float

    def __post_init__(self):
        if not (self.suts_correct + self.suts_detected <= self.suts_sent):
            raise InvalidParameter("inconsistent sut counters")
        if not (0.0 <= self.ser <= 1.0):
            raise InvalidParameter(f"ser {self.ser!r} outside [0, 1]")


def build_codec(
    space: SemanticSpace,
    kind: str,
    perspective: Perspective | None = None,
    kb: KnowledgeBase | None = None,
) -> Codebook | SemanticCodebook:
    """Entity-level codebook of the requested kind over a space."""
    if kind not in CODEC_KINDS:
        raise InvalidParameter(f"unknown codec kind {kind!r}")
    if kind in (FLAT_FANO, FANO_PARITY):
        entities = space.positive_entities()
        probs = [e.prob for e in entities]
        symbols = [e.coords for e in entities]
        builder = fano_build if kind == FLAT_FANO else fano_parity_build
        return builder(probs, symbols=symbols)
    if kind == SEMANTIC_FANO:
        return semantic_build(space, perspective)
    if kb is None:
        raise InvalidParameter("semantic-fano-kb requires a knowledge base")
    return semantic_kb_build(space, perspective, kb)


def _score_semantic(book: SemanticCodebook, frame: str,
                    sent: tuple) -> int:
    """Correct suts of one corrupted semantic frame."""
    decoded, _, _ = book.decode_prefix(frame)
    correct = 0
    for k, pos in enumerate(book.perspective.order):
        if sent[pos] is None:
            continue
        if k < len(decoded) and decoded[k] == sent[pos]:
            correct += 1
    return correct


def run_link_trial(
    space: SemanticSpace,
    codec_kind: str,
    channel: ChannelModel,
    n_messages: int,
    rng_seed: int,
    perspective: Perspective | None = None,
    kb: KnowledgeBase | None = None,
) -> TrialReport:
    """Sample entities i.i.d., transmit framed codewords, score suts."""
    if n_messages < 1:
        raise InvalidParameter("n_messages must be >= 1")
    book = build_codec(space, codec_kind, perspective, kb)

    entities = space.positive_entities()
    probs = np.array([e.prob for e in entities])
    if codec_kind == SEMANTIC_FANO_KB:
        assert isinstance(book, SemanticCodebook)
        sent_tuples = [book.representative(e.coords) for e in entities]
    else:
        sent_tuples = [e.coords for e in entities]
    if isinstance(book, SemanticCodebook):
        words = [book.encode(c) for c in sent_tuples]
    else:
        words = [book.codewords[c] for c in sent_tuples]
    quanta = np.array([sum(1 for a in c if a is not None)
                       for c in sent_tuples], dtype=np.int64)
    lengths = np.array([len(w) for w in words], dtype=np.int64)

    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(len(entities), size=n_messages, p=probs / probs.sum())
    stream = "".join(words[i] for i in idx)
    total_bits = int(lengths[idx].sum())
    mask = rng.random(total_bits) < channel.flip_prob

    ends = np.cumsum(lengths[idx])
    starts = ends - lengths[idx]
    cum = np.concatenate(([0], np.cumsum(mask)))
    flips = cum[ends] - cum[starts]

    suts_sent = int(quanta[idx].sum())
    suts_correct = int(quanta[idx][flips == 0].sum())
    suts_detected = 0
    symbols_detected = 0

    corrupted = np.flatnonzero(flips > 0)
    if corrupted.size:
        garbled = _corrupt(stream, mask)
        for m in corrupted:
            i = idx[m]
            frame = garbled[starts[m]:ends[m]]
            q = int(quanta[i])
            if codec_kind in (SEMANTIC_FANO, SEMANTIC_FANO_KB):
                assert isinstance(book, SemanticCodebook)
                suts_correct += _score_semantic(book, frame, sent_tuples[i])
                continue
            try:
                item, _ = decode(book, frame)
            except ParityFailure:
                suts_detected += q
                symbols_detected += 1
                continue
            except DecodeFailure:
                if codec_kind == FANO_PARITY:
                    suts_detected += q
                    symbols_detected += 1
                continue
            if item == sent_tuples[i]:
                suts_correct += q

    silent_errors = suts_sent - suts_correct - suts_detected
    entity_entropy = classical_entropy(probs)
    avg_len = book.average_length()
    return TrialReport(
        codec=codec_kind,
        snr_db=channel.snr_db,
        n_messages=n_messages,
        suts_sent=suts_sent,
        suts_correct=suts_correct,
        suts_detected=suts_detected,
        bits_sent=total_bits,
        symbols_detected_error=symbols_detected,
        ser=silent_errors / suts_sent if suts_sent else 0.0,
        semantic_efficiency=(suts_correct / total_bits
                             if total_bits else math.inf),
        coding_efficiency=(entity_entropy / avg_len if avg_len else 0.0),
    )
