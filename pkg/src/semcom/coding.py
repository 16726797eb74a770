"""Fano codecs: flat, parity-augmented, perspective-conditional, KB-merged.

The Fano split is pinned for determinism: symbols are sorted by descending
probability (stable, so ties keep input order), the split point minimizes
the absolute mass difference between the two halves (ties pick the fewer-
symbols-on-the-left split), the left half extends the prefix with "0" and
the right with "1".  A single-symbol flat book gets the codeword "0"; a
deterministic context inside a conditional book gets the empty codeword,
which is exactly how conditioning reaches zero bits.
"""

from __future__ import annotations

import math
import warnings
from typing import Hashable, Mapping, Optional, Sequence

from .entropy import validate_distribution
from .errors import (
    DecodeFailure,
    InvalidDistribution,
    InvalidParameter,
    ParityFailure,
    SemanticAmbiguityWarning,
    UnknownSymbol,
    UnreachableContext,
)
from .kb import KnowledgeBase, SynonymPartition, synonyms
from .space import Entity, Perspective, SemanticSpace

KRAFT_TOL = 1e-12

FLAT_FANO = "flat-fano"
FANO_PARITY = "fano-parity"
SEMANTIC_FANO = "semantic-fano"
SEMANTIC_FANO_KB = "semantic-fano-kb"

CODEC_KINDS = (FLAT_FANO, FANO_PARITY, SEMANTIC_FANO, SEMANTIC_FANO_KB)


class Codebook:
    """A prefix-free binary code over one symbol set."""

    def __init__(self, kind: str, codewords: Mapping[Hashable, str],
                 probs: Mapping[Hashable, float]) -> None:
        if set(codewords) != set(probs):
            raise InvalidParameter("codewords and probs disagree on symbols")
        self.kind = kind
        self.symbols = tuple(codewords)
        self.codewords = dict(codewords)
        self.probs = dict(probs)
        self._validate()
        self._by_word = {w: s for s, w in self.codewords.items()}
        self._lengths = sorted({len(w) for w in self.codewords.values()})
        if kind == FANO_PARITY:
            self._by_base = {w[:-1]: s for s, w in self.codewords.items()}
            self._base_lengths = sorted({len(w) - 1
                                         for w in self.codewords.values()})

    def _validate(self) -> None:
        words = sorted(self.codewords.values())
        for w, nxt in zip(words, words[1:]):
            # after lexicographic sorting a prefix sits right before an
            # extension of itself, so adjacent pairs witness any violation
            if nxt.startswith(w):
                raise InvalidParameter(
                    f"codeword {w!r} duplicates or prefixes {nxt!r}")
        if self.kraft_sum() > 1.0 + KRAFT_TOL:
            raise InvalidParameter("Kraft inequality violated")

    def kraft_sum(self) -> float:
        return math.fsum(2.0 ** -len(w) for w in self.codewords.values())

    def average_length(self) -> float:
        return math.fsum(p * len(self.codewords[s])
                         for s, p in self.probs.items())

    def positive_symbols(self) -> list[Hashable]:
        return [s for s in self.symbols if self.probs[s] > 0.0]


def _fano_codewords(items: Sequence[tuple[Hashable, float]]) -> dict[Hashable, str]:
    """Assign codewords to (symbol, prob) items already sorted for splitting."""
    prefix_sums = [0.0]
    for _, p in items:
        prefix_sums.append(prefix_sums[-1] + p)
    out: dict[Hashable, str] = {}
    stack = [(0, len(items), "")]
    while stack:
        lo, hi, prefix = stack.pop()
        if hi - lo == 1:
            out[items[lo][0]] = prefix
            continue
        total = prefix_sums[hi] - prefix_sums[lo]
        best_s, best_diff = lo + 1, None
        for s in range(lo + 1, hi):
            left = prefix_sums[s] - prefix_sums[lo]
            diff = abs(2.0 * left - total)
            if best_diff is None or diff < best_diff:
                best_s, best_diff = s, diff
            elif diff > best_diff:
                break  # the difference is unimodal in s
        stack.append((best_s, hi, prefix + "1"))
        stack.append((lo, best_s, prefix + "0"))
    return out


def fano_build(probs, symbols: Sequence[Hashable] | None = None) -> Codebook:
    """Recursive Fano code over a distribution (see the pinned split rule)."""
    p = validate_distribution(probs)
    if symbols is None:
        symbols = tuple(range(p.size))
    else:
        symbols = tuple(symbols)
        if len(symbols) != p.size:
            raise InvalidParameter("symbols and probs must have equal length")
    if len(symbols) == 1:
        return Codebook(FLAT_FANO, {symbols[0]: "0"}, {symbols[0]: float(p[0])})
    order = sorted(range(p.size), key=lambda i: -p[i])
    items = [(symbols[i], float(p[i])) for i in order]
    words = _fano_codewords(items)
    return Codebook(FLAT_FANO, {s: words[s] for s in symbols},
                    {s: float(p[i]) for i, s in enumerate(symbols)})


def _even_parity_bit(word: str) -> str:
    return "1" if word.count("1") % 2 else "0"


def fano_parity_build(probs, symbols: Sequence[Hashable] | None = None) -> Codebook:
    """Fano code with one even-parity bit appended to every codeword."""
    base = fano_build(probs, symbols)
    words = {s: w + _even_parity_bit(w) for s, w in base.codewords.items()}
    return Codebook(FANO_PARITY, words, base.probs)


def _deterministic_book(symbol: Hashable) -> Codebook:
    return Codebook(FLAT_FANO, {symbol: ""}, {symbol: 1.0})


class SemanticCodebook:
    """Per-position conditional Fano books along a perspective.

    ``position_books[k]`` maps the already-encoded attribute context (a
    tuple, in perspective order) to the book coding the k-th visited
    category.  For the KB-merged kind, ``merge_map`` sends each original
    entity tuple to its synonym-class representative before encoding.
    """

    def __init__(
        self,
        kind: str,
        perspective: Perspective,
        categories: tuple[str, ...],
        position_books: Sequence[Mapping[tuple, Codebook]],
        probs: Mapping[tuple, float],
        merge_map: Mapping[tuple, tuple] | None = None,
    ) -> None:
        self.kind = kind
        self.perspective = perspective
        self.categories = categories
        self.position_books = tuple(dict(b) for b in position_books)
        self.probs = dict(probs)
        self.merge_map = dict(merge_map) if merge_map is not None else None

    def representative(self, coords: tuple) -> tuple:
        if self.merge_map is None:
            return coords
        return self.merge_map.get(coords, coords)

    def encode(self, coords: tuple) -> str:
        coords = self.representative(coords)
        ctx: tuple = ()
        parts = []
        for k, pos in enumerate(self.perspective.order):
            book = self.position_books[k].get(ctx)
            if book is None:
                raise UnreachableContext(
                    f"no sub-book for context {ctx!r} at position {k}")
            value = coords[pos]
            word = book.codewords.get(value)
            if word is None:
                raise UnknownSymbol(
                    f"attribute {value!r} unreachable under context {ctx!r}")
            parts.append(word)
            ctx = ctx + (value,)
        return "".join(parts)

    def decode_prefix(self, bits: str) -> tuple[list, int, bool]:
        """Walk position books over ``bits``.

        Returns (attributes in perspective order, consumed bits, ok); on a
        failed sub-walk the attribute list holds the positions completed so
        far and ok is False.
        """
        ctx: tuple = ()
        consumed = 0
        decoded: list = []
        for k in range(len(self.perspective.order)):
            book = self.position_books[k].get(ctx)
            if book is None:
                return decoded, consumed, False
            value = None
            for length in book._lengths:
                candidate = bits[consumed:consumed + length]
                if len(candidate) == length and candidate in book._by_word:
                    value = book._by_word[candidate]
                    consumed += length
                    break
            if value is None:
                return decoded, consumed, False
            decoded.append(value)
            ctx = ctx + (value,)
        return decoded, consumed, True

    def to_coords(self, decoded: Sequence) -> tuple:
        coords: list = [None] * len(self.categories)
        for k, pos in enumerate(self.perspective.order):
            if k < len(decoded):
                coords[pos] = decoded[k]
        return tuple(coords)

    def average_length(self) -> float:
        return math.fsum(p * len(self.encode(c))
                         for c, p in self.probs.items() if p > 0.0)


def _conditional_books(
    space: SemanticSpace,
    perspective: Perspective,
) -> tuple[list[dict[tuple, Codebook]], dict[tuple, float]]:
    order = perspective.order
    entities = [(e.coords, e.prob) for e in space.entities if e.prob > 0.0]
    if not entities:
        raise InvalidDistribution("space has no positive-mass entities")
    books: list[dict[tuple, Codebook]] = []
    groups: dict[tuple, list[tuple[tuple, float]]] = {(): entities}
    for k, pos in enumerate(order):
        declared = list(space.categories[pos].attributes) + [None]
        level: dict[tuple, Codebook] = {}
        refined: dict[tuple, list[tuple[tuple, float]]] = {}
        for ctx, members in groups.items():
            mass = math.fsum(p for _, p in members)
            by_value: dict[Optional[str], float] = {}
            for coords, p in members:
                by_value[coords[pos]] = by_value.get(coords[pos], 0.0) + p
                refined.setdefault(ctx + (coords[pos],), []).append((coords, p))
            values = [v for v in declared if v in by_value]
            if len(values) == 1:
                level[ctx] = _deterministic_book(values[0])
            else:
                cond = [by_value[v] / mass for v in values]
                level[ctx] = fano_build(cond, symbols=values)
        books.append(level)
        groups = refined
    probs = {coords: p for coords, p in entities}
    return books, probs


def semantic_build(
    space: SemanticSpace,
    perspective: Perspective | Sequence[int] | None = None,
) -> SemanticCodebook:
    """Conditional Fano books: one per reachable context along the perspective.

    Position 1 codes the first visited category's marginal; position k codes
    the conditional distribution given the attributes already fixed.
    Deterministic contexts emit the empty codeword.
    """
    if perspective is None:
        perspective = Perspective.identity(space.dim)
    elif not isinstance(perspective, Perspective):
        perspective = Perspective(tuple(perspective))
    if len(perspective.order) != space.dim:
        raise InvalidParameter("perspective does not span the space")
    books, probs = _conditional_books(space, perspective)
    return SemanticCodebook(
        SEMANTIC_FANO, perspective,
        tuple(c.name for c in space.categories), books, probs)


def merge_synonym_entities(
    space: SemanticSpace,
    partition: SynonymPartition,
) -> tuple[SemanticSpace, dict[tuple, tuple]]:
    """Combine synonym classes of entities into representative tuples.

    The representative takes, per category, the unique specified attribute
    among the class members; when members disagree on a specified slot the
    class is semantically ambiguous, so a warning is emitted and the
    highest-mass member's attribute wins.
    """
    by_coords = {e.coords: e.prob for e in space.entities}
    if partition.universe != set(by_coords):
        raise InvalidParameter(
            "synonym partition does not cover the space's entities")
    merged: dict[tuple, float] = {}
    merge_map: dict[tuple, tuple] = {}
    for group in partition.groups:
        mass = math.fsum(by_coords[c] for c in group)
        if len(group) == 1:
            rep = group[0]
        else:
            heaviest = max(group, key=lambda c: (by_coords[c], group.index(c) * -1))
            rep_slots = []
            for i in range(space.dim):
                values = [c[i] for c in group if c[i] is not None]
                distinct = set(values)
                if len(distinct) > 1:
                    warnings.warn(
                        f"synonym class {group!r} carries distinct attributes "
                        f"{sorted(distinct)!r} in category "
                        f"{space.categories[i].name!r}",
                        SemanticAmbiguityWarning, stacklevel=2)
                    rep_slots.append(heaviest[i])
                else:
                    rep_slots.append(values[0] if values else None)
            rep = tuple(rep_slots)
        # Distinct classes can resolve to one tuple; pool their mass.
        merged[rep] = merged.get(rep, 0.0) + mass
        for c in group:
            merge_map[c] = rep
    entities = tuple(Entity(c, p) for c, p in merged.items())
    merged_space = SemanticSpace(space.alphabet, space.categories,
                                 space.embedding, entities)
    return merged_space, merge_map


def semantic_kb_build(
    space: SemanticSpace,
    perspective: Perspective | Sequence[int] | None,
    kb: KnowledgeBase,
) -> SemanticCodebook:
    """Combine KB synonyms first, then build the conditional Fano books."""
    partition = synonyms(kb, [e.coords for e in space.entities])
    merged_space, merge_map = merge_synonym_entities(space, partition)
    book = semantic_build(merged_space, perspective)
    return SemanticCodebook(
        SEMANTIC_FANO_KB, book.perspective, book.categories,
        book.position_books, book.probs, merge_map=merge_map)


def encode(book: Codebook | SemanticCodebook, item) -> str:
    """Codeword for a symbol (flat books) or an entity tuple (semantic)."""
    if isinstance(book, SemanticCodebook):
        coords = item.coords if isinstance(item, Entity) else tuple(item)
        return book.encode(coords)
    word = book.codewords.get(item)
    if word is None:
        raise UnknownSymbol(f"symbol {item!r} not in codebook")
    return word


def decode(book: Codebook | SemanticCodebook, bits: str):
    """Prefix-walk ``bits`` and return (item, consumed bit count).

    Parity books expect one framed codeword: the parity of the whole frame
    is verified first, so any odd number of flipped bits raises
    ParityFailure.  Semantic books return the decoded entity tuple in
    category order.
    """
    if isinstance(book, SemanticCodebook):
        decoded, consumed, ok = book.decode_prefix(bits)
        if not ok:
            raise DecodeFailure(
                f"bits exhausted at position {len(decoded)} after "
                f"{consumed} bits")
        return book.to_coords(decoded), consumed
    if book.kind == FANO_PARITY:
        if bits.count("1") % 2:
            raise ParityFailure("frame parity is odd")
        for length in book._base_lengths:
            if len(bits) >= length + 1 and bits[:length] in book._by_base:
                return book._by_base[bits[:length]], length + 1
        raise DecodeFailure("no parity codeword matches")
    for length in book._lengths:
        if len(bits) >= length and bits[:length] in book._by_word:
            return book._by_word[bits[:length]], length
    raise DecodeFailure("no codeword matches")


def dump_codebook(book: Codebook | SemanticCodebook) -> str:
    """Tab-separated codeword table; semantic rows carry their context path."""
    def fmt(symbol) -> str:
        if isinstance(symbol, tuple):
            return "|".join("0" if a is None else str(a) for a in symbol)
        return str(symbol)

    lines = []
    if isinstance(book, SemanticCodebook):
        for k, level in enumerate(book.position_books):
            for ctx in sorted(level, key=lambda c: tuple(map(fmt, c))):
                path = ">".join(fmt(v) for v in ctx) or "."
                sub = level[ctx]
                for sym in sub.symbols:
                    lines.append(f"{path}\t{fmt(sym)}\t{sub.codewords[sym]}")
    else:
        for sym in book.symbols:
            lines.append(f"{fmt(sym)}\t{book.codewords[sym]}")
    return "\n".join(lines) + "\n"
