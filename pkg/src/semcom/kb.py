"""Knowledge base: synonym combination, attribute scaling, KB information.

The knowledge base stores two kinds of conditional knowledge about entities:
substitution entries (a pair of entities each fully determined by the other,
used to detect synonyms) and next-entity conditionals given the exact
preceding sequence (used for message-level entropy reduction).  Tables are
exact: an unseen context is an error, never an implicit zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .entropy import (
    MessageEnsemble,
    _check_kb_alignment,
    _entropy,
    _kb_rows,
    _xlogx,
    validate_distribution,
)
from .errors import (
    AbsolutelyDiscontinuous,
    GainSingularity,
    InvalidDistribution,
    InvalidParameter,
    MissingConditional,
    NonPositiveEpsilon,
    OverlappingBalls,
    PartitionMismatch,
    UncoveredAttribute,
    UnknownAttribute,
)
from .space import Category, Embedding

PROB_TOL = 1e-9


class KnowledgeBase:
    """Conditional distributions over entities, exact up to depth K.

    ``conditionals[k]`` (0-based position, k >= 1) is a dense table of shape
    ``dims[:k] + (dims[k],)`` holding P(position k | exact preceding
    sequence); an optional boolean mask of shape ``dims[:k]`` marks which
    context rows were actually provided.  ``substitutions`` holds directed
    determinism entries: (i, j) means entity j is certain given entity i in
    the same slot.
    """

    def __init__(
        self,
        depth: int,
        position_sets: Sequence[Sequence[Hashable]],
        conditionals: Sequence[Optional[np.ndarray]] | None = None,
        provided: Sequence[Optional[np.ndarray]] | None = None,
        substitutions: Iterable[tuple[Hashable, Hashable]] = (),
    ) -> None:
        if depth < 1:
            raise InvalidParameter(f"depth must be >= 1, got {depth!r}")
        self.depth = int(depth)
        self.position_sets = tuple(tuple(s) for s in position_sets)
        if len(self.position_sets) > self.depth:
            raise InvalidParameter(
                f"{len(self.position_sets)} position sets exceed depth {depth}")
        dims = tuple(len(s) for s in self.position_sets)
        n = len(self.position_sets)
        conds = list(conditionals) if conditionals is not None else [None] * n
        masks = list(provided) if provided is not None else [None] * n
        conds += [None] * (n - len(conds))
        masks += [None] * (n - len(masks))
        self._conditionals: list[Optional[np.ndarray]] = []
        self._provided: list[Optional[np.ndarray]] = []
        for k in range(n):
            table, mask = conds[k], masks[k]
            if table is None:
                self._conditionals.append(None)
                self._provided.append(None)
                continue
            table = np.asarray(table, dtype=float)
            want = dims[:k] + (dims[k],)
            if table.shape != want:
                raise InvalidParameter(
                    f"position {k}: conditional shape {table.shape} != {want}")
            if mask is not None:
                mask = np.asarray(mask, dtype=bool)
                if mask.shape != dims[:k]:
                    raise InvalidParameter(
                        f"position {k}: mask shape {mask.shape} != {dims[:k]}")
            rows = table.reshape(-1, dims[k])
            flat_mask = (np.ones(rows.shape[0], dtype=bool) if mask is None
                         else mask.reshape(-1))
            bad = flat_mask & (np.abs(rows.sum(axis=1) - 1.0) > PROB_TOL)
            if np.any(bad) or np.any(rows[flat_mask] < -PROB_TOL):
                raise InvalidDistribution(
                    f"position {k}: a provided conditional row is not a "
                    "distribution")
            self._conditionals.append(table)
            self._provided.append(mask)
        self.substitutions = frozenset(
            (a, b) for a, b in substitutions)

    def conditional_array(self, k: int) -> Optional[np.ndarray]:
        if k >= len(self._conditionals):
            return None
        return self._conditionals[k]

    def provided_mask(self, k: int) -> Optional[np.ndarray]:
        if k >= len(self._provided):
            return None
        return self._provided[k]

    @classmethod
    def from_table(
        cls,
        depth: int,
        position_sets: Sequence[Sequence[Hashable]],
        table: Mapping[tuple[int, tuple], Sequence[float]],
        substitutions: Iterable[tuple[Hashable, Hashable]] = (),
    ) -> "KnowledgeBase":
        """Build from sparse rows keyed by (position, exact context sequence)."""
        sets = [tuple(s) for s in position_sets]
        dims = tuple(len(s) for s in sets)
        index = [{e: i for i, e in enumerate(s)} for s in sets]
        conds: list[Optional[np.ndarray]] = [None] * len(sets)
        masks: list[Optional[np.ndarray]] = [None] * len(sets)
        for (k, ctx), row in table.items():
            if not 1 <= k < len(sets):
                raise InvalidParameter(f"conditional position {k} out of range")
            if len(ctx) != k:
                raise InvalidParameter(
                    f"position {k} expects context length {k}, got {len(ctx)}")
            if conds[k] is None:
                conds[k] = np.zeros(dims[:k] + (dims[k],))
                masks[k] = np.zeros(dims[:k], dtype=bool)
            try:
                where = tuple(index[j][e] for j, e in enumerate(ctx))
            except KeyError as exc:
                raise UnknownAttribute(
                    f"context entity {exc} not in its position set") from None
            conds[k][where] = validate_distribution(row)
            masks[k][where] = True
        return cls(depth, sets, conds, masks, substitutions)

    @classmethod
    def from_ensemble(
        cls,
        ensemble: MessageEnsemble,
        substitutions: Iterable[tuple[Hashable, Hashable]] = (),
        depth: int | None = None,
    ) -> "KnowledgeBase":
        """Exact conditionals derived from an ensemble's joint table."""
        conds: list[Optional[np.ndarray]] = [None]
        masks: list[Optional[np.ndarray]] = [None]
        for k in range(1, ensemble.length):
            ctx = ensemble.prefix_mass(k)
            positive = ctx > 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                rows = ensemble.prefix_mass(k + 1) / np.where(
                    positive, ctx, 1.0)[..., None]
            rows[~positive] = 0.0
            conds.append(rows)
            masks.append(positive)
        return cls(depth or ensemble.length, ensemble.position_sets,
                   conds, masks, substitutions)


@dataclass(frozen=True)
class SynonymPartition:
    """Disjoint synonym classes covering an entity set."""

    groups: tuple[tuple[Hashable, ...], ...]

    def __post_init__(self):
        seen: set = set()
        for g in self.groups:
            for member in g:
                if member in seen:
                    raise PartitionMismatch(
                        f"entity {member!r} appears in two groups")
                seen.add(member)

    @property
    def universe(self) -> frozenset:
        return frozenset(m for g in self.groups for m in g)

    def nontrivial(self) -> list[tuple[Hashable, ...]]:
        return [g for g in self.groups if len(g) > 1]


def synonyms(kb: KnowledgeBase, entities: Sequence[Hashable]) -> SynonymPartition:
    """Group entities that the KB declares mutually certain substitutes.

    Two entities are synonyms when each is a substitution target of the
    other; groups are the transitive closure of that relation, and entities
    with no synonym form singletons.
    """
    members = list(dict.fromkeys(entities))
    member_set = set(members)
    mutual = {(a, b) for a, b in kb.substitutions if (b, a) in kb.substitutions}
    for a, b in mutual:
        inside_a, inside_b = a in member_set, b in member_set
        if inside_a != inside_b:
            missing = b if inside_a else a
            raise MissingConditional(
                f"substitution partner {missing!r} is outside the entity set")

    parent = {e: e for e in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in mutual:
        if a in member_set and b in member_set:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra

    grouped: dict[Hashable, list] = {}
    for e in members:
        grouped.setdefault(find(e), []).append(e)
    return SynonymPartition(tuple(tuple(g) for g in grouped.values()))


def combine_synonyms(
    probs: Mapping[Hashable, float],
    partition: SynonymPartition,
) -> tuple[dict[tuple[Hashable, ...], float], float, float]:
    """Sum each synonym group's mass and report the entropy before/after.

    Combination never increases entropy; it strictly decreases exactly when
    some group holds at least two positive-mass members.
    """
    if partition.universe != set(probs):
        raise PartitionMismatch(
            "partition universe does not match the support of probs")
    p = validate_distribution(list(probs.values()))
    before = _entropy(p)
    combined = {
        g: math.fsum(probs[m] for m in g) for g in partition.groups}
    after = _entropy(np.array(list(combined.values())))
    return combined, before, after


@dataclass(frozen=True)
class ScaledCategory:
    """A category rescaled onto similarity balls, with per-target ambiguity."""

    source: Category
    balls: Mapping[str, tuple[str, ...]]       # target attribute -> members
    ambiguity: Mapping[str, float]             # target attribute -> delta
    probs: Mapping[str, float]                 # target attribute -> mass


def scale_category(
    category: Category,
    embedding: Embedding,
    centers: Sequence[tuple[str | float, float]],
    probs: Mapping[str, float],
) -> ScaledCategory:
    """Scale a category's attributes onto disjoint covering similarity balls.

    Each center is an attribute name or a raw axis coordinate with a radius
    eps; the ball collects every attribute within eps of the center.  Balls
    must be pairwise disjoint and jointly cover the category; each target's
    ambiguity is eps normalized by the category extent, so eps may not
    exceed that extent.
    """
    attrs = category.attributes
    if set(probs) != set(attrs):
        raise InvalidParameter(
            "probs must cover exactly the category's attributes")
    validate_distribution([probs[a] for a in attrs])
    coords = {a: embedding.coordinate(category.name, a) for a in attrs}
    extent = max((abs(coords[a] - coords[b]) for a in attrs for b in attrs),
                 default=0.0)

    balls: dict[str, tuple[str, ...]] = {}
    ambiguity: dict[str, float] = {}
    masses: dict[str, float] = {}
    claimed: dict[str, str] = {}
    for center, eps in centers:
        if not eps > 0:
            raise NonPositiveEpsilon(f"ball radius must be > 0, got {eps!r}")
        if eps > extent:
            raise InvalidParameter(
                f"radius {eps!r} exceeds the category extent {extent!r}; "
                "ambiguity would leave [0, 1]")
        if isinstance(center, str):
            if center not in coords:
                raise UnknownAttribute(
                    f"category {category.name!r} has no attribute {center!r}")
            target, x0 = center, coords[center]
        else:
            x0 = float(center)
            target = min(attrs, key=lambda a: (abs(coords[a] - x0),
                                               attrs.index(a)))
        members = tuple(a for a in attrs if abs(coords[a] - x0) <= eps)
        for m in members:
            if m in claimed:
                raise OverlappingBalls(
                    f"attribute {m!r} falls in the balls of {claimed[m]!r} "
                    f"and {target!r}")
            claimed[m] = target
        if target in balls:
            raise OverlappingBalls(f"two balls resolve to target {target!r}")
        balls[target] = members
        ambiguity[target] = eps / extent
        masses[target] = math.fsum(probs[m] for m in members)

    uncovered = [a for a in attrs if a not in claimed]
    if uncovered:
        raise UncoveredAttribute(
            f"attribute {uncovered[0]!r} lies outside every ball")
    return ScaledCategory(source=category, balls=balls,
                          ambiguity=ambiguity, probs=masses)


def kb_mutual_information(ensemble: MessageEnsemble,
                          kb: KnowledgeBase) -> float:
    """Message-level KB information: context-weighted KL divergence, in bits.

    Sums, over positions and positive-mass contexts, the divergence of the
    KB conditional from the position marginal.  Equals the gap between the
    classical and semantic message entropies.
    """
    _check_kb_alignment(ensemble, kb)
    total = 0.0
    for k in range(1, ensemble.length):
        ctx_mass = ensemble.prefix_mass(k)
        rows = _kb_rows(ensemble, kb, k, ctx_mass)
        marginal = ensemble.marginal(k)
        positive = ctx_mass > 0.0
        support = rows > 0.0
        if np.any(support[positive] & (marginal <= 0.0)):
            raise AbsolutelyDiscontinuous(
                f"position {k}: conditional mass on a zero-marginal entity")
        safe_q = np.where(marginal > 0.0, marginal, 1.0)
        kl_rows = (_xlogx(rows)
                   - np.where(support, rows * np.log2(safe_q), 0.0)).sum(axis=-1)
        total += float((ctx_mass * np.where(positive, kl_rows, 0.0)).sum())
    return total


def kb_gain(classical_entropy: float, i_kb: float) -> float:
    """Multiplicative gain from KB information: H / (H - I)."""
    if not classical_entropy > 0:
        raise InvalidParameter("classical entropy must be > 0")
    if i_kb < 0:
        raise InvalidParameter("KB information must be >= 0")
    if classical_entropy - i_kb <= 1e-12:
        raise GainSingularity(
            "KB information saturates the source entropy; the source is "
            "deterministic under the KB")
    return classical_entropy / (classical_entropy - i_kb)


def semantic_capacity(
    s_kb: float,
    classical_entropy: float,
    m: int,
    bandwidth_hz: float,
    snr_linear: float,
) -> float:
    """KB-aware channel capacity in suts per second.

    Shannon capacity scaled by the KB gain and divided by the attribute
    information density (source entropy per category).
    """
    if not bandwidth_hz > 0:
        raise InvalidParameter("bandwidth must be > 0")
    if snr_linear < 0:
        raise InvalidParameter("linear SNR must be >= 0")
    if m < 1:
        raise InvalidParameter("dimension must be >= 1")
    if not classical_entropy > 0:
        raise InvalidParameter("classical entropy must be > 0")
    density = classical_entropy / m
    return s_kb * (1.0 / density) * bandwidth_hz * math.log2(1.0 + snr_linear)


# --- file format -------------------------------------------------------------

def load_kb(source: str | IO[str] | dict) -> KnowledgeBase:
    """Load a KB document (see docs/kb.schema.json).

    Keys: ``depth``, ``positions`` (list of entity-id lists), optional
    ``conditionals`` ({target position (1-based) -> {comma-joined context ->
    probability row}}), optional ``substitutions`` (list of id pairs).
    """
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)

    try:
        depth = int(doc["depth"])
        positions = [list(p) for p in doc["positions"]]
    except KeyError as exc:
        raise InvalidParameter(f"KB document missing key {exc}") from None
    for ids in positions:
        for e in ids:
            if "," in e:
                raise InvalidParameter(
                    f"entity id {e!r} may not contain a comma")

    table: dict[tuple[int, tuple], Sequence[float]] = {}
    for pos_str, rows in doc.get("conditionals", {}).items():
        k = int(pos_str) - 1
        for ctx_str, row in rows.items():
            ctx = tuple(ctx_str.split(",")) if ctx_str else ()
            table[(k, ctx)] = row
    substitutions = [tuple(p) for p in doc.get("substitutions", [])]
    if table:
        return KnowledgeBase.from_table(depth, positions, table, substitutions)
    return KnowledgeBase(depth, positions, substitutions=substitutions)


def kb_to_dict(kb: KnowledgeBase) -> dict:
    """Inverse of :func:`load_kb` for generated knowledge bases."""
    conditionals: dict[str, dict[str, list[float]]] = {}
    for k in range(1, len(kb.position_sets)):
        table = kb.conditional_array(k)
        if table is None:
            continue
        mask = kb.provided_mask(k)
        rows: dict[str, list[float]] = {}
        for flat, row in enumerate(table.reshape(-1, table.shape[-1])):
            if mask is not None and not mask.reshape(-1)[flat]:
                continue
            ctx = np.unravel_index(flat, table.shape[:-1])
            key = ",".join(str(kb.position_sets[j][i])
                           for j, i in enumerate(ctx))
            rows[key] = [float(x) for x in row]
        conditionals[str(k + 1)] = rows
    return {
        "depth": kb.depth,
        "positions": [list(s) for s in kb.position_sets],
        "conditionals": conditionals,
        "substitutions": sorted([list(p) for p in kb.substitutions]),
    }
