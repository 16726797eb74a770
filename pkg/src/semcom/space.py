"""Categories, embeddings, entities and the semantic probability space.

A category partitions the source alphabet into attribute-labelled subsets
plus a null subset; elements irrelevant to the category live in the null
subset and are encoded as ``None`` (serialized as the reserved label "0").
Tuples of per-category attributes are semantic entities; together with the
source probabilities they form the semantic probability space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Optional, Sequence

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NonPositiveThreshold,
    PartitionViolation,
    ProbabilityViolation,
    UnknownAttribute,
    ZeroMassCondition,
)

PROB_TOL = 1e-9

#: Reserved serialized label for the null / unspecified attribute slot.
NULL_LABEL = "0"


@dataclass(frozen=True)
class SourceAlphabet:
    """Discrete source: symbol identifiers with a probability mass each."""

    elements: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.elements) != len(self.probs):
            raise InvalidParameter("elements and probs must have equal length")
        if len(set(self.elements)) != len(self.elements):
            raise InvalidParameter("element identifiers must be unique")
        if any(p < -PROB_TOL for p in self.probs):
            raise ProbabilityViolation("negative probability mass")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ProbabilityViolation(f"alphabet mass {total!r} != 1")

    def prob(self, element: str) -> float:
        try:
            return self.probs[self.elements.index(element)]
        except ValueError:
            raise UnknownAttribute(f"unknown element {element!r}") from None

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.elements, self.probs))


@dataclass(frozen=True)
class Category:
    """One semantic partition of the alphabet.

    ``assignment`` maps every alphabet element to one attribute, or to
    ``None`` for the null subset of elements irrelevant to this category.
    """

    name: str
    attributes: tuple[str, ...]
    assignment: Mapping[str, Optional[str]]

    def __post_init__(self):
        if len(set(self.attributes)) != len(self.attributes):
            raise InvalidParameter(
                f"category {self.name!r}: duplicate attribute identifiers")
        if NULL_LABEL in self.attributes:
            raise InvalidParameter(
                f"category {self.name!r}: attribute name {NULL_LABEL!r} is "
                "reserved for the unspecified slot")
        known = set(self.attributes)
        for element, attr in self.assignment.items():
            if attr is not None and attr not in known:
                raise UnknownAttribute(
                    f"category {self.name!r}: element {element!r} assigned to "
                    f"undeclared attribute {attr!r}")

    def subset(self, attribute: Optional[str]) -> frozenset[str]:
        """Elements carrying ``attribute`` (``None`` selects the null subset)."""
        if attribute is not None and attribute not in self.attributes:
            raise UnknownAttribute(
                f"category {self.name!r} has no attribute {attribute!r}")
        return frozenset(e for e, a in self.assignment.items() if a == attribute)


@dataclass(frozen=True)
class Embedding:
    """Real coordinates for every attribute, one axis per category.

    ``coords[category][attribute]`` is the axis position; distinct attributes
    of one category must land on distinct coordinates, and declared antonym
    pairs must sit at exactly opposite positions.
    """

    coords: Mapping[str, Mapping[str, float]]
    norm_order: float = 2
    antonyms: tuple[tuple[str, str, str], ...] = ()  # (category, attr, attr)

    def __post_init__(self):
        if self.norm_order not in (1, 2, math.inf):
            raise InvalidParameter("norm_order must be 1, 2 or inf")
        for cat, table in self.coords.items():
            seen: dict[float, str] = {}
            for attr, x in table.items():
                if x in seen:
                    raise InvalidParameter(
                        f"category {cat!r}: attributes {seen[x]!r} and "
                        f"{attr!r} share coordinate {x!r}")
                seen[x] = attr
        for cat, a, b in self.antonyms:
            fa, fb = self.coordinate(cat, a), self.coordinate(cat, b)
            if fa != -fb:
                raise InvalidParameter(
                    f"antonym pair ({a!r}, {b!r}) in {cat!r}: "
                    f"{fa!r} != -({fb!r})")

    def coordinate(self, category: str, attribute: str) -> float:
        try:
            return self.coords[category][attribute]
        except KeyError:
            raise UnknownAttribute(
                f"no coordinate for attribute {attribute!r} in category "
                f"{category!r}") from None


def default_embedding(
    categories: Sequence[Category],
    overrides: Mapping[str, float] | None = None,
    antonym_pairs: Iterable[tuple[str, str]] = (),
    norm_order: float = 2,
) -> Embedding:
    """Integer-grid embedding: attribute i of a category sits at coordinate i+1.

    ``overrides`` (flat attribute -> coordinate) replace grid positions in
    every category declaring that attribute.  Antonym pairs are resolved per
    category containing both names: an unconstrained partner is moved to the
    negated coordinate, two explicit coordinates must already be opposite.
    """
    overrides = dict(overrides or {})
    coords: dict[str, dict[str, float]] = {}
    for cat in categories:
        coords[cat.name] = {
            attr: float(overrides.get(attr, i + 1))
            for i, attr in enumerate(cat.attributes)
        }
    resolved: list[tuple[str, str, str]] = []
    for a, b in antonym_pairs:
        hosts = [c for c in categories
                 if a in c.attributes and b in c.attributes]
        if not hosts:
            raise UnknownAttribute(
                f"antonym pair ({a!r}, {b!r}) matches no category")
        for cat in hosts:
            table = coords[cat.name]
            if a in overrides and b in overrides:
                if table[a] != -table[b]:
                    raise InvalidParameter(
                        f"antonym pair ({a!r}, {b!r}) has explicit "
                        "coordinates that are not opposite")
            elif b in overrides:
                table[a] = -table[b]
            else:
                table[b] = -table[a]
            resolved.append((cat.name, a, b))
    return Embedding(coords=coords, norm_order=norm_order,
                     antonyms=tuple(resolved))


@dataclass(frozen=True)
class Entity:
    """A tuple of attributes, one slot per category; ``None`` = unspecified."""

    coords: tuple[Optional[str], ...]
    prob: float

    def __post_init__(self):
        if self.prob < -PROB_TOL:
            raise ProbabilityViolation(
                f"entity {self.coords!r} has negative mass")

    @property
    def q(self) -> int:
        """Amount of semantics in suts: the number of specified slots."""
        return sum(1 for a in self.coords if a is not None)

    def specified(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.coords) if a is not None)


@dataclass(frozen=True)
class Perspective:
    """An ordering of category indices used to locate an entity."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise InvalidParameter(
                f"{self.order!r} is not a permutation of 0..{len(self.order) - 1}")

    @classmethod
    def identity(cls, m: int) -> "Perspective":
        return cls(tuple(range(m)))

    @classmethod
    def from_names(cls, space: "SemanticSpace", names: Sequence[str]) -> "Perspective":
        return cls(tuple(space.category_index(n) for n in names))


@dataclass(frozen=True)
class SemanticSpace:
    """The semantic probability space: categories, embedding and entities."""

    alphabet: SourceAlphabet
    categories: tuple[Category, ...]
    embedding: Embedding
    entities: tuple[Entity, ...]

    def __post_init__(self):
        names = [c.name for c in self.categories]
        if len(set(names)) != len(names):
            raise InvalidParameter("duplicate category names")
        m = len(self.categories)
        seen: set[tuple] = set()
        for e in self.entities:
            if len(e.coords) != m:
                raise InvalidParameter(
                    f"entity {e.coords!r} does not span {m} categories")
            if e.coords in seen:
                raise InvalidParameter(f"duplicate entity {e.coords!r}")
            seen.add(e.coords)
        total = math.fsum(e.prob for e in self.entities)
        if abs(total - 1.0) > PROB_TOL:
            raise ProbabilityViolation(f"entity mass {total!r} != 1")

    @property
    def dim(self) -> int:
        return len(self.categories)

    def category_index(self, name: str) -> int:
        for i, c in enumerate(self.categories):
            if c.name == name:
                return i
        raise UnknownAttribute(f"unknown category {name!r}")

    def entity_at(self, coords: tuple[Optional[str], ...]) -> Entity:
        for e in self.entities:
            if e.coords == coords:
                return e
        raise UnknownAttribute(f"no entity at {coords!r}")

    def positive_entities(self) -> list[Entity]:
        return [e for e in self.entities if e.prob > 0.0]


def build_space(
    alphabet: SourceAlphabet,
    categories: Sequence[Category],
    embedding: Embedding,
) -> SemanticSpace:
    """Assemble the space whose entities are the realized attribute tuples.

    Every category must partition exactly the given alphabet (each element
    assigned once); the probability of an entity is the total mass of the
    elements located at its tuple.
    """
    elements = set(alphabet.elements)
    for cat in categories:
        assigned = set(cat.assignment)
        missing = elements - assigned
        if missing:
            raise PartitionViolation(
                f"category {cat.name!r} leaves element "
                f"{sorted(missing)[0]!r} unassigned")
        extra = assigned - elements
        if extra:
            raise PartitionViolation(
                f"category {cat.name!r} assigns unknown element "
                f"{sorted(extra)[0]!r}")
        for attr in cat.attributes:
            embedding.coordinate(cat.name, attr)

    masses: dict[tuple, float] = {}
    for element, p in zip(alphabet.elements, alphabet.probs):
        coords = tuple(cat.assignment[element] for cat in categories)
        masses[coords] = masses.get(coords, 0.0) + p
    total = math.fsum(masses.values())
    if abs(total - 1.0) > PROB_TOL:
        raise ProbabilityViolation(f"entity mass {total!r} != 1")
    entities = tuple(Entity(coords, p) for coords, p in masses.items())
    return SemanticSpace(alphabet, tuple(categories), embedding, entities)


def compose(
    sub_a: tuple[Category, Optional[str]],
    sub_b: tuple[Category, Optional[str]],
    alphabet: SourceAlphabet,
) -> frozenset[str]:
    """Composition of two sub-mappings: the intersection of their subsets."""
    cat_a, attr_a = sub_a
    cat_b, attr_b = sub_b
    members = frozenset(alphabet.elements)
    return (cat_a.subset(attr_a) & cat_b.subset(attr_b)) & members


def distance(space: SemanticSpace, e1: Entity, e2: Entity) -> float:
    """p-norm distance between two entities over their specified slots.

    Only defined when both entities specify the same category subset; the
    framework gives no distance across differing dimensionalities.
    """
    if e1.specified() != e2.specified():
        raise DimensionMismatch(
            f"entities specify different category subsets: "
            f"{e1.specified()} vs {e2.specified()}")
    emb = space.embedding
    diffs = []
    for i in e1.specified():
        name = space.categories[i].name
        diffs.append(abs(emb.coordinate(name, e1.coords[i])
                         - emb.coordinate(name, e2.coords[i])))
    if not diffs:
        return 0.0
    p = emb.norm_order
    if p == 1:
        return math.fsum(diffs)
    if p == 2:
        return math.sqrt(math.fsum(d * d for d in diffs))
    return max(diffs)


def epsilon_similar(
    embedding: Embedding,
    category: Category | str,
    a: str,
    b: str,
    eps: float,
) -> bool:
    """True when two distinct attributes sit within ``eps`` of each other."""
    if not eps > 0:
        raise NonPositiveThreshold(f"eps must be > 0, got {eps!r}")
    name = category.name if isinstance(category, Category) else category
    if a == b:
        return False
    d = abs(embedding.coordinate(name, a) - embedding.coordinate(name, b))
    return 0 < d <= eps


def condition_subspace(
    space: SemanticSpace,
    fixed: Mapping[str, Optional[str]],
) -> SemanticSpace:
    """Condition the space on a partial attribute assignment.

    Returns the lower-dimensional space over the entities matching ``fixed``,
    with masses renormalized so the new sample space has measure one.
    """
    if not fixed:
        return space
    idx: dict[int, Optional[str]] = {}
    for name, attr in fixed.items():
        i = space.category_index(name)
        if attr is not None and attr not in space.categories[i].attributes:
            raise UnknownAttribute(
                f"category {name!r} has no attribute {attr!r}")
        idx[i] = attr

    matching = [e for e in space.entities
                if all(e.coords[i] == a for i, a in idx.items())]
    mass = math.fsum(e.prob for e in matching)
    if mass <= PROB_TOL:
        raise ZeroMassCondition(
            f"conditioning event {dict(fixed)!r} has zero probability")

    keep = [i for i in range(space.dim) if i not in idx]
    new_cats = []
    surviving = [el for el in space.alphabet.elements
                 if all(space.categories[i].assignment[el] == a
                        for i, a in idx.items())]
    el_mass = math.fsum(space.alphabet.prob(el) for el in surviving)
    if surviving and el_mass > 0:
        alphabet = SourceAlphabet(
            tuple(surviving),
            tuple(space.alphabet.prob(el) / el_mass for el in surviving))
    else:
        # Hand-built space whose alphabet does not mirror the entities; keep a
        # degenerate placeholder so the result still validates.
        alphabet = SourceAlphabet(("_conditioned",), (1.0,))
    for i in keep:
        cat = space.categories[i]
        assignment = {el: cat.assignment[el] for el in alphabet.elements
                      if el in cat.assignment}
        if not assignment:
            assignment = {el: None for el in alphabet.elements}
        new_cats.append(Category(cat.name, cat.attributes, assignment))

    coords = {space.categories[i].name: dict(space.embedding.coords.get(
        space.categories[i].name, {})) for i in keep}
    kept_names = {space.categories[i].name for i in keep}
    embedding = Embedding(
        coords=coords,
        norm_order=space.embedding.norm_order,
        antonyms=tuple(t for t in space.embedding.antonyms
                       if t[0] in kept_names))

    entities = tuple(
        Entity(tuple(e.coords[i] for i in keep), e.prob / mass)
        for e in matching)
    return SemanticSpace(alphabet, tuple(new_cats), embedding, entities)


# --- file format -------------------------------------------------------------

def load_space(source: str | IO[str] | dict) -> SemanticSpace:
    """Load a space definition document (see docs/space.schema.json).

    Keys: ``alphabet`` (symbol -> prob), ``categories`` (name ->
    {attribute -> [symbols]}), optional ``embedding`` (attribute ->
    coordinate), optional ``antonyms`` (list of pairs), optional
    ``norm_order`` (1, 2 or "inf").  Elements not listed under any attribute
    of a category fall into that category's null subset.
    """
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)

    try:
        raw_alphabet = doc["alphabet"]
        raw_categories = doc["categories"]
    except KeyError as exc:
        raise InvalidParameter(f"space document missing key {exc}") from None
    alphabet = SourceAlphabet(tuple(raw_alphabet), tuple(
        float(p) for p in raw_alphabet.values()))

    categories = []
    for name, attr_map in raw_categories.items():
        assignment: dict[str, Optional[str]] = {el: None
                                                for el in alphabet.elements}
        for attr, symbols in attr_map.items():
            for sym in symbols:
                if sym not in assignment:
                    raise PartitionViolation(
                        f"category {name!r}: attribute {attr!r} lists unknown "
                        f"element {sym!r}")
                if assignment[sym] is not None:
                    raise PartitionViolation(
                        f"category {name!r}: element {sym!r} assigned to both "
                        f"{assignment[sym]!r} and {attr!r}")
                assignment[sym] = attr
        categories.append(Category(name, tuple(attr_map), assignment))

    norm_order = doc.get("norm_order", 2)
    if norm_order == "inf":
        norm_order = math.inf
    embedding = default_embedding(
        categories,
        overrides=doc.get("embedding"),
        antonym_pairs=[tuple(p) for p in doc.get("antonyms", [])],
        norm_order=norm_order,
    )
    return build_space(alphabet, categories, embedding)


def space_to_dict(space: SemanticSpace) -> dict:
    """Inverse of :func:`load_space` for generated spaces."""
    cats: dict[str, dict[str, list[str]]] = {}
    for cat in space.categories:
        table: dict[str, list[str]] = {a: [] for a in cat.attributes}
        for el in space.alphabet.elements:
            attr = cat.assignment[el]
            if attr is not None:
                table[attr].append(el)
        cats[cat.name] = table
    embedding = {}
    for cat in space.categories:
        for attr in cat.attributes:
            embedding[attr] = space.embedding.coordinate(cat.name, attr)
    return {
        "alphabet": space.alphabet.as_dict(),
        "categories": cats,
        "embedding": embedding,
        "antonyms": [[a, b] for _, a, b in space.embedding.antonyms],
        "norm_order": ("inf" if space.embedding.norm_order == math.inf
                       else space.embedding.norm_order),
    }
