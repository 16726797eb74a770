"""Entropy measures: classical, categorizing over a perspective, and message.

All logarithms are base 2; zero-mass outcomes follow the 0*log(0) = 0
convention and zero-mass contexts contribute nothing to chain sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .errors import (
    DepthExceeded,
    EmptySpace,
    InconsistentKB,
    InvalidDistribution,
    MissingConditional,
)
from .space import Perspective, SemanticSpace

if TYPE_CHECKING:  # pragma: no cover
    from .kb import KnowledgeBase

PROB_TOL = 1e-9
KB_CONSISTENCY_TOL = 1e-6


def _xlogx(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)


def _entropy(p: np.ndarray) -> float:
    """Entropy of an already-validated vector."""
    return float(-_xlogx(p).sum())


def validate_distribution(probs, tol: float = PROB_TOL) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution("expected a non-empty probability vector")
    if np.any(p < -tol):
        raise InvalidDistribution("negative probability mass")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise InvalidDistribution(f"mass {total!r} != 1")
    return np.clip(p, 0.0, None)


def classical_entropy(probs) -> float:
    """-sum p log2 p of a discrete distribution, in bits."""
    return _entropy(validate_distribution(probs))


def categorizing_entropy(
    space: SemanticSpace,
    perspective: Perspective | Sequence[int] | None = None,
) -> float:
    """Chain entropy of the entity set along a perspective.

    Sums the entropy of the first partition plus the context-weighted
    entropies of each following partition conditioned on the attributes
    already fixed.  Under one-to-one element/entity correspondence this
    equals the classical entropy of the source for every perspective.
    """
    if not space.entities:
        raise EmptySpace("space has no entities")
    if perspective is None:
        perspective = Perspective.identity(space.dim)
    elif not isinstance(perspective, Perspective):
        perspective = Perspective(tuple(perspective))
    if len(perspective.order) != space.dim:
        raise InvalidDistribution(
            f"perspective spans {len(perspective.order)} of {space.dim} categories")

    total = 0.0
    groups: list[tuple[float, list]] = [
        (1.0, [e for e in space.entities if e.prob > 0.0])]
    for pos in perspective.order:
        refined: list[tuple[float, list]] = []
        for mass, members in groups:
            if mass <= 0.0:
                continue
            by_value: dict[Optional[str], list] = {}
            for e in members:
                by_value.setdefault(e.coords[pos], []).append(e)
            masses = np.array(
                [math.fsum(e.prob for e in sub) for sub in by_value.values()])
            cond = masses / mass
            total += mass * _entropy(cond)
            refined.extend(zip(masses.tolist(), by_value.values()))
        groups = refined
    return total


@dataclass(frozen=True)
class Message:
    """An ordered sequence of entity identifiers, one per position."""

    entities: tuple[str, ...]

    def validate_against(self, kb: "KnowledgeBase") -> None:
        if not 1 <= len(self.entities) <= kb.depth:
            raise DepthExceeded(
                f"message length {len(self.entities)} outside KB depth {kb.depth}")


class MessageEnsemble:
    """Per-position entity sets with an explicit joint probability table.

    ``joint[i1, ..., iK]`` is the probability that position k holds
    ``position_sets[k][ik]`` for every k.
    """

    def __init__(self, position_sets: Sequence[Sequence[str]], joint) -> None:
        self.position_sets = tuple(tuple(s) for s in position_sets)
        for k, ids in enumerate(self.position_sets):
            if len(set(ids)) != len(ids):
                raise InvalidDistribution(f"position {k}: duplicate entity ids")
        table = np.asarray(joint, dtype=float)
        dims = tuple(len(s) for s in self.position_sets)
        if table.shape != dims:
            raise InvalidDistribution(
                f"joint shape {table.shape} does not match position sets {dims}")
        if np.any(table < -PROB_TOL):
            raise InvalidDistribution("negative joint mass")
        total = float(table.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"joint mass {total!r} != 1")
        self.joint = np.clip(table, 0.0, None)

    @property
    def length(self) -> int:
        return len(self.position_sets)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.joint.shape

    def marginal(self, k: int) -> np.ndarray:
        axes = tuple(i for i in range(self.length) if i != k)
        return self.joint.sum(axis=axes) if axes else self.joint.copy()

    def prefix_mass(self, k: int) -> np.ndarray:
        """Mass of every length-k prefix context (shape dims[:k])."""
        if k == 0:
            return np.array(1.0)
        axes = tuple(range(k, self.length))
        return self.joint.sum(axis=axes) if axes else self.joint.copy()


def message_entropy_classical(ensemble: MessageEnsemble) -> float:
    """Sum of per-position marginal entropies (no relationship information)."""
    return math.fsum(_entropy(ensemble.marginal(k))
                     for k in range(ensemble.length))


def _check_kb_alignment(ensemble: MessageEnsemble, kb: "KnowledgeBase") -> None:
    if ensemble.length > kb.depth:
        raise DepthExceeded(
            f"ensemble length {ensemble.length} exceeds KB depth {kb.depth}")
    for k, ids in enumerate(ensemble.position_sets):
        if k < len(kb.position_sets) and kb.position_sets[k] != ids:
            raise InconsistentKB(
                f"position {k}: KB entity set differs from the ensemble's")


def _kb_rows(ensemble: MessageEnsemble, kb: "KnowledgeBase", k: int,
             ctx_mass: np.ndarray) -> np.ndarray:
    """Fetch and cross-check the KB conditional table for position k."""
    rows = kb.conditional_array(k)
    if rows is None:
        raise MissingConditional(f"KB stores no conditionals for position {k}")
    positive = ctx_mass > 0.0
    provided = kb.provided_mask(k)
    if provided is not None and np.any(positive & ~provided):
        raise MissingConditional(
            f"position {k}: a positive-mass context has no KB entry")
    with np.errstate(divide="ignore", invalid="ignore"):
        ens_cond = ensemble.prefix_mass(k + 1) / np.where(
            positive, ctx_mass, 1.0)[..., None]
    dev = np.abs(rows - ens_cond)[positive]
    if dev.size and float(dev.max()) > KB_CONSISTENCY_TOL:
        raise InconsistentKB(
            f"position {k}: KB conditional deviates from the joint by "
            f"{float(dev.max()):.3g}")
    return rows


def message_entropy_semantic(ensemble: MessageEnsemble,
                             kb: "KnowledgeBase") -> float:
    """Chain entropy of a message using the KB's conditional distributions."""
    _check_kb_alignment(ensemble, kb)
    total = _entropy(ensemble.marginal(0))
    for k in range(1, ensemble.length):
        ctx_mass = ensemble.prefix_mass(k)
        rows = _kb_rows(ensemble, kb, k, ctx_mass)
        h_rows = -_xlogx(rows).sum(axis=-1)
        total += float((ctx_mass * h_rows).sum())
    return total
