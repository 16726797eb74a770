"""Synthetic sources: Zipf distributions, random spaces, dependency KBs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import MessageEnsemble, validate_distribution
from .errors import InvalidParameter
from .kb import KnowledgeBase
from .space import (
    Category,
    SemanticSpace,
    SourceAlphabet,
    build_space,
    default_embedding,
)

#: Symmetric Dirichlet concentrations pinning the two source-variance regimes.
CONCENTRATION = {"low": 10.0, "high": 0.3}


def zipf_probs(n: int, a: float) -> np.ndarray:
    """Normalized power law p(i) proportional to i**-a, i = 1..n."""
    if n < 1:
        raise InvalidParameter(f"support size must be >= 1, got {n!r}")
    if not (math.isfinite(a) and a >= 0):
        raise InvalidParameter(f"exponent must be finite and >= 0, got {a!r}")
    weights = np.arange(1, n + 1, dtype=float) ** (-a)
    return weights / weights.sum()


def zipf_index_variance(n: int, a: float) -> float:
    """Variance of the rank random variable under a Zipf(n, a) law."""
    p = zipf_probs(n, a)
    i = np.arange(1, n + 1, dtype=float)
    mean = float((p * i).sum())
    return float((p * i * i).sum() - mean * mean)


@dataclass(frozen=True)
class ZipfSource:
    """A Zipf-distributed discrete source."""

    n: int
    a: float

    def probs(self) -> np.ndarray:
        return zipf_probs(self.n, self.a)


@dataclass(frozen=True)
class SpaceSpec:
    """Recipe for one randomized semantic space."""

    dims: int
    attrs_per_dim: tuple[int, ...]
    variance_mode: str = "low"
    seed: int = 0

    def __post_init__(self):
        if self.dims != len(self.attrs_per_dim):
            raise InvalidParameter("attrs_per_dim must list one count per dim")
        if any(n < 1 for n in self.attrs_per_dim):
            raise InvalidParameter("attribute counts must be >= 1")
        if self.variance_mode not in CONCENTRATION:
            raise InvalidParameter(
                f"variance_mode must be one of {sorted(CONCENTRATION)}")


def random_space(spec: SpaceSpec) -> SemanticSpace:
    """Space whose entity joint is a symmetric Dirichlet draw over all tuples.

    One synthetic alphabet element is created per attribute tuple, so the
    resulting space is in one-to-one element/entity correspondence.
    """
    rng = np.random.default_rng(spec.seed)
    attr_names = [tuple(f"c{j + 1}a{i + 1}" for i in range(n))
                  for j, n in enumerate(spec.attrs_per_dim)]
    tuples = list(itertools.product(*attr_names))
    probs = rng.dirichlet(np.full(len(tuples),
                                  CONCENTRATION[spec.variance_mode]))
    elements = tuple(f"b{i + 1}" for i in range(len(tuples)))
    alphabet = SourceAlphabet(elements, tuple(float(p) for p in probs))
    categories = [
        Category(
            name=f"c{j + 1}",
            attributes=attr_names[j],
            assignment={el: tup[j] for el, tup in zip(elements, tuples)},
        )
        for j in range(spec.dims)
    ]
    return build_space(alphabet, categories, default_embedding(categories))


def synth_kb(
    position_marginals: Sequence[tuple[Sequence[str], Sequence[float]]],
    rho: float,
    seed: int,
) -> tuple[MessageEnsemble, KnowledgeBase]:
    """Dependency-controlled ensemble/KB pair.

    Each position's conditional mixes its base marginal with a point mass on
    a seeded deterministic target of the context: weight ``1 - rho`` on the
    marginal, ``rho`` on the target.  ``rho = 0`` gives independent
    positions; ``rho = 1`` gives deterministic chains.  The ensemble joint
    is the chain product of the same rows, so KB and joint agree exactly.
    """
    if not 0.0 <= rho <= 1.0:
        raise InvalidParameter(f"rho must lie in [0, 1], got {rho!r}")
    if not position_marginals:
        raise InvalidParameter("need at least one position")
    sets = [tuple(ids) for ids, _ in position_marginals]
    bases = [validate_distribution(p) for _, p in position_marginals]
    dims = tuple(len(s) for s in sets)
    rng = np.random.default_rng(seed)

    joint = bases[0].copy()
    conds: list = [None]
    masks: list = [None]
    for k in range(1, len(sets)):
        n_k = dims[k]
        n_ctx = int(np.prod(dims[:k]))
        perm = rng.permutation(n_k)
        targets = perm[np.arange(n_ctx) % n_k]
        rows = np.broadcast_to((1.0 - rho) * bases[k], (n_ctx, n_k)).copy()
        rows[np.arange(n_ctx), targets] += rho
        cond = rows.reshape(dims[:k] + (n_k,))
        conds.append(cond)
        masks.append(None)
        joint = joint[..., None] * cond
    ensemble = MessageEnsemble(sets, joint)
    kb = KnowledgeBase(len(sets), sets, conds, masks)
    return ensemble, kb
