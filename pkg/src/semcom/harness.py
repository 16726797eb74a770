"""Config-driven experiment sweeps emitting self-describing CSV datasets.

Each experiment id names one desk-scale sweep; the resolved configuration
(defaults filled) is embedded as a ``# config`` comment so every dataset can
be reproduced from the file alone.  Grid points draw their RNG streams from
(base seed, point index), so the row content is independent of execution
order or worker count.  The ``n_messages`` column is 0 for experiments whose
metrics are exact rather than Monte-Carlo.
"""

from __future__ import annotations

import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Mapping, Optional, Sequence

import numpy as np

from .channel import (
    BASE_SEED,
    ChannelModel,
    TrialReport,
    build_codec,
    run_link_trial,
)
from .coding import (
    FANO_PARITY,
    FLAT_FANO,
    SEMANTIC_FANO,
    semantic_kb_build,
)
from .entropy import classical_entropy, message_entropy_classical
from .errors import ConfigError, SemanticAmbiguityWarning
from .kb import KnowledgeBase, kb_gain, kb_mutual_information
from .sources import SpaceSpec, random_space, synth_kb, zipf_index_variance, zipf_probs
from .space import Category, SemanticSpace, SourceAlphabet, build_space, default_embedding

EXPERIMENT_IDS = ("fig5", "fig6", "fig7", "fig8", "fig9", "fig10")

_GRID_DEFAULTS: dict[str, dict] = {
    "fig5": {"attrs_start": 2, "attrs_stop": 32, "attrs_step": 2,
             "dims": 2, "n_seeds": 3, "variance": "high"},
    "fig6": {"snr_start_db": -5.0, "snr_stop_db": 15.0, "snr_step_db": 2.5},
    "fig7": {"snr_start_db": -5.0, "snr_stop_db": 15.0, "snr_step_db": 2.5},
    "fig8": {"attrs_start": 4, "attrs_stop": 16, "attrs_step": 2,
             "dims": 2, "n_seeds": 3, "variance": "high",
             "synonym_fraction": 0.4},
    "fig9": {"attrs_start": 2, "attrs_stop": 16, "attrs_step": 2,
             "dims": 2, "n_seeds": 3},
    "fig10": {"a_start": 1.5, "a_stop": 4.0, "a_step": 0.5,
              "k_values": [2, 3, 4], "zipf_n": 64},
}

_HEADERS: dict[str, list[str]] = {
    "fig5": ["attrs", "eff_traditional", "eff_semantic", "eff_parity",
             "seed", "n_messages"],
    "fig6": ["snr_db", "ser_traditional", "ser_semantic", "ser_parity",
             "seed", "n_messages"],
    "fig7": ["snr_db", "semeff_traditional", "semeff_semantic",
             "semeff_parity", "seed", "n_messages"],
    "fig8": ["attrs", "len_semantic_kb", "len_traditional", "len_semantic",
             "seed", "n_messages"],
    "fig9": ["attrs", "len_traditional_low", "len_semantic_low",
             "len_traditional_high", "len_semantic_high", "seed",
             "n_messages"],
    "fig10": ["zipf_a", "skb_k2", "skb_k3", "skb_k4", "seed", "n_messages"],
}


def _header_for(config: "ExperimentConfig") -> list[str]:
    if config.experiment == "fig10":
        ks = [int(k) for k in config.grid["k_values"]]
        return ["zipf_a"] + [f"skb_k{k}" for k in ks] + ["seed", "n_messages"]
    return list(_HEADERS[config.experiment])


def point_seed(base: int, index: int) -> int:
    """Schedule-independent RNG seed for one grid point."""
    if base < 0 or index < 0:
        raise ConfigError("seeds and point indices must be non-negative")
    ss = np.random.SeedSequence([int(base), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment id plus its fully resolved sweep parameters."""

    experiment: str
    seed: int = BASE_SEED
    n_messages: int = 100_000
    workers: int = 1
    out: Optional[str] = None
    grid: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"expected one of {EXPERIMENT_IDS}")
        if self.n_messages < 1:
            raise ConfigError("n_messages must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        defaults = _GRID_DEFAULTS[self.experiment]
        unknown = set(self.grid) - set(defaults)
        if unknown:
            raise ConfigError(
                f"{self.experiment}: unknown grid keys {sorted(unknown)}")
        merged = {**defaults, **dict(self.grid)}
        object.__setattr__(self, "grid", merged)

    @classmethod
    def from_mapping(cls, doc: Mapping[str, object]) -> "ExperimentConfig":
        doc = dict(doc)
        try:
            experiment = str(doc.pop("experiment"))
        except KeyError:
            raise ConfigError("config missing 'experiment'") from None
        seed = int(doc.pop("seed", BASE_SEED))
        n_messages = int(doc.pop("n_messages", 100_000))
        workers = int(doc.pop("workers", 1))
        out = doc.pop("out", None)
        return cls(experiment=experiment, seed=seed, n_messages=n_messages,
                   workers=workers, out=out, grid=doc)

    def resolved(self) -> dict:
        doc = {"experiment": self.experiment, "seed": self.seed,
               "n_messages": self.n_messages, "workers": self.workers}
        doc.update(self.grid)
        return doc


@dataclass(frozen=True)
class CsvDataset:
    """Rows plus the resolved config they were produced from."""

    header: tuple[str, ...]
    rows: tuple[tuple, ...]
    config: Mapping[str, object]

    def to_string(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def write(self, target: str | IO[str]) -> None:
        if isinstance(target, str):
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                self._emit(fh)
        else:
            self._emit(target)

    def _emit(self, fh: IO[str]) -> None:
        fh.write("# config " + json.dumps(dict(self.config), sort_keys=True)
                 + "\n")
        fh.write(",".join(self.header) + "\n")
        for row in self.rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _float_grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0 or stop < start:
        raise ConfigError("grid requires step > 0 and stop >= start")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        values.append(round(v, 9))
        k += 1
    return values


def _int_grid(start: int, stop: int, step: int) -> list[int]:
    if step <= 0 or stop < start:
        raise ConfigError("grid requires step > 0 and stop >= start")
    return list(range(int(start), int(stop) + 1, int(step)))


def default_link_space() -> SemanticSpace:
    """Dyadic 2-D source used by the SNR sweeps.

    The marginal and every conditional are dyadic, so the flat and the
    conditional Fano codes both hit the entropy exactly and assign the same
    per-entity codeword length; the SNR comparison then isolates how the
    codecs degrade, not how they round.
    """
    base = (0.5, 0.25, 0.125, 0.125)
    xs = tuple(f"x{i + 1}" for i in range(4))
    ys = tuple(f"y{j + 1}" for j in range(4))
    elements, probs = [], []
    assign_x, assign_y = {}, {}
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            el = f"b{i * 4 + j + 1}"
            elements.append(el)
            probs.append(base[i] * base[(j - i) % 4])
            assign_x[el] = x
            assign_y[el] = y
    categories = [
        Category("c1", xs, assign_x),
        Category("c2", ys, assign_y),
    ]
    alphabet = SourceAlphabet(tuple(elements), tuple(probs))
    return build_space(alphabet, categories, default_embedding(categories))


def _entity_distribution(space: SemanticSpace) -> np.ndarray:
    return np.array([e.prob for e in space.positive_entities()])


def _codec_lengths(space: SemanticSpace) -> dict[str, float]:
    return {kind: build_codec(space, kind).average_length()
            for kind in (FLAT_FANO, SEMANTIC_FANO, FANO_PARITY)}


# --- per-figure runners ------------------------------------------------------

def _run_fig5(cfg: ExperimentConfig) -> list[tuple]:
    g = cfg.grid
    rows = []
    index = 0
    for n in _int_grid(g["attrs_start"], g["attrs_stop"], g["attrs_step"]):
        for _ in range(int(g["n_seeds"])):
            seed = point_seed(cfg.seed, index)
            index += 1
            space = random_space(SpaceSpec(
                int(g["dims"]), (n,) * int(g["dims"]),
                str(g["variance"]), seed))
            entropy = classical_entropy(_entity_distribution(space))
            lengths = _codec_lengths(space)
            rows.append((n,
                         entropy / lengths[FLAT_FANO],
                         entropy / lengths[SEMANTIC_FANO],
                         entropy / lengths[FANO_PARITY],
                         seed, 0))
    return rows


def _link_point(args) -> tuple[int, dict[str, TrialReport]]:
    index, snr_db, n_messages, seed = args
    space = default_link_space()
    channel = ChannelModel(snr_db)
    reports = {
        kind: run_link_trial(space, kind, channel, n_messages, seed)
        for kind in (FLAT_FANO, SEMANTIC_FANO, FANO_PARITY)
    }
    return index, reports


def _run_link_sweep(cfg: ExperimentConfig) -> list[tuple[float, int, dict]]:
    g = cfg.grid
    snrs = _float_grid(g["snr_start_db"], g["snr_stop_db"], g["snr_step_db"])
    payloads = [(i, snr, cfg.n_messages, point_seed(cfg.seed, i))
                for i, snr in enumerate(snrs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = dict(pool.map(_link_point, payloads))
    else:
        results = dict(map(_link_point, payloads))
    return [(snr, payloads[i][3], results[i]) for i, snr in enumerate(snrs)]


def _run_fig6(cfg: ExperimentConfig) -> list[tuple]:
    return [(snr,
             r[FLAT_FANO].ser, r[SEMANTIC_FANO].ser, r[FANO_PARITY].ser,
             seed, cfg.n_messages)
            for snr, seed, r in _run_link_sweep(cfg)]


def _run_fig7(cfg: ExperimentConfig) -> list[tuple]:
    return [(snr,
             r[FLAT_FANO].semantic_efficiency,
             r[SEMANTIC_FANO].semantic_efficiency,
             r[FANO_PARITY].semantic_efficiency,
             seed, cfg.n_messages)
            for snr, seed, r in _run_link_sweep(cfg)]


def synonym_kb_for_space(space: SemanticSpace,
                         fraction: float) -> KnowledgeBase:
    """Substitution KB pairing ~``fraction`` of entities by probability rank.

    Adjacent-rank pairs put comparable masses in one class, which is where
    combining synonyms actually buys code length.
    """
    coords = [e.coords for e in space.entities]
    probs = {e.coords: e.prob for e in space.entities}
    ranked = sorted(coords, key=lambda c: (-probs[c], c))
    target = int(round(fraction * len(coords)))
    pairs: list[tuple] = []
    used = 0
    while used < target and used + 2 <= len(ranked):
        a, b = ranked[used], ranked[used + 1]
        pairs.extend([(a, b), (b, a)])
        used += 2
    return KnowledgeBase(1, (tuple(coords),), substitutions=pairs)


def _run_fig8(cfg: ExperimentConfig) -> list[tuple]:
    g = cfg.grid
    rows = []
    index = 0
    for n in _int_grid(g["attrs_start"], g["attrs_stop"], g["attrs_step"]):
        for _ in range(int(g["n_seeds"])):
            seed = point_seed(cfg.seed, index)
            index += 1
            space = random_space(SpaceSpec(
                int(g["dims"]), (n,) * int(g["dims"]),
                str(g["variance"]), seed))
            kb = synonym_kb_for_space(space, float(g["synonym_fraction"]))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SemanticAmbiguityWarning)
                kb_len = semantic_kb_build(space, None, kb).average_length()
            lengths = _codec_lengths(space)
            rows.append((n, kb_len, lengths[FLAT_FANO],
                         lengths[SEMANTIC_FANO], seed, 0))
    return rows


def _run_fig9(cfg: ExperimentConfig) -> list[tuple]:
    g = cfg.grid
    rows = []
    index = 0
    for n in _int_grid(g["attrs_start"], g["attrs_stop"], g["attrs_step"]):
        for _ in range(int(g["n_seeds"])):
            seed = point_seed(cfg.seed, index)
            index += 1
            row: list = [n]
            for mode_index, mode in enumerate(("low", "high")):
                space = random_space(SpaceSpec(
                    int(g["dims"]), (n,) * int(g["dims"]), mode,
                    point_seed(seed, mode_index)))
                lengths = _codec_lengths(space)
                row.extend([lengths[FLAT_FANO], lengths[SEMANTIC_FANO]])
            row.extend([seed, 0])
            rows.append(tuple(row))
    return rows


def zipf_dependency(n: int, a: float, a_grid: Sequence[float]) -> float:
    """Dependency strength for the Zipf sweep.

    The rank variance shrinks as the exponent grows, mirroring how entity
    interdependence fades; normalizing by the sweep maximum maps it onto
    [0, 1].
    """
    top = max(zipf_index_variance(n, v) for v in a_grid)
    return zipf_index_variance(n, a) / top


def _run_fig10(cfg: ExperimentConfig) -> list[tuple]:
    g = cfg.grid
    a_values = _float_grid(g["a_start"], g["a_stop"], g["a_step"])
    k_values = [int(k) for k in g["k_values"]]
    n = int(g["zipf_n"])
    ids = tuple(f"e{i + 1}" for i in range(n))
    rows = []
    for index, a in enumerate(a_values):
        seed = point_seed(cfg.seed, index)
        rho = zipf_dependency(n, a, a_values)
        marginal = zipf_probs(n, a)
        row: list = [a]
        for k in k_values:
            ensemble, kb = synth_kb([(ids, marginal)] * k, rho,
                                    point_seed(seed, k))
            h_c = message_entropy_classical(ensemble)
            i_kb = kb_mutual_information(ensemble, kb)
            row.append(kb_gain(h_c, i_kb))
        row.extend([seed, 0])
        rows.append(tuple(row))
    return rows


_RUNNERS = {
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "fig9": _run_fig9,
    "fig10": _run_fig10,
}


def run_experiment(config: ExperimentConfig) -> CsvDataset:
    """Run one sweep and return (optionally also write) its CSV dataset."""
    rows = _RUNNERS[config.experiment](config)
    rows.sort(key=lambda r: tuple(r[:1]) + (r[-2],))
    dataset = CsvDataset(
        header=tuple(_header_for(config)),
        rows=tuple(rows),
        config=config.resolved(),
    )
    for row in dataset.rows:
        if any(isinstance(v, float) and not math.isfinite(v) for v in row):
            raise ConfigError(
                f"{config.experiment}: non-finite cell in row {row!r}")
    if config.out:
        dataset.write(config.out)
    return dataset


def config_from_csv_comment(path: str) -> ExperimentConfig:
    """Rebuild the config embedded in a dataset's ``# config`` header."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if not first.startswith("# config "):
        raise ConfigError(f"{path!r} carries no config comment")
    return ExperimentConfig.from_mapping(json.loads(first[len("# config "):]))
