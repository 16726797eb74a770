"""Semantic-communication workbench.

Semantic probability spaces over partitioned discrete sources, categorizing
and message entropy, knowledge-base entropy reduction, KB-aware Fano source
coding, and noisy-channel Monte-Carlo experiments.
"""

from .channel import (
    BASE_SEED,
    ChannelModel,
    TrialReport,
    build_codec,
    run_link_trial,
    snr_to_flip_prob,
    transmit,
)
from .coding import (
    CODEC_KINDS,
    Codebook,
    SemanticCodebook,
    decode,
    dump_codebook,
    encode,
    fano_build,
    fano_parity_build,
    merge_synonym_entities,
    semantic_build,
    semantic_kb_build,
)
from .entropy import (
    Message,
    MessageEnsemble,
    categorizing_entropy,
    classical_entropy,
    message_entropy_classical,
    message_entropy_semantic,
)
from .harness import CsvDataset, ExperimentConfig, run_experiment
from .kb import (
    KnowledgeBase,
    ScaledCategory,
    SynonymPartition,
    combine_synonyms,
    kb_gain,
    kb_mutual_information,
    kb_to_dict,
    load_kb,
    scale_category,
    semantic_capacity,
    synonyms,
)
from .sources import (
    SpaceSpec,
    ZipfSource,
    random_space,
    synth_kb,
    zipf_probs,
)
from .space import (
    Category,
    Embedding,
    Entity,
    Perspective,
    SemanticSpace,
    SourceAlphabet,
    build_space,
    compose,
    condition_subspace,
    default_embedding,
    distance,
    epsilon_similar,
    load_space,
    space_to_dict,
)

__version__ = "0.1.0"
