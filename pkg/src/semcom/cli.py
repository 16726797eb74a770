"""Command-line workbench: one-shot calculators and experiment sweeps.

Exit codes: 0 success, 2 configuration/usage error, 3 library error.
``SEMCOM_SEED`` provides the seed when ``--seed`` is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import harness
from .channel import BASE_SEED, ChannelModel, build_codec, run_link_trial
from .coding import (
    CODEC_KINDS,
    FANO_PARITY,
    FLAT_FANO,
    SEMANTIC_FANO,
    dump_codebook,
)
from .entropy import categorizing_entropy, classical_entropy
from .errors import ConfigError, SemcomError
from .harness import ExperimentConfig, run_experiment
from .kb import (
    SynonymPartition,
    combine_synonyms,
    kb_gain,
    kb_to_dict,
    load_kb,
    scale_category,
    semantic_capacity,
)
from .sources import SpaceSpec, random_space, synth_kb, zipf_probs
from .space import Category, Embedding, Perspective, load_space, space_to_dict


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("SEMCOM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"SEMCOM_SEED={env!r} is not an integer") from None
    return BASE_SEED


def _write_out(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _perspective_for(space, names: Optional[str]) -> Optional[Perspective]:
    if not names:
        return None
    return Perspective.from_names(space, [n.strip()
                                          for n in names.split(",")])


def _cmd_entropy(args) -> int:
    print(_fmt(classical_entropy([float(p) for p in args.probs])))
    return 0


def _cmd_categorizing_entropy(args) -> int:
    space = load_space(args.space)
    perspective = _perspective_for(space, args.perspective)
    print(_fmt(categorizing_entropy(space, perspective)))
    return 0


def _cmd_combine(args) -> int:
    probs = [float(p) for p in args.probs.split(",")]
    table = {str(i): p for i, p in enumerate(probs)}
    groups = tuple(tuple(m.strip() for m in g.split(","))
                   for g in args.groups.split("|"))
    combined, before, after = combine_synonyms(
        table, SynonymPartition(groups))
    print("combined:", " ".join(_fmt(v) for v in combined.values()))
    print("entropy_before:", _fmt(before))
    print("entropy_after:", _fmt(after))
    return 0


def _cmd_scale(args) -> int:
    coords = [float(x) for x in args.coords.split(",")]
    probs = [float(p) for p in args.probs.split(",")]
    names = tuple(f"a{i + 1}" for i in range(len(coords)))
    category = Category("scaled", names, {})
    embedding = Embedding({"scaled": dict(zip(names, coords))})
    centers = []
    for item in args.centers.split(","):
        center, _, eps = item.partition(":")
        try:
            centers.append((float(center), float(eps)))
        except ValueError:
            centers.append((center, float(eps)))
    scaled = scale_category(category, embedding, centers,
                            dict(zip(names, probs)))
    before = classical_entropy(probs)
    after = classical_entropy(list(scaled.probs.values()))
    for target, members in scaled.balls.items():
        print(f"{target}\t{','.join(members)}\t{_fmt(scaled.probs[target])}"
              f"\t{_fmt(scaled.ambiguity[target])}")
    print("entropy_before:", _fmt(before))
    print("entropy_after:", _fmt(after))
    return 0


def _cmd_kb_gain(args) -> int:
    print(_fmt(kb_gain(args.hc, args.ikb)))
    return 0


def _cmd_capacity(args) -> int:
    print(_fmt(semantic_capacity(args.skb, args.hc, args.m, args.bw,
                                 args.snr_linear)))
    return 0


def _cmd_code(args) -> int:
    space = load_space(args.space)
    perspective = _perspective_for(space, args.perspective)
    kb = load_kb(args.kb) if args.kb else None
    book = build_codec(space, args.kind, perspective, kb)
    _write_out(dump_codebook(book), args.out)
    return 0


def _cmd_channel_sim(args) -> int:
    space = (load_space(args.space) if args.space
             else harness.default_link_space())
    seed = _resolve_seed(args.seed)
    kinds = [k.strip() for k in args.kinds.split(",")]
    snrs = harness._float_grid(args.snr_start, args.snr_stop, args.snr_step)
    header = ["codec", "snr_db", "suts_sent", "suts_correct", "suts_detected",
              "bits_sent", "symbols_detected_error", "ser",
              "semantic_efficiency", "coding_efficiency", "seed",
              "n_messages"]
    lines = [",".join(header)]
    for i, snr in enumerate(snrs):
        trial_seed = harness.point_seed(seed, i)
        for kind in kinds:
            r = run_link_trial(space, kind, ChannelModel(snr), args.messages,
                               trial_seed)
            lines.append(",".join([
                kind, repr(float(snr)), str(r.suts_sent),
                str(r.suts_correct), str(r.suts_detected), str(r.bits_sent),
                str(r.symbols_detected_error), repr(r.ser),
                repr(r.semantic_efficiency), repr(r.coding_efficiency),
                str(trial_seed), str(r.n_messages)]))
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sources_space(args) -> int:
    spec = SpaceSpec(args.dims,
                     tuple(int(n) for n in args.attrs.split(",")),
                     args.variance, _resolve_seed(args.seed))
    doc = space_to_dict(random_space(spec))
    _write_out(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_sources_kb(args) -> int:
    sizes = [int(n) for n in args.sizes.split(",")]
    seed = _resolve_seed(args.seed)
    marginals = []
    for k, n in enumerate(sizes):
        ids = [f"p{k + 1}e{i + 1}" for i in range(n)]
        marginals.append((ids, zipf_probs(n, args.zipf_a)))
    _, kb = synth_kb(marginals, args.rho, seed)
    _write_out(json.dumps(kb_to_dict(kb), indent=2) + "\n", args.out)
    return 0


def _cmd_sources_zipf(args) -> int:
    print(" ".join(_fmt(p) for p in zipf_probs(args.n, args.a)))
    return 0


def _cmd_experiment(args) -> int:
    overrides: dict = {}
    if args.config:
        if args.config.endswith(".csv"):
            overrides = dict(
                harness.config_from_csv_comment(args.config).resolved())
            overrides.pop("experiment", None)
        else:
            with open(args.config, "r", encoding="utf-8") as fh:
                overrides = json.load(fh)
            overrides.pop("experiment", None)
    if args.seed is not None or "seed" not in overrides:
        overrides["seed"] = _resolve_seed(args.seed)
    if args.messages is not None:
        overrides["n_messages"] = args.messages
    if args.workers is not None:
        overrides["workers"] = args.workers
    out = args.out or overrides.pop("out", None) or f"{args.figure}.csv"
    config = ExperimentConfig.from_mapping(
        {"experiment": args.figure, **overrides, "out": out})
    dataset = run_experiment(config)
    print(f"wrote {config.out} ({len(dataset.rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semcom",
        description="Semantic-communication calculators and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="classical entropy of a distribution")
    p.add_argument("probs", nargs="+")
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("categorizing-entropy",
                       help="chain entropy of a space file")
    p.add_argument("--space", required=True)
    p.add_argument("--perspective", help="comma-separated category names")
    p.set_defaults(fn=_cmd_categorizing_entropy)

    p = sub.add_parser("combine", help="combine synonym groups of a distribution")
    p.add_argument("--probs", required=True, help="comma-separated masses")
    p.add_argument("--groups", required=True,
                   help="index groups, e.g. '0,1|2,3' (| separates groups)")
    p.set_defaults(fn=_cmd_combine)

    p = sub.add_parser("scale", help="scale attributes onto similarity balls")
    p.add_argument("--coords", required=True, help="comma-separated axis coords")
    p.add_argument("--probs", required=True, help="comma-separated masses")
    p.add_argument("--centers", required=True,
                   help="center:eps list, e.g. '2:1,4.5:0.5'")
    p.set_defaults(fn=_cmd_scale)

    p = sub.add_parser("kb-gain", help="multiplicative KB gain")
    p.add_argument("--hc", type=float, required=True)
    p.add_argument("--ikb", type=float, required=True)
    p.set_defaults(fn=_cmd_kb_gain)

    p = sub.add_parser("capacity", help="semantic channel capacity")
    p.add_argument("--skb", type=float, required=True)
    p.add_argument("--hc", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bw", type=float, required=True)
    p.add_argument("--snr-linear", type=float, required=True)
    p.set_defaults(fn=_cmd_capacity)

    p = sub.add_parser("code", help="dump a codebook table for a space file")
    p.add_argument("--space", required=True)
    p.add_argument("--kind", choices=CODEC_KINDS, default=FLAT_FANO)
    p.add_argument("--perspective")
    p.add_argument("--kb")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_code)

    p = sub.add_parser("channel-sim", help="Monte-Carlo link trials over SNR")
    p.add_argument("--space")
    p.add_argument("--kinds",
                   default=",".join((FLAT_FANO, SEMANTIC_FANO, FANO_PARITY)))
    p.add_argument("--snr-start", type=float, default=-5.0)
    p.add_argument("--snr-stop", type=float, default=15.0)
    p.add_argument("--snr-step", type=float, default=2.5)
    p.add_argument("--messages", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_channel_sim)

    p = sub.add_parser("sources", help="generate spaces, KBs, distributions")
    ssub = p.add_subparsers(dest="source_kind", required=True)

    q = ssub.add_parser("space", help="random space as a space file")
    q.add_argument("--dims", type=int, default=2)
    q.add_argument("--attrs", default="4,4", help="comma-separated counts")
    q.add_argument("--variance", choices=("low", "high"), default="low")
    q.add_argument("--seed", type=int)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_sources_space)

    q = ssub.add_parser("kb", help="dependency KB as a KB file")
    q.add_argument("--sizes", default="4,4", help="entities per position")
    q.add_argument("--rho", type=float, default=0.5)
    q.add_argument("--zipf-a", type=float, default=0.0)
    q.add_argument("--seed", type=int)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_sources_kb)

    q = ssub.add_parser("zipf", help="print a Zipf distribution")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--a", type=float, required=True)
    q.set_defaults(fn=_cmd_sources_zipf)

    p = sub.add_parser("experiment", help="run one figure sweep to CSV")
    p.add_argument("figure", choices=harness.EXPERIMENT_IDS)
    p.add_argument("--config", help="JSON config or a previous CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--messages", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SemcomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:  # pragma: no cover - console-script shim
    sys.exit(main())
