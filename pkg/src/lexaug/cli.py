"""Command-line entry point.

Subcommands: augment, token-pairs, mix, score, diagnose, hit-rate, regress,
lexicon-stats. A JSON config file (flat keys mirroring the flags) can supply
any value; explicit flags override it. Data-producing runs write a manifest
(config echo plus input/output digests) next to the output so a run can be
reproduced exactly.
"""

from __future__ import annotations

import argparse
import functools
import hashlib
import itertools
import json
import sys
from importlib import metadata
from multiprocessing import get_context
from pathlib import Path
from typing import Iterable, Iterator

from . import analysis, metrics
from .augment import (
    DEFAULT_SENTINELS,
    SentinelInventory,
    Task,
    augment_example,
    token_pair_examples,
)
from .corpus import Branch, assign_branch, load_corpus
from .errors import LexAugError, ScheduleError
from .lexicon import Lexicon, load_lexicon, merge
from .mixture import TaskWeights, build_schedule, interleave
from .sampling import SelectionMode, SelectionParams, derive_rng

_TASK_FLAGS = {
    "codeswitch-mono": Task.CODESWITCH_MONO,
    "codeswitch-parallel": Task.CODESWITCH_PARALLEL,
    "glowup-mono": Task.GLOWUP_MONO,
    "glowup-parallel": Task.GLOWUP_PARALLEL,
}
_MONO_TASKS = (Task.CODESWITCH_MONO, Task.GLOWUP_MONO)

_SAMPLING_FLAGS = {
    "binomial": SelectionMode.BINOMIAL_ADJUSTED,
    "uniform": SelectionMode.UNIFORM_COUNT,
}


def _version() -> str:
    try:
        return metadata.version("lexaug")
    except metadata.PackageNotFoundError:
        return "unknown"


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise LexAugError(f"{path}: config must be a JSON object")
    return config


def _setting(args, config: dict, key: str, default=None, required: bool = False):
    """Effective value for a setting: flag beats config file beats default."""
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if required and value is None:
        raise LexAugError(f"--{key.replace('_', '-')} is required (flag or config file)")
    return value


def _sentinels_from_config(config: dict) -> SentinelInventory:
    overrides = config.get("sentinels")
    if not overrides:
        return DEFAULT_SENTINELS
    fields = {}
    task_tokens = dict(DEFAULT_SENTINELS.task_tokens)
    for key, value in overrides.items():
        if key == "task_tokens":
            for name, token in value.items():
                task_tokens[Task(name)] = token
        else:
            fields[key] = value
    return SentinelInventory(task_tokens=task_tokens, **fields)


def _load_lexica(paths: list[str] | str) -> Lexicon:
    if isinstance(paths, str):
        paths = [paths]
    if not paths:
        raise LexAugError("at least one --lexicon is required")
    loaded = []
    for spec_str in paths:
        if "=" in spec_str:
            name, _, path = spec_str.partition("=")
        else:
            path = spec_str
            name = Path(path).stem
        loaded.append(load_lexicon(path, source_name=name))
    return functools.reduce(merge, loaded)


def _write_manifest(
    manifest_path: str,
    subcommand: str,
    config: dict,
    inputs: Iterable[str],
    outputs: Iterable[str],
) -> None:
    manifest = {
        "tool": "lexaug",
        "version": _version(),
        "subcommand": subcommand,
        "config": config,
        "inputs": {path: _sha256(path) for path in inputs},
        "outputs": {path: _sha256(path) for path in outputs},
    }
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _manifest_path(args, out_path: str | None) -> str | None:
    if getattr(args, "manifest", None):
        return args.manifest
    if out_path:
        return out_path + ".manifest.json"
    return None


def _finish_manifest(args, subcommand: str, config: dict, inputs: list, out_path: str | None) -> None:
    manifest_path = _manifest_path(args, out_path)
    if manifest_path:
        _write_manifest(manifest_path, subcommand, config, inputs, [out_path] if out_path else [])


def _emit_lines(lines: Iterator[str], out_path: str | None) -> None:
    if out_path is None:
        for line in lines:
            sys.stdout.write(line + "\n")
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            for line in lines:
                handle.write(line + "\n")


def _print_json(obj, out_path: str | None = None) -> None:
    text = json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2)
    if out_path is None:
        print(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


# --- augment -----------------------------------------------------------


_WORKER: dict = {}


def _augment_worker_init(lexicon, task, params, sentinels, seed, mask_fraction):
    _WORKER.update(
        lexicon=lexicon,
        task=task,
        params=params,
        sentinels=sentinels,
        seed=seed,
        mask_fraction=mask_fraction,
    )


def _augment_batch(batch: list) -> list[str]:
    out = []
    for item in batch:
        rng = derive_rng(_WORKER["seed"], item.id)
        example = augment_example(
            item,
            _WORKER["task"],
            _WORKER["lexicon"],
            _WORKER["params"],
            rng,
            _WORKER["sentinels"],
            _WORKER["mask_fraction"],
        )
        out.append(json.dumps(example.to_json_obj(), ensure_ascii=False, sort_keys=True))
    return out


def _chunked(items: Iterable, size: int) -> Iterator[list]:
    iterator = iter(items)
    while True:
        chunk = list(itertools.islice(iterator, size))
        if not chunk:
            return
        yield chunk


def cmd_augment(args) -> int:
    config = _load_config(args.config)
    task_name = _setting(args, config, "task", required=True)
    if task_name not in _TASK_FLAGS:
        raise LexAugError(f"--task must be one of {sorted(_TASK_FLAGS)}, got {task_name!r}")
    task = _TASK_FLAGS[task_name]
    corpus_path = _setting(args, config, "corpus", required=True)
    lexicon_paths = _setting(args, config, "lexicon", required=True)
    seed = int(_setting(args, config, "seed", required=True))
    p_tr = float(_setting(args, config, "p_tr", 0.4))
    fraction = float(_setting(args, config, "fraction", 0.5))
    sampling = _setting(args, config, "sampling", "binomial")
    mask_fraction = float(_setting(args, config, "mask_fraction", 0.5))
    jobs = int(_setting(args, config, "jobs", 1))
    on_error = _setting(args, config, "on_error", "abort")
    out_path = _setting(args, config, "out")

    if sampling not in _SAMPLING_FLAGS:
        raise LexAugError(f"--sampling must be one of {sorted(_SAMPLING_FLAGS)}, got {sampling!r}")
    sentinels = _sentinels_from_config(config)
    lexicon = _load_lexica(lexicon_paths)
    params = SelectionParams(p_tr=p_tr, mode=_SAMPLING_FLAGS[sampling])
    kind = "mono" if task in _MONO_TASKS else "parallel"

    skipped: list = []
    records = load_corpus(corpus_path, kind=kind, errors=on_error, on_error=skipped.append)
    selected = (r for r in records if assign_branch(r.id, seed, fraction) is Branch.AUGMENT)

    if jobs <= 1:
        _augment_worker_init(lexicon, task, params, sentinels, seed, mask_fraction)
        lines: Iterator[str] = (line for batch in _chunked(selected, 256) for line in _augment_batch(batch))
        _emit_lines(lines, out_path)
    else:
        ctx = get_context("fork")
        with ctx.Pool(
            processes=jobs,
            initializer=_augment_worker_init,
            initargs=(lexicon, task, params, sentinels, seed, mask_fraction),
        ) as pool:
            batches = pool.imap(_augment_batch, _chunked(selected, 256))
            _emit_lines((line for batch in batches for line in batch), out_path)

    for exc in skipped:
        print(f"warning: skipped {exc}", file=sys.stderr)

    effective = {
        "task": task.value,
        "corpus": corpus_path,
        "lexicon": lexicon_paths,
        "seed": seed,
        "p_tr": p_tr,
        "fraction": fraction,
        "sampling": sampling,
        "mask_fraction": mask_fraction,
        "jobs": jobs,
        "on_error": on_error,
        "skipped_records": len(skipped),
    }
    inputs = [corpus_path] + [p.partition("=")[2] if "=" in p else p for p in lexicon_paths]
    _finish_manifest(args, "augment", effective, inputs, out_path)
    return 0


def cmd_token_pairs(args) -> int:
    config = _load_config(args.config)
    lexicon_paths = _setting(args, config, "lexicon", required=True)
    langs = _setting(args, config, "langs")
    out_path = _setting(args, config, "out")
    lexicon = _load_lexica(lexicon_paths)
    lang_filter = [l.strip() for l in langs.split(",") if l.strip()] if langs else None
    sentinels = _sentinels_from_config(config)
    lines = (
        json.dumps(e.to_json_obj(), ensure_ascii=False, sort_keys=True)
        for e in token_pair_examples(lexicon, sentinels, lang_filter)
    )
    _emit_lines(lines, out_path)
    inputs = [p.partition("=")[2] if "=" in p else p for p in lexicon_paths]
    _finish_manifest(args, "token-pairs", {"lexicon": lexicon_paths, "langs": langs}, inputs, out_path)
    return 0


def cmd_mix(args) -> int:
    config = _load_config(args.config)
    weights_path = _setting(args, config, "weights")
    if weights_path:
        with open(weights_path, "r", encoding="utf-8") as handle:
            weights = TaskWeights.from_json_obj(json.load(handle))
    else:
        weights = build_schedule(
            mono_aug=_setting(args, config, "mono_aug", "none"),
            parallel_aug=_setting(args, config, "parallel_aug", "none"),
            token_pairs=bool(_setting(args, config, "token_pairs", False)),
        )
    stream_specs = _setting(args, config, "streams") or []
    out_path = _setting(args, config, "out")
    if not stream_specs:
        _print_json(weights.to_json_obj(), out_path)
        _finish_manifest(args, "mix", {"weights": weights.to_json_obj()}, [], out_path)
        return 0

    seed = int(_setting(args, config, "seed", required=True))
    count = int(_setting(args, config, "count", required=True))
    streams: dict[Task, list[str]] = {}
    stream_paths = []
    for spec_str in stream_specs:
        name, eq, path = spec_str.partition("=")
        if not eq:
            raise ScheduleError(f"--streams entries look like task=path, got {spec_str!r}")
        task = Task(name.replace("-", "_"))
        with open(path, "r", encoding="utf-8") as handle:
            streams[task] = [line.rstrip("\n") for line in handle if line.strip()]
        stream_paths.append(path)
    mixed = interleave(streams, weights, seed)
    _emit_lines(itertools.islice(mixed, count), out_path)
    effective = {
        "weights": weights.to_json_obj(),
        "streams": stream_specs,
        "seed": seed,
        "count": count,
    }
    _finish_manifest(args, "mix", effective, stream_paths, out_path)
    return 0


def _read_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as handle:
        return [line.rstrip("\n") for line in handle]


def cmd_score(args) -> int:
    config = _load_config(args.config)
    metric = _setting(args, config, "metric", "chrf")
    if metric != "chrf":
        raise LexAugError(f"unsupported metric {metric!r}")
    hyp_path = _setting(args, config, "hyp", required=True)
    ref_path = _setting(args, config, "ref", required=True)
    out_path = _setting(args, config, "out")
    hyps = _read_lines(hyp_path)
    refs = _read_lines(ref_path)
    if len(hyps) != len(refs):
        raise LexAugError(
            f"hypothesis and reference files differ in length: {len(hyps)} vs {len(refs)}"
        )
    if not hyps:
        raise LexAugError("input files are empty")
    score = metrics.corpus_chrf(zip(hyps, refs))
    result = {"metric": "chrf", "score": round(score, 4), "pairs": len(hyps)}
    if args.sentence:
        result["sentence_scores"] = [
            round(metrics.chrf(h, r), 4) for h, r in zip(hyps, refs)
        ]
    _print_json(result, out_path)
    _finish_manifest(args, "score", {"metric": metric, "hyp": hyp_path, "ref": ref_path},
                     [hyp_path, ref_path], out_path)
    return 0


def _load_eval_rows(path: str) -> list[metrics.EvalRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            try:
                rows.append(metrics.EvalRow.from_json_obj(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise LexAugError(f"{path}:line {index + 1}: {exc}") from exc
    return rows


def cmd_diagnose(args) -> int:
    config = _load_config(args.config)
    rows_path = _setting(args, config, "rows", required=True)
    out_path = _setting(args, config, "out")
    report = metrics.diagnose_corpus(_load_eval_rows(rows_path))
    print(report.format_table())
    if out_path:
        _print_json(report.to_json_obj(), out_path)
    _finish_manifest(args, "diagnose", {"rows": rows_path}, [rows_path], out_path)
    return 0


def cmd_hit_rate(args) -> int:
    config = _load_config(args.config)
    rows_path = _setting(args, config, "rows", required=True)
    tokens_path = _setting(args, config, "tokens", required=True)
    out_path = _setting(args, config, "out")
    tokens = [line.strip() for line in _read_lines(tokens_path) if line.strip()]
    rows = _load_eval_rows(rows_path)
    result = metrics.token_hit_rate(rows, tokens)
    _print_json(result.to_json_obj(), out_path)
    _finish_manifest(args, "hit-rate", {"rows": rows_path, "tokens": tokens_path},
                     [rows_path, tokens_path], out_path)
    return 0


def cmd_regress(args) -> int:
    config = _load_config(args.config)
    table_path = _setting(args, config, "table", required=True)
    out_path = _setting(args, config, "out")
    rows = analysis.load_lang_rows(table_path)
    report = analysis.regress_delta_chrf(rows)
    _print_json(report.to_json_obj(), out_path)
    _finish_manifest(args, "regress", {"table": table_path}, [table_path], out_path)
    return 0


def cmd_lexicon_stats(args) -> int:
    config = _load_config(args.config)
    lexicon_paths = _setting(args, config, "lexicon", required=True)
    lang = _setting(args, config, "lang")
    out_path = _setting(args, config, "out")
    lexicon = _load_lexica(lexicon_paths)
    stats: dict = {
        "entries": len(lexicon),
        "languages": sorted(lexicon.languages()),
        "pair_counts": {
            f"{src}-{tgt}": count for (src, tgt), count in sorted(lexicon.pair_counts().items())
        },
    }
    if lang:
        stats["per_source"] = dict(sorted(lexicon.entry_counts(lang).items()))
        stats["lang"] = lang
    _print_json(stats, out_path)
    input_paths = [p.partition("=")[2] if "=" in p else p for p in lexicon_paths]
    _finish_manifest(args, "lexicon-stats", {"lexicon": lexicon_paths, "lang": lang},
                     input_paths, out_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexaug",
        description="Lexicon-driven augmentation and evaluation for MT data pipelines.",
    )
    parser.add_argument("--version", action="version", version=f"lexaug {_version()}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json)")

    p = sub.add_parser("augment", help="render augmented training examples from a corpus")
    p.add_argument("--task", choices=sorted(_TASK_FLAGS))
    p.add_argument("--corpus")
    p.add_argument("--lexicon", action="append", metavar="[NAME=]PATH")
    p.add_argument("--seed", type=int)
    p.add_argument("--p-tr", dest="p_tr", type=float)
    p.add_argument("--fraction", type=float, help="share of records routed to augmentation")
    p.add_argument("--sampling", choices=sorted(_SAMPLING_FLAGS))
    p.add_argument("--mask-fraction", dest="mask_fraction", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--on-error", dest="on_error", choices=["abort", "skip"])
    common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("token-pairs", help="render lexicon entries as tiny translation examples")
    p.add_argument("--lexicon", action="append", metavar="[NAME=]PATH")
    p.add_argument("--langs", help="comma-separated language filter")
    common(p)
    p.set_defaults(func=cmd_token_pairs)

    p = sub.add_parser("mix", help="build a task weight schedule and optionally interleave streams")
    p.add_argument("--mono-aug", dest="mono_aug", choices=["none", "codeswitch", "glowup"])
    p.add_argument("--parallel-aug", dest="parallel_aug", choices=["none", "codeswitch", "glowup"])
    p.add_argument("--token-pairs", dest="token_pairs", action=argparse.BooleanOptionalAction)
    p.add_argument("--weights", help="JSON file mapping task name to weight")
    p.add_argument("--streams", action="append", metavar="TASK=PATH")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, help="number of mixed examples to emit")
    common(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("score", help="chrf over line-aligned hypothesis/reference files")
    p.add_argument("--metric", choices=["chrf"])
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--sentence", action="store_true", help="include per-sentence scores")
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("diagnose", help="null/copy/repetition error report over eval rows")
    p.add_argument("--rows", help="JSONL eval rows")
    common(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("hit-rate", help="watched-token hit rate over eval rows")
    p.add_argument("--rows", help="JSONL eval rows")
    p.add_argument("--tokens", help="watched tokens, one per line")
    common(p)
    p.set_defaults(func=cmd_hit_rate)

    p = sub.add_parser("regress", help="fit score deltas on lexicon entry counts (URL rows)")
    p.add_argument("--table", help="CSV: lang,delta_chrf,n_panlex,n_gatitos,n_mono,class")
    common(p)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("lexicon-stats", help="entry counts per language pair and source")
    p.add_argument("--lexicon", action="append", metavar="[NAME=]PATH")
    p.add_argument("--lang", help="also report per-source counts for this language")
    common(p)
    p.set_defaults(func=cmd_lexicon_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LexAugError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
