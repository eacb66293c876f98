"""Command-line entry point.

Subcommands: normalize, score, lattice, correct, combine, zeroshot, quiz,
stats.  Every run that writes an output file also writes a manifest
(``<out>.manifest.json``) with the resolved config, seed, versions, and
input digests; manifests contain no timestamps, so identical manifests
imply byte-identical outputs for all non-endpoint subcommands.

Exit codes: 0 success, 1 usage, 2 data error, 3 scorer/endpoint failure.
A config file (JSON object) supplies defaults for scalar flags; explicit
flags win.  Endpoint credentials come only from ``ASREC_API_KEY``.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import platform
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .combine import build_multi_nbest, rover
from .core import EcConfig, NBestList, Utterance, load_dataset
from .decode import (
    closest_map,
    correct_unconstrained,
    lattice_decode,
    select_constrained,
    strip_wrapping,
)
from .errors import AsrecError, DataError, EndpointError, ParseError, ScorerError
from .lattice import (
    Lattice,
    MarkerConvention,
    char_tokenizer,
    chunk_tokenizer,
    identity_tokenizer,
    lattice_from_nbest,
    lattice_oracle_wer,
    retokenize_lattice,
    word_lattice_from_subword,
)
from .metrics import corpus_wer, cross_wer, oracle_wer, round_half_up, uniq
from .prompts import (
    ChatEndpoint,
    build_constr_prompt,
    build_uncon_prompt,
    parse_selection,
    run_quiz,
    score_quiz,
)
from .scorer import CachingScorer, HttpScorer, ScorerContext, ToyCharBigramScorer
from .textnorm import normalize_eval, normalize_stats


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise DataError("config file must contain a JSON object")
    return config


def _resolve(args, config: dict, key: str, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    return config.get(key, default)


def _write_manifest(
    out_path: Path,
    command: str,
    config: dict,
    inputs: Sequence[Path],
    seed: Optional[int] = None,
    extra: Optional[dict] = None,
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "versions": {"asrec": __version__, "python": platform.python_version()},
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
    }
    if extra:
        manifest.update(extra)
    path = out_path.with_name(out_path.name + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_jsonl(path: Path, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _make_scorer(args, config: dict):
    url = args.scorer_url if args.scorer_url else config.get("scorer_url")
    retries = int(_resolve(args, config, "retries", 3))
    if url:
        timeout = float(_resolve(args, config, "timeout", 10.0))
        return HttpScorer(url, timeout=timeout, retries=retries)
    return ToyCharBigramScorer()


# -- normalize ----------------------------------------------------------------


def cmd_normalize(args) -> int:
    fn = normalize_eval if args.mode == "eval" else normalize_stats
    lines = (
        Path(args.infile).read_text(encoding="utf-8").splitlines()
        if args.infile
        else sys.stdin.read().splitlines()
    )
    out = "\n".join(fn(line) for line in lines)
    if lines:
        out += "\n"
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
        if args.infile:
            _write_manifest(Path(args.out), "normalize", {"mode": args.mode}, [args.infile])
    else:
        sys.stdout.write(out)
    return 0


# -- score / stats ------------------------------------------------------------


def _load_hyps(path: str, utterances: Sequence[Utterance]) -> list[str]:
    """Hypotheses file: JSONL with id/text fields, or plain aligned lines."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    by_id = {}
    jsonl = True
    for line in lines:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            jsonl = False
            break
        if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
            jsonl = False
            break
        by_id[obj["id"]] = obj["text"]
    if jsonl:
        missing = [u.id for u in utterances if u.id not in by_id]
        if missing:
            raise DataError(f"hypotheses missing for ids: {missing[:5]}")
        return [by_id[u.id] for u in utterances]
    if len(lines) != len(utterances):
        raise DataError(
            f"{len(lines)} hypothesis lines for {len(utterances)} utterances"
        )
    return lines


def _stats_sections(utterances, want_cross: bool, want_uniq: bool) -> dict:
    report: dict = {}
    if want_uniq:
        report["uniq"] = round_half_up(uniq([u.nbest for u in utterances]), 2)
    if want_cross:
        totals = None
        for utt in utterances:
            r = cross_wer(utt.nbest)
            totals = r.totals if totals is None else totals + r.totals
        if totals is not None and totals.ref_len > 0:
            pct = lambda v: 100.0 * v / totals.ref_len  # noqa: E731
            report["cross_wer"] = {
                "all": round_half_up(pct(totals.errors), 1),
                "sub": round_half_up(pct(totals.substitutions), 1),
                "del": round_half_up(pct(totals.deletions), 1),
                "ins": round_half_up(pct(totals.insertions), 1),
            }
        else:
            report["cross_wer"] = {"all": 0.0, "sub": 0.0, "del": 0.0, "ins": 0.0}
    return report


def _format_wer_table(name: str, report) -> str:
    t = report.totals
    rows = [
        ("metric", "value"),
        ("wer %", f"{report.wer:.2f}" if report.wer is not None else "undefined"),
        ("ref words", str(t.ref_len)),
        ("cor", str(t.correct)),
        ("sub", str(t.substitutions)),
        ("del", str(t.deletions)),
        ("ins", str(t.insertions)),
    ]
    width = max(len(r[0]) for r in rows)
    lines = [f"[{name}]"]
    lines += [f"  {k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines)


def cmd_score(args) -> int:
    utterances = load_dataset(args.refs)
    report: dict = {}
    tables = []
    if args.hyps:
        wer_report = corpus_wer(utterances, _load_hyps(args.hyps, utterances))
        report["corpus"] = wer_report.to_dict()
        tables.append(_format_wer_table("corpus", wer_report))
    if args.oracle:
        oracle_report = oracle_wer(utterances, args.oracle)
        report[f"oracle_{args.oracle}"] = oracle_report.to_dict()
        tables.append(_format_wer_table(f"{args.oracle}-best oracle", oracle_report))
    report.update(_stats_sections(utterances, args.cross_wer, args.uniq))
    if not report:
        raise DataError("nothing to score: give --hyps, --oracle, --cross-wer or --uniq")
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for table in tables:
            print(table)
        if "uniq" in report:
            print(f"[uniq] {report['uniq']}")
        if "cross_wer" in report:
            row = report["cross_wer"]
            print(
                "[cross_wer All/Sub/Del/Ins] "
                f"{row['all']:.1f} / {row['sub']:.1f} / {row['del']:.1f} / {row['ins']:.1f}"
            )
    if args.out:
        Path(args.out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        inputs = [args.refs] + ([args.hyps] if args.hyps else [])
        _write_manifest(
            Path(args.out),
            "score",
            {"oracle": args.oracle, "cross_wer": args.cross_wer, "uniq": args.uniq},
            inputs,
        )
    return 0


def cmd_stats(args) -> int:
    utterances = load_dataset(args.infile)
    # with no flags, report everything
    both = not args.cross_wer and not args.uniq
    report = _stats_sections(utterances, args.cross_wer or both, args.uniq or both)
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        Path(args.out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        _write_manifest(Path(args.out), "stats", {}, [args.infile])
    return 0


# -- lattice ------------------------------------------------------------------


def _convention(args) -> MarkerConvention:
    return MarkerConvention(args.style, args.marker)


_TOKENIZERS = {
    "identity": identity_tokenizer,
    "char": char_tokenizer,
    "chunk2": chunk_tokenizer,
}


def cmd_lattice(args) -> int:
    lattice = Lattice.from_json(json.loads(Path(args.infile).read_text(encoding="utf-8")))
    if args.action == "convert":
        if args.to == "word":
            out = word_lattice_from_subword(lattice, _convention(args))
        else:
            out = retokenize_lattice(lattice, _TOKENIZERS[args.tokenizer]())
        text = json.dumps(out.to_json(), indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            _write_manifest(
                Path(args.out),
                "lattice convert",
                {"to": args.to, "style": args.style, "marker": args.marker,
                 "tokenizer": args.tokenizer},
                [args.infile],
            )
        else:
            sys.stdout.write(text)
        return 0
    # oracle
    ref = args.ref
    if args.ref_file:
        ref = Path(args.ref_file).read_text(encoding="utf-8").strip()
    if not ref:
        raise DataError("lattice oracle needs --ref or --ref-file")
    counts = lattice_oracle_wer(lattice, ref.split())
    print(json.dumps({"errors": counts.errors, **counts.to_dict()}, sort_keys=True))
    return 0


# -- correct ------------------------------------------------------------------


def _decode_one(utt: Utterance, strategy: str, scorer, cfg: EcConfig) -> dict:
    n = min(cfg.n_input, len(utt.nbest))
    cfg = dataclasses.replace(cfg, n_input=n)
    flags: list[str] = []
    score = None
    if strategy == "uncon":
        result = correct_unconstrained(utt, scorer, cfg)
        text = result.text
        if result.truncation_suspected:
            flags.append("suspected-truncation")
    elif strategy == "constr":
        result = select_constrained(utt, scorer, cfg)
        text = result.hypothesis.text
        score = result.score
    elif strategy == "closest":
        uncon = correct_unconstrained(utt, scorer, cfg)
        result = closest_map(uncon.text, utt.nbest, n)
        text = result.hypothesis.text
        if uncon.truncation_suspected:
            flags.append("uncon-suspected-truncation")
    elif strategy == "lattice":
        lattice = utt.lattice
        if lattice is None:
            lattice = lattice_from_nbest(NBestList(utt.nbest.hypotheses[:n]))
        ctx = ScorerContext.from_nbest(utt.nbest, n)
        result = lattice_decode(lattice, scorer, cfg, ctx)
        text = result.text
        score = result.score
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return {"id": utt.id, "text": text, "strategy": strategy, "score": score,
            "flags": flags}


def cmd_correct(args) -> int:
    config = _load_config(args.config)
    utterances = load_dataset(args.infile)
    lam = args.lam if args.lam is not None else config.get("lambda", 0.5)
    cfg = EcConfig(
        lam=float(lam),
        beam_width=int(_resolve(args, config, "beam", 1)),
        n_input=int(_resolve(args, config, "n", 5)),
        length_normalize=bool(args.length_normalize),
    )
    scorer = _make_scorer(args, config)
    cached = CachingScorer(scorer)
    jobs = int(_resolve(args, config, "jobs", 1))
    out_path = Path(args.out)

    def finish(records: list[dict], failure: Optional[Exception]) -> int:
        extra = {
            "scorer": {
                "backend": getattr(scorer, "name", "toy"),
                "retries_used": getattr(scorer, "retries_used", 0),
            },
            "status": "error" if failure else "ok",
        }
        if failure is None:
            _write_jsonl(out_path, sorted(records, key=lambda r: r["id"]))
        _write_manifest(
            out_path,
            "correct",
            {
                "strategy": args.strategy,
                "lambda": cfg.lam,
                "beam": cfg.beam_width,
                "n": cfg.n_input,
                "length_normalize": cfg.length_normalize,
                "jobs": jobs,
            },
            [args.infile],
            extra=extra,
        )
        if failure is not None:
            raise failure
        return 0

    records: list[dict] = []
    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(
                    pool.map(
                        lambda u: _decode_one(u, args.strategy, cached, cfg), utterances
                    )
                )
        else:
            records = [_decode_one(u, args.strategy, cached, cfg) for u in utterances]
    except (ScorerError, EndpointError) as exc:
        return finish(records, exc)
    return finish(records, None)


# -- combine ------------------------------------------------------------------


def cmd_combine(args) -> int:
    if args.action == "rover":
        weights = [float(w) for w in args.weights.split(",")] if args.weights else None
        datasets = [load_dataset(p) for p in args.inputs]
        if weights is None:
            weights = [1.0] * len(datasets)
        if len(weights) != len(datasets):
            raise DataError(
                f"{len(weights)} weights for {len(datasets)} inputs"
            )
        base_ids = [u.id for u in datasets[0]]
        by_id = [{u.id: u for u in ds} for ds in datasets]
        for i, mapping in enumerate(by_id[1:], start=1):
            missing = [uid for uid in base_ids if uid not in mapping]
            if missing:
                raise DataError(
                    f"input {args.inputs[i]} is missing ids: {missing[:5]}"
                )
        records = []
        for uid in base_ids:
            hyps = [
                (mapping[uid].nbest.hypotheses[0].text, w)
                for mapping, w in zip(by_id, weights)
            ]
            records.append({"id": uid, "text": rover(hyps)})
        _write_jsonl(Path(args.out), sorted(records, key=lambda r: r["id"]))
        _write_manifest(
            Path(args.out), "combine rover", {"weights": weights}, list(args.inputs)
        )
        return 0
    # nbest
    ds_a = {u.id: u for u in load_dataset(args.a)}
    ds_b = {u.id: u for u in load_dataset(args.b)}
    missing = [uid for uid in ds_a if uid not in ds_b]
    if missing:
        raise DataError(f"--b is missing ids: {missing[:5]}")
    records = []
    for uid in sorted(ds_a):
        combined = build_multi_nbest(ds_a[uid].nbest, ds_b[uid].nbest, args.pattern)
        records.append(
            {
                "id": uid,
                "ref": ds_a[uid].reference,
                "nbest": [
                    {"text": h.text, "score": h.asr_logscore}
                    for h in combined.nbest.hypotheses
                ],
                "sources": list(combined.sources),
                "flags": list(combined.flags),
            }
        )
    _write_jsonl(Path(args.out), records)
    _write_manifest(
        Path(args.out), "combine nbest", {"pattern": args.pattern}, [args.a, args.b]
    )
    return 0


# -- zeroshot / quiz ----------------------------------------------------------


def _endpoint(args, config: dict, seed: Optional[int]) -> ChatEndpoint:
    url = _resolve(args, config, "endpoint")
    if not url:
        raise DataError("an --endpoint URL is required unless --dry-run is given")
    return ChatEndpoint(
        url,
        api_key=os.environ.get("ASREC_API_KEY"),
        retries=int(_resolve(args, config, "retries", 3)),
        rng=random.Random(seed),
    )


def cmd_zeroshot(args) -> int:
    config = _load_config(args.config)
    utterances = load_dataset(args.infile)
    n = int(_resolve(args, config, "n", 5))
    records = []
    if args.dry_run:
        for utt in utterances:
            k = min(n, len(utt.nbest))
            prompt = (
                build_uncon_prompt(utt.nbest, k)
                if args.mode == "uncon"
                else build_constr_prompt(utt.nbest, k)
            )
            records.append({"id": utt.id, "mode": args.mode, "prompt": prompt})
    else:
        endpoint = _endpoint(args, config, args.seed)
        concurrency = int(_resolve(args, config, "concurrency", 1))

        def ask(utt: Utterance) -> dict:
            k = min(n, len(utt.nbest))
            flags: list[str] = []
            if args.mode == "uncon":
                reply = endpoint.complete(build_uncon_prompt(utt.nbest, k))
                text = strip_wrapping(reply)
                rank1_words = len(utt.nbest.hypotheses[0].text.split())
                if len(text.split()) < 0.5 * rank1_words:
                    flags.append("suspected-truncation")
            else:
                reply = endpoint.complete(build_constr_prompt(utt.nbest, k))
                options = [h.text for h in utt.nbest.hypotheses[:k]]
                selection = parse_selection(reply, options)
                text = options[selection.rank - 1]
                if selection.used_fallback:
                    flags.append("selection-fallback")
            return {"id": utt.id, "text": text, "mode": args.mode, "flags": flags}

        if concurrency > 1:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                records = list(pool.map(ask, utterances))
        else:
            records = [ask(utt) for utt in utterances]
    _write_jsonl(Path(args.out), sorted(records, key=lambda r: r["id"]))
    _write_manifest(
        Path(args.out),
        "zeroshot",
        {"mode": args.mode, "n": n, "dry_run": bool(args.dry_run)},
        [args.infile],
        seed=args.seed,
    )
    return 0


def cmd_quiz(args) -> int:
    config = _load_config(args.config)
    rule = _resolve(args, config, "rule", "both")
    if args.answers:
        answers: dict[str, tuple[str, str]] = {}
        with open(args.answers, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    answers[obj["id"]] = (obj["orig_first"], obj["para_first"])
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise DataError(f"bad answers record: {exc}", line=line_no) from exc
        result = {"rate": score_quiz(answers, rule=rule), "rule": rule,
                  "n_items": len(answers)}
        inputs = [args.answers]
    else:
        if not args.refs or not args.paraphrases:
            raise DataError("quiz needs --answers, or --refs plus --paraphrases")
        utterances = load_dataset(args.refs)
        paraphrases: dict[str, list[str]] = {}
        with open(args.paraphrases, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    paraphrases[obj["id"]] = list(obj["candidates"])
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise DataError(f"bad paraphrase record: {exc}", line=line_no) from exc
        items = []
        for utt in utterances:
            if utt.reference is None:
                raise DataError(f"utterance {utt.id!r} has no reference")
            if utt.id not in paraphrases:
                raise DataError(f"no paraphrases for utterance {utt.id!r}")
            items.append((utt.id, utt.reference, paraphrases[utt.id]))
        endpoint = _endpoint(args, config, args.seed)
        outcome = run_quiz(items, endpoint.complete, random.Random(args.seed), rule=rule)
        result = {
            "rate": outcome.rate,
            "rule": rule,
            "n_items": len(items),
            "answers": {k: list(v) for k, v in outcome.answers.items()},
            "paraphrase_used": outcome.paraphrase_used,
        }
        inputs = [args.refs, args.paraphrases]
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _write_manifest(Path(args.out), "quiz", {"rule": rule}, inputs, seed=args.seed)
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="asrec", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="normalize text lines")
    p.add_argument("--mode", choices=("eval", "stats"), required=True)
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("score", help="WER, oracle WER and list statistics")
    p.add_argument("--refs", required=True, help="dataset JSONL with references")
    p.add_argument("--hyps", help="hypotheses: JSONL with id/text, or aligned lines")
    p.add_argument("--oracle", type=int, metavar="N")
    p.add_argument("--cross-wer", action="store_true")
    p.add_argument("--uniq", action="store_true")
    p.add_argument("--json", action="store_true", help="print JSON instead of tables")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", help="reference-free N-best statistics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--cross-wer", action="store_true")
    p.add_argument("--uniq", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("lattice", help="lattice conversions and oracle WER")
    psub = p.add_subparsers(dest="action", required=True)
    pc = psub.add_parser("convert")
    pc.add_argument("--in", dest="infile", required=True)
    pc.add_argument("--to", choices=("word", "lm-tokens"), required=True)
    pc.add_argument("--style", choices=("suffix", "prefix"), default="suffix")
    pc.add_argument("--marker", default="@@")
    pc.add_argument("--tokenizer", choices=sorted(_TOKENIZERS), default="identity")
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_lattice)
    po = psub.add_parser("oracle")
    po.add_argument("--in", dest="infile", required=True)
    po.add_argument("--ref", help="reference text")
    po.add_argument("--ref-file")
    po.set_defaults(func=cmd_lattice)

    p = sub.add_parser("correct", help="run a correction strategy over a dataset")
    p.add_argument(
        "--strategy", choices=("uncon", "constr", "closest", "lattice"), required=True
    )
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beam", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--scorer-url")
    p.add_argument("--retries", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--length-normalize", action="store_true")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("combine", help="system combination")
    csub = p.add_subparsers(dest="action", required=True)
    cr = csub.add_parser("rover")
    cr.add_argument("--inputs", nargs="+", required=True)
    cr.add_argument("--weights", help="comma-separated, one per input")
    cr.add_argument("--out", required=True)
    cr.set_defaults(func=cmd_combine)
    cn = csub.add_parser("nbest")
    cn.add_argument("--pattern", required=True)
    cn.add_argument("--a", required=True)
    cn.add_argument("--b", required=True)
    cn.add_argument("--out", required=True)
    cn.set_defaults(func=cmd_combine)

    p = sub.add_parser("zeroshot", help="zero-shot prompting against a chat endpoint")
    p.add_argument("--mode", choices=("uncon", "constr"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--endpoint")
    p.add_argument("--retries", type=int)
    p.add_argument("--concurrency", type=int, help="parallel endpoint calls")
    p.add_argument("--dry-run", action="store_true", help="emit prompts, call nothing")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_zeroshot)

    p = sub.add_parser("quiz", help="data-contamination quiz")
    p.add_argument("--refs", help="dataset JSONL with references")
    p.add_argument("--paraphrases", help="JSONL: id + paraphrase candidates")
    p.add_argument("--answers", help="score pre-collected answers instead of asking")
    p.add_argument("--endpoint")
    p.add_argument("--retries", type=int)
    p.add_argument("--rule", choices=("both", "average"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quiz)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ScorerError, EndpointError) as exc:
        print(f"asrec: scorer/endpoint failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, ParseError) as exc:
        print(f"asrec: data error: {exc}", file=sys.stderr)
        return 2
    except AsrecError as exc:
        print(f"asrec: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"asrec: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
