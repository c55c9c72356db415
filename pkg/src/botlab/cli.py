"""Operator entry points.

    botlab preprocess --accounts P --tweets P --lexicon P --out DIR [--profiles SPEC]
    botlab serve --artifacts DIR --port N [--host H]
    botlab export-labels --artifacts DIR --out P
    botlab evaluate --labels P --truth P [--json]
    botlab convert-cresci --users P --tweets P --out-accounts P --out-tweets P

Exit codes: 0 success, 1 input error, 2 environment error.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import signal
import socket
import sys

from . import artifacts as arts
from . import sentiment as snt
from . import topics as tp
from .errors import BotlabError, CorruptArtifact, PortInUse
from .evaluate import evaluate
from .ingest import load_dataset, validate_corpus
from .session import LabelStore, export_labels
from .timebin import period_range

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ENV = 2


def _parse_profiles(spec: str, corpus) -> list[tuple[str, str | None, int]] | None:
    """SPEC is "default", "none" or comma-separated level:K pairs."""
    if spec == "default":
        return None
    if spec == "none":
        return []
    plan: list[tuple[str, str | None, int]] = []
    years = (
        period_range(corpus.time_span[0], corpus.time_span[1], "year")
        if corpus.time_span else []
    )
    for part in spec.split(","):
        level, _, k_raw = part.partition(":")
        level = level.strip()
        try:
            k = int(k_raw)
        except ValueError:
            raise ValueError(f"bad profile entry {part!r}, expected level:K") from None
        if level == "overall":
            plan.append(("overall", None, k))
        elif level == "year":
            plan.extend(("year", y, k) for y in years)
        else:
            raise ValueError(f"bad profile level {level!r} (overall or year)")
    return plan


def cmd_preprocess(args) -> int:
    corpus = load_dataset(args.accounts, args.tweets)
    report = validate_corpus(corpus)
    if not report.ok:
        for violation in report.violations:
            print(f"invalid corpus: {violation}", file=sys.stderr)
        return EXIT_INPUT
    lexicon = snt.load_lexicon(args.lexicon) if args.lexicon else snt.default_lexicon()
    plan = _parse_profiles(args.profiles, corpus)
    arts.build_artifacts(
        corpus, lexicon, args.out, profile_plan=plan,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    print(f"artifacts written to {args.out} "
          f"({len(corpus.accounts)} accounts, {len(corpus.tweets)} tweets)")
    return EXIT_OK


def cmd_serve(args) -> int:
    # claim the port first so a clash is a clean environment error
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        probe.close()
        raise PortInUse(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    probe.close()

    loaded = arts.load_artifacts(args.artifacts)
    store = LabelStore(loaded.label_db_path)

    from .server import SessionServer

    async def run() -> None:
        server = SessionServer(loaded, store, host=args.host, port=args.port)
        port = await server.start()
        print(f"LISTENING host={args.host} port={port}", flush=True)
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, stop.set)
            except (NotImplementedError, ValueError):
                pass
        serve_task = asyncio.ensure_future(server.serve_forever())
        await stop.wait()
        serve_task.cancel()
        await server.stop()
        print("server stopped, labels flushed", flush=True)

    asyncio.run(run())
    return EXIT_OK


def cmd_export_labels(args) -> int:
    loaded = arts.load_artifacts(args.artifacts)
    store = LabelStore(loaded.label_db_path)
    try:
        export_labels(store, loaded.corpus.account_ids, args.out)
    finally:
        store.close()
    print(f"labels exported to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    report = evaluate(args.labels, args.truth)
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print(f"labeled_count {report.labeled_count}")
        print(f"TP {report.tp}  FP {report.fp}  FN {report.fn}  TN {report.tn}")
        print(f"precision {report.precision:.6f}")
        print(f"recall {report.recall:.6f}")
        print(f"f1 {report.f1:.6f}")
        print(f"accuracy {report.accuracy:.6f}")
    return EXIT_OK


def cmd_convert_cresci(args) -> int:
    from .cresci import convert

    n_accounts, n_tweets = convert(args.users, args.tweets, args.out_accounts, args.out_tweets)
    print(f"converted {n_accounts} accounts, {n_tweets} tweets")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="botlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="run the offline analysis into an artifact dir")
    p.add_argument("--accounts", required=True)
    p.add_argument("--tweets", required=True)
    p.add_argument("--lexicon", default=None, help="TSV lexicon (default: bundled)")
    p.add_argument("--out", required=True)
    p.add_argument("--profiles", default="default",
                   help='LDA profile plan: "default", "none" or level:K pairs')
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("serve", help="serve a labeling session over the wire protocol")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export-labels", help="dump the session's labels as CSV")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_labels)

    p = sub.add_parser("evaluate", help="score a label CSV against ground truth")
    p.add_argument("--labels", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("convert-cresci", help="map the public cresci layout onto the canonical CSVs")
    p.add_argument("--users", required=True)
    p.add_argument("--tweets", required=True)
    p.add_argument("--out-accounts", required=True)
    p.add_argument("--out-tweets", required=True)
    p.set_defaults(func=cmd_convert_cresci)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PortInUse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except CorruptArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BotlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
