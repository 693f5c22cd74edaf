"""Command-line entry point.

Exit codes: 0 success / verification passed, 1 verification failed,
2 usage or operational error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .baselines import bertino_digest, dom_hash_digest, xhash_digest
from .bench import MODELS, export_results, format_table, ordering_verdicts, run_sweep, sweep_range
from .csr import DEFAULT_TIMESTAMP_ATTRIBUTE, csr_digest, document_timestamp, timestamped_seal, verify
from .demo import SCENARIOS
from .errors import CsrError
from .hashing import HashAlgorithm, HashCounter
from .manifest import encode_digest, emit_manifest, parse_manifest
from .tree import parse_document, resolve, select_node, selector_at

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
ALGO_ENV = "CSRDIGEST_ALGO"


def _default_algo() -> str:
    return os.environ.get(ALGO_ENV, "sha1").lower()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csrdigest", description="CSR integrity digests for XML documents"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    algo_help = f"hash algorithm (default: ${ALGO_ENV} or sha1)"

    d = sub.add_parser("digest", help="compute a digest and write an integrity manifest")
    d.add_argument("input", type=Path)
    d.add_argument("--model", choices=sorted(MODELS), default="csr")
    d.add_argument("--algo", choices=["sha1", "sha256"], default=None, help=algo_help)
    d.add_argument("--target", help="selector of the signed node (default: the root)")
    d.add_argument("--context", action="append", default=[], metavar="SELECTOR",
                   help="context-related element (repeatable, csr only)")
    d.add_argument("--timestamp", help="RFC 3339 UTC creation timestamp to seal with (csr only)")
    d.add_argument("--timestamp-attr", default=DEFAULT_TIMESTAMP_ATTRIBUTE,
                   help="root attribute read as the timestamp when --timestamp is absent")
    d.add_argument("--no-seal", action="store_true", help="never seal, even if the root has a timestamp")
    d.add_argument("-o", "--output", type=Path, help="manifest path (default: <input>.manifest.xml)")
    d.add_argument("--encoding", choices=["base64", "hex"], default="base64")
    d.add_argument("--space-mode", choices=["default", "preserved"], default="default",
                   help="whitespace handling for xhash")
    d.add_argument("--strict-bertino", action="store_true",
                   help="leave attributes out of the bertino digest")
    d.add_argument("--stats", action="store_true", help="print the number of hash invocations")
    d.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="verify a document against an integrity manifest")
    v.add_argument("input", type=Path)
    v.add_argument("manifest", type=Path)
    v.add_argument("--timestamp-attr", default=DEFAULT_TIMESTAMP_ATTRIBUTE)
    v.add_argument("--json", action="store_true")

    b = sub.add_parser("bench", help="run a depth or width sweep")
    b.add_argument("--axis", choices=["depth", "width"], default="depth")
    b.add_argument("--from", dest="start", type=int, default=10)
    b.add_argument("--to", dest="stop", type=int, default=150)
    b.add_argument("--step", type=int, default=10)
    b.add_argument("--per-level", type=int, default=5)
    b.add_argument("--payload", type=int, default=32, help="text characters per element")
    b.add_argument("--repeat", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algo", action="append", choices=["sha1", "sha256"], help=algo_help + "; repeatable")
    b.add_argument("--model", action="append", choices=sorted(MODELS), help="repeatable (default: all)")
    b.add_argument("--jobs", type=int, default=1, help="worker processes across sweep points")
    b.add_argument("-o", "--output", type=Path, help="CSV path (default: bench-<axis>.csv)")
    b.add_argument("--json", action="store_true")

    m = sub.add_parser("demo", help="show a tamper scenario on the bundled certificate")
    m.add_argument("scenario", help="one of: " + ", ".join(SCENARIOS))
    m.add_argument("--algo", choices=["sha1", "sha256"], default=None, help=algo_help)
    m.add_argument("--json", action="store_true")
    return parser


def _algo(value: str | None) -> HashAlgorithm:
    return HashAlgorithm.parse(value or _default_algo())


def cmd_digest(args: argparse.Namespace) -> int:
    algo = _algo(args.algo)
    root = parse_document(args.input.read_bytes())
    target = args.target or f"/{root.name}"
    counter = HashCounter()
    out: dict = {"model": args.model, "algo": algo.value, "target": target}

    if args.model != "csr":
        if args.context or args.timestamp:
            raise CsrError("--context and --timestamp apply to the csr model only")
        node = root if args.target is None else select_node(root, target)
        if args.model == "domhash":
            digest = dom_hash_digest(node, algo, counter)
        elif args.model == "xhash":
            digest = xhash_digest(node, algo, counter, args.space_mode)
        else:
            digest = bertino_digest(node, algo, counter, include_attributes=not args.strict_bertino)
        out["digest"] = encode_digest(digest.value, args.encoding)
    else:
        # canonical selectors in document order
        context = [selector_at(root, p) for p in sorted({resolve(root, s) for s in args.context})]
        result = csr_digest(root, target, context, algo, counter)
        timestamp = args.timestamp
        if timestamp is None and not args.no_seal:
            timestamp = document_timestamp(root, args.timestamp_attr)
        if timestamp is not None and not args.no_seal:
            timestamped_seal(result, timestamp, counter=counter)
        manifest_path = args.output or args.input.with_suffix(".manifest.xml")
        if manifest_path.resolve() == args.input.resolve():
            raise CsrError("refusing to overwrite the input document with its manifest")
        manifest_path.write_bytes(emit_manifest(result, target, context, algo, args.encoding))
        out["digest"] = encode_digest(result.csr.value, args.encoding)
        out["context"] = context
        if result.seal is not None:
            out["timestamp"] = result.timestamp
            out["seal"] = encode_digest(result.seal.value, args.encoding)
        out["manifest"] = str(manifest_path)
    out["hash_count"] = counter.count

    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"{out['model']} {out['algo']} {out['target']}")
        print(f"digest: {out['digest']}")
        if "seal" in out:
            print(f"seal: {out['seal']} (created {out['timestamp']})")
        if "manifest" in out:
            print(f"manifest: {out['manifest']}")
        if args.stats:
            print(f"hash invocations: {out['hash_count']}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    root = parse_document(args.input.read_bytes())
    manifest = parse_manifest(args.manifest.read_bytes())
    verdict = verify(root, manifest, args.timestamp_attr)
    if args.json:
        print(json.dumps({
            "result": "pass" if verdict else "fail",
            "facet": verdict.facet.value if verdict.facet else None,
            "detail": verdict.detail,
            "target": manifest.target,
        }, indent=2))
    elif verdict:
        print(f"PASS {manifest.target}")
    else:
        print(f"FAIL {verdict.facet.value}: {verdict.detail}")
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_bench(args: argparse.Namespace) -> int:
    values = sweep_range(args.start, args.stop, args.step)
    if args.per_level < 1 or args.repeat < 1 or args.jobs < 1 or args.payload < 0:
        raise ValueError("--per-level, --repeat and --jobs must be >= 1, --payload >= 0")
    algos = args.algo or [_default_algo()]
    models = args.model or list(MODELS)
    results = run_sweep(
        args.axis, values, algos, models, args.per_level, args.repeat, args.seed, args.payload, args.jobs
    )
    path = export_results(results, args.output or Path(f"bench-{args.axis}.csv"))
    verdicts = ordering_verdicts(results)
    if args.json:
        print(json.dumps({
            "csv": str(path),
            "rows": len(results),
            "ordering": [
                {"axis": a, "algo": al, "value": v, "csr<domhash<bertino": ok} for a, al, v, ok in verdicts
            ],
        }, indent=2))
        return EXIT_OK
    print(format_table(results))
    if verdicts:
        print()
        print("hash-count ordering csr < domhash < bertino:")
        for axis, algo, value, ok in verdicts:
            print(f"  {axis}={value:<5} {algo:<7} {'holds' if ok else 'VIOLATED'}")
    print(f"\nwrote {len(results)} rows to {path}")
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    if args.scenario not in SCENARIOS:
        print(f"error: unknown scenario {args.scenario!r}; choose from {', '.join(SCENARIOS)}",
              file=sys.stderr)
        return EXIT_ERROR
    result = SCENARIOS[args.scenario](_algo(args.algo))
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print("\n".join(result.transcript))
    return EXIT_OK if result.ok else EXIT_FAIL


COMMANDS = {"digest": cmd_digest, "verify": cmd_verify, "bench": cmd_bench, "demo": cmd_demo}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CsrError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
