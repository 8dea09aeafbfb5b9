"""Command line front door.

  vizsynth synth TASK --out DIR      run the full pipeline from a task file
  vizsynth eval-program ...          apply a serialized program to a CSV
  vizsynth decompile --elements ...  show the layer sketches for elements
  vizsynth serve [--port N]          start the HTTP service

A task file is JSON: {"input": "data.csv", "elements": [...], "config":
{...}} with the input path resolved relative to the task file. Exit codes:
0 success with candidates, 1 I/O failure, 2 validation failure, 3 search
found no candidate.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .compiler import dumps_vegalite
from .errors import EvalError, ProgramParseError, VizSynthError
from .grammar import elements_from_json, layer_to_json
from .pipeline import synthesize
from .service import make_config
from .synthesizer import SearchConfig
from .table import load_csv
from .transforms import eval_program, parse, serialize

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NO_CANDIDATE = 3


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _add_search_flags(sub):
    sub.add_argument("--max-depth", type=int, default=None)
    sub.add_argument("--max-candidates", type=int, default=None)
    sub.add_argument(
        "--budgets-ms",
        default=None,
        help="comma-separated per-worker budgets in milliseconds",
    )
    sub.add_argument(
        "--seedless",
        action="store_true",
        help="single unbudgeted worker: exhaustive and deterministic",
    )


def _config_from(task_config: dict, args) -> SearchConfig:
    overrides = dict(task_config or {})
    if args.max_depth is not None:
        overrides["max_depth"] = args.max_depth
    if args.max_candidates is not None:
        overrides["max_candidates"] = args.max_candidates
    if args.budgets_ms is not None:
        overrides["budgets_ms"] = [
            int(p) for p in str(args.budgets_ms).split(",") if p.strip()
        ]
    if args.seedless:
        overrides["seedless"] = True
    return make_config(overrides)


def cmd_synth(args) -> int:
    try:
        with open(args.task, "r", encoding="utf-8") as fh:
            task = json.load(fh)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read task file: {exc}")
    except json.JSONDecodeError as exc:
        return _fail(EXIT_VALIDATION, f"task file is not valid JSON: {exc}")
    if not isinstance(task, dict) or "input" not in task or "elements" not in task:
        return _fail(EXIT_VALIDATION, "task file needs 'input' and 'elements'")

    csv_path = os.path.join(os.path.dirname(os.path.abspath(args.task)), task["input"])
    try:
        with open(csv_path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read input CSV: {exc}")

    try:
        table = load_csv(data)
        elements = elements_from_json(task["elements"])
        cfg = _config_from(task.get("config"), args)
    except (VizSynthError, ValueError, TypeError) as exc:
        return _fail(EXIT_VALIDATION, str(exc))

    try:
        outcome = synthesize(table, elements, cfg)
    except VizSynthError as exc:
        return _fail(EXIT_VALIDATION, str(exc))

    try:
        os.makedirs(args.out, exist_ok=True)
        for k, cand in enumerate(outcome.candidates, start=1):
            path = os.path.join(args.out, f"candidate_{k}.vl.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dumps_vegalite(cand.vegalite))
        with open(os.path.join(args.out, "programs.txt"), "w", encoding="utf-8") as fh:
            for cand in outcome.candidates:
                fh.write(" || ".join(serialize(p) for p in cand.programs) + "\n")
        with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as fh:
            json.dump(
                {**outcome.stats, "reason": outcome.reason}, fh, indent=2,
                sort_keys=True,
            )
            fh.write("\n")
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write outputs: {exc}")

    if not outcome.candidates:
        print("no candidates found", file=sys.stderr)
        return EXIT_NO_CANDIDATE
    print(f"wrote {len(outcome.candidates)} candidates to {args.out}")
    return EXIT_OK


def cmd_eval_program(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read input CSV: {exc}")
    try:
        table = load_csv(data)
    except VizSynthError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    try:
        program = parse(args.program)
    except ProgramParseError as exc:
        return _fail(EXIT_VALIDATION, f"cannot parse program: {exc}")
    try:
        result = eval_program(program, table)
    except EvalError as exc:
        where = "" if exc.op_index is None else f" (operator {exc.op_index})"
        return _fail(EXIT_VALIDATION, f"evaluation failed{where}: {exc}")
    sys.stdout.write(result.to_csv())
    return EXIT_OK


def cmd_decompile(args) -> int:
    raw = args.elements
    if os.path.exists(raw):
        try:
            with open(raw, "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot read elements file: {exc}")
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        return _fail(EXIT_VALIDATION, f"elements are not valid JSON: {exc}")
    try:
        elements = elements_from_json(payload)
        from .decompiler import decompile

        sketches = decompile(elements)
    except VizSynthError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    out = [
        {
            "mark": sk.mark.value,
            "channels": [ch.value for ch in sk.channels],
            "spec": layer_to_json(sk.spec),
            "example": sk.example.to_json(),
        }
        for sk in sketches
    ]
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("SYNTH_PORT", "8099"))
    uvicorn.run(create_app(), host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vizsynth",
        description="synthesize chart candidates from a table and example marks",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    synth = subs.add_parser("synth", help="run synthesis from a task file")
    synth.add_argument("task", help="path to a JSON task file")
    synth.add_argument("--out", required=True, help="output directory")
    _add_search_flags(synth)
    synth.set_defaults(func=cmd_synth)

    ev = subs.add_parser("eval-program", help="apply a program to a CSV")
    ev.add_argument("--input", required=True, help="input CSV path")
    ev.add_argument("--program", required=True, help="serialized program text")
    ev.set_defaults(func=cmd_eval_program)

    dec = subs.add_parser("decompile", help="show layer sketches for elements")
    dec.add_argument(
        "--elements", required=True, help="JSON list of elements, inline or a path"
    )
    dec.set_defaults(func=cmd_decompile)

    serve = subs.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
