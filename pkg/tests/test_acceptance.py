"""Acceptance gate: seven end-to-end and property criteria.

Each test prints one "[criterion N] PASS/FAIL" line; the lines are also
echoed in the terminal summary so they survive output capture.
Criteria 1-2 pin the two worked scenarios,
3-4 check the search against a brute-force oracle, 5 covers language
properties, 6 covers memoization/parallelism transparency, and 7 covers
emitted chart documents.
"""

import json
import random
import time
from contextlib import contextmanager

import pytest

from helpers import (
    derived_example,
    make_sketch,
    oracle_explore,
    oracle_instantiations,
    oracle_pairs,
    random_table,
    satisfying_classes,
    table,
    validate_vegalite_subset,
)
from vizsynth.cli import main as cli_main
from vizsynth.grammar import Channel, elements_from_json
from vizsynth.pipeline import synthesize
from vizsynth.synthesizer import SearchConfig, feasible, synthesize_layer
from vizsynth.table import ColumnType, Table
from vizsynth.transforms import (
    OP_NAMES,
    Mutate,
    PivotLonger,
    PivotWider,
    TransformProgram,
    complexity,
    contains,
    eval_op,
    eval_program,
)

WEATHER_CSV = (
    "Date,Type,Temp\n"
    "09-05,Low,64.4\n"
    "09-05,High,87.8\n"
    "09-06,Low,53.6\n"
    "09-06,High,80.6\n"
)
BAR = [{"kind": "bar", "x": "09-05", "y": 64.4, "y2": 87.8}]
LINE = [
    {"kind": "line", "x1": "2011-10-01", "y1": 63.4, "x2": "2011-10-05", "y2": 64.2}
]
LINE_AND_BAR = LINE + [
    {"kind": "bar", "x": "2011-10-01", "y": 62.7, "y2": 63.4, "color": 0.7}
]
# staggered budgets sized so each phase, including candidate assembly,
# lands under ten seconds; the candidate cap is wide enough that reshape
# variants are not crowded out by the many same-complexity filter variants
DESK_CFG = SearchConfig(max_depth=3, worker_budgets=(2.0, 6.0), max_candidates=40)


CRITERION_LINES = []


def _record(line):
    CRITERION_LINES.append(line)
    print(line, flush=True)


@contextmanager
def report(number, title):
    try:
        yield
    except BaseException:
        _record(f"[criterion {number}] FAIL - {title}")
        raise
    _record(f"[criterion {number}] PASS - {title}")


@pytest.fixture(scope="module")
def weather_seedless(weather_table):
    cfg = SearchConfig(worker_budgets=(None,))
    return synthesize(weather_table, elements_from_json(BAR), cfg)


@pytest.fixture(scope="module")
def line_outcome(cities_table):
    started = time.monotonic()
    out = synthesize(cities_table, elements_from_json(LINE), DESK_CFG)
    return out, time.monotonic() - started


@pytest.fixture(scope="module")
def layered_outcome(cities_table):
    started = time.monotonic()
    out = synthesize(cities_table, elements_from_json(LINE_AND_BAR), DESK_CFG)
    return out, time.monotonic() - started


def test_criterion_1_golden_ranged_bar(tmp_path, golden_dir, weather_seedless):
    with report(1, "golden ranged-bar scenario"):
        (tmp_path / "data.csv").write_text(WEATHER_CSV, encoding="utf-8")
        task = tmp_path / "task.json"
        task.write_text(
            json.dumps({"input": "data.csv", "elements": BAR}), encoding="utf-8"
        )
        out_dir = tmp_path / "out"
        started = time.monotonic()
        code = cli_main(["synth", str(task), "--out", str(out_dir), "--seedless"])
        elapsed = time.monotonic() - started
        assert code == 0

        golden = (golden_dir / "ranged_bar_weather.vl.json").read_bytes()
        assert (out_dir / "candidate_1.vl.json").read_bytes() == golden

        top = weather_seedless.candidates[0]
        (prog,) = top.programs
        assert prog.ops == (PivotWider(names_from="Type", values_from="Temp"),)
        rendered = top.rendered[0]
        assert rendered.column_names == ("Date", "Low", "High")
        assert [ctype.value for _, ctype in rendered.columns] == [
            "nominal",
            "quantitative",
            "quantitative",
        ]
        assert rendered.rows == (
            ("09-05", 64.4, 87.8),
            ("09-06", 53.6, 80.6),
        )
        assert elapsed < 2.0, f"took {elapsed:.2f}s"


def test_criterion_2_layered_scenario(line_outcome, layered_outcome):
    with report(2, "two-city line + difference-bar scenario"):
        out, elapsed = line_outcome
        assert elapsed < 10.0, f"line search took {elapsed:.2f}s"

        def x_y_fields(cand):
            enc = dict(cand.spec.layers[0].encodings)
            return enc[Channel.X], enc[Channel.Y]

        # one generalization plots the New York column as-is
        ny_only = [
            c
            for c in out.candidates
            if len(c.programs) == 1 and x_y_fields(c) == ("Date", "New York")
        ]
        # the other reshapes so both cities share one value column
        both_cities = [
            c
            for c in out.candidates
            if any(
                isinstance(op, PivotLonger)
                and set(op.cols) == {"New York", "San Francisco"}
                for op in c.programs[0].ops
            )
            and x_y_fields(c)[1] == "value"
        ]
        assert ny_only, "missing the single-city generalization"
        assert both_cities, "missing the both-cities generalization"

        out2, elapsed2 = layered_outcome
        assert elapsed2 < 10.0, f"layered search took {elapsed2:.2f}s"
        want_bar_ops = (
            Mutate(out_name="Diff", lhs="New York", op="-", rhs="San Francisco"),
        )
        hits = [
            c
            for c in out2.candidates
            if len(c.programs) == 2 and c.programs[1].ops == want_bar_ops
        ]
        assert hits, "missing the layered candidate with the difference bar"
        bar_enc = dict(hits[0].spec.layers[1].encodings)
        assert bar_enc == {
            Channel.X: "Date",
            Channel.Y: "San Francisco",
            Channel.Y2: "New York",
            Channel.COLOR: "Diff",
        }


def test_criterion_3_pruning_soundness():
    with report(3, "pruning rejects only unsatisfiable prefixes (200 instances)"):
        rng = random.Random(20260823)
        violations = []
        nodes_audited = 0
        satisfiable_nodes = 0
        for i in range(200):
            tbl = random_table(rng)
            ex = derived_example(rng, tbl)

            def on_node(t, depth_left, found, _i=i, _ex=ex):
                nonlocal nodes_audited, satisfiable_nodes
                nodes_audited += 1
                for seq, pairs in found.items():
                    if not pairs:
                        continue
                    satisfiable_nodes += 1
                    if not feasible(t, seq, _ex, 1e-6):
                        violations.append((_i, seq))

            oracle_explore(tbl, ex, 2, on_node=on_node)
        assert nodes_audited > 200
        assert satisfiable_nodes > 200  # audit actually exercised
        assert violations == [], f"{len(violations)} unsound rejections"


def test_criterion_4_bounded_completeness():
    with report(4, "depth-2 search equals the oracle modulo dedup (50 instances)"):
        rng = random.Random(42)
        cfg = SearchConfig(max_depth=2, worker_budgets=(None,))
        nonempty = 0
        for i in range(50):
            tbl = random_table(rng)
            ex = derived_example(rng, tbl)
            want = satisfying_classes(oracle_pairs(oracle_explore(tbl, ex, 2)), tbl)
            res = synthesize_layer(tbl, make_sketch(ex), cfg)
            got = satisfying_classes(res.results, tbl)
            assert got == want, f"instance {i}: search != oracle"
            if want:
                nonempty += 1
        assert nonempty >= 10  # enough satisfiable instances to mean something


def test_criterion_5_language_properties():
    with report(5, "transform language property suite"):
        rng = random.Random(7)

        # pivot roundtrips on 100 random keyed tables
        for _ in range(100):
            n_vals = rng.randint(2, 3)
            n_rows = rng.randint(1, 5)
            specs = ["K:n"] + [f"V{j + 1}:q" for j in range(n_vals)]
            rows = [
                [f"k{r}"] + [float(rng.randint(-20, 99)) for _ in range(n_vals)]
                for r in range(n_rows)
            ]
            wide = table(specs, rows)
            value_cols = tuple(f"V{j + 1}" for j in range(n_vals))
            longer = PivotLonger(cols=value_cols, names_to="key", values_to="value")
            wider = PivotWider(names_from="key", values_from="value")
            long = eval_op(longer, wide)
            assert eval_op(wider, long) == wide
            assert eval_op(longer, eval_op(wider, long)) == long

        # evaluation is deterministic
        checked = 0
        while checked < 30:
            tbl = random_table(rng)
            ops = []
            current = tbl
            for _ in range(rng.randint(1, 2)):
                name = rng.choice(OP_NAMES)
                options = oracle_instantiations(name, current)
                if not options:
                    break
                op = rng.choice(options)
                try:
                    current = eval_op(op, current)
                except Exception:
                    break
                ops.append(op)
            if not ops:
                continue
            prog = TransformProgram(tuple(ops))
            assert eval_program(prog, tbl) == eval_program(prog, tbl)
            checked += 1

        # complexity is additive over concatenation
        for _ in range(50):
            tbl = random_table(rng)
            pool = [
                op for name in OP_NAMES for op in oracle_instantiations(name, tbl)
            ]
            a = tuple(rng.choice(pool) for _ in range(rng.randint(0, 3)))
            b = tuple(rng.choice(pool) for _ in range(rng.randint(0, 3)))
            assert complexity(TransformProgram(a + b)) == complexity(
                TransformProgram(a)
            ) + complexity(TransformProgram(b))

        # containment: identity mapping, and supersets never lose mappings
        nonempty = 0
        for _ in range(40):
            # example tables cannot carry missing cells, so the self-
            # containment draw must be complete
            tbl = random_table(rng, missing_rate=0.0)
            assert tuple(tbl.column_names) in contains(tbl, tbl)

            ex = derived_example(rng, tbl, perturb=0.0)
            before = set(contains(tbl, ex))
            wider_cols = tbl.columns + (("Extra", ColumnType.NOMINAL),)
            wider_rows = tuple(
                row + (f"e{i}",) for i, row in enumerate(tbl.rows)
            ) + (tbl.rows[0] + ("e_dup",),)
            bigger = Table(wider_cols, wider_rows)
            assert before <= set(contains(bigger, ex))
            if before:
                nonempty += 1
        assert nonempty >= 10

        # a running sum never changes the column count, so a three-column
        # table can never satisfy a four-column example through it
        three = table(
            ["Date:n", "Type:n", "Temp:q"],
            [["09-05", "Low", 64.4], ["09-05", "High", 87.8]],
        )
        four = table(
            ["C1:n", "C2:n", "C3:q", "C4:q"],
            [["09-05", "Low", 64.4, 64.4]],
        )
        assert not feasible(three, ("cumsum",), four, 1e-6)
        assert not feasible(three, ("cumsum", "cumsum"), four, 1e-6)
        found = oracle_explore(three, four, 1)
        assert not found.get(("cumsum",))


def test_criterion_6_memo_and_parallel_transparency(weather_table, weather_seedless):
    with report(6, "memoization and worker-count transparency"):
        elements = elements_from_json(BAR)
        base_ids = [c.id for c in weather_seedless.candidates]

        no_memo = synthesize(
            weather_table,
            elements,
            SearchConfig(worker_budgets=(None,), memoize=False),
        )
        assert [c.id for c in no_memo.candidates] == base_ids

        two_workers = synthesize(
            weather_table, elements, SearchConfig(worker_budgets=(None, None))
        )
        assert [c.id for c in two_workers.candidates] == base_ids

        # default staggered budgets: live stream is a prefix of the final list
        streamed = []
        final = synthesize(
            weather_table,
            elements,
            SearchConfig(),
            on_candidate=lambda c: streamed.append(c.id),
        )
        final_ids = [c.id for c in final.candidates]
        assert streamed == final_ids[: len(streamed)]
        assert streamed, "stream produced no candidates"


def test_criterion_7_emitted_documents(weather_seedless, line_outcome, layered_outcome):
    with report(7, "document validity and temporal scales"):
        all_candidates = (
            list(weather_seedless.candidates)
            + list(line_outcome[0].candidates)
            + list(layered_outcome[0].candidates)
        )
        assert all_candidates
        for cand in all_candidates:
            validate_vegalite_subset(cand.vegalite)

        # the ISO-date column must carry a temporal scale wherever it is used
        temporal_seen = 0
        for cand in list(line_outcome[0].candidates) + list(
            layered_outcome[0].candidates
        ):
            doc = cand.vegalite
            layer_docs = doc["layer"] if "layer" in doc else [doc]
            for layer_doc in layer_docs:
                x_enc = layer_doc["encoding"].get("x")
                if x_enc and x_enc["field"] == "Date":
                    assert x_enc["type"] == "temporal"
                    temporal_seen += 1
        assert temporal_seen > 0
