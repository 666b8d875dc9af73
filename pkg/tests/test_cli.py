"""Command-line behaviour: output, exit codes, and endpoint wiring."""

import json
import re

import pytest

from kgframes.cli import ENDPOINT_ENV, main
from kgframes.executor import TransportTimeout, encode_results
from kgframes.generator import generate as real_generate
from kgframes.tables import ResultTable
from kgframes.terms import Iri

from conftest import MockEndpoint, iri, lit

MOVIES_PROGRAM = (
    "prefix dbpp: <http://dbpedia.org/property/>\n"
    "graph dbpedia = <http://dbpedia.org>\n"
    'frame movies = dbpedia.seed("movie", "dbpp:starring", "actor")\n'
    "return movies\n"
)

GROUPED_PROGRAM = MOVIES_PROGRAM.replace(
    "return movies",
    'frame counts = movies.group_by(["actor"]).count("movie", "n")\nreturn counts',
)

MOVIE_NT = (
    "\n".join(
        f"<http://example.org/{s}> <http://dbpedia.org/property/starring>"
        f" <http://example.org/{o}> ."
        for s, o in (("m1", "a1"), ("m2", "a1"), ("m3", "a2"))
    )
    + "\n"
)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

CLASSES_NT = (
    f"<http://example.org/a1> <{RDF_TYPE}> <http://example.org/Person> .\n"
    f"<http://example.org/a2> <{RDF_TYPE}> <http://example.org/Person> .\n"
    f"<http://example.org/p1> <{RDF_TYPE}> <http://example.org/Place> .\n"
    "<http://example.org/m1> <http://dbpedia.org/property/starring>"
    " <http://example.org/a1> .\n"
)


@pytest.fixture
def program(tmp_path):
    def write(text, name="pipeline.kgf"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def graph_file(tmp_path):
    def write(text, name="graph.nt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


@pytest.fixture(autouse=True)
def no_ambient_endpoint(monkeypatch):
    monkeypatch.delenv(ENDPOINT_ENV, raising=False)


def patch_transport(monkeypatch, transport):
    monkeypatch.setattr("kgframes.executor._requests_transport", transport)


# ----------------------------------------------------------------------------
# compile
# ----------------------------------------------------------------------------


def test_compile_is_deterministic(program, capsys):
    path = program(GROUPED_PROGRAM)
    assert main(["compile", path]) == 0
    first = capsys.readouterr().out
    assert main(["compile", path]) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("PREFIX dbpp:")


def test_compile_naive_emits_one_subquery_per_operator(program, capsys):
    path = program(GROUPED_PROGRAM)
    main(["compile", path])
    optimized = capsys.readouterr().out
    main(["compile", path, "--naive"])
    naive = capsys.readouterr().out
    assert naive != optimized
    assert naive.count("SELECT") > optimized.count("SELECT")


def test_compile_reports_program_errors(program, capsys):
    path = program(MOVIES_PROGRAM + "movies.bogus()\n")
    assert main(["compile", path]) == 1
    assert "unknown operation: bogus" in capsys.readouterr().err


def test_compile_reports_missing_files(tmp_path, capsys):
    assert main(["compile", str(tmp_path / "absent.kgf")]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_with_one():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["compile"])
    assert err.value.code == 1


# ----------------------------------------------------------------------------
# run
# ----------------------------------------------------------------------------


def small_table(n=3):
    return ResultTable(("movie", "actor"), [(iri(f"m{i}"), iri(f"a{i}")) for i in range(n)])


def test_run_prints_csv_and_row_count(program, monkeypatch, capsys):
    patch_transport(monkeypatch, MockEndpoint(small_table()))
    path = program(MOVIES_PROGRAM)
    code = main(["run", path, "--endpoint", "http://endpoint.example/sparql"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0] == "movie,actor"
    assert out.splitlines()[1] == "http://example.org/m0,http://example.org/a0"


def test_run_row_count_goes_to_stderr(program, monkeypatch, capsys):
    patch_transport(monkeypatch, MockEndpoint(small_table()))
    path = program(MOVIES_PROGRAM)
    main(["run", path, "--endpoint", "http://endpoint.example/sparql"])
    captured = capsys.readouterr()
    assert "3 rows" in captured.err
    assert "3 rows" not in captured.out


def test_run_formats_tsv_and_json(program, monkeypatch, capsys):
    patch_transport(monkeypatch, MockEndpoint(small_table()))
    path = program(MOVIES_PROGRAM)
    main(["run", path, "--endpoint", "http://e/", "--format", "tsv"])
    assert capsys.readouterr().out.splitlines()[0] == "movie\tactor"
    main(["run", path, "--endpoint", "http://e/", "--format", "json"])
    document = json.loads(capsys.readouterr().out)
    assert document["columns"] == ["movie", "actor"]
    assert len(document["rows"]) == 3


def test_run_honours_the_page_size(program, monkeypatch, capsys):
    endpoint = MockEndpoint(small_table(25))
    patch_transport(monkeypatch, endpoint)
    path = program(MOVIES_PROGRAM)
    main(["run", path, "--endpoint", "http://e/", "--page-size", "10"])
    assert len(endpoint.log) == 3
    assert "25 rows" in capsys.readouterr().err


def test_run_reads_the_endpoint_from_the_environment(program, monkeypatch, capsys):
    patch_transport(monkeypatch, MockEndpoint(small_table()))
    monkeypatch.setenv(ENDPOINT_ENV, "http://endpoint.example/sparql")
    assert main(["run", program(MOVIES_PROGRAM)]) == 0


def test_run_without_an_endpoint_fails(program, capsys):
    assert main(["run", program(MOVIES_PROGRAM)]) == 1
    assert ENDPOINT_ENV in capsys.readouterr().err


def test_run_maps_endpoint_errors_to_exit_two(program, monkeypatch, capsys):
    endpoint = MockEndpoint(small_table(), fail_statuses={1: 500, 2: 500, 3: 500})
    patch_transport(monkeypatch, endpoint)
    assert main(["run", program(MOVIES_PROGRAM), "--endpoint", "http://e/"]) == 2
    assert "endpoint error" in capsys.readouterr().err


def test_run_maps_timeouts_to_exit_three(program, monkeypatch, capsys):
    def transport(url, params, timeout, method):
        raise TransportTimeout("silence")

    patch_transport(monkeypatch, transport)
    assert main(["run", program(MOVIES_PROGRAM), "--endpoint", "http://e/"]) == 3
    assert "timeout" in capsys.readouterr().err


# ----------------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------------


def test_verify_passes_when_routes_agree(program, graph_file, capsys):
    code = main(
        ["verify", program(GROUPED_PROGRAM), "--graph", graph_file(MOVIE_NT)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("PASS: 2 rows")


def test_verify_accepts_named_graph_specs(program, graph_file, capsys):
    spec = "dbpedia=" + graph_file(MOVIE_NT)
    assert main(["verify", program(MOVIES_PROGRAM), "--graph", spec]) == 0
    assert capsys.readouterr().out.startswith("PASS: 3 rows")


def test_verify_passes_on_an_empty_graph(program, graph_file, capsys):
    assert main(["verify", program(MOVIES_PROGRAM), "--graph", graph_file("")]) == 0
    assert capsys.readouterr().out.startswith("PASS: 0 rows")


def test_verify_fails_with_a_witness_when_a_route_diverges(
    program, graph_file, monkeypatch, capsys
):
    monkeypatch.setattr(
        "kgframes.cli.generate", lambda frame: real_generate(frame.head(1))
    )
    code = main(["verify", program(MOVIES_PROGRAM), "--graph", graph_file(MOVIE_NT)])
    out = capsys.readouterr().out
    assert code == 4
    assert "FAIL: optimized query disagrees" in out
    assert "'side'" in out


def test_verify_fails_when_variants_disagree(program, graph_file, monkeypatch, capsys):
    monkeypatch.setattr(
        "kgframes.cli.eval_frame",
        lambda frame, stores: ResultTable(("movie", "actor"), []),
    )
    monkeypatch.setattr(
        "kgframes.cli.generate", lambda frame: real_generate(frame.head(0))
    )
    code = main(["verify", program(MOVIES_PROGRAM), "--graph", graph_file(MOVIE_NT)])
    out = capsys.readouterr().out
    assert code == 4
    assert "FAIL: naive and optimized queries disagree" in out


def test_verify_rejects_undeclared_graph_names(program, graph_file, capsys):
    spec = "elsewhere=" + graph_file(MOVIE_NT)
    assert main(["verify", program(MOVIES_PROGRAM), "--graph", spec]) == 1
    assert "not declared" in capsys.readouterr().err


def test_verify_requires_a_file_per_declared_graph(program, capsys):
    assert main(["verify", program(MOVIES_PROGRAM)]) == 1
    assert "no graph file for: dbpedia" in capsys.readouterr().err


def test_verify_reports_missing_graph_files(program, tmp_path, capsys):
    spec = str(tmp_path / "absent.nt")
    assert main(["verify", program(MOVIES_PROGRAM), "--graph", spec]) == 1
    assert "graph file not found" in capsys.readouterr().err


# ----------------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------------


def test_bench_compares_variants_locally(program, graph_file, monkeypatch, capsys):
    calls = []
    from kgframes.algebra import eval_model as real_eval_model

    def counting(model, stores):
        calls.append(model)
        return real_eval_model(model, stores)

    monkeypatch.setattr("kgframes.cli.eval_model", counting)
    code = main(
        [
            "bench",
            program(GROUPED_PROGRAM),
            "--local",
            graph_file(MOVIE_NT),
            "--repeat",
            "2",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert len(calls) == 4
    lines = out.splitlines()
    naive = lines[1].split()
    optimized = lines[2].split()
    assert naive[0] == "naive" and optimized[0] == "optimized"
    assert int(naive[1]) == 2 and int(optimized[1]) == 0
    assert re.fullmatch(r"ratio naive/optimized: \d+\.\d{2}", lines[3])


def test_bench_needs_exactly_one_data_source(program, graph_file, capsys):
    path = program(MOVIES_PROGRAM)
    assert main(["bench", path]) == 1
    both = [
        "bench", path, "--local", graph_file(MOVIE_NT), "--endpoint", "http://e/"
    ]
    assert main(both) == 1


def test_bench_rejects_a_nonpositive_repeat(program, graph_file, capsys):
    code = main(
        ["bench", program(MOVIES_PROGRAM), "--local", graph_file(MOVIE_NT), "--repeat", "0"]
    )
    assert code == 1
    assert "--repeat" in capsys.readouterr().err


# ----------------------------------------------------------------------------
# explore
# ----------------------------------------------------------------------------


def test_explore_tabulates_local_class_frequencies(graph_file, capsys):
    assert main(["explore", "--local", graph_file(CLASSES_NT)]) == 0
    assert capsys.readouterr().out == (
        "class\tfrequency\n"
        "http://example.org/Person\t2\n"
        "http://example.org/Place\t1\n"
    )


def test_explore_of_a_graph_without_types_is_empty(graph_file, capsys):
    assert main(["explore", "--local", graph_file(MOVIE_NT)]) == 0
    assert capsys.readouterr().out == "class\tfrequency\n"


def test_explore_endpoint_mode_sorts_served_rows(monkeypatch, capsys):
    served = ResultTable(
        ("class", "frequency"),
        [(iri("Place"), 1), (iri("Person"), 2)],
    )
    queries = []

    def transport(url, params, timeout, method):
        queries.append(params["query"])
        return 200, encode_results(served)

    patch_transport(monkeypatch, transport)
    code = main(
        ["explore", "--endpoint", "http://e/", "--graph-uri", "http://dbpedia.org"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "FROM <http://dbpedia.org>" in queries[0]
    lines = out.splitlines()
    assert lines[1].startswith("http://example.org/Person")


def test_explore_without_a_graph_uri_uses_the_endpoint_default(monkeypatch, capsys):
    queries = []

    def transport(url, params, timeout, method):
        queries.append(params["query"])
        return 200, encode_results(ResultTable(("class", "frequency"), []))

    patch_transport(monkeypatch, transport)
    assert main(["explore", "--endpoint", "http://e/"]) == 0
    assert "FROM " not in queries[0]


def test_explore_needs_exactly_one_data_source(graph_file, capsys):
    assert main(["explore"]) == 1
    assert (
        main(["explore", "--local", graph_file(CLASSES_NT), "--endpoint", "http://e/"])
        == 1
    )
