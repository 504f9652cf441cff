import json

import pytest

from qcluster import report
from qcluster.cli import data_path, expand_commutative, main

A2_FILE = str(data_path("a2_coefficients.quiver"))
POINT_FILE = str(data_path("single_vertex.quiver"))
K4_FILE = str(data_path("kronecker4.quiver"))


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_mutate_reports_the_a2_walk(capsys, golden_a2):
    status, out, _ = run(capsys, "mutate", "--quiver", A2_FILE, "--word", "1,2,1,2,1")
    assert status == 0
    data = json.loads(out)
    assert data["schema"] == "qcs-report/1" and data["seed"] == 0
    assert data["word_order"] == "left-to-right"
    assert len(data["seeds"]) == 6
    for entry in golden_a2["entries"]:
        var = data["seeds"][entry["step"]]["variables"][entry["index"] - 1]
        assert var["variable"] == entry["variable"]
    first = data["seeds"][1]
    assert first["btilde"] == [[0, -1], [1, 0], [-1, 0], [0, 1]]
    assert first["variables"][0]["g_vector"] == [-1, 1, 0, 0]


def test_mutate_empty_word(capsys):
    status, out, _ = run(capsys, "mutate", "--quiver", A2_FILE)
    seeds = json.loads(out)["seeds"]
    assert status == 0 and len(seeds) == 1
    assert [v["g_vector"] for v in seeds[0]["variables"]][0] == [1, 0, 0, 0]


@pytest.mark.parametrize("argv", [
    ["mutate", "--quiver", A2_FILE, "--word", "1,0"],
    ["mutate", "--quiver", A2_FILE, "--word", "3"],
    ["mutate", "--word", "1"],
    ["count", "--quiver", A2_FILE, "--dims", "1"],
    ["count", "--quiver", A2_FILE, "--dims", "1,-1"],
    ["mutate", "--quiver", "/nonexistent/file.quiver"],
])
def test_usage_errors_exit_two(capsys, argv):
    status, _, err = run(capsys, *argv)
    assert status == 2 and err.startswith("error:")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--quiver", A2_FILE, "--jobs", "0"])
    assert exc.value.code == 2


def test_cyclic_principal_part_is_refused(capsys, tmp_path):
    path = tmp_path / "cyclic.quiver"
    path.write_text("vertices 3\narrow 1 2\narrow 2 3\narrow 3 1\nlambda auto\n")
    status, _, err = run(capsys, "verify", "--quiver", str(path))
    assert status == 2 and "principal part not acyclic" in err


def test_parse_error_names_the_line(capsys, tmp_path):
    path = tmp_path / "bad.quiver"
    path.write_text("vertices 2\narrow 1\n")
    status, _, err = run(capsys, "mutate", "--quiver", str(path))
    assert status == 2 and "bad.quiver:2" in err


def test_verify_the_a2_walk(capsys):
    status, out, _ = run(capsys, "verify", "--quiver", A2_FILE, "--word", "1,2,1,2,1")
    data = json.loads(out)
    assert status == 0
    assert data["summary"] == {"variables": 5, "match": 5, "mismatch": 0, "error": 0}
    assert [r["position"] for r in data["records"]] == [1, 2, 3, 4, 5]
    assert all(r["F_match"] and r["X_match"] for r in data["records"])
    assert "seconds" not in json.dumps(data)


def test_verify_is_byte_identical_and_job_independent(capsys, tmp_path):
    outs = []
    for jobs in ("1", "1", "2"):
        path = tmp_path / f"r{len(outs)}.json"
        assert main(["verify", "--quiver", A2_FILE, "--word", "1,2,1", "--jobs", jobs,
                     "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert capsys.readouterr().out == ""


def test_verify_initial_variables(capsys):
    status, out, _ = run(capsys, "verify", "--quiver", A2_FILE)
    data = json.loads(out)
    assert status == 0 and [r["m_vec"] for r in data["records"]] == [[0, 0], [0, 0]]


def test_count_single_vertex(capsys):
    status, out, _ = run(capsys, "count", "--quiver", POINT_FILE, "--dims", "2", "--e", "1")
    (entry,) = json.loads(out)["polynomials"]
    assert status == 0 and entry["polynomial"] == [1, 1] and entry["text"] == "q + 1"


def test_count_class_beyond_dims_is_zero(capsys):
    status, out, _ = run(capsys, "count", "--quiver", POINT_FILE, "--dims", "2", "--e", "3")
    (entry,) = json.loads(out)["polynomials"]
    assert status == 0 and entry["polynomial"] == []


def test_count_whole_box_with_primes_and_ambient_bound(capsys):
    status, out, _ = run(capsys, "count", "--quiver", POINT_FILE, "--dims", "3", "--primes", "6",
                         "--ambient-bound")
    data = json.loads(out)
    assert status == 0 and data["degree_bound"] == "ambient"
    polys = [e["polynomial"] for e in data["polynomials"]]
    assert polys == [[1], [1, 1, 1], [1, 1, 1], [1]]
    assert all(len(e["samples"]) + len(e["held_out"]) == 6 for e in data["polynomials"])


def test_refutation_mode(capsys):
    status, out, _ = run(capsys, "count", "--quiver", K4_FILE, "--dims", "3,4", "--e", "2,1",
                         "--refute")
    result = json.loads(out)["refutation"]
    assert status == 0 and result["status"] == "refutation at budget"
    assert result["genericity"].startswith("brick")


def test_resource_ceiling_exit_three(capsys):
    status, _, err = run(capsys, "count", "--quiver", K4_FILE, "--dims", "3,4", "--e", "2,1",
                         "--refute", "--ceiling", "10")
    assert status == 3 and "instance too large" in err


def test_figures(capsys, tmp_path):
    figs = tmp_path / "figs"
    assert main(["count", "--quiver", POINT_FILE, "--dims", "3", "--figures", str(figs)]) == 0
    assert main(["count", "--quiver", K4_FILE, "--dims", "3,4", "--e", "2,1", "--refute",
                 "--figures", str(figs)]) == 0
    assert main(["verify", "--quiver", A2_FILE, "--word", "1,2", "--figures", str(figs)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in figs.iterdir())
    assert "counts.png" in names and "refutation.png" in names
    for name in names:
        assert (figs / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_reproduce_the_a2_golden_file(capsys):
    status, out, _ = run(capsys, "reproduce", "--table", "a2")
    data = json.loads(out)
    assert status == 0
    assert all(r["engine_equals_printed"] and r["dim_vector_equals_printed"] for r in data["rows"])


def test_report_encoding():
    big = 2 ** 70
    text = report.dumps({"b": [1, big], "a": {"x": [[1, 2], [3]]}})
    assert json.loads(text) == {"a": {"x": [[1, 2], [3]]}, "b": [1, str(big)]}
    assert text.index('"a"') < text.index('"b"')
    with pytest.raises(TypeError):
        report.encode({"x": object()})


def test_expression_expander():
    assert expand_commutative("1+2*y1+y1**2*y2", 2) == {(0, 0): 1, (1, 0): 2, (2, 1): 1}
    assert expand_commutative("(1+y1)**2", 1) == {(0,): 1, (1,): 2, (2,): 1}
