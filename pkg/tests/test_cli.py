import json
import os

import pytest

from medley.cli import main

HERE = os.path.dirname(__file__)
CONFIG = os.path.join(HERE, os.pardir, "fixtures", "medley.cfg")
QUERY_FILE = os.path.join(HERE, os.pardir, "fixtures", "queries", "top3_phosphosites.cq")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_query_from_file(capsys):
    code, out, err = run(
        capsys, "query", "--config", CONFIG, "--file", QUERY_FILE
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"] == [
        ["1648480", "Fhl1p-S323"],
        ["1648480", "Fhl1p-T739"],
        ["8422683", "Fhl1p-S323"],
        ["8422683", "Fhl1p-T739"],
    ]
    assert err == ""


def test_query_inline_with_format(capsys):
    code, out, _ = run(
        capsys,
        "query", "--config", CONFIG,
        "--query", 'Ans(X) :- Protein(X), hasDescription(X,"DNA Topoisomerase III");',
        "--format", "rdf",
    )
    assert code == 0
    assert "<http://medley.example/onto#Protein/TOP3>" in out


def test_query_explain_on_rdf_goes_to_stderr(capsys):
    code, out, err = run(
        capsys,
        "query", "--config", CONFIG, "--file", QUERY_FILE,
        "--format", "rdf", "--explain",
    )
    assert code == 0
    assert "root group:" not in out
    assert "root group:" in err
    assert "call G1 sgd:" in err


def test_query_from_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr(
        "sys.stdin", io.StringIO('Ans(X) :- Protein(X), hasSystematicName(X,"YLR234W");')
    )
    code, out, _ = run(capsys, "query", "--config", CONFIG)
    assert code == 0
    assert json.loads(out)["rows"] == [["TOP3"]]


def test_keyword(capsys):
    code, out, _ = run(capsys, "query", "--config", CONFIG, "--keyword", "TOP3")
    assert code == 0
    assert json.loads(out)["rows"] == [["TOP3"]]


def test_plan_command(capsys):
    code, out, _ = run(capsys, "plan", "--config", CONFIG, "--file", QUERY_FILE)
    assert code == 0
    assert out.splitlines()[0].startswith("Ans(BR,Ph) :- ")
    assert "root group: G1" in out
    assert "distance -, sequential" in out


def test_sources_command(capsys):
    code, out, _ = run(capsys, "sources", "--config", CONFIG)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("sgd\tinproc:sgd\tschema=")
    assert any("classes: " in l for l in lines)


@pytest.mark.parametrize(
    "argv, exit_code, stage",
    [
        (["query", "--config", "/no/such.cfg", "--keyword", "x"], 2, "config"),
        (["query", "--config", CONFIG, "--query", "Ans(X) :- Protein(X)"], 3, "parse"),
        (["query", "--config", CONFIG, "--query", "Ans(X) :- Enzyme(X);"], 4, "validate"),
        (["query", "--config", CONFIG,
          "--query", 'Ans(P) :- Protein(P), hasFunction(P,"f");'], 5, "plan"),
        (["query", "--config", CONFIG, "--keyword", "x",
          "--query", "Ans(X) :- Protein(X);"], 2, "config"),
        (["query", "--config", CONFIG, "--query", "x", "--file", "y"], 2, "config"),
        (["query", "--config", CONFIG, "--file", "/no/such.cq"], 2, "config"),
        (["query", "--config", CONFIG, "--keyword", "x", "--sources", " , "], 2, "config"),
        (["plan", "--config", CONFIG, "--query",
          'Ans(X) :- Protein(X), hasDescription(X,"d");', "--sources", "kegg"],
         2, "directory"),
        (["serve-source", "--config", CONFIG, "--source", "kegg"], 2, "config"),
    ],
)
def test_error_exit_codes(capsys, argv, exit_code, stage):
    code, out, err = run(capsys, *argv)
    assert code == exit_code
    assert err.startswith("error (%s): " % stage)


def test_execution_failure_exit_code(capsys, tmp_path, monkeypatch):
    # config whose sources directory lacks the data files
    bad = tmp_path / "bad.cfg"
    fixtures = os.path.dirname(CONFIG)
    bad.write_text(
        "ontology = %s\nregistry = %s\nsources = %s\n"
        % (
            os.path.join(fixtures, "ontology.ont"),
            os.path.join(fixtures, "sources.reg"),
            tmp_path,
        )
    )
    code, _, err = run(
        capsys, "query", "--config", str(bad), "--keyword", "TOP3"
    )
    assert code == 2
    assert "error (config):" in err


def test_transport_failure_exit_code(capsys, tmp_path):
    # registry pointing at an endpoint nobody listens on
    fixtures = os.path.dirname(CONFIG)
    reg = tmp_path / "r.reg"
    with open(os.path.join(fixtures, "sources.reg")) as fh:
        text = fh.read()
    text = text.replace("inproc:sgd", "http://127.0.0.1:9/")
    reg.write_text(text.replace("map=", "map=%s%s" % (fixtures, os.sep)))
    cfg = tmp_path / "m.cfg"
    cfg.write_text(
        "ontology = %s\nregistry = %s\nsources = %s\n"
        % (
            os.path.join(fixtures, "ontology.ont"),
            reg,
            os.path.join(fixtures, "sources"),
        )
    )
    code, _, err = run(
        capsys,
        "query", "--config", str(cfg),
        "--query", 'Ans(X) :- Protein(X), hasDescription(X,"DNA Topoisomerase III");',
    )
    assert code == 6
    assert "error (transport):" in err


def test_usage_error_is_argparse(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_serve_subprocess():
    import re
    import subprocess
    import urllib.request

    proc = subprocess.Popen(
        ["python3", "-m", "medley.cli", "serve", "--config", CONFIG, "--port", "0"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        line = proc.stdout.readline()
        m = re.search(r"http://([\d.]+):(\d+)", line)
        assert m, line
        with urllib.request.urlopen(
            "http://%s:%s/api/health" % (m.group(1), m.group(2)), timeout=5
        ) as resp:
            assert json.loads(resp.read()) == {"status": "ok"}
    finally:
        proc.terminate()
        proc.wait(timeout=10)
