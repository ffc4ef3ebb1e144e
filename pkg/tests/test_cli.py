import shutil
from pathlib import Path

import pytest

from lks.cli import main, render

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "analyze_sin2": ["analyze", "--profile", "sin2.cfg"],
    "analyze_cubic": ["analyze", "--profile", "cubic.cfg"],
    "quotients_sin2": ["quotients", "--profile", "sin2.cfg"],
    "quotients_forced": ["quotients", "--case", "0", "--k", "2", "--ell", "2"],
    "classify_sin2": ["classify", "--profile", "sin2.cfg", "--kind", "torus", "--marks", "all",
                      "--tau", "0.3"],
    "components_sin2": ["components", "--profile", "sin2.cfg", "--marks", "all"],
    "components_bottle": ["components", "--profile", "bottle.cfg"],
    "compare_self": ["compare", "torus.inv", "torus.inv"],
}


@pytest.fixture
def inputs(tmp_path, monkeypatch):
    for f in (GOLDEN / "inputs").iterdir():
        shutil.copy(f, tmp_path / f.name)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse(out):
    """Top-level scalar keys of structured output."""
    return dict(line.split(": ", 1) for line in out.splitlines()
                if ": " in line and not line.startswith(" "))


@pytest.mark.parametrize("name", list(CASES))
def test_structured_output_matches_golden(name, inputs, capsys):
    code, out, _ = run(capsys, *CASES[name], "--format", "structured")
    assert code == 0
    assert out == (GOLDEN / f"{name}.txt").read_text()


def test_human_format(inputs, capsys):
    code, out, _ = run(capsys, "analyze", "--profile", "sin2.cfg")
    assert code == 0
    assert "Half bands: none" in out and "Reflection centers: [0.785398, 2.35619]" in out


def test_render_nesting():
    doc = {"a": 1.5, "b": {"c": [1, 2]}, "d": [{"e": True}], "f": None}
    assert "\n".join(render(doc)) == "a: 1.5\nb:\n  c: [1, 2]\nd:\n  - e: true\nf: null"


def test_parse_errors_exit_2(inputs, capsys):
    Path("bad.cfg").write_text("function = sin(2*\ndomain = periodic:pi\n")
    code, _, err = run(capsys, "analyze", "--profile", "bad.cfg")
    assert code == 2 and err.startswith("lks: parse error")
    Path("nodomain.cfg").write_text("function = x\n")
    assert run(capsys, "analyze", "--profile", "nodomain.cfg")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "quotients", "--case", "0", "--k", "two")[0] == 2


def test_domain_errors_exit_1(inputs, capsys):
    Path("flat.cfg").write_text("function = 3\ndomain = periodic:1\n")
    code, _, err = run(capsys, "analyze", "--profile", "flat.cfg")
    assert code == 1 and err.startswith("lks: error")
    assert run(capsys, "quotients", "--case", "3c+b", "--k", "1", "--ell", "1")[0] == 1
    assert run(capsys, "classify", "--profile", "sin2.cfg", "--kind", "torus", "--marks", "0.1")[0] == 1
    assert run(capsys, "analyze", "--profile", "missing.cfg")[0] == 1


def test_compare_type_mismatch(inputs, capsys):
    code, _, _ = run(capsys, "classify", "--profile", "sin2.cfg", "--kind", "bottle1",
                     "--marks", "0.785398163397448", "--output", "b1.inv")
    assert code == 0
    code, _, err = run(capsys, "compare", "torus.inv", "b1.inv")
    assert code == 1 and err.startswith("lks: error")


def test_compare_detects_inequivalence(inputs, capsys):
    run(capsys, "classify", "--profile", "sin2.cfg", "--kind", "torus", "--marks", "none",
        "--output", "plain.inv")
    code, out, _ = run(capsys, "compare", "torus.inv", "plain.inv", "--format", "structured")
    assert code == 0 and parse(out)["verdict"] == "NOT EQUIVALENT"


def test_classify_writes_canonical_invariant(inputs, capsys):
    run(capsys, "classify", "--profile", "sin2.cfg", "--kind", "torus", "--marks", "all",
        "--tau", "0.3", "--output", "c.inv")
    code, out, _ = run(capsys, "compare", "c.inv", "torus.inv", "--format", "structured")
    assert parse(out)["verdict"] == "EQUIVALENT"


def test_geodesic_command(inputs, capsys):
    code, out, _ = run(capsys, "geodesic", "--profile", "sin2.cfg", "--x0", "0.3", "--p0", "0.2",
                       "--q0", "0.1", "--t-end", "5", "--table", "g.tsv", "--format", "structured")
    assert code == 0 and parse(out)["status"] == "Completed"
    assert Path("g.tsv").read_text().splitlines()[0] == "t x y p q C E"


def test_conjugate_command(inputs, capsys):
    Path("cp.cfg").write_text("function = sin(2*x) + 1.2\ndomain = periodic:pi\n")
    code, out, _ = run(capsys, "conjugate", "--profile", "cp.cfg", "--eps", "1", "--C", "1",
                       "--format", "structured")
    top = parse(out)
    assert code == 0 and top["status"] == "Found"
    assert float(top["relative_gap"]) < 1e-5


def test_plot_writes_svg(inputs, capsys):
    assert run(capsys, "analyze", "--profile", "sin2.cfg", "--plot", "f.svg")[0] == 0
    text = Path("f.svg").read_text()
    assert text.lstrip().startswith("<svg") or "<svg" in text[:200]
    assert "</svg>" in text
