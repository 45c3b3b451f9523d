from __future__ import annotations

import json

import pytest

from folmmp import application
from folmmp.services.surface.utils import _emit_surface, _parse_surface


CUSP = "folmmp-germ v1\ndx: y, dy: x^2\n"

RULED = "\n".join((
    "folmmp-surface v1",
    "base F1",
    "kf -2*C0 - F",
    "curve F class F invariant",
    "curve C0 class C0 non-invariant",
)) + "\n"

TRIVIAL = "\n".join((
    "folmmp-surface v1",
    "base P2",
    "exceptional E1",
    "exceptional E2",
    "kf 2*H - E1 - E2",
    'curve C class "E1 - E2" invariant',
    "curve E2 class E2 non-invariant",
)) + "\n"


@pytest.fixture
def write(tmp_path):
    def build(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)
    return build


def test_eigenvalues_table(runner):
    result = runner.invoke(application, ["eigenvalues", "--epsilon", "1/2"])

    assert result.exit_code == 0
    assert result.output.splitlines() == ["p\tq\tdigits\tdigit_sum", "1\t1\t[1]\t1", "2\t1\t[2]\t2"]


def test_eigenvalues_reject_non_rational_input(runner):
    result = runner.invoke(application, ["eigenvalues", "--epsilon", "half"])

    assert result.exit_code == 2
    assert "not an exact rational" in result.output


def test_classify_germ(runner, write):
    result = runner.invoke(application, ["classify-germ", write("cusp.germ", CUSP)])

    assert result.exit_code == 0
    assert result.output.strip() == "NotLogCanonical (nilpotent linear part)"


def test_adjoint_check_of_the_cusp(runner, write):
    path = write("cusp.germ", CUSP)

    result = runner.invoke(application, ["adjoint-check", path, "--epsilon", "1/10", "--delta", "0"])
    assert result.exit_code == 0
    assert result.output.startswith("Refuted(")

    result = runner.invoke(application, ["adjoint-check", path, "--epsilon", "1/10", "--delta", "0", "--json"])
    payload = json.loads(result.output)
    assert payload["verdict"] == "Refuted"
    assert (str(payload["a_fol"]), str(payload["a_var"])) == ("-1", "4")


def test_adjoint_threshold_of_the_cusp(runner, write):
    result = runner.invoke(application, ["adjoint-threshold", write("cusp.germ", CUSP), "--delta", "0"])

    assert result.exit_code == 0
    assert result.output.strip() == "1/5"


def test_malformed_germ_exits_with_parse_code(runner, write):
    result = runner.invoke(application, ["classify-germ", write("bad.germ", "dx: x, dy: y\nsomething else\n")])

    assert result.exit_code == 1
    assert "line 2" in result.output


def test_resolve_writes_dot_file(runner, write, tmp_path):
    dot = tmp_path / "tree.dot"
    result = runner.invoke(application, ["resolve", write("cusp.germ", CUSP), "--dot", str(dot)])

    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "divisor\tnode\tdepth\tiota\ta_fol\ta_var\tself_intersection"
    assert dot.read_text(encoding="utf-8").startswith("digraph resolution {")


def test_quotient_threshold_needs_m_at_least_three(runner):
    assert runner.invoke(application, ["quotient-threshold", "--m", "2"]).exit_code == 2

    result = runner.invoke(application, ["quotient-threshold", "--m", "5", "--b", "3"])
    assert result.exit_code == 0
    assert result.output.splitlines()[1].split("\t")[4] == "1"


def test_mmp_run_and_log(runner, write, tmp_path):
    log = tmp_path / "run.jsonl"
    result = runner.invoke(application, ["mmp", "run", write("ruled.surface", RULED), "--log", str(log)])

    assert result.exit_code == 0
    assert "MoriFiberSpace" in result.output
    header = json.loads(log.read_text(encoding="utf-8").splitlines()[0])
    assert header["format"] == "folmmp-runlog v1"


@pytest.mark.parametrize("n", [2, 3, 4])
def test_emitted_model_after_a_contraction_parses_again(runner, write, tmp_path, n):
    emitted = tmp_path / "final.surface"
    source = write("hirzebruch.surface", f"folmmp-surface v1\nbase F{n}\nkf C0\ncurve C0 class C0 invariant\ncurve F class F invariant\n")

    result = runner.invoke(application, ["mmp", "run", source, "--emit", str(emitted)])
    assert result.exit_code == 0

    text = emitted.read_text(encoding="utf-8")
    assert "contracted C0" in text
    assert _emit_surface(_parse_surface(text)) == text


def test_configuration_file_values_reach_the_commands(runner, write):
    config = write("settings.yaml", "epsilon: 1/4\n")
    result = runner.invoke(application, ["--config", config, "mmp", "run", write("ruled.surface", RULED)])

    assert result.exit_code == 2


def test_invalid_configuration_file(runner, write):
    result = runner.invoke(application, ["--config", write("settings.yaml", "delta: 2\n"), "eigenvalues", "--epsilon", "1"])

    assert result.exit_code == 1
    assert "delta" in result.output


def test_canonical_model_command(runner, write, tmp_path):
    emitted = tmp_path / "canonical.surface"
    result = runner.invoke(application, ["canonical-model", write("trivial.surface", TRIVIAL), "--emit", str(emitted)])

    assert result.exit_code == 0
    assert "\tiii\t" in result.output
    assert emitted.read_text(encoding="utf-8").startswith("folmmp-surface v1\n")


def test_bounds_commands(runner):
    result = runner.invoke(application, ["bounds", "degree", "--g", "2", "--m", "3", "--tau", "1/10", "--l-degree", "6", "--adjoint-sq", "1"])
    assert result.exit_code == 0
    assert "m0\t6" in result.output.splitlines()

    result = runner.invoke(application, ["bounds", "aut", "--vol-up", "10", "--vol-down", "2"])
    assert result.output.strip() == "5"

    result = runner.invoke(application, ["bounds", "entry", "--i0", "1/2", "--lambda0", "9/10"])
    assert result.output.strip() == "1/9"

    result = runner.invoke(application, ["bounds", "entry", "--i0", "1/2", "--lambda0", "9/10", "--json"])
    assert result.exit_code == 0
    assert json.loads(result.output) == {"bound": "1/9", "i0": "1/2", "lambda_0": "9/10"}

    result = runner.invoke(application, ["bounds", "volume", "--volume", "1", "--epsilon", "1/3"])
    assert result.exit_code == 2
