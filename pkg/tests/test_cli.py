"""Script language: parsing, execution, error containment, determinism."""

import pytest

from cantormeasure.cli import builtin_env, main, parse, render_script, run
from cantormeasure.errors import ParseError, PresentationError
from cantormeasure.trees import BlockTree, FullTree


def test_builtins_present():
    env = builtin_env()
    assert set(env) == {"FULL", "E", "Q", "PJ", "U", "BST"}
    assert isinstance(env["FULL"], FullTree)
    assert isinstance(env["E"], BlockTree)


def test_parse_declarations_and_queries():
    script = parse(
        """
        # a comment
        tree A = blocks(2){00 11}
        tree B = product(A, FULL)   # trailing comment
        query measure A cylinder 0011
        query classify B depth 16
        """
    )
    assert [name for name, _ in script.declarations] == ["A", "B"]
    assert [q.kind for q in script.queries] == ["measure", "classify"]


def test_parse_rejects_bad_lines():
    with pytest.raises(ParseError):
        parse("measure A cylinder 00")  # missing keyword
    with pytest.raises(ParseError):
        parse("tree 2bad = full")
    with pytest.raises(ParseError):
        parse("tree A = full\ntree A = full")
    with pytest.raises(ParseError):
        parse("tree FULL = full")  # shadows a builtin
    with pytest.raises(ParseError):
        parse("query measure NOPE cylinder 0")
    with pytest.raises(ParseError):
        parse("query frobnicate")
    with pytest.raises(ParseError) as err:
        parse("tree A = full\nquery measure A cylinder 2")
    assert err.value.line == 2


def test_parse_rejects_invalid_presentations():
    with pytest.raises(PresentationError):
        parse("tree S = silver[-1 0]repeat[0]")
    with pytest.raises(PresentationError):
        parse("tree B = blocks(2){00 1}")


def test_render_round_trip():
    text = """tree A = blocks(2){00 11}
tree B = subtree(FULL,01)
tree C = silver[1]repeat[-1 0]
query measure A cylinder 00
query trace A in FULL depth 8
query trace-exact A in FULL
query lemma1 U in FULL k 2 rounds 2
query table1
query phi 01
query lusin stages 2
query product-check A C depth 4
query classify B depth 12
"""
    script = parse(text)
    rendered = render_script(script)
    assert parse(rendered) == script
    assert render_script(parse(rendered)) == rendered


def test_run_basic_values():
    report = run(parse("query measure Q cylinder 0111"))
    assert "= 1/4" in report.text
    assert report.exit_code == 0

    report = run(parse("query trace U in FULL depth 10"))
    assert "= 1/32 at depth 10" in report.text

    report = run(parse("query trace-exact U in FULL"))
    assert "= 0" in report.text

    report = run(parse("query phi 000"))
    assert "= 10100010000000" in report.text


def test_run_lemma1_emits_certificate():
    report = run(parse("query lemma1 U in FULL k 2 rounds 4"))
    assert "bound 81/256" in report.text
    assert len(report.certificates) == 1
    assert report.certificates[0].startswith("certificate lemma1 v1")


def test_run_contains_errors_per_query():
    report = run(
        parse(
            """
            tree W = words{00 11}
            query measure W cylinder 000
            query measure Q cylinder 0111
            """
        )
    )
    assert report.exit_code == 3
    assert "error(horizon)" in report.text
    assert "= 1/4" in report.text  # the later query still ran


def test_run_witness_not_found_is_reported():
    report = run(parse("query lemma1 FULL in FULL k 2 rounds 1"))
    assert report.exit_code == 3
    assert "error(witness-not-found)" in report.text


def test_run_deterministic_across_workers():
    text = """tree A = blocks(3){000 001 011 111}
query classify A depth 24
query trace A in FULL depth 12
query measure A cylinder 000
query lemma1 U in FULL k 2 rounds 3
query table2
"""
    script = parse(text)
    reports = [run(script, workers=w) for w in (1, 1, 4)]
    assert reports[0] == reports[1] == reports[2]


def test_max_depth_caps_queries():
    report = run(parse("query trace U in FULL depth 40"), max_depth=6)
    assert "at depth 6" in report.text


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.cms"
    good.write_text("query measure Q cylinder 0111\n")
    assert main([str(good)]) == 0
    assert "= 1/4" in capsys.readouterr().out

    bad_parse = tmp_path / "bad_parse.cms"
    bad_parse.write_text("query what\n")
    assert main([str(bad_parse)]) == 1

    bad_tree = tmp_path / "bad_tree.cms"
    bad_tree.write_text("tree S = silver[]repeat[0]\n")
    assert main([str(bad_tree)]) == 2

    failing = tmp_path / "failing.cms"
    failing.write_text("tree W = words{00}\nquery measure W cylinder 000\n")
    assert main([str(failing)]) == 3

    assert main([str(tmp_path / "missing.cms")]) == 1


def test_main_writes_certificates(tmp_path, capsys):
    script = tmp_path / "s.cms"
    script.write_text("query lemma1 U in FULL k 2 rounds 2\n")
    certs = tmp_path / "out.certs"
    assert main([str(script), "--certs", str(certs)]) == 0
    capsys.readouterr()
    assert certs.read_text().startswith("certificate lemma1 v1")
