import json
import subprocess
import sys

import numpy as np
import pytest

from rtensor import with_indices
from rtensor.cli import main as rt_main
from rtensor.dsl import (
    Binary,
    Bracket,
    Environment,
    IndexSub,
    Postfix,
    TensorRef,
    evaluate,
    parse,
    print_ast,
    run_script,
    to_json_record,
)
from rtensor.errors import ExprSyntaxError, SubscriptKindError, UnknownNameError


def env_with_vectors():
    env = Environment.with_seed(1)
    i = env.index("i")
    for name, vals in (("a", [1.0, 2.0]), ("b", [3.0, 4.0]), ("c", [5.0, 6.0])):
        env.tensors[name] = with_indices(np.array(vals).reshape(1, 1, 2), [i])
    return env


# -- parsing ------------------------------------------------------------------


def test_parse_ternary_left_assoc():
    kind, node = parse("a(i)*b(i)*c(~i)")
    assert kind == "expr"
    assert node == Binary(
        "*",
        Binary("*", TensorRef("a", (IndexSub("i"),)), TensorRef("b", (IndexSub("i"),))),
        TensorRef("c", (IndexSub("i", True),)),
    )


def test_parse_assign():
    kind, node = parse("z(i,~j) = y(~j,i)")
    assert kind == "assign"
    assert node.target == TensorRef("z", (IndexSub("i"), IndexSub("j", True)))
    assert node.value == TensorRef("y", (IndexSub("j", True), IndexSub("i")))


def test_parse_division():
    kind, node = parse("A(l,lp)\\b(i,lp)")
    assert isinstance(node, Binary) and node.op == "\\"


def test_parse_precedence_levels():
    _, node = parse("a(i)+b(i)*c(i)")
    assert node.op == "+" and node.rhs.op == "*"
    _, node = parse("a(i)*b(i)==c(i)+a(i)")
    assert node.op == "==" and node.lhs.op == "*" and node.rhs.op == "+"
    _, node = parse("a(i)==b(i) & c(i)>a(i)")
    assert node.op == "&"


def test_parse_postfix_quotes():
    _, node = parse("x(~k)'*x(~k)")
    assert node.op == "*" and isinstance(node.lhs, Postfix) and node.lhs.op == "'"
    _, node = parse("b(j).'")
    assert isinstance(node, Postfix) and node.op == ".'"


def test_parse_brackets():
    _, node = parse("[ones(4,1) abs(c(i))]")
    assert isinstance(node, Bracket)
    assert len(node.rows) == 1 and len(node.rows[0]) == 2
    _, node = parse("[b(j).'; ones(1,5)]")
    assert len(node.rows) == 2


def test_parse_bracket_operator_continues_item():
    _, node = parse("[a(i) - b(i)]")
    assert isinstance(node, Bracket)
    assert len(node.rows[0]) == 1 and node.rows[0][0].op == "-"


def test_parse_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse("a(i) +* b(i)")
    assert err.value.line == 1 and err.value.col > 1


def test_parse_unterminated_bracket():
    with pytest.raises(ExprSyntaxError):
        parse("[a(i) b(i)")


def test_parse_malformed_number():
    with pytest.raises(ExprSyntaxError):
        parse("a(i) + 1.2.3")


def test_parse_print_roundtrip():
    texts = [
        "a(i)*b(i)*c(~i)",
        "a(i)*(b(i)*c(~i))",
        "A(l,lp)\\b(i,lp)",
        "log(c(j)+x(i))",
        "y(i,~j) ~= y(~j,i)",
        "trace(C(i,~i))",
        "cat(j,A(i,j),B(j,k))",
        "[ones(4,1) abs(c(i))]",
        "[b(j).'; ones(1,5)]",
        "A(i,~j) >= b(j).'",
        "x(~k)'*x(~k)",
        "-a(i)+~m(i)&b(i)|c(i)",
        "a(1,2)",
        "isequal(a(i),b(~i))",
        "z(i,~j) = y(~j,i)",
        "u(i,~l) = A(l,lp)\\b(i,lp)",
    ]
    for text in texts:
        kind1, node1 = parse(text)
        kind2, node2 = parse(print_ast(node1))
        assert kind1 == kind2 and node1 == node2, text


# -- evaluation -----------------------------------------------------------------


def test_eval_ternary_inner():
    env = env_with_vectors()
    _, node = parse("a(i)*b(i)*c(~i)")
    got = evaluate(node, env)
    assert got.entries.ravel()[0] == 63.0


def test_eval_reassociated_pairing_matches():
    env = env_with_vectors()
    left = evaluate(parse("a(i)*b(i)*c(~i)")[1], env)
    right = evaluate(parse("b(i)*(a(~i)*c(~i))")[1], env)
    assert left.entries.ravel()[0] == right.entries.ravel()[0] == 63.0


def test_eval_assign_binds():
    env = env_with_vectors()
    env.tensors["y"] = with_indices(
        np.arange(6.0).reshape(1, 1, 2, 3), [env.index("j"), env.index("i")]
    )
    evaluate(parse("z(i,~j) = y(~j,i)")[1], env)
    z = env.tensors["z"]
    assert z.entries.shape == (1, 1, 3, 2)
    assert z.indices == (env.index("i"), ~env.index("j"))
    np.testing.assert_array_equal(
        z.entries[0, 0], np.arange(6.0).reshape(2, 3).T
    )


def test_eval_cat():
    env = Environment.with_seed(0)
    i, j, k = env.index("i"), env.index("j"), env.index("k")
    env.tensors["A"] = with_indices(np.random.rand(1, 1, 2, 3), [i, j])
    env.tensors["B"] = with_indices(np.random.rand(1, 1, 3, 2), [j, k])
    got = evaluate(parse("cat(j,A(i,j),B(j,k))")[1], env)
    assert got.degree == 3
    assert got.entries.shape == (1, 1, 2, 6, 2)


def test_eval_norm_via_quote():
    env = Environment.with_seed(0)
    k = env.index("k")
    x = (np.arange(4) + 1.0) * 1j
    env.tensors["x"] = with_indices(x.reshape(4, 1), [~k])
    got = evaluate(parse("x(~k)'*x(~k)")[1], env)
    np.testing.assert_allclose(got.entries.ravel()[0], (np.abs(x) ** 2).sum())


def test_eval_isequal_variant_conflict():
    env = env_with_vectors()
    assert evaluate(parse("isequal(a(i),a(i))")[1], env) is True
    assert evaluate(parse("isequal(a(i),a(~i))")[1], env) is False


def test_eval_numeric_subscripts():
    env = env_with_vectors()
    got = evaluate(parse("a(1,1,2)")[1], env)
    assert got.entries.ravel()[0] == 2.0


def test_eval_unknown_name():
    with pytest.raises(UnknownNameError):
        evaluate(parse("nope(i)")[1], Environment())


def test_eval_mixed_subscripts_rejected():
    env = env_with_vectors()
    with pytest.raises(SubscriptKindError):
        evaluate(parse("a(i,1)")[1], env)


def test_eval_rand_seed_reproducible():
    e1 = Environment.with_seed(42)
    e2 = Environment.with_seed(42)
    v1 = evaluate(parse("rand(1,1,4)")[1], e1)
    v2 = evaluate(parse("rand(1,1,4)")[1], e2)
    np.testing.assert_array_equal(v1.entries, v2.entries)


def test_json_record():
    env = env_with_vectors()
    rec = to_json_record(evaluate(parse("a(i)")[1], env), env)
    assert rec["dims"] == [1, 1, 2]
    assert rec["indices"] == [{"name": "i", "variant": True}]
    assert rec["value"] == [[[1.0, 2.0]]]
    json.dumps(rec)


# -- scripts -----------------------------------------------------------------------


def test_run_script_pass(tmp_path):
    path = tmp_path / "ok.rts"
    path.write_text(
        "# a tiny script\n"
        "a = round(rand(1,1,4)*8,0)\n"
        "b = round(rand(1,1,4)*8,0)\n"
        "s = a(i)*b(i)*a(~i)\n"
        "assert isequal(s, a(i)*(b(~i)*a(~i)))\n"
    )
    report = run_script(path, emit=lambda *_: None)
    assert report.ok and report.statements == 4


def test_run_script_empty(tmp_path):
    path = tmp_path / "empty.rts"
    path.write_text("")
    report = run_script(path, emit=lambda *_: None)
    assert report.ok and report.statements == 0


def test_run_script_unknown_name(tmp_path):
    path = tmp_path / "bad.rts"
    path.write_text("a = rand(1,1,2)\nmissing(i)\n")
    lines = []
    report = run_script(path, emit=lines.append)
    assert not report.ok
    assert "2" in report.failures[0]


def test_run_script_failing_assert_stops(tmp_path):
    path = tmp_path / "fail.rts"
    path.write_text("assert isequal(rand(1,1,2), rand(1,1,2))\nassert 1 == 1\n")
    report = run_script(path, emit=lambda *_: None)
    assert not report.ok and report.statements == 1


# -- command line --------------------------------------------------------------------


def test_cli_eval_json(capsys):
    code = rt_main(["eval", "a(i)*b(i)*c(~i)", "--seed", "3",
                    "--define", "a=round(rand(1,1,3)*4,0)",
                    "--define", "b=round(rand(1,1,3)*4,0)",
                    "--define", "c=round(rand(1,1,3)*4,0)",
                    "--json"])
    assert code == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["dims"] == [1, 1]


def test_cli_eval_summary(capsys):
    assert rt_main(["eval", "rand(2,3)"]) == 0
    out = capsys.readouterr().out
    assert "degree 0" in out and "2x3" in out


def test_cli_run_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.rts"
    good.write_text("assert 1 == 1\n")
    bad = tmp_path / "bad.rts"
    bad.write_text("assert 1 == 2\n")
    assert rt_main(["run", str(good)]) == 0
    assert rt_main(["run", str(bad)]) == 1


def test_console_script_installed():
    out = subprocess.run(
        [sys.executable, "-m", "rtensor.cli", "eval", "1+1"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert "2" in out.stdout
