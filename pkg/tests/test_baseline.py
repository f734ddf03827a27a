import pytest

from stateless_hol import baseline_stateful as B
from stateless_hol.baseline_stateful import StatefulKernel
from stateless_hol.bench import gen_workload
from stateless_hol.core_types import Failure
from stateless_hol.repl import run_script
from stateless_hol.syntax import parse_term, parse_type, print_thm


@pytest.fixture
def sk():
    k = StatefulKernel()
    k.new_type("num", 0)
    k.new_constant("0", parse_type("num", k))
    k.new_constant("1", parse_type("num", k))
    return k


def test_initial_state():
    k = StatefulKernel()
    assert [n for n, _ in k.constants()] == ["="]
    assert k.get_type_arity("fun") == 2
    assert k.definitions() == []


def test_constants_identified_by_name_and_type(sk):
    c = sk.mk_const("0")
    assert c == B.Const("0", parse_type("num", sk))
    assert not hasattr(c, "tag")


def test_second_definition_fails(sk):
    th = sk.new_basic_definition(parse_term("X = 0", sk))
    assert print_thm(th, sk) == "|- X = 0"
    with pytest.raises(Failure, match="^new_basic_definition$"):
        sk.new_basic_definition(parse_term("X = 1", sk))
    num = parse_type("num", sk)
    with pytest.raises(Failure, match="^new_constant: constant X has already been declared$"):
        sk.new_constant("X", num)
    assert len(sk.definitions()) == 1


def test_undo_unsupported(sk):
    sk.new_basic_definition(parse_term("X = 0", sk))
    with pytest.raises(Failure, match="undo_definition: not supported"):
        sk.undo_definition("X")
    assert sk.is_constant("X")


def test_definition_errors(sk):
    with pytest.raises(Failure, match="term not closed"):
        sk.new_basic_definition(parse_term("Y = x:num", sk))
    with pytest.raises(Failure, match="Type variables not reflected"):
        sk.new_basic_definition(parse_term(r"c = ((\x:A. x) = \x. x)", sk))


def test_thm_guard():
    with pytest.raises(TypeError):
        B.Thm((), None)


def test_rules(sk):
    R = sk.primitive_rules()
    x = parse_term("x:num", sk)
    th = R["REFL"](x)
    assert print_thm(th, sk) == "|- (x:num) = x"
    with pytest.raises(Failure, match="^TRANS$"):
        R["TRANS"](R["ASSUME"](parse_term("x = 0", sk)), R["REFL"](parse_term("1", sk)))
    da = R["DEDUCT_ANTISYM"](R["ASSUME"](parse_term("p:bool", sk)), R["ASSUME"](parse_term("p:bool", sk)))
    assert print_thm(da, sk) == "|- (p:bool) = p"


def test_axioms_are_a_plain_list(sk):
    sk.new_axiom(parse_term("0 = 1", sk))
    sk.new_axiom(parse_term("1 = 0", sk))
    assert len(sk.axioms()) == 2


@pytest.mark.parametrize("seed", range(5))
def test_differential_small_workloads(seed):
    script = gen_workload(seed, 12, 400, 4)
    ref = run_script(script, "stateful", prelude=None)
    assert ref.ok, ref.errors[:3]
    for mode in ("none", "linear", "precise"):
        t = run_script(script, "stateless", mode, prelude=None)
        assert t.text == ref.text


def test_differential_golden_failures():
    script = (
        "def X0: `X = 0`\n"
        "thm A = ASSUME `X = 1`\n"
        "assert_fails TRANS X0 A \"TRANS\"\n"
        "thm B = INST [(`0`, `y:num`)] (ASSUME `(y:num) = X`)\n"
        "thm C = DEDUCT_ANTISYM B A\n"
    )
    assert run_script(script, "stateful").text == run_script(script, "stateless").text
