import pytest

from stateless_hol import kernel
from stateless_hol.core_types import (
    ATY,
    BOOL_TY,
    Abs,
    Comb,
    Failure,
    Tydefined,
    Var,
    mk_fun_ty,
    safe_mk_eq,
    term_eq,
)
from stateless_hol.repl import derived_rules
from stateless_hol.state import SymbolTable

SYM = derived_rules(kernel.PRIMITIVE_RULES)["SYM"]


def test_initial_table():
    t = SymbolTable()
    assert t.get_const_type("=") == mk_fun_ty(ATY, mk_fun_ty(ATY, BOOL_TY))
    assert t.get_type_arity("bool") == 0 and t.get_type_arity("fun") == 2
    assert t.constants() == [("=", kernel.eq_term(ATY))]
    assert t.definitions == [] and t.axioms == []
    with pytest.raises(Failure, match="nosuch"):
        t.get_const_type("nosuch")
    with pytest.raises(Failure):
        t.get_type_arity("nosuch")


def test_bad_mode():
    with pytest.raises(ValueError):
        SymbolTable("sometimes")


def test_new_constant(table, ty):
    num = ty("num")
    assert table.get_const_type("0") == num
    with pytest.raises(Failure, match="^new_constant: constant 0 has already been declared$"):
        table.new_constant("0", num)
    with pytest.raises(Failure, match="^new_type: type num has already been declared$"):
        table.new_type("num", 0)


def test_mk_const(table, ty):
    assert table.mk_const("=", [(BOOL_TY, ATY)]) == kernel.eq_term(BOOL_TY)
    with pytest.raises(Failure, match="^mk_const: not a constant name$"):
        table.mk_const("nosuch")
    th = table.new_basic_definition(safe_mk_eq(Var("X", ty("num")), table.mk_const("0")))
    x = table.mk_const("X")
    assert x.tag.defn == safe_mk_eq(Var("X", ty("num")), table.mk_const("0"))
    assert th.concl.fn.arg is x
    assert table.get_const_type("X") == ty("num")


def test_definition_lists(table, tm):
    th = table.new_basic_definition(tm("X = 0"))
    assert table.definitions == [("X", th)] and table.core_definitions == [("X", th)]
    th2 = table.new_basic_definition(tm("Y = 1"))
    assert [n for n, _ in table.definitions] == ["Y", "X"]
    assert table.definitions[0][1] is th2


def test_redefinition_while_bound(table, ty):
    num = ty("num")
    table.new_basic_definition(safe_mk_eq(Var("X", num), table.mk_const("0")))
    with pytest.raises(Failure, match="^new_constant: constant X has already been declared$"):
        table.new_basic_definition(safe_mk_eq(Var("X", num), table.mk_const("1")))
    assert len(table.definitions) == 1


def test_undo_and_redefine(table, tm):
    x0 = table.new_basic_definition(tm("X = 0"))
    c0 = table.mk_const("X")
    table.undo_definition("X")
    assert not table.is_constant("X")
    assert table.definitions == [] and table.core_definitions == []
    x1 = table.new_basic_definition(tm("X = 1"))
    c1 = table.mk_const("X")
    assert c0.name == c1.name and c0.ty == c1.ty
    assert not term_eq(c0, c1)
    with pytest.raises(Failure, match="^TRANS$"):
        kernel.trans(SYM(x0), x1)
    # the old theorem is still a theorem about the old constant
    assert x0.concl.fn.arg is c0
    assert not table.is_current(c0) and table.is_current(c1)


def test_undo_missing_is_noop(table):
    before = (table.constants(), list(table.definitions))
    table.undo_definition("nosuch")
    assert (table.constants(), table.definitions) == before


def test_redeclare_after_undo(table, ty):
    table.new_basic_definition(safe_mk_eq(Var("X", ty("num")), table.mk_const("0")))
    table.undo_definition("X")
    table.new_constant("X", ty("num"))
    assert table.mk_const("X").tag is kernel.PRIM


def test_is_current_polymorphic(table, tm, ty):
    table.new_basic_definition(tm(r"I = \x:A. x"))
    i_num = table.mk_const("I", [(ty("num"), ATY)])
    assert table.is_current(i_num)
    assert table.is_current(table.mk_const("="))
    assert table.is_current(table.mk_const("=", [(ty("num"), ATY)]))


def test_axioms(table, tm):
    a1 = table.new_axiom(tm("0 = 1"))
    assert a1.ctx.n == 1 and table.current_ctx is a1.ctx
    table.new_axiom(tm("1 = 0"))
    a3 = table.new_axiom(tm("0 = 0"))
    assert a3.ctx.n == 3 and len(table.axioms) == 3
    assert table.axioms[0] is a3
    with pytest.raises(Failure):
        table.new_axiom(tm("0"))


def test_axioms_none_mode():
    t = SymbolTable("none")
    p = Var("p", BOOL_TY)
    th = t.new_axiom(p)
    assert th.ctx.n == 0 and len(t.axioms) == 1


class TestTypeDefinition:
    def witness(self, table, tm):
        table.new_basic_definition(tm(r"T = ((\p:bool. p) = (\p:bool. p))"))
        tdef = table.definitions[0][1]
        th_t = kernel.eq_mp(SYM(tdef), kernel.refl(tm(r"\p:bool. p")))
        b = kernel.beta(tm(r"(\p:bool. p) p"))
        b_t = kernel.inst_rule([(table.mk_const("T"), Var("p", BOOL_TY))], b)
        return kernel.eq_mp(SYM(b_t), th_t)

    def test_one_element_type(self, table, tm):
        w = self.witness(table, tm)
        th1, th2 = table.new_basic_type_definition("one", "mk_one", "dest_one", w)
        assert isinstance(table.type_ops["one"], Tydefined)
        assert table.get_type_arity("one") == 0
        abs_c = table.mk_const("mk_one")
        rep_c = table.mk_const("dest_one")
        # re-derive with a direct kernel call
        op, k_abs, k_rep, k1, k2 = kernel.new_defined_tyop("one", "mk_one", "dest_one", w)
        assert (abs_c, rep_c) == (k_abs, k_rep)
        assert th1.concl == k1.concl and th2.concl == k2.concl
        a = Var("a", table.mk_type("one"))
        assert th1.concl == safe_mk_eq(Comb(abs_c, Comb(rep_c, a)), a)

    def test_clashes(self, table, tm):
        w = self.witness(table, tm)
        table.new_basic_type_definition("one", "mk_one", "dest_one", w)
        with pytest.raises(Failure, match="new_type: type one has already been declared"):
            table.new_basic_type_definition("one", "a", "b", w)
        with pytest.raises(Failure, match="constant mk_one has already been declared"):
            table.new_basic_type_definition("two", "mk_one", "b", w)
        with pytest.raises(Failure, match="constant c has already been declared"):
            table.new_basic_type_definition("two", "c", "c", w)


def test_tables_are_independent(tm):
    t1 = SymbolTable()
    t2 = SymbolTable()
    t1.new_type("num", 0)
    assert not t2.is_constant("0") and "num" not in t2.type_ops
    p = Var("p", BOOL_TY)
    d1 = t1.new_basic_definition(safe_mk_eq(Var("c", BOOL_TY), safe_mk_eq(Abs(p, p), Abs(p, p))))
    d2 = t2.new_basic_definition(safe_mk_eq(Var("c", BOOL_TY), safe_mk_eq(Abs(p, p), Abs(p, p))))
    # same definition in two tables yields equal constants: the kernel is pure
    assert d1.concl == d2.concl
    assert t1.mk_const("c") == t2.mk_const("c")


def test_equal_valued_redefinitions_are_provably_equal(table, tm):
    # X := 0, then X := Z with Z = 0: the two X constants differ by tag but
    # denote the same value, so |- X = X' is a genuine theorem.
    x0 = table.new_basic_definition(tm("X = 0"))
    old_x = table.mk_const("X")
    table.undo_definition("X")
    z = table.new_basic_definition(tm("Z = 0"))
    x1 = table.new_basic_definition(tm("X = Z"))
    th = kernel.trans(x0, SYM(kernel.trans(x1, z)))
    assert th.concl.fn.arg is old_x and th.concl.arg is table.mk_const("X")
    assert old_x != table.mk_const("X")
