"""The trusted logical core.

Everything here is a pure function of its arguments: there are no tables of
declared constants or axioms.  Definitional principles hand back the new
constant together with its defining theorem; the caller decides where (and
whether) to remember it.
"""

from .core_types import (
    BOOL_TY,
    EMPTY_CONTEXT,
    FUN_TYOP,
    PRIM,
    Abs,
    Comb,
    Const,
    Context,
    Defined,
    DestAbstract,
    Failure,
    MkAbstract,
    Thm,
    Tyapp,
    Tydefined,
    Tyvar,
    Var,
    _KERNEL_KEY,
    _equal,
    _is_fun_op,
    aconv,
    dest_eq,
    eq_term,
    freesin,
    inst_type,
    is_bool_ty,
    is_eq_const,
    safe_mk_eq,
    term_image,
    term_remove,
    term_union,
    type_of,
    type_subst,
    type_vars_in_term,
    tyvars,
    vfree_in,
    vsubst,
)

TRACKING_MODES = ("none", "linear", "precise")
MASK_BITS = 32

_make = Thm._create


def _thm(ctx, hyps, concl):
    return _make(_KERNEL_KEY, ctx, hyps, concl)


# ---------------------------------------------------------------------------
# Constants


def new_prim_const(name, ty):
    return Const(name, ty, PRIM)


def new_defined_const(tm):
    if tm.__class__ is Comb and tm.fn.__class__ is Comb and is_eq_const(tm.fn.fn):
        lhs = tm.fn.arg
        r = tm.arg
        if lhs.__class__ is Var:
            type_of(tm)
            if not freesin([], r):
                raise Failure("new_definition: term not closed")
            declared = {v.name for v in tyvars(lhs.ty)}
            if any(v.name not in declared for v in type_vars_in_term(r)):
                raise Failure("new_definition: Type variables not reflected in constant")
            c = Const(lhs.name, lhs.ty, Defined(tm))
            return c, _thm(EMPTY_CONTEXT, (), safe_mk_eq(c, r))
    raise Failure("new_basic_definition")


def inst_const(tm, theta):
    if tm.__class__ is not Const:
        raise Failure("inst_const: not a constant")
    ty = type_subst(theta, tm.ty)
    if ty is tm.ty:
        return tm
    return Const(tm.name, ty, tm.tag)


def new_defined_tyop(tyname, absname, repname, witness):
    """Carve a new type out of ``rep_ty`` using ``witness = |- P t``.

    Returns ``(tyop, abs, rep, |- abs (rep a) = a, |- P r = (rep (abs r) = r))``.
    """
    if witness.hyps:
        raise Failure("new_basic_type_definition")
    c = witness.concl
    if c.__class__ is not Comb:
        raise Failure("new_basic_type_definition")
    pred, x = c.fn, c.arg
    if not freesin([], pred):
        raise Failure("new_basic_type_definition")
    # Arity counts every type variable of the predicate, not only those of its
    # type, so hidden type variables cannot leak out of the new type.
    params = tuple(type_vars_in_term(pred))
    arity = len(params)
    op = Tydefined(tyname, arity, witness)
    aty = Tyapp(op, params)
    rty = type_of(x)
    abs_c = Const(absname, Tyapp(FUN_TYOP, (rty, aty)), MkAbstract(tyname, arity, witness))
    rep_c = Const(repname, Tyapp(FUN_TYOP, (aty, rty)), DestAbstract(tyname, arity, witness))
    a = Var("a", aty)
    r = Var("r", rty)
    ctx = witness.ctx
    th1 = _thm(ctx, (), safe_mk_eq(Comb(abs_c, Comb(rep_c, a)), a))
    th2 = _thm(ctx, (), safe_mk_eq(Comb(pred, r), safe_mk_eq(Comb(rep_c, Comb(abs_c, r)), r)))
    return op, abs_c, rep_c, th1, th2


# ---------------------------------------------------------------------------
# Axiom contexts


def empty_context():
    return EMPTY_CONTEXT


def _same_axioms(l1, l2):
    if l1 is l2:
        return True
    if len(l1) != len(l2):
        return False
    return all(a is b or _equal(a, b) for a, b in zip(l1, l2))


def merge_contexts(ctx1, ctx2):
    if ctx1 is ctx2:
        return ctx1
    n1 = ctx1.n
    n2 = ctx2.n
    if ctx1.history is ctx2.history:
        # Same axiom history; in precise mode the masks may still differ.
        mask = ctx1.mask | ctx2.mask
        if mask == ctx1.mask:
            return ctx1
        if mask == ctx2.mask:
            return ctx2
        return Context(n1, ctx1.history, mask)
    if n1 < n2:
        if not _same_axioms(ctx1.history[0], ctx2.history[n2 - n1]):
            raise Failure("merge_contexts")
        longer = ctx2
    elif n1 > n2:
        if not _same_axioms(ctx1.history[n1 - n2], ctx2.history[0]):
            raise Failure("merge_contexts")
        longer = ctx1
    else:
        raise Failure("merge_contexts")
    mask = ctx1.mask | ctx2.mask
    if mask == longer.mask:
        return longer
    return Context(longer.n, longer.history, mask)


def axiom_sequent(ctx, tm, mode="linear"):
    """Introduce ``tm`` as an axiom on top of the caller's context ``ctx``.

    Returns the axiom theorem and the extended context, which the caller must
    thread into the next call.  In ``none`` mode contexts stay empty.
    """
    if mode not in TRACKING_MODES:
        raise ValueError(f"unknown tracking mode {mode!r}")
    if not is_bool_ty(type_of(tm)):
        raise Failure("new_axiom")
    if mode == "none":
        return _thm(EMPTY_CONTEXT, (), tm), EMPTY_CONTEXT
    n = ctx.n
    mask = 0
    if mode == "precise":
        if n >= MASK_BITS:
            raise Failure("axiom_sequent: mask full")
        mask = 1 << n
    history = ((tm,) + ctx.history[0],) + ctx.history
    new_ctx = Context(n + 1, history, mask)
    return _thm(new_ctx, (), tm), new_ctx


# ---------------------------------------------------------------------------
# Primitive inference rules


def refl(t):
    return _thm(EMPTY_CONTEXT, (), safe_mk_eq(t, t))


def trans(a, b):
    c1 = a.concl
    c2 = b.concl
    e1 = dest_eq(c1)
    e2 = dest_eq(c2)
    if e1 is None or e2 is None or not aconv(e1[1], e2[0]):
        raise Failure("TRANS")
    ctx = merge_contexts(a.ctx, b.ctx)
    return _thm(ctx, term_union(a.hyps, b.hyps), Comb(c1.fn, c2.arg))


def mk_comb(a, b):
    e1 = dest_eq(a.concl)
    e2 = dest_eq(b.concl)
    if e1 is None or e2 is None:
        raise Failure("MK_COMB")
    l1, r1 = e1
    l2, r2 = e2
    fty = type_of(r1)
    if fty.__class__ is not Tyapp or not _is_fun_op(fty.op):
        raise Failure("MK_COMB")
    dom = fty.args[0]
    xty = type_of(r2)
    if not (dom is xty or _equal(dom, xty)):
        raise Failure("MK_COMB")
    ctx = merge_contexts(a.ctx, b.ctx)
    return _thm(ctx, term_union(a.hyps, b.hyps), safe_mk_eq(Comb(l1, l2), Comb(r1, r2)))


def abs_rule(v, a):
    e = dest_eq(a.concl)
    if v.__class__ is not Var or e is None or any(vfree_in(v, h) for h in a.hyps):
        raise Failure("ABS")
    l, r = e
    return _thm(a.ctx, a.hyps, safe_mk_eq(Abs(v, l), Abs(v, r)))


def beta(t):
    if t.__class__ is Comb and t.fn.__class__ is Abs:
        v = t.fn.bvar
        if t.arg is v or _equal(t.arg, v):
            type_of(t)
            return _thm(EMPTY_CONTEXT, (), safe_mk_eq(t, t.fn.body))
    raise Failure("BETA")


def assume(t):
    try:
        ok = is_bool_ty(type_of(t))
    except Failure:
        ok = False
    if not ok:
        raise Failure("ASSUME")
    return _thm(EMPTY_CONTEXT, (t,), t)


def eq_mp(a, b):
    e = dest_eq(a.concl)
    if e is None or not aconv(e[0], b.concl):
        raise Failure("EQ_MP")
    ctx = merge_contexts(a.ctx, b.ctx)
    return _thm(ctx, term_union(a.hyps, b.hyps), e[1])


def deduct_antisym(a, b):
    c1 = a.concl
    c2 = b.concl
    hyps = term_union(term_remove(c2, a.hyps), term_remove(c1, b.hyps))
    ctx = merge_contexts(a.ctx, b.ctx)
    return _thm(ctx, hyps, safe_mk_eq(c1, c2))


def inst_type_rule(theta, a):
    if any(pat.__class__ is not Tyvar for _, pat in theta):
        raise Failure("INST_TYPE")
    return _thm(a.ctx, term_image(lambda t: inst_type(theta, t), a.hyps), inst_type(theta, a.concl))


def inst_rule(theta, a):
    try:
        concl = vsubst(theta, a.concl)
    except Failure:
        raise Failure("INST") from None
    return _thm(a.ctx, term_image(lambda t: vsubst(theta, t), a.hyps), concl)


PRIMITIVE_RULES = {
    "REFL": refl,
    "TRANS": trans,
    "MK_COMB": mk_comb,
    "ABS": abs_rule,
    "BETA": beta,
    "ASSUME": assume,
    "EQ_MP": eq_mp,
    "DEDUCT_ANTISYM": deduct_antisym,
    "INST_TYPE": inst_type_rule,
    "INST": inst_rule,
}

__all__ = [
    "BOOL_TY",
    "PRIMITIVE_RULES",
    "TRACKING_MODES",
    "abs_rule",
    "assume",
    "axiom_sequent",
    "beta",
    "deduct_antisym",
    "empty_context",
    "eq_mp",
    "eq_term",
    "inst_const",
    "inst_rule",
    "inst_type_rule",
    "merge_contexts",
    "mk_comb",
    "new_defined_const",
    "new_defined_tyop",
    "new_prim_const",
    "refl",
    "trans",
]
