"""Reference stateful kernel in the traditional style.

Constants are identified by name and type only, type operators by name, and
the tables of declared constants, types, definitions and axioms live inside
the kernel object.  Used as a differential-testing oracle and as the
benchmark baseline; it deliberately shares no logical code with the
stateless kernel.
"""

from functools import cmp_to_key

from .core_types import Failure


class HolType:
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, HolType) and _equal(self, other)

    def __hash__(self):
        return hash(str(self.kind))


class Tyvar(HolType):
    __slots__ = ("name",)
    kind = "tyvar"

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"Tyvar({self.name!r})"


class Tyapp(HolType):
    __slots__ = ("name", "args")
    kind = "tyapp"

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)

    def __repr__(self):
        return f"Tyapp({self.name!r}, {list(self.args)!r})"


bool_ty = Tyapp("bool")
aty = Tyvar("A")


def fun_ty(a, b):
    return Tyapp("fun", (a, b))


class Term:
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, Term) and _equal(self, other)

    def __hash__(self):
        return hash(self.kind)


class Var(Term):
    __slots__ = ("name", "ty")
    kind = "var"

    def __init__(self, name, ty):
        self.name = name
        self.ty = ty


class Const(Term):
    __slots__ = ("name", "ty")
    kind = "const"

    def __init__(self, name, ty):
        self.name = name
        self.ty = ty


class Comb(Term):
    __slots__ = ("fn", "arg", "_ty")
    kind = "comb"

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg
        self._ty = None


class Abs(Term):
    __slots__ = ("bvar", "body", "_ty")
    kind = "abs"

    def __init__(self, bvar, body):
        if bvar.__class__ is not Var:
            raise Failure("mk_abs: not a variable")
        self.bvar = bvar
        self.body = body
        self._ty = None


_KEY = object()


class Thm:
    __slots__ = ("hyps", "concl")

    def __init__(self, *args, **kwargs):
        raise TypeError("theorems can only be created by kernel inference rules")

    @classmethod
    def _create(cls, key, hyps, concl):
        if key is not _KEY:
            raise TypeError("theorems can only be created by kernel inference rules")
        th = object.__new__(cls)
        object.__setattr__(th, "hyps", hyps)
        object.__setattr__(th, "concl", concl)
        return th

    def __setattr__(self, name, value):
        raise AttributeError("theorems are immutable")

    def __reduce_ex__(self, protocol):
        raise TypeError("theorems cannot be copied or pickled")


def _thm(hyps, concl):
    return Thm._create(_KEY, hyps, concl)


# ---------------------------------------------------------------------------
# Term utilities


def _equal(a, b):
    if a is b:
        return True
    cls = a.__class__
    if cls is not b.__class__:
        return False
    if cls is Tyapp:
        return a.name == b.name and len(a.args) == len(b.args) and all(
            _equal(x, y) for x, y in zip(a.args, b.args))
    if cls is Tyvar:
        return a.name == b.name
    if cls is Var or cls is Const:
        return a.name == b.name and _equal(a.ty, b.ty)
    if cls is Comb:
        return _equal(a.fn, b.fn) and _equal(a.arg, b.arg)
    if cls is Abs:
        return _equal(a.bvar, b.bvar) and _equal(a.body, b.body)
    return False


def _cmp(x, y):
    return (x > y) - (x < y)


def _type_cmp(a, b):
    if a is b:
        return 0
    if a.__class__ is Tyvar:
        return _cmp(a.name, b.name) if b.__class__ is Tyvar else -1
    if b.__class__ is Tyvar:
        return 1
    c = _cmp(a.name, b.name) or _cmp(len(a.args), len(b.args))
    if c:
        return c
    for x, y in zip(a.args, b.args):
        c = _type_cmp(x, y)
        if c:
            return c
    return 0


def _named_cmp(a, b):
    return _cmp(a.name, b.name) or _type_cmp(a.ty, b.ty)


_RANK = {Const: 0, Var: 1, Comb: 2, Abs: 3}


def _orda(env, t1, t2):
    if t1 is t2 and all(x is y for x, y in env):
        return 0
    c1 = t1.__class__
    c2 = t2.__class__
    if c1 is not c2:
        return _cmp(_RANK[c1], _RANK[c2])
    if c1 is Var:
        for x1, x2 in env:
            if _named_cmp(t1, x1) == 0:
                return 0 if _named_cmp(t2, x2) == 0 else -1
            if _named_cmp(t2, x2) == 0:
                return 1
        return _named_cmp(t1, t2)
    if c1 is Const:
        return _named_cmp(t1, t2)
    if c1 is Comb:
        return _orda(env, t1.fn, t2.fn) or _orda(env, t1.arg, t2.arg)
    c = _type_cmp(t1.bvar.ty, t2.bvar.ty)
    if c:
        return c
    return _orda(((t1.bvar, t2.bvar),) + env, t1.body, t2.body)


def alphaorder(t1, t2):
    return _orda((), t1, t2)


def aconv(t1, t2):
    return _orda((), t1, t2) == 0


def _setify(terms):
    out = []
    for t in sorted(terms, key=cmp_to_key(alphaorder)):
        if not out or alphaorder(out[-1], t) != 0:
            out.append(t)
    return tuple(out)


def term_union(l1, l2):
    if not l1:
        return l2
    if not l2:
        return l1
    return _setify(l1 + l2)


def term_remove(t, terms):
    return tuple(x for x in terms if not aconv(x, t))


def type_of(tm):
    cls = tm.__class__
    if cls is Var or cls is Const:
        return tm.ty
    if tm._ty is not None:
        return tm._ty
    if cls is Comb:
        fty = type_of(tm.fn)
        if fty.__class__ is not Tyapp or fty.name != "fun" or len(fty.args) != 2:
            raise Failure("type_of")
        if not _equal(fty.args[0], type_of(tm.arg)):
            raise Failure("type_of")
        ty = fty.args[1]
    else:
        ty = fun_ty(tm.bvar.ty, type_of(tm.body))
    tm._ty = ty
    return ty


def _tyvars(ty, acc):
    if ty.__class__ is Tyvar:
        acc.add(ty.name)
    else:
        for a in ty.args:
            _tyvars(a, acc)
    return acc


def tyvars(ty):
    return [Tyvar(n) for n in sorted(_tyvars(ty, set()))]


def type_vars_in_term(tm):
    acc = set()

    def walk(t):
        if t.__class__ is Comb:
            walk(t.fn)
            walk(t.arg)
        elif t.__class__ is Abs:
            _tyvars(t.bvar.ty, acc)
            walk(t.body)
        else:
            _tyvars(t.ty, acc)

    walk(tm)
    return [Tyvar(n) for n in sorted(acc)]


def freesin(acc, tm):
    cls = tm.__class__
    if cls is Var:
        return any(_equal(tm, a) for a in acc)
    if cls is Const:
        return True
    if cls is Abs:
        return freesin([tm.bvar] + list(acc), tm.body)
    return freesin(acc, tm.fn) and freesin(acc, tm.arg)


def vfree_in(v, tm):
    cls = tm.__class__
    if cls is Var:
        return _equal(tm, v)
    if cls is Const:
        return False
    if cls is Abs:
        return not _equal(tm.bvar, v) and vfree_in(v, tm.body)
    return vfree_in(v, tm.fn) or vfree_in(v, tm.arg)


def frees(tm):
    out = []

    def walk(t, bound):
        if t.__class__ is Var:
            if not any(_equal(t, b) for b in bound) and not any(_equal(t, f) for f in out):
                out.append(t)
        elif t.__class__ is Comb:
            walk(t.fn, bound)
            walk(t.arg, bound)
        elif t.__class__ is Abs:
            walk(t.body, bound + [t.bvar])

    walk(tm, [])
    return out


def variant(avoid, v):
    while any(vfree_in(v, t) for t in avoid):
        v = Var(v.name + "'", v.ty)
    return v


def type_subst(theta, ty):
    if not theta:
        return ty
    if ty.__class__ is Tyapp:
        args = tuple(type_subst(theta, a) for a in ty.args)
        if all(x is y for x, y in zip(args, ty.args)):
            return ty
        return Tyapp(ty.name, args)
    for replacement, pattern in theta:
        if _equal(pattern, ty):
            return replacement
    return ty


def vsubst(theta, tm):
    if not theta:
        return tm
    for t, v in theta:
        if v.__class__ is not Var or not _equal(type_of(t), v.ty):
            raise Failure("vsubst")
    return _vsubst(list(theta), tm)


def _vsubst(ilist, tm):
    cls = tm.__class__
    if cls is Var:
        for t, v in ilist:
            if _equal(v, tm):
                return t
        return tm
    if cls is Const:
        return tm
    if cls is Comb:
        f = _vsubst(ilist, tm.fn)
        x = _vsubst(ilist, tm.arg)
        return tm if f is tm.fn and x is tm.arg else Comb(f, x)
    v = tm.bvar
    inner = [(t, x) for t, x in ilist if not _equal(x, v)]
    if not inner:
        return tm
    body = _vsubst(inner, tm.body)
    if body is tm.body:
        return tm
    if any(vfree_in(v, t) and vfree_in(x, tm.body) for t, x in inner):
        v2 = variant([body], v)
        return Abs(v2, _vsubst([(v2, v)] + inner, tm.body))
    return Abs(v, body)


class _Clash(Exception):
    def __init__(self, var):
        self.var = var


def inst(theta, tm):
    if not theta:
        return tm
    return _inst([], theta, tm)


def _inst(env, theta, tm):
    cls = tm.__class__
    if cls is Var:
        ty = type_subst(theta, tm.ty)
        new = tm if ty is tm.ty else Var(tm.name, ty)
        original = next((before for after, before in env if _equal(after, new)), tm)
        if not _equal(original, tm):
            raise _Clash(new)
        return new
    if cls is Const:
        ty = type_subst(theta, tm.ty)
        return tm if ty is tm.ty else Const(tm.name, ty)
    if cls is Comb:
        f = _inst(env, theta, tm.fn)
        x = _inst(env, theta, tm.arg)
        return tm if f is tm.fn and x is tm.arg else Comb(f, x)
    y = tm.bvar
    y2 = _inst([], theta, y)
    try:
        body = _inst([(y2, y)] + env, theta, tm.body)
    except _Clash as clash:
        if not _equal(clash.var, y2):
            raise
        ifrees = [_inst([], theta, v) for v in frees(tm.body)]
        z = Var(variant(ifrees, y2).name, y.ty)
        return _inst(env, theta, Abs(z, vsubst([(z, y)], tm.body)))
    return tm if y2 is y and body is tm.body else Abs(y2, body)


def _type_match(pattern, ty, env):
    if pattern.__class__ is Tyvar:
        bound = env.setdefault(pattern.name, ty)
        return _equal(bound, ty)
    return (ty.__class__ is Tyapp and pattern.name == ty.name
            and len(pattern.args) == len(ty.args)
            and all(_type_match(p, t, env) for p, t in zip(pattern.args, ty.args)))


def safe_mk_eq(l, r):
    ty = type_of(l)
    if not _equal(ty, type_of(r)):
        raise Failure("safe_mk_eq")
    return Comb(Comb(Const("=", fun_ty(ty, fun_ty(ty, bool_ty))), l), r)


def _dest_eq(tm):
    if tm.__class__ is Comb and tm.fn.__class__ is Comb:
        eq = tm.fn.fn
        if eq.__class__ is Const and eq.name == "=":
            return tm.fn.arg, tm.arg
    return None


# ---------------------------------------------------------------------------


class StatefulKernel:
    """One kernel instance = one logical state."""

    def __init__(self):
        self._types = {"bool": 0, "fun": 2}
        self._constants = {"=": fun_ty(aty, fun_ty(aty, bool_ty))}
        self._definitions = []
        self._axioms = []

    # -- the traditional stateful interface ----------------------------------

    def types(self):
        return list(reversed(self._types.items()))

    def constants(self):
        return list(reversed(self._constants.items()))

    def definitions(self):
        return list(self._definitions)

    def axioms(self):
        return list(self._axioms)

    def get_type_arity(self, name):
        try:
            return self._types[name]
        except KeyError:
            raise Failure(f"get_type_arity: {name} is not a type operator") from None

    def new_type(self, name, arity):
        if name in self._types:
            raise Failure(f"new_type: type {name} has already been declared")
        self._types[name] = arity

    def get_const_type(self, name):
        try:
            return self._constants[name]
        except KeyError:
            raise Failure(f"get_const_type: {name} is not a constant") from None

    def is_constant(self, name):
        return name in self._constants

    def is_current(self, c):
        ty = self._constants.get(c.name)
        return ty is not None and _type_match(ty, c.ty, {})

    def new_constant(self, name, ty):
        if name in self._constants:
            raise Failure(f"new_constant: constant {name} has already been declared")
        self._constants[name] = ty

    def new_basic_definition(self, tm):
        lhs = _dest_eq(tm)
        if lhs is None or lhs[0].__class__ is not Var:
            raise Failure("new_basic_definition")
        v, r = lhs
        type_of(tm)
        if not freesin([], r):
            raise Failure("new_definition: term not closed")
        declared = {t.name for t in tyvars(v.ty)}
        if any(t.name not in declared for t in type_vars_in_term(r)):
            raise Failure("new_definition: Type variables not reflected in constant")
        self.new_constant(v.name, v.ty)
        dth = _thm((), safe_mk_eq(Const(v.name, v.ty), r))
        self._definitions.insert(0, dth)
        return dth

    def undo_definition(self, name):
        raise Failure("undo_definition: not supported by the stateful kernel")

    def new_axiom(self, tm):
        if not _equal(type_of(tm), bool_ty):
            raise Failure("new_axiom")
        th = _thm((), tm)
        self._axioms.insert(0, th)
        return th

    def new_basic_type_definition(self, tyname, absname, repname, witness):
        for name in (absname, repname):
            if name in self._constants:
                raise Failure(f"new_constant: constant {name} has already been declared")
        if absname == repname:
            raise Failure(f"new_constant: constant {repname} has already been declared")
        if tyname in self._types:
            raise Failure(f"new_type: type {tyname} has already been declared")
        if witness.hyps or witness.concl.__class__ is not Comb:
            raise Failure("new_basic_type_definition")
        pred, x = witness.concl.fn, witness.concl.arg
        if not freesin([], pred):
            raise Failure("new_basic_type_definition")
        params = type_vars_in_term(pred)
        self.new_type(tyname, len(params))
        new_ty = Tyapp(tyname, params)
        rty = type_of(x)
        abs_c = Const(absname, fun_ty(rty, new_ty))
        rep_c = Const(repname, fun_ty(new_ty, rty))
        self.new_constant(absname, abs_c.ty)
        self.new_constant(repname, rep_c.ty)
        a = Var("a", new_ty)
        r = Var("r", rty)
        return (_thm((), safe_mk_eq(Comb(abs_c, Comb(rep_c, a)), a)),
                _thm((), safe_mk_eq(Comb(pred, r), safe_mk_eq(Comb(rep_c, Comb(abs_c, r)), r))))

    # -- construction ---------------------------------------------------------

    def mk_const(self, name, theta=()):
        try:
            uty = self._constants[name]
        except KeyError:
            raise Failure("mk_const: not a constant name") from None
        return Const(name, type_subst(theta, uty))

    def mk_type(self, name, args=()):
        arity = self.get_type_arity(name)
        if len(args) != arity:
            raise Failure(f"mk_type: wrong number of arguments to {name}")
        return Tyapp(name, args)

    mk_vartype = staticmethod(Tyvar)
    mk_var = staticmethod(Var)
    mk_comb = staticmethod(Comb)
    mk_abs = staticmethod(Abs)
    type_of = staticmethod(type_of)

    # -- primitive rules ------------------------------------------------------

    @staticmethod
    def REFL(t):
        return _thm((), safe_mk_eq(t, t))

    @staticmethod
    def TRANS(a, b):
        e1 = _dest_eq(a.concl)
        e2 = _dest_eq(b.concl)
        if e1 is None or e2 is None or not aconv(e1[1], e2[0]):
            raise Failure("TRANS")
        return _thm(term_union(a.hyps, b.hyps), Comb(a.concl.fn, b.concl.arg))

    @staticmethod
    def MK_COMB(a, b):
        e1 = _dest_eq(a.concl)
        e2 = _dest_eq(b.concl)
        if e1 is None or e2 is None:
            raise Failure("MK_COMB")
        fty = type_of(e1[1])
        if fty.__class__ is not Tyapp or fty.name != "fun" or not _equal(fty.args[0], type_of(e2[1])):
            raise Failure("MK_COMB")
        return _thm(term_union(a.hyps, b.hyps),
                    safe_mk_eq(Comb(e1[0], e2[0]), Comb(e1[1], e2[1])))

    @staticmethod
    def ABS(v, a):
        e = _dest_eq(a.concl)
        if v.__class__ is not Var or e is None or any(vfree_in(v, h) for h in a.hyps):
            raise Failure("ABS")
        return _thm(a.hyps, safe_mk_eq(Abs(v, e[0]), Abs(v, e[1])))

    @staticmethod
    def BETA(t):
        if t.__class__ is Comb and t.fn.__class__ is Abs and _equal(t.arg, t.fn.bvar):
            return _thm((), safe_mk_eq(t, t.fn.body))
        raise Failure("BETA")

    @staticmethod
    def ASSUME(t):
        try:
            ok = _equal(type_of(t), bool_ty)
        except Failure:
            ok = False
        if not ok:
            raise Failure("ASSUME")
        return _thm((t,), t)

    @staticmethod
    def EQ_MP(a, b):
        e = _dest_eq(a.concl)
        if e is None or not aconv(e[0], b.concl):
            raise Failure("EQ_MP")
        return _thm(term_union(a.hyps, b.hyps), e[1])

    @staticmethod
    def DEDUCT_ANTISYM(a, b):
        hyps = term_union(term_remove(b.concl, a.hyps), term_remove(a.concl, b.hyps))
        return _thm(hyps, safe_mk_eq(a.concl, b.concl))

    @staticmethod
    def INST_TYPE(theta, a):
        if any(p.__class__ is not Tyvar for _, p in theta):
            raise Failure("INST_TYPE")
        return _thm(_setify(inst(theta, h) for h in a.hyps), inst(theta, a.concl))

    @staticmethod
    def INST(theta, a):
        try:
            concl = vsubst(theta, a.concl)
        except Failure:
            raise Failure("INST") from None
        return _thm(_setify(vsubst(theta, h) for h in a.hyps), concl)

    def primitive_rules(self):
        names = ("REFL", "TRANS", "MK_COMB", "ABS", "BETA", "ASSUME", "EQ_MP",
                 "DEDUCT_ANTISYM", "INST_TYPE", "INST")
        return {n: getattr(self, n) for n in names}
