"""Immutable logical syntax: type operators, types, terms, theorems, contexts.

Constants and defined type operators carry the data that introduced them
(their *tag*), so two same-named constants with different definitions are
different constants.  All nodes are immutable and freely shared; structural
equality short-circuits on node identity, which keeps comparisons of
constants cheap even though their tags are large shared graphs.
"""

from contextlib import contextmanager
from functools import cmp_to_key


class Failure(Exception):
    """A logical operation was refused; ``str(exc)`` is the bare message."""


# ---------------------------------------------------------------------------
# Equality instrumentation.  The identity fast path can be switched off for
# ablation; ``payload_traversals`` counts descents into tag payloads.

_fast_path = True
payload_traversals = 0


def set_fast_path(enabled):
    global _fast_path
    _fast_path = bool(enabled)


def fast_path_enabled():
    return _fast_path


@contextmanager
def fast_path(enabled):
    previous = _fast_path
    set_fast_path(enabled)
    try:
        yield
    finally:
        set_fast_path(previous)


def reset_payload_traversals():
    global payload_traversals
    payload_traversals = 0


# ---------------------------------------------------------------------------
# Type operators and types


class TypeOp:
    __slots__ = ("name", "arity")

    def __eq__(self, other):
        return isinstance(other, TypeOp) and _equal(self, other)

    def __hash__(self):
        return hash((self.name, self.arity))


class Typrim(TypeOp):
    __slots__ = ()

    def __init__(self, name, arity):
        self.name = name
        self.arity = arity

    def __repr__(self):
        return f"Typrim({self.name!r}, {self.arity})"


class Tydefined(TypeOp):
    """A type operator carved out of an existing type by a witness theorem."""

    __slots__ = ("defining",)

    def __init__(self, name, arity, defining):
        if defining.hyps:
            raise Failure("new_basic_type_definition")
        self.name = name
        self.arity = arity
        self.defining = defining

    def __repr__(self):
        return f"Tydefined({self.name!r}, {self.arity}, ...)"


class HolType:
    __slots__ = ("_hash",)

    def __eq__(self, other):
        return isinstance(other, HolType) and _equal(self, other)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = self._compute_hash()
        return h


class Tyvar(HolType):
    __slots__ = ("name",)
    kind = "tyvar"

    def __init__(self, name):
        self._hash = None
        self.name = name

    def _compute_hash(self):
        return hash(("tyvar", self.name))

    def __repr__(self):
        return f"Tyvar({self.name!r})"


class Tyapp(HolType):
    __slots__ = ("op", "args")
    kind = "tyapp"

    def __init__(self, op, args=()):
        args = tuple(args)
        if len(args) != op.arity:
            raise Failure(f"mk_type: wrong number of arguments to {op.name}")
        self._hash = None
        self.op = op
        self.args = args

    @property
    def name(self):
        return self.op.name

    def _compute_hash(self):
        return hash(("tyapp", self.op.name, tuple(hash(a) for a in self.args)))

    def __repr__(self):
        return f"Tyapp({self.op.name!r}, {list(self.args)!r})"


BOOL_TYOP = Typrim("bool", 0)
FUN_TYOP = Typrim("fun", 2)
BOOL_TY = Tyapp(BOOL_TYOP, ())
ATY = Tyvar("A")


def _is_fun_op(op):
    return op is FUN_TYOP or (op.__class__ is Typrim and op.name == "fun" and op.arity == 2)


def mk_fun_ty(dom, cod):
    return Tyapp(FUN_TYOP, (dom, cod))


def dest_fun_ty(ty):
    if ty.__class__ is Tyapp and _is_fun_op(ty.op):
        return ty.args
    raise Failure("dest_fun_ty")


def is_bool_ty(ty):
    if ty is BOOL_TY:
        return True
    return ty.__class__ is Tyapp and _equal(ty, BOOL_TY)


def _is_eq_type(ty):
    if ty.__class__ is not Tyapp or not _is_fun_op(ty.op):
        return False
    a, rest = ty.args
    if rest.__class__ is not Tyapp or not _is_fun_op(rest.op):
        return False
    b, c = rest.args
    return (a is b or _equal(a, b)) and is_bool_ty(c)


# ---------------------------------------------------------------------------
# Constant tags


class ConstTag:
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, ConstTag) and _equal(self, other)

    def __hash__(self):
        return hash(self.__class__.__name__)


class Prim(ConstTag):
    __slots__ = ()

    def __repr__(self):
        return "PRIM"


PRIM = Prim()


class Defined(ConstTag):
    __slots__ = ("defn",)

    def __init__(self, defn):
        self.defn = defn

    def __repr__(self):
        return "Defined(...)"


class MkAbstract(ConstTag):
    __slots__ = ("name", "arity", "defining")

    def __init__(self, name, arity, defining):
        self.name = name
        self.arity = arity
        self.defining = defining

    def __repr__(self):
        return f"MkAbstract({self.name!r}, {self.arity}, ...)"


class DestAbstract(ConstTag):
    __slots__ = ("name", "arity", "defining")

    def __init__(self, name, arity, defining):
        self.name = name
        self.arity = arity
        self.defining = defining

    def __repr__(self):
        return f"DestAbstract({self.name!r}, {self.arity}, ...)"


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ("_hash",)

    def __eq__(self, other):
        return isinstance(other, Term) and _equal(self, other)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = self._compute_hash()
        return h

    def __repr__(self):
        from .syntax import print_term

        return f"`{print_term(self)}`"


class Var(Term):
    __slots__ = ("name", "ty")
    kind = "var"

    def __init__(self, name, ty):
        self._hash = None
        self.name = name
        self.ty = ty

    def _compute_hash(self):
        return hash(("var", self.name, hash(self.ty)))


class Const(Term):
    __slots__ = ("name", "ty", "tag")
    kind = "const"

    def __init__(self, name, ty, tag=PRIM):
        # The equality constant is recognised by name and tag alone, so its
        # type must have the equality shape or equations could be faked.
        if name == "=" and tag is PRIM and not _is_eq_type(ty):
            raise Failure("mk_const: bad type for =")
        self._hash = None
        self.name = name
        self.ty = ty
        self.tag = tag

    def _compute_hash(self):
        # The tag is deliberately left out: it may be a huge graph, and equal
        # constants always agree on name and type anyway.
        return hash(("const", self.name, hash(self.ty)))


class Comb(Term):
    __slots__ = ("fn", "arg", "_ty")
    kind = "comb"

    def __init__(self, fn, arg):
        self._hash = None
        self._ty = None
        self.fn = fn
        self.arg = arg

    def _compute_hash(self):
        return hash(("comb", hash(self.fn), hash(self.arg)))


class Abs(Term):
    __slots__ = ("bvar", "body", "_ty")
    kind = "abs"

    def __init__(self, bvar, body):
        if bvar.__class__ is not Var:
            raise Failure("mk_abs: not a variable")
        self._hash = None
        self._ty = None
        self.bvar = bvar
        self.body = body

    def _compute_hash(self):
        return hash(("abs", hash(self.bvar.ty), hash(self.body)))


# ---------------------------------------------------------------------------
# Axiom contexts and theorems


class Context:
    """Axiom history: ``history[0]`` is the newest axiom list, the last entry is
    empty, and ``n == len(history) - 1``.  ``mask`` is the exact set of used
    axioms in precise tracking mode (bit i = the i-th axiom ever introduced)."""

    __slots__ = ("n", "history", "mask")

    def __init__(self, n, history, mask=0):
        self.n = n
        self.history = history
        self.mask = mask

    def __repr__(self):
        return f"Context(n={self.n}, mask={self.mask:#x})"


EMPTY_CONTEXT = Context(0, ((),), 0)

# Only holders of this key can build theorems; the kernel is the only holder.
_KERNEL_KEY = object()


class Thm:
    __slots__ = ("ctx", "hyps", "concl")

    def __init__(self, *args, **kwargs):
        raise TypeError("theorems can only be created by kernel inference rules")

    @classmethod
    def _create(cls, key, ctx, hyps, concl):
        if key is not _KERNEL_KEY:
            raise TypeError("theorems can only be created by kernel inference rules")
        th = object.__new__(cls)
        object.__setattr__(th, "ctx", ctx)
        object.__setattr__(th, "hyps", hyps)
        object.__setattr__(th, "concl", concl)
        return th

    def __setattr__(self, name, value):
        raise AttributeError("theorems are immutable")

    def __delattr__(self, name):
        raise AttributeError("theorems are immutable")

    def __reduce_ex__(self, protocol):
        raise TypeError("theorems cannot be copied or pickled")

    def __eq__(self, other):
        return isinstance(other, Thm) and _equal(self, other)

    def __hash__(self):
        return hash(self.concl)

    def __repr__(self):
        from .syntax import print_term

        hyps = ", ".join(print_term(h) for h in self.hyps)
        return f"<Thm {hyps + ' ' if hyps else ''}|- {print_term(self.concl)}>"


# ---------------------------------------------------------------------------
# Structural equality with the identity fast path


def _equal(x, y):
    global payload_traversals
    fast = _fast_path
    stack = [(x, y)]
    pop = stack.pop
    push = stack.append
    while stack:
        a, b = pop()
        if fast and a is b:
            continue
        cls = a.__class__
        if cls is not b.__class__:
            return False
        if cls is Comb:
            push((a.arg, b.arg))
            push((a.fn, b.fn))
        elif cls is Const:
            if a.name != b.name:
                return False
            push((a.tag, b.tag))
            push((a.ty, b.ty))
        elif cls is Var:
            if a.name != b.name:
                return False
            push((a.ty, b.ty))
        elif cls is Tyapp:
            if len(a.args) != len(b.args):
                return False
            push((a.op, b.op))
            push_args = list(zip(a.args, b.args))
            push_args.reverse()
            stack.extend(push_args)
        elif cls is Tyvar:
            if a.name != b.name:
                return False
        elif cls is Abs:
            push((a.body, b.body))
            push((a.bvar, b.bvar))
        elif cls is Typrim:
            if a.name != b.name or a.arity != b.arity:
                return False
        elif cls is Prim:
            pass
        elif cls is Defined:
            payload_traversals += 1
            push((a.defn, b.defn))
        elif cls is MkAbstract or cls is DestAbstract or cls is Tydefined:
            if a.name != b.name or a.arity != b.arity:
                return False
            payload_traversals += 1
            push((a.defining, b.defining))
        elif cls is Thm:
            # Tags identify a definition by its logical content; the axiom
            # context is bookkeeping and does not take part.
            if len(a.hyps) != len(b.hyps):
                return False
            stack.extend(zip(a.hyps, b.hyps))
            push((a.concl, b.concl))
        else:
            raise TypeError(f"cannot compare {cls.__name__}")
    return True


def term_eq(a, b):
    """Structural equality of terms (constants compare name, type, then tag)."""
    return _equal(a, b)


def type_eq(a, b):
    return _equal(a, b)


def tag_eq(a, b):
    return _equal(a, b)


# ---------------------------------------------------------------------------
# Total orders.  Hypothesis lists are kept sorted by ``alphaorder``, which is
# invariant under renaming of bound variables.


def _cmp(x, y):
    return (x > y) - (x < y)


def type_compare(a, b):
    if _fast_path and a is b:
        return 0
    ca = a.__class__
    if ca is Tyvar:
        if b.__class__ is Tyvar:
            return _cmp(a.name, b.name)
        return -1
    if b.__class__ is Tyvar:
        return 1
    c = typeop_compare(a.op, b.op)
    if c:
        return c
    for x, y in zip(a.args, b.args):
        c = type_compare(x, y)
        if c:
            return c
    return 0


def typeop_compare(a, b):
    if _fast_path and a is b:
        return 0
    c = _cmp(a.name, b.name) or _cmp(a.arity, b.arity)
    if c:
        return c
    ra = a.__class__ is Tydefined
    rb = b.__class__ is Tydefined
    if ra != rb:
        return -1 if rb else 1
    if ra:
        return thm_compare(a.defining, b.defining)
    return 0


_TAG_RANK = {Prim: 0, Defined: 1, MkAbstract: 2, DestAbstract: 3}


def tag_compare(a, b):
    if (_fast_path and a is b) or _equal(a, b):
        return 0
    ra = _TAG_RANK[a.__class__]
    rb = _TAG_RANK[b.__class__]
    if ra != rb:
        return _cmp(ra, rb)
    if ra == 1:
        return alphaorder(a.defn, b.defn)
    return (_cmp(a.name, b.name) or _cmp(a.arity, b.arity)
            or thm_compare(a.defining, b.defining))


def thm_compare(a, b):
    if _fast_path and a is b:
        return 0
    c = alphaorder(a.concl, b.concl) or _cmp(len(a.hyps), len(b.hyps))
    if c:
        return c
    for x, y in zip(a.hyps, b.hyps):
        c = alphaorder(x, y)
        if c:
            return c
    return 0


def _var_compare(a, b):
    if _fast_path and a is b:
        return 0
    return _cmp(a.name, b.name) or type_compare(a.ty, b.ty)


def const_compare(a, b):
    if _fast_path and a is b:
        return 0
    return _cmp(a.name, b.name) or type_compare(a.ty, b.ty) or tag_compare(a.tag, b.tag)


_TERM_RANK = {Const: 0, Var: 1, Comb: 2, Abs: 3}


def _orda(env, trivial, t1, t2):
    # ``env`` pairs bound variables of t1 with those of t2, innermost first;
    # ``trivial`` says every pair is identical, so shared nodes compare equal.
    if trivial and _fast_path and t1 is t2:
        return 0
    c1 = t1.__class__
    c2 = t2.__class__
    if c1 is not c2:
        return _cmp(_TERM_RANK[c1], _TERM_RANK[c2])
    if c1 is Comb:
        return _orda(env, trivial, t1.fn, t2.fn) or _orda(env, trivial, t1.arg, t2.arg)
    if c1 is Var:
        for x1, x2 in env:
            if _var_compare(t1, x1) == 0:
                return 0 if _var_compare(t2, x2) == 0 else -1
            if _var_compare(t2, x2) == 0:
                return 1
        return _var_compare(t1, t2)
    if c1 is Const:
        return const_compare(t1, t2)
    v1 = t1.bvar
    v2 = t2.bvar
    c = type_compare(v1.ty, v2.ty)
    if c:
        return c
    return _orda(((v1, v2),) + env, trivial and (v1 is v2 or _equal(v1, v2)), t1.body, t2.body)


def alphaorder(t1, t2):
    """Total order on terms, zero exactly on alpha-equivalent pairs."""
    return _orda((), True, t1, t2)


def aconv(a, b):
    return _orda((), True, a, b) == 0


_alpha_key = cmp_to_key(alphaorder)


def term_setify(terms):
    """Sort by ``alphaorder`` and drop alpha-duplicates."""
    out = []
    for t in sorted(terms, key=_alpha_key):
        if not out or alphaorder(out[-1], t) != 0:
            out.append(t)
    return tuple(out)


def term_union(l1, l2):
    if not l1:
        return l2
    if not l2 or l1 is l2:
        return l1
    out = []
    i = j = 0
    n1, n2 = len(l1), len(l2)
    while i < n1 and j < n2:
        c = alphaorder(l1[i], l2[j])
        if c < 0:
            out.append(l1[i])
            i += 1
        elif c > 0:
            out.append(l2[j])
            j += 1
        else:
            out.append(l1[i])
            i += 1
            j += 1
    out.extend(l1[i:])
    out.extend(l2[j:])
    return tuple(out)


def term_remove(t, terms):
    kept = tuple(x for x in terms if not aconv(x, t))
    return terms if len(kept) == len(terms) else kept


def term_image(f, terms):
    return term_setify(f(t) for t in terms)


# ---------------------------------------------------------------------------
# Typing


def type_of(tm):
    cls = tm.__class__
    if cls is Var or cls is Const:
        return tm.ty
    ty = tm._ty
    if ty is not None:
        return ty
    if cls is Comb:
        fty = type_of(tm.fn)
        if fty.__class__ is not Tyapp or not _is_fun_op(fty.op):
            raise Failure("type_of")
        dom, cod = fty.args
        aty = type_of(tm.arg)
        if not (dom is aty or _equal(dom, aty)):
            raise Failure("type_of")
        ty = cod
    elif cls is Abs:
        ty = Tyapp(FUN_TYOP, (tm.bvar.ty, type_of(tm.body)))
    else:
        raise Failure("type_of")
    tm._ty = ty
    return ty


def eq_term(ty):
    return Const("=", Tyapp(FUN_TYOP, (ty, Tyapp(FUN_TYOP, (ty, BOOL_TY)))), PRIM)


def safe_mk_eq(l, r):
    ty = type_of(l)
    rty = type_of(r)
    if not (ty is rty or _equal(ty, rty)):
        raise Failure("safe_mk_eq")
    return Comb(Comb(eq_term(ty), l), r)


def is_eq_const(tm):
    return tm.__class__ is Const and tm.name == "=" and tm.tag is PRIM


def dest_eq(tm):
    """Return ``(l, r)`` for an equation, otherwise None."""
    if tm.__class__ is Comb:
        f = tm.fn
        if f.__class__ is Comb and is_eq_const(f.fn):
            return f.arg, tm.arg
    return None


# ---------------------------------------------------------------------------
# Free variables and type variables


def _tyvars_into(ty, acc):
    if ty.__class__ is Tyvar:
        acc[ty.name] = ty
    else:
        for a in ty.args:
            _tyvars_into(a, acc)


def tyvars(ty):
    acc = {}
    _tyvars_into(ty, acc)
    return [acc[k] for k in sorted(acc)]


def type_vars_in_term(tm):
    acc = {}
    stack = [tm]
    while stack:
        t = stack.pop()
        cls = t.__class__
        if cls is Comb:
            stack.append(t.fn)
            stack.append(t.arg)
        elif cls is Abs:
            _tyvars_into(t.bvar.ty, acc)
            stack.append(t.body)
        else:
            _tyvars_into(t.ty, acc)
    return [acc[k] for k in sorted(acc)]


def _var_key(v):
    return v.name, cmp_to_key(type_compare)(v.ty)


def frees(tm):
    found = []

    def walk(t, bound):
        cls = t.__class__
        if cls is Var:
            if not any(_equal(t, b) for b in bound) and not any(_equal(t, f) for f in found):
                found.append(t)
        elif cls is Comb:
            walk(t.fn, bound)
            walk(t.arg, bound)
        elif cls is Abs:
            walk(t.body, bound + (t.bvar,))

    walk(tm, ())
    return sorted(found, key=_var_key)


def freesin(acc, tm):
    cls = tm.__class__
    if cls is Var:
        return any(tm is a or _equal(tm, a) for a in acc)
    if cls is Const:
        return True
    if cls is Abs:
        return freesin([tm.bvar, *acc], tm.body)
    return freesin(acc, tm.fn) and freesin(acc, tm.arg)


def vfree_in(v, tm):
    cls = tm.__class__
    if cls is Var:
        return tm is v or _equal(tm, v)
    if cls is Const:
        return False
    if cls is Abs:
        bv = tm.bvar
        return not (bv is v or _equal(bv, v)) and vfree_in(v, tm.body)
    return vfree_in(v, tm.fn) or vfree_in(v, tm.arg)


def variant(avoid, v):
    while any(vfree_in(v, t) for t in avoid):
        v = Var(v.name + "'", v.ty)
    return v


# ---------------------------------------------------------------------------
# Substitution.  Substitution lists are (replacement, pattern) pairs.


def type_subst(theta, ty):
    if not theta:
        return ty
    if ty.__class__ is Tyapp:
        if not ty.args:
            return ty
        args = tuple(type_subst(theta, a) for a in ty.args)
        if all(x is y for x, y in zip(args, ty.args)):
            return ty
        return Tyapp(ty.op, args)
    for replacement, pattern in theta:
        if pattern is ty or _equal(pattern, ty):
            return replacement
    return ty


def type_match(pattern, ty, env=None):
    """Extend ``env`` (tyvar name -> type) so ``pattern`` instantiates to ``ty``.

    Returns None when no instantiation exists.
    """
    env = {} if env is None else env
    stack = [(pattern, ty)]
    while stack:
        p, t = stack.pop()
        if p.__class__ is Tyvar:
            bound = env.get(p.name)
            if bound is None:
                env[p.name] = t
            elif not _equal(bound, t):
                return None
        elif t.__class__ is Tyapp and (p.op is t.op or _equal(p.op, t.op)):
            stack.extend(zip(p.args, t.args))
        else:
            return None
    return env


def vsubst(theta, tm):
    if not theta:
        return tm
    for replacement, v in theta:
        if v.__class__ is not Var:
            raise Failure("vsubst")
        rty = type_of(replacement)
        if not (rty is v.ty or _equal(rty, v.ty)):
            raise Failure("vsubst")
    return _vsubst(list(theta), tm)


def _vsubst(ilist, tm):
    cls = tm.__class__
    if cls is Var:
        for replacement, v in ilist:
            if v is tm or _equal(v, tm):
                return replacement
        return tm
    if cls is Const:
        return tm
    if cls is Comb:
        f = _vsubst(ilist, tm.fn)
        x = _vsubst(ilist, tm.arg)
        if f is tm.fn and x is tm.arg:
            return tm
        return Comb(f, x)
    bv = tm.bvar
    inner = [(t, x) for t, x in ilist if not (x is bv or _equal(x, bv))]
    if not inner:
        return tm
    body = _vsubst(inner, tm.body)
    if body is tm.body:
        return tm
    if any(vfree_in(bv, t) and vfree_in(x, tm.body) for t, x in inner):
        fresh = variant([body], bv)
        return Abs(fresh, _vsubst([(fresh, bv)] + inner, tm.body))
    return Abs(bv, body)


class _Clash(Exception):
    def __init__(self, var):
        self.var = var


def inst_type(theta, tm):
    """Instantiate type variables throughout ``tm``; constant tags are kept."""
    if not theta:
        return tm
    return _inst((), theta, tm)


def _inst(env, theta, tm):
    cls = tm.__class__
    if cls is Var:
        ty = type_subst(theta, tm.ty)
        new = tm if ty is tm.ty else Var(tm.name, ty)
        original = tm
        for after, before in env:
            if after is new or _equal(after, new):
                original = before
                break
        if not (original is tm or _equal(original, tm)):
            raise _Clash(new)
        return new
    if cls is Const:
        ty = type_subst(theta, tm.ty)
        return tm if ty is tm.ty else Const(tm.name, ty, tm.tag)
    if cls is Comb:
        f = _inst(env, theta, tm.fn)
        x = _inst(env, theta, tm.arg)
        if f is tm.fn and x is tm.arg:
            return tm
        return Comb(f, x)
    y = tm.bvar
    y2 = _inst((), theta, y)
    try:
        body = _inst(((y2, y),) + env, theta, tm.body)
    except _Clash as clash:
        if not _equal(clash.var, y2):
            raise
        ifrees = [_inst((), theta, v) for v in frees(tm.body)]
        y3 = variant(ifrees, y2)
        z = Var(y3.name, y.ty)
        return _inst(env, theta, Abs(z, vsubst([(z, y)], tm.body)))
    if y2 is y and body is tm.body:
        return tm
    return Abs(y2, body)
