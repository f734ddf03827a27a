"""Surface syntax for types and terms.

Grammar (informal)::

    type   ::= btype [ "->" type ]
    btype  ::= base { OPNAME }                  postfix application, e.g. A list
    base   ::= NAME | 'a | "(" type { "," type } ")" [ OPNAME ]

    term   ::= "\\" binder { binder } [ ":" type ] "." term
             | app [ "=" term ]                 "=" is right associative
    app    ::= atom { atom }
    atom   ::= NAME [ ":" type ] | "(=)" | "(" term [ ":" type ] ")"
    binder ::= NAME | "(" NAME ":" type ")"

A type NAME is a type operator if the table knows it, otherwise a type
variable when it starts with an uppercase letter.  A term NAME is a bound
variable if some enclosing binder has that name, else a constant if the table
binds it, else a free variable.  Types are inferred by unification; type
variables left unconstrained are given fresh names unless ``strict`` is set.

The parser and printer only talk to the kernel through the table object
(``mk_type``, ``mk_const``, ``mk_var`` ...) so they work with either kernel.
"""

import re

from .core_types import Failure

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<punct>[\\.():,=])|(?P<name>[A-Za-z0-9_][A-Za-z0-9_']*)"
    r"|(?P<tyvar>'[A-Za-z0-9_']+)|(?P<sym>[!?~&|<>+*^%$/@#-]+))"
)
_IDENT = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_']*\Z|'[A-Za-z0-9_']+\Z|[!?~&|<>+*^%$/@#-]+\Z")


def _tokenize(s, who):
    toks = []
    pos = 0
    for m in _TOKEN.finditer(s):
        if m.start() != pos or m.end() == pos:
            break
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    rest = len(s) - len(s[pos:].lstrip())
    if rest != len(s):
        raise Failure(f"{who}: syntax error at position {rest}")
    toks.append(("eof", "", len(s)))
    return toks


class _Stream:
    def __init__(self, s, who):
        self.toks = _tokenize(s, who)
        self.i = 0
        self.who = who

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def at(self, text, k=0):
        t = self.peek(k)
        return t[0] in ("punct", "arrow") and t[1] == text

    def expect(self, text):
        t = self.next()
        if t[1] != text or t[0] not in ("punct", "arrow"):
            self.error(t)
        return t

    def error(self, tok=None):
        tok = tok or self.peek()
        raise Failure(f"{self.who}: syntax error at position {tok[2]}")


# ---------------------------------------------------------------------------
# Pretypes: ("u", n) unification variable, ("v", name) type variable,
# ("t", name, args) type operator application.


def _is_tyop(table, name):
    try:
        table.get_type_arity(name)
        return True
    except Failure:
        return False


def _parse_type(st, table):
    t = _parse_btype(st, table)
    if st.at("->"):
        st.next()
        return ("t", "fun", (t, _parse_type(st, table)))
    return t


def _parse_btype(st, table):
    t = _parse_base(st, table)
    while st.peek()[0] == "name" and _is_tyop(table, st.peek()[1]):
        t = _apply_op(st, table, st.next(), (t,))
    return t


def _apply_op(st, table, tok, args):
    name = tok[1]
    arity = table.get_type_arity(name)
    if arity != len(args):
        raise Failure(f"parse_type: wrong number of arguments to {name}")
    return ("t", name, tuple(args))


def _parse_base(st, table):
    tok = st.next()
    kind, text, _ = tok
    if kind == "tyvar":
        return ("v", text)
    if kind == "name":
        if _is_tyop(table, text):
            return _apply_op(st, table, tok, ())
        if text[0].isupper():
            return ("v", text)
        raise Failure(f"parse_type: unknown type operator {text}")
    if kind == "punct" and text == "(":
        args = [_parse_type(st, table)]
        while st.at(","):
            st.next()
            args.append(_parse_type(st, table))
        st.expect(")")
        if len(args) > 1:
            op = st.peek()
            if op[0] != "name":
                st.error(op)
            if not _is_tyop(table, op[1]):
                raise Failure(f"parse_type: unknown type operator {op[1]}")
            return _apply_op(st, table, st.next(), args)
        return args[0]
    st.error(tok)


def _holtype_to_pre(ty, fresh=None):
    """Convert a kernel type; with ``fresh`` (a dict), type variables become
    unification variables (one per name)."""
    if ty.kind == "tyvar":
        if fresh is None:
            return ("v", ty.name)
        u = fresh.get(ty.name)
        if u is None:
            u = fresh[ty.name] = ("u", _new_uvar())
        return u
    return ("t", ty.name, tuple(_holtype_to_pre(a, fresh) for a in ty.args))


_uvar_counter = [0]


def _new_uvar():
    _uvar_counter[0] += 1
    return _uvar_counter[0]


def _pre_to_holtype(pt, table, cache):
    r = cache.get(pt)
    if r is not None:
        return r
    if pt[0] == "v":
        r = table.mk_vartype(pt[1])
    else:
        r = table.mk_type(pt[1], [_pre_to_holtype(a, table, cache) for a in pt[2]])
    cache[pt] = r
    return r


def parse_type(s, table):
    st = _Stream(s.strip(), "parse_type")
    if st.at(":"):
        st.next()
    pt = _parse_type(st, table)
    if st.peek()[0] != "eof":
        st.error()
    return _pre_to_holtype(pt, table, {})


# ---------------------------------------------------------------------------
# Preterms: ("id", name, annot, pos) | ("eq", pos) | ("comb", f, x) |
# ("abs", name, annot, body) | ("typed", term, annot)


def _parse_term(st, table):
    if st.at("\\"):
        st.next()
        binders = []
        while True:
            t = st.peek()
            if t[0] == "name" or t[0] == "sym":
                st.next()
                binders.append([t[1], None])
            elif st.at("(") and st.peek(1)[0] in ("name", "sym") and st.at(":", 2):
                st.next()
                name = st.next()[1]
                st.next()
                annot = _parse_type(st, table)
                st.expect(")")
                binders.append([name, annot])
            else:
                break
        if not binders:
            st.error()
        if st.at(":"):
            st.next()
            binders[-1][1] = _parse_type(st, table)
        st.expect(".")
        body = _parse_term(st, table)
        for name, annot in reversed(binders):
            body = ("abs", name, annot, body)
        return body
    lhs = _parse_app(st, table)
    if st.at("="):
        pos = st.next()[2]
        rhs = _parse_term(st, table)
        return ("comb", ("comb", ("eq", pos), lhs), rhs)
    return lhs


def _starts_atom(st):
    t = st.peek()
    return t[0] in ("name", "sym") or st.at("(")


def _parse_app(st, table):
    if not _starts_atom(st):
        st.error()
    t = _parse_atom(st, table)
    while _starts_atom(st):
        t = ("comb", t, _parse_atom(st, table))
    return t


def _parse_atom(st, table):
    tok = st.next()
    kind, text, pos = tok
    if kind in ("name", "sym"):
        if st.at(":"):
            st.next()
            return ("id", text, _parse_type(st, table), pos)
        return ("id", text, None, pos)
    if kind == "punct" and text == "(":
        if st.at("=") and st.at(")", 1):
            eqpos = st.next()[2]
            st.next()
            return ("eq", eqpos)
        t = _parse_term(st, table)
        if st.at(":"):
            st.next()
            t = ("typed", t, _parse_type(st, table))
        st.expect(")")
        return t
    st.error(tok)


# Pretypes of monomorphic constant types, keyed structurally.
_MONO = {}


class _Infer:
    def __init__(self, table):
        self.table = table
        self.subst = {}
        self.free = {}
        self.const_cache = {}

    def prune(self, t):
        while t[0] == "u":
            r = self.subst.get(t[1])
            if r is None:
                return t
            t = r
        return t

    def occurs(self, n, t):
        t = self.prune(t)
        if t[0] == "u":
            return t[1] == n
        if t[0] == "t":
            return any(self.occurs(n, a) for a in t[2])
        return False

    def unify(self, a, b):
        a = self.prune(a)
        b = self.prune(b)
        if a == b:
            return
        if a[0] == "u":
            if self.occurs(a[1], b):
                raise Failure("parse_term: type mismatch")
            self.subst[a[1]] = b
        elif b[0] == "u":
            self.unify(b, a)
        elif a[0] == "t" and b[0] == "t" and a[1] == b[1] and len(a[2]) == len(b[2]):
            for x, y in zip(a[2], b[2]):
                self.unify(x, y)
        else:
            raise Failure("parse_term: type mismatch")

    def fresh(self):
        return ("u", _new_uvar())

    def const_generic(self, name):
        g = self.const_cache.get(name)
        if g is None:
            g = self.const_cache[name] = self.table.get_const_type(name)
        return g

    def const_node(self, name):
        generic = self.const_generic(name)
        pre = _MONO.get(generic)
        if pre is not None:
            return ("const", name, generic, {}, pre)
        fresh = {}
        pre = _holtype_to_pre(generic, fresh)
        if not fresh:
            if len(_MONO) > 10000:
                _MONO.clear()
            _MONO[generic] = pre
        return ("const", name, generic, fresh, pre)

    def elaborate(self, pt, env):
        """Returns a typed tree: ("var", name, pty) | ("const", name, generic,
        fresh-map, pty) | ("comb", f, x, pty) | ("abs", name, bty, body, pty)."""
        tag = pt[0]
        if tag == "id":
            name, annot = pt[1], pt[2]
            for bname, bty in env:
                if bname == name:
                    node = ("var", name, bty)
                    break
            else:
                if self.table.is_constant(name):
                    node = self.const_node(name)
                else:
                    ty = self.free.get(name)
                    if ty is None:
                        ty = self.free[name] = self.fresh()
                    node = ("var", name, ty)
            if annot is not None:
                self.unify(node[-1], annot)
            return node
        if tag == "eq":
            return self.const_node("=")
        if tag == "comb":
            f = self.elaborate(pt[1], env)
            x = self.elaborate(pt[2], env)
            r = self.fresh()
            self.unify(f[-1], ("t", "fun", (x[-1], r)))
            return ("comb", f, x, r)
        if tag == "abs":
            bty = pt[2] if pt[2] is not None else self.fresh()
            body = self.elaborate(pt[3], [(pt[1], bty)] + env)
            return ("abs", pt[1], bty, body, ("t", "fun", (bty, body[-1])))
        node = self.elaborate(pt[1], env)
        self.unify(node[-1], pt[2])
        return node

    def resolve(self, t):
        t = self.prune(t)
        if t[0] == "t":
            return ("t", t[1], tuple(self.resolve(a) for a in t[2]))
        return t


def _pretype_names(pt, acc):
    if pt[0] == "v":
        acc.add(pt[1])
    elif pt[0] == "t":
        for a in pt[2]:
            _pretype_names(a, acc)


def _default_name(used):
    for base in ("A", "B", "C", "D", "E", "F", "G", "H"):
        if base not in used:
            return base
    i = 1
    while True:
        for base in ("A", "B", "C", "D"):
            name = f"{base}{i}"
            if name not in used:
                return name
        i += 1


def parse_term(s, table, strict=False):
    st = _Stream(s, "parse_term")
    pt = _parse_term(st, table)
    if st.peek()[0] != "eof":
        st.error()
    inf = _Infer(table)
    tree = inf.elaborate(pt, [])

    # Collect unresolved unification variables in first-occurrence order.
    leftovers = []
    used = set()

    def scan(node):
        for pty in _node_types(node):
            r = inf.resolve(pty)
            _pretype_names(r, used)
            _leftover_uvars(r, leftovers)
        if node[0] == "comb":
            scan(node[1])
            scan(node[2])
        elif node[0] == "abs":
            scan(node[3])

    scan(tree)
    if leftovers:
        if strict:
            raise Failure("parse_term: cannot infer type")
        for n in leftovers:
            name = _default_name(used)
            used.add(name)
            inf.subst[n] = ("v", name)

    cache = {}

    def ty_of(pty):
        return _pre_to_holtype(inf.resolve(pty), table, cache)

    def build(node):
        tag = node[0]
        if tag == "var":
            return table.mk_var(node[1], ty_of(node[2]))
        if tag == "const":
            _, name, generic, fresh, _pty = node
            theta = [(ty_of(u), table.mk_vartype(v)) for v, u in sorted(fresh.items())
                     if inf.resolve(u) != ("v", v)]
            return table.mk_const(name, theta)
        if tag == "comb":
            return table.mk_comb(build(node[1]), build(node[2]))
        return table.mk_abs(table.mk_var(node[1], ty_of(node[2])), build(node[3]))

    return build(tree)


def _node_types(node):
    tag = node[0]
    if tag == "var":
        return (node[2],)
    if tag == "const":
        return tuple(node[3].values())
    if tag == "abs":
        return (node[2],)
    return ()


def _leftover_uvars(pt, acc):
    if pt[0] == "u":
        if pt[1] not in acc:
            acc.append(pt[1])
    elif pt[0] == "t":
        for a in pt[2]:
            _leftover_uvars(a, acc)


# ---------------------------------------------------------------------------
# Printing


def _is_fun_type(ty):
    return ty.kind == "tyapp" and ty.name == "fun" and len(ty.args) == 2


def print_type(ty):
    if ty.kind == "tyvar":
        return ty.name
    if _is_fun_type(ty):
        dom, cod = ty.args
        d = print_type(dom)
        if _is_fun_type(dom):
            d = f"({d})"
        return f"{d}->{print_type(cod)}"
    if not ty.args:
        return ty.name
    if len(ty.args) == 1:
        a = print_type(ty.args[0])
        if _is_fun_type(ty.args[0]):
            a = f"({a})"
        return f"{a} {ty.name}"
    return "(" + ",".join(print_type(a) for a in ty.args) + ")" + ty.name


def _dest_eq(tm):
    if tm.kind == "comb" and tm.fn.kind == "comb":
        c = tm.fn.fn
        if c.kind == "const" and c.name == "=":
            return tm.fn.arg, tm.arg
    return None


class _Printer:
    """Renders a term; ``annotate`` is the set of slot numbers that get an
    explicit type.  Slots are numbered in rendering order over variable and
    constant occurrences and binders; ``slots`` records them."""

    def __init__(self, annotate=frozenset()):
        self.annotate = annotate
        self.counter = 0
        self.slots = []
        self.out = []

    def slot(self, kind, tm):
        n = self.counter
        self.counter += 1
        self.slots.append((n, kind, tm))
        return n in self.annotate

    def atom(self, tm, kind):
        ann = self.slot(kind, tm)
        if tm.kind == "const" and tm.name == "=":
            self.out.append(f"((=):{print_type(tm.ty)})" if ann else "(=)")
        elif ann:
            self.out.append(f"({tm.name}:{print_type(tm.ty)})")
        else:
            self.out.append(tm.name)

    def term(self, tm, level, bound):
        out = self.out
        k = tm.kind
        if k == "var":
            self.atom(tm, "bound" if tm in bound else "free")
            return
        if k == "const":
            self.atom(tm, "const")
            return
        if k == "abs":
            if level >= 1:
                out.append("(")
            out.append("\\")
            first = True
            while tm.kind == "abs":
                if not first:
                    out.append(" ")
                first = False
                v = tm.bvar
                if self.slot("binder", v):
                    out.append(f"({v.name}:{print_type(v.ty)})")
                else:
                    out.append(v.name)
                bound = bound | {v}
                tm = tm.body
            out.append(". ")
            self.term(tm, 0, bound)
            if level >= 1:
                out.append(")")
            return
        eq = _dest_eq(tm)
        if eq is not None:
            c = tm.fn.fn
            if self.slot("const", c):
                # An annotated equality sign is written prefix.
                if level >= 3:
                    out.append("(")
                out.append(f"((=):{print_type(c.ty)}) ")
                self.term(eq[0], 3, bound)
                out.append(" ")
                self.term(eq[1], 3, bound)
                if level >= 3:
                    out.append(")")
                return
            if level >= 1:
                out.append("(")
            self.term(eq[0], 1, bound)
            out.append(" = ")
            self.term(eq[1], 0, bound)
            if level >= 1:
                out.append(")")
            return
        if level >= 3:
            out.append("(")
        self.term(tm.fn, 2, bound)
        out.append(" ")
        self.term(tm.arg, 3, bound)
        if level >= 3:
            out.append(")")


def print_term(tm, table=None):
    """Render ``tm``.  Without a table the output is purely for display; with
    one, enough type annotations are added that parsing the result against
    the same table gives back ``tm`` (when that is possible at all)."""
    if table is None:
        return _render(tm, frozenset())[0]
    if _determined(tm):
        return _render(tm, frozenset())[0]
    tm = _clarify(tm, table)
    text, slots = _render(tm, frozenset())
    if _round_trips(text, tm, table):
        return text
    chosen = set()
    for n in _candidate_slots(slots):
        chosen.add(n)
        text = _render(tm, frozenset(chosen))[0]
        if _round_trips(text, tm, table):
            return text
    return text


def _clarify(tm, table):
    """Alpha-convert so that no binder hides a different variable or a
    constant of the same name; names alone then decide what each occurrence
    refers to."""
    k = tm.kind
    if k == "comb":
        f = _clarify(tm.fn, table)
        a = _clarify(tm.arg, table)
        if f is tm.fn and a is tm.arg:
            return tm
        return table.mk_comb(f, a)
    if k != "abs":
        return tm
    v = tm.bvar
    body = tm.body
    if _shadows(body, v):
        used = set()
        _names(body, used)
        name = v.name + "'"
        while name in used or table.is_constant(name):
            name += "'"
        nv = table.mk_var(name, v.ty)
        body = _rename(body, v, nv, table)
        v = nv
    b = _clarify(body, table)
    if v is tm.bvar and b is tm.body:
        return tm
    return table.mk_abs(v, b)


def _same_var(a, b):
    return a is b or (a.name == b.name and a.ty == b.ty)


def _shadows(body, v):
    # Is there an occurrence named like v that does not refer to v?
    stack = [(body, ())]
    while stack:
        t, inner = stack.pop()
        k = t.kind
        if k == "var":
            if t.name == v.name and not _same_var(t, v) and not any(_same_var(t, b) for b in inner):
                return True
        elif k == "const":
            if t.name == v.name:
                return True
        elif k == "comb":
            stack.append((t.fn, inner))
            stack.append((t.arg, inner))
        else:
            bv = t.bvar
            stack.append((t.body, inner + (bv,) if bv.name == v.name else inner))
    return False


def _names(tm, acc):
    stack = [tm]
    while stack:
        t = stack.pop()
        k = t.kind
        if k == "var" or k == "const":
            acc.add(t.name)
        elif k == "comb":
            stack.append(t.fn)
            stack.append(t.arg)
        else:
            acc.add(t.bvar.name)
            stack.append(t.body)


def _rename(tm, old, new, table):
    k = tm.kind
    if k == "var":
        return new if _same_var(tm, old) else tm
    if k == "const":
        return tm
    if k == "comb":
        f = _rename(tm.fn, old, new, table)
        a = _rename(tm.arg, old, new, table)
        if f is tm.fn and a is tm.arg:
            return tm
        return table.mk_comb(f, a)
    if _same_var(tm.bvar, old):
        return tm
    b = _rename(tm.body, old, new, table)
    return tm if b is tm.body else table.mk_abs(tm.bvar, b)


def _render(tm, annotate):
    p = _Printer(annotate)
    p.term(tm, 0, frozenset())
    return "".join(p.out), p.slots


def _has_tyvars(ty):
    if ty.kind == "tyvar":
        return True
    return any(_has_tyvars(a) for a in ty.args)


def _determined(tm):
    """Cheap sufficient condition for the unannotated rendering to parse back
    unchanged: no variables, only monomorphic constants, and every equality
    sign applied to an argument (which fixes its type)."""
    stack = [tm]
    while stack:
        t = stack.pop()
        k = t.kind
        if k == "comb":
            f = t.fn
            if f.kind == "const":
                if f.name != "=" and _has_tyvars(f.ty):
                    return False
            else:
                stack.append(f)
            stack.append(t.arg)
        elif k == "const":
            if t.name == "=" or _has_tyvars(t.ty):
                return False
        else:
            return False
    return True


def _candidate_slots(slots):
    seen = set()
    free, binders, consts = [], [], []
    for n, kind, tm in slots:
        if kind == "free":
            key = (tm.name, tm.ty)
            if key not in seen:
                seen.add(key)
                free.append(n)
        elif kind == "binder":
            binders.append(n)
        elif kind == "const":
            consts.append(n)
    return free + binders + consts


def _round_trips(text, tm, table):
    try:
        back = parse_term(text, table)
    except Failure:
        return False
    return back == tm


def _constants(tm, acc):
    stack = [tm]
    while stack:
        t = stack.pop()
        k = t.kind
        if k == "const":
            acc.append(t)
        elif k == "comb":
            stack.append(t.arg)
            stack.append(t.fn)
        elif k == "abs":
            stack.append(t.body)
    return acc


OBSOLETE = "<obsolete theorem>"


def is_obsolete(th, table):
    consts = []
    for h in th.hyps:
        _constants(h, consts)
    _constants(th.concl, consts)
    seen = set()
    for c in consts:
        if id(c) in seen:
            continue
        seen.add(id(c))
        if not table.is_current(c):
            return True
    return False


def print_thm(th, table):
    if is_obsolete(th, table):
        return OBSOLETE
    concl = print_term(th.concl, table)
    if not th.hyps:
        return f"|- {concl}"
    hyps = ", ".join(print_term(h, table) for h in th.hyps)
    return f"{hyps} |- {concl}"


def is_identifier(name):
    return _IDENT.match(name) is not None
