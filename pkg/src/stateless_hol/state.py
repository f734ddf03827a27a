"""Mutable name tables kept outside the kernel.

Nothing here can compromise soundness: the tables only decide which constant
a *name* currently refers to.  Theorems never consult them.
"""

from . import kernel
from .core_types import (
    ATY,
    BOOL_TYOP,
    EMPTY_CONTEXT,
    FUN_TYOP,
    Abs,
    Comb,
    Failure,
    Tyapp,
    Typrim,
    Tyvar,
    Var,
    tag_eq,
    type_match,
    type_of,
)


class SymbolTable:
    """Current bindings of constant and type-operator names, definitions,
    axioms and the axiom context, for one session."""

    def __init__(self, mode="linear"):
        if mode not in kernel.TRACKING_MODES:
            raise ValueError(f"unknown tracking mode {mode!r}")
        self.mode = mode
        # Insertion-ordered; each name is bound at most once at a time.
        self.term_constants = {"=": kernel.eq_term(ATY)}
        self.type_ops = {"bool": BOOL_TYOP, "fun": FUN_TYOP}
        self.core_definitions = []
        self.definitions = []
        self.axioms = []
        self.current_ctx = EMPTY_CONTEXT

    # -- inspection ---------------------------------------------------------

    def constants(self):
        """``(name, constant)`` pairs, most recent first."""
        return list(reversed(self.term_constants.items()))

    def get_const_type(self, name):
        try:
            return type_of(self.term_constants[name])
        except KeyError:
            raise Failure(f"get_const_type: {name} is not a constant") from None

    def is_constant(self, name):
        return name in self.term_constants

    def get_type_arity(self, name):
        try:
            return self.type_ops[name].arity
        except KeyError:
            raise Failure(f"get_type_arity: {name} is not a type operator") from None

    def is_current(self, c):
        """Whether constant ``c`` is an instance of the current binding of its name."""
        bound = self.term_constants.get(c.name)
        if bound is c:
            return True
        if bound is None or not tag_eq(bound.tag, c.tag):
            return False
        return type_match(bound.ty, c.ty) is not None

    # -- declarations -------------------------------------------------------

    def new_type(self, name, arity):
        if name in self.type_ops:
            raise Failure(f"new_type: type {name} has already been declared")
        self.type_ops[name] = Typrim(name, arity)

    def new_constant_term(self, name, c):
        if name in self.term_constants:
            raise Failure(f"new_constant: constant {name} has already been declared")
        self.term_constants[name] = c

    def new_constant(self, name, ty):
        self.new_constant_term(name, kernel.new_prim_const(name, ty))

    def new_basic_definition(self, tm):
        c, dth = kernel.new_defined_const(tm)
        self.new_constant_term(c.name, c)
        self.core_definitions.insert(0, (c.name, dth))
        self.definitions.insert(0, (c.name, dth))
        return dth

    def undo_definition(self, cname):
        self.term_constants.pop(cname, None)
        self.core_definitions = [d for d in self.core_definitions if d[0] != cname]
        self.definitions = [d for d in self.definitions if d[0] != cname]

    def new_axiom(self, tm):
        th, self.current_ctx = kernel.axiom_sequent(self.current_ctx, tm, self.mode)
        self.axioms.insert(0, th)
        return th

    def new_basic_type_definition(self, tyname, absname, repname, witness):
        if tyname in self.type_ops:
            raise Failure(f"new_type: type {tyname} has already been declared")
        for name in (absname, repname):
            if name in self.term_constants:
                raise Failure(f"new_constant: constant {name} has already been declared")
        if absname == repname:
            raise Failure(f"new_constant: constant {repname} has already been declared")
        op, abs_c, rep_c, th1, th2 = kernel.new_defined_tyop(tyname, absname, repname, witness)
        self.type_ops[tyname] = op
        self.term_constants[absname] = abs_c
        self.term_constants[repname] = rep_c
        return th1, th2

    # -- term construction --------------------------------------------------

    def mk_const(self, name, theta=()):
        try:
            tm = self.term_constants[name]
        except KeyError:
            raise Failure("mk_const: not a constant name") from None
        return kernel.inst_const(tm, theta)

    def mk_type(self, name, args=()):
        try:
            op = self.type_ops[name]
        except KeyError:
            raise Failure(f"mk_type: {name} is not a type operator") from None
        return Tyapp(op, args)

    mk_vartype = staticmethod(Tyvar)
    mk_var = staticmethod(Var)
    mk_comb = staticmethod(Comb)
    mk_abs = staticmethod(Abs)
    type_of = staticmethod(type_of)
