"""Script runner and interactive toplevel.

One command per line, ``#`` starts a comment line::

    tyop NAME ARITY
    const NAME : TYPE
    def NAME: `v = body`
    undo NAME
    axiom NAME: `term`
    thm NAME = RULE ARGS...
    print NAME
    assert_prints EXPR "text"
    assert_fails EXPR-or-command "message"
    include PATH

A line holding just an expression evaluates it.  Rule arguments are theorem
names or parenthesised expressions, backquoted terms, and substitution lists
such as ``[(`:num`, `:A`)]`` or ``[(`0`, `x:num`)]`` (replacement first).

The REPL holds no logical authority: it only calls table, kernel and syntax
operations.
"""

import argparse
import os
import re
import sys
from importlib import resources

from . import kernel as stateless_kernel
from .baseline_stateful import StatefulKernel
from .core_types import Failure
from .state import SymbolTable
from .syntax import _dest_eq, parse_term, parse_type, print_thm

KERNELS = ("stateless", "stateful")

RULE_SIGNATURES = {
    "REFL": "t",
    "TRANS": "hh",
    "SYM": "h",
    "MK_COMB": "hh",
    "ABS": "th",
    "BETA": "t",
    "ASSUME": "t",
    "EQ_MP": "hh",
    "DEDUCT_ANTISYM": "hh",
    "INST_TYPE": "Yh",
    "INST": "Sh",
    "AP_TERM": "th",
    "AP_THM": "ht",
}


class ScriptError(Exception):
    """A malformed command or an unknown name; reported with its line."""


def derived_rules(rules):
    """SYM, AP_TERM and AP_THM built from the primitive rules in ``rules``."""
    REFL = rules["REFL"]
    MK_COMB = rules["MK_COMB"]
    EQ_MP = rules["EQ_MP"]

    def SYM(th):
        tm = th.concl
        eq = _dest_eq(tm)
        if eq is None:
            raise Failure("SYM")
        lth = REFL(eq[0])
        return EQ_MP(MK_COMB(MK_COMB(REFL(tm.fn.fn), th), lth), lth)

    def AP_TERM(t, th):
        try:
            return MK_COMB(REFL(t), th)
        except Failure:
            raise Failure("AP_TERM") from None

    def AP_THM(th, t):
        try:
            return MK_COMB(th, REFL(t))
        except Failure:
            raise Failure("AP_THM") from None

    return {"SYM": SYM, "AP_TERM": AP_TERM, "AP_THM": AP_THM}


def make_backend(kernel="stateless", mode="linear", wrap=None):
    """Returns ``(table, rules)`` for the chosen kernel.  ``wrap(name, rule)``,
    if given, is applied to each primitive rule (e.g. to count calls)."""
    if kernel == "stateless":
        table = SymbolTable(mode)
        rules = dict(stateless_kernel.PRIMITIVE_RULES)
    elif kernel == "stateful":
        table = StatefulKernel()
        rules = table.primitive_rules()
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    if wrap is not None:
        rules = {name: wrap(name, fn) for name, fn in rules.items()}
    rules.update(derived_rules(rules))
    return table, rules


# ---------------------------------------------------------------------------
# Command parsing

_EXPR_TOKEN = re.compile(r'\s*(?:(`[^`]*`)|([()\[\],])|([^\s()\[\],`"]+))')

_COMMANDS = [
    ("tyop", re.compile(r"tyop\s+(\S+)\s+(\d+)$")),
    ("const", re.compile(r"const\s+([^\s:]+)\s*:\s*(.+)$")),
    ("def", re.compile(r"def\s+([^\s:]+)\s*:\s*`([^`]*)`$")),
    ("axiom", re.compile(r"axiom\s+([^\s:]+)\s*:\s*`([^`]*)`$")),
    ("undo", re.compile(r"undo\s+(\S+)$")),
    ("thm", re.compile(r"thm\s+([^\s=]+)\s*=\s*(.+)$")),
    ("print", re.compile(r"print\s+(\S+)$")),
    ("include", re.compile(r"include\s+(.+)$")),
    ("assert_prints", re.compile(r'assert_prints\s+(.+?)\s+"((?:[^"\\]|\\.)*)"$')),
    ("assert_fails", re.compile(r'assert_fails\s+(.+?)\s+"((?:[^"\\]|\\.)*)"$')),
]
_KEYWORDS = {name for name, _ in _COMMANDS}


def _unescape(s):
    return re.sub(r"\\(.)", r"\1", s)


def _tokenize_expr(s):
    toks = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _EXPR_TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            raise ScriptError(f"cannot parse expression near {s[pos:]!r}")
        toks.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    return toks


class _ExprParser:
    def __init__(self, text):
        self.toks = _tokenize_expr(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ScriptError("unexpected end of expression")
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next()
        if t != tok:
            raise ScriptError(f"expected {tok!r}, found {t!r}")

    def parse(self):
        e = self.expr()
        if self.peek() is not None:
            raise ScriptError(f"unexpected {self.peek()!r}")
        return e

    def expr(self):
        t = self.peek()
        if t in RULE_SIGNATURES:
            self.next()
            args = [self.arg(kind, t) for kind in RULE_SIGNATURES[t]]
            return ("rule", t, args)
        return self.thm_atom()

    def thm_atom(self):
        t = self.next()
        if t == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] in "`[),":
            raise ScriptError(f"expected a theorem, found {t!r}")
        return ("name", t)

    def arg(self, kind, rule):
        if kind == "h":
            return self.thm_atom()
        if kind == "t":
            t = self.next()
            if not t.startswith("`"):
                raise ScriptError(f"{rule}: expected a backquoted term, found {t!r}")
            return ("term", t[1:-1])
        # substitution list
        self.expect("[")
        pairs = []
        while self.peek() != "]":
            self.expect("(")
            a = self.next()
            self.expect(",")
            b = self.next()
            self.expect(")")
            if not (a.startswith("`") and b.startswith("`")):
                raise ScriptError(f"{rule}: substitution entries must be backquoted")
            pairs.append((a[1:-1], b[1:-1]))
            if self.peek() == ",":
                self.next()
        self.expect("]")
        return ("types" if kind == "Y" else "terms", pairs)


class Command:
    __slots__ = ("kind", "args", "text", "where")

    def __init__(self, kind, args, text, where):
        self.kind = kind
        self.args = args
        self.text = text
        self.where = where


def parse_command(text, where="<script>"):
    """Parse one non-blank, non-comment line."""
    text = text.strip()
    head = text.split(None, 1)[0]
    if head in _KEYWORDS:
        for kind, rx in _COMMANDS:
            if kind != head:
                continue
            m = rx.match(text)
            if m is None:
                raise ScriptError(f"malformed {kind} command")
            args = list(m.groups())
            if kind == "thm":
                args[1] = _ExprParser(args[1]).parse()
            elif kind == "assert_prints":
                args = [_ExprParser(args[0]).parse(), _unescape(args[1])]
            elif kind == "assert_fails":
                inner = args[0]
                inner_head = inner.split(None, 1)[0]
                if inner_head in _KEYWORDS:
                    args = [parse_command(inner, where), _unescape(args[1])]
                else:
                    args = [_ExprParser(inner).parse(), _unescape(args[1])]
            elif kind == "const":
                args[1] = args[1].strip().strip("`")
            elif kind == "tyop":
                args[1] = int(args[1])
            return Command(kind, args, text, where)
    return Command("eval", [_ExprParser(text).parse()], text, where)


def compile_script(text, filename="<script>"):
    """Parse a whole script into commands; raises ScriptError with location."""
    cmds = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        where = f"{filename}:{lineno}"
        try:
            cmds.append(parse_command(s, where))
        except ScriptError as e:
            raise ScriptError(f"{where}: {e}") from None
    return cmds


# ---------------------------------------------------------------------------
# Execution


def _failure_line(msg):
    return f'Exception: Failure "{msg}".'


class Transcript:
    def __init__(self):
        self.lines = []
        self.errors = []
        self.failed_assertions = 0

    @property
    def text(self):
        return "".join(line + "\n" for line in self.lines)

    @property
    def ok(self):
        return not self.errors and self.failed_assertions == 0

    @property
    def exit_code(self):
        return 0 if self.ok else 1


class Session:
    """One table, one set of named theorems."""

    def __init__(self, kernel="stateless", mode="linear", render=True, wrap=None):
        self.kernel = kernel
        self.mode = mode
        self.table, self.rules = make_backend(kernel, mode, wrap)
        self.thms = {}
        self.render = render

    # -- evaluation ---------------------------------------------------------

    def term(self, s):
        return parse_term(s, self.table)

    def eval(self, e):
        if e[0] == "name":
            try:
                return self.thms[e[1]]
            except KeyError:
                raise ScriptError(f"unknown theorem {e[1]}") from None
        _, rule, args = e
        vals = []
        for a in args:
            k = a[0]
            if k == "term":
                vals.append(self.term(a[1]))
            elif k == "types":
                vals.append([(parse_type(x, self.table), parse_type(y, self.table)) for x, y in a[1]])
            elif k == "terms":
                vals.append([(self.term(x), self.term(y)) for x, y in a[1]])
            else:
                vals.append(self.eval(a))
        return self.rules[rule](*vals)

    def show(self, th):
        return print_thm(th, self.table)

    # -- commands -----------------------------------------------------------

    def run(self, cmd, out):
        """Execute ``cmd``, appending transcript lines to ``out`` (a list, or
        None when not rendering).  Returns False if an assertion failed."""
        render = out is not None
        if render:
            out.append(f"# {cmd.text}")
        kind = cmd.kind
        if kind == "assert_fails":
            inner, msg = cmd.args
            try:
                if isinstance(inner, Command):
                    self._execute(inner, out)
                else:
                    th = self.eval(inner)
                    if render:
                        out.append(f"val it : thm = {self.show(th)}")
            except Failure as e:
                if render:
                    out.append(_failure_line(e))
                if str(e) == msg:
                    return True
                return self._assertion(out, f'expected Failure "{msg}", got Failure "{e}"')
            return self._assertion(out, f'expected Failure "{msg}", but it succeeded')
        if kind == "assert_prints":
            expr, expected = cmd.args
            try:
                th = self.eval(expr)
            except Failure as e:
                if render:
                    out.append(_failure_line(e))
                return self._assertion(out, f"expected {expected!r}, got Failure \"{e}\"")
            shown = self.show(th)
            if render:
                out.append(f"val it : thm = {shown}")
            if shown == expected:
                return True
            return self._assertion(out, f"expected {expected!r}, got {shown!r}")
        try:
            self._execute(cmd, out)
        except Failure as e:
            if render:
                out.append(_failure_line(e))
        return True

    def _assertion(self, out, msg):
        if out is not None:
            out.append(f"Assertion failed: {msg}")
        raise _AssertionFailed(msg)

    def _execute(self, cmd, out):
        kind = cmd.kind
        a = cmd.args
        table = self.table
        if kind in ("def", "axiom", "thm"):
            name = a[0]
            if kind == "def":
                th = table.new_basic_definition(self.term(a[1]))
            elif kind == "axiom":
                th = table.new_axiom(self.term(a[1]))
            else:
                th = self.eval(a[1])
            self.thms[name] = th
            if out is not None:
                out.append(f"val ( {name} ) : thm = {self.show(th)}")
            return
        if kind == "eval" or kind == "print":
            th = self.eval(a[0] if kind == "eval" else ("name", a[0]))
            if out is not None:
                out.append(f"val it : thm = {self.show(th)}")
            return
        if kind == "tyop":
            table.new_type(a[0], a[1])
        elif kind == "const":
            table.new_constant(a[0], parse_type(a[1], table))
        elif kind == "undo":
            table.undo_definition(a[0])
        else:
            raise ScriptError(f"cannot execute {kind} here")
        if out is not None:
            out.append("val it : unit = ()")


class _AssertionFailed(Exception):
    pass


def _read_prelude(prelude):
    if prelude is None or prelude is False:
        return None, None
    if prelude is True:
        return resources.files(__package__).joinpath("prelude.hol").read_text(), "<prelude>"
    with open(prelude) as f:
        return f.read(), str(prelude)


def run_commands(session, cmds, transcript, base_dir=".", stderr=None, render=True):
    """Execute compiled commands; diagnostics go to ``transcript.errors`` (and to
    ``stderr`` when given)."""
    out = transcript.lines if render else None

    def diag(msg):
        transcript.errors.append(msg)
        if stderr is not None:
            print(msg, file=stderr)

    for cmd in cmds:
        if cmd.kind == "include":
            path = os.path.join(base_dir, cmd.args[0].strip())
            if out is not None:
                out.append(f"# {cmd.text}")
            try:
                with open(path) as f:
                    sub = compile_script(f.read(), path)
            except (OSError, ScriptError) as e:
                diag(f"{cmd.where}: {e}")
                continue
            run_commands(session, sub, transcript, os.path.dirname(path), stderr, render)
            continue
        try:
            session.run(cmd, out)
        except _AssertionFailed as e:
            transcript.failed_assertions += 1
            diag(f"{cmd.where}: assertion failed: {e}")
        except ScriptError as e:
            if out is not None:
                out.append(f"Error: {e}")
            diag(f"{cmd.where}: {e}")


def run_script(script, kernel="stateless", mode="linear", prelude=True, render=True,
               stderr=None):
    """Run a script given as text (``str``) or as a path (``os.PathLike``).

    ``prelude`` is True for the packaged prelude, a path, or None for none.
    Returns a Transcript; the session is available as ``transcript.session``.
    """
    if isinstance(script, os.PathLike):
        path = os.fspath(script)
        with open(path) as f:
            text = f.read()
        filename, base_dir = path, os.path.dirname(path)
    else:
        text, filename, base_dir = script, "<script>", "."
    session = Session(kernel, mode, render)
    transcript = Transcript()
    transcript.session = session
    ptext, pname = _read_prelude(prelude)
    try:
        if ptext is not None:
            pre = Transcript()
            run_commands(session, compile_script(ptext, pname), pre, ".", stderr, render=False)
            transcript.errors.extend(pre.errors)
        cmds = compile_script(text, filename)
    except ScriptError as e:
        transcript.errors.append(str(e))
        if stderr is not None:
            print(e, file=stderr)
        return transcript
    run_commands(session, cmds, transcript, base_dir, stderr, render)
    return transcript


def _interactive(session, stdin, stdout, stderr):
    failed = 0
    while True:
        try:
            stdout.write("# ")
            stdout.flush()
            line = stdin.readline()
        except KeyboardInterrupt:
            break
        if not line:
            break
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        t = Transcript()
        try:
            cmds = [parse_command(s, "<stdin>")]
        except ScriptError as e:
            print(f"<stdin>: {e}", file=stderr)
            continue
        run_commands(session, cmds, t, ".", stderr)
        failed += t.failed_assertions
        # the echoed command is already on screen
        for out in t.lines:
            if not out.startswith("# "):
                stdout.write(out + "\n")
    stdout.write("\n")
    return 0 if failed == 0 else 1


def main(argv=None):
    ap = argparse.ArgumentParser(prog="repl", description="Run a kernel script or an interactive session.")
    ap.add_argument("--mode", choices=stateless_kernel.TRACKING_MODES, default="linear",
                    help="axiom tracking mode of the stateless kernel")
    ap.add_argument("--kernel", choices=KERNELS, default="stateless")
    ap.add_argument("--prelude", default=None, help="prelude script (default: packaged prelude)")
    ap.add_argument("--no-prelude", action="store_true")
    ap.add_argument("script", nargs="?")
    args = ap.parse_args(argv)
    prelude = None if args.no_prelude else (args.prelude or True)
    if args.script is None:
        session = Session(args.kernel, args.mode)
        ptext, pname = _read_prelude(prelude)
        if ptext is not None:
            pre = Transcript()
            run_commands(session, compile_script(ptext, pname), pre, ".", sys.stderr, render=False)
        return _interactive(session, sys.stdin, sys.stdout, sys.stderr)
    import pathlib

    t = run_script(pathlib.Path(args.script), args.kernel, args.mode, prelude, stderr=sys.stderr)
    sys.stdout.write(t.text)
    return t.exit_code


if __name__ == "__main__":
    sys.exit(main())
