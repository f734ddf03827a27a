"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import pathlib
import random
import time

from oracles import A, oracle_aconv, oracle_frees, random_pairs, rebuild
from stateless_hol import bench, kernel
from stateless_hol.core_types import (
    BOOL_TY,
    EMPTY_CONTEXT,
    Comb,
    Defined,
    Failure,
    Var,
    aconv,
    inst_type,
    mk_fun_ty,
    safe_mk_eq,
    type_of,
    type_subst,
    vsubst,
)
from stateless_hol.repl import Session, compile_script, derived_rules, parse_command, run_script
from stateless_hol.state import SymbolTable
from test_core_types import _gen
from test_syntax import generated_terms, round_trip_failures

GOLDEN = pathlib.Path(__file__).parent / "golden"
SYM = derived_rules(kernel.PRIMITIVE_RULES)["SYM"]


# ---------------------------------------------------------------------------
# 1. Session fidelity


def test_criterion_1_session_fidelity(criterion):
    start = time.perf_counter()
    results = {}
    for name, kern in [("session_stateless", "stateless"), ("session_stateful", "stateful")]:
        script = GOLDEN / f"{name}.hol"
        t = run_script(script, kern)
        results[name] = (t.text == script.with_suffix(".out").read_text(), t.exit_code)
    elapsed = time.perf_counter() - start
    stateless = (GOLDEN / "session_stateless.out").read_text()
    stateful = (GOLDEN / "session_stateful.out").read_text()
    content = (
        'val ( X1 ) : thm = |- X = 1' in stateless
        and 'Exception: Failure "TRANS".' in stateless
        and stateless.endswith("# print X0\nval it : thm = <obsolete theorem>\n# print X1\nval it : thm = |- X = 1\n")
        and '# def X1: `X = 1`\nException: Failure "new_basic_definition".' in stateful
    )
    ok = all(same and code == 0 for same, code in results.values()) and content and elapsed < 1.0
    criterion(1, "session fidelity", ok, f"{elapsed * 1e3:.0f} ms, byte-exact={[r[0] for r in results.values()]}")
    assert ok


# ---------------------------------------------------------------------------
# 2. Soundness under interleaved definitions, undos and redefinitions


def _model_value(tm):
    """Value of a closed term in the standard model of the tiny signature
    0, 1, "=" and defined constants (unfolded through their tags)."""
    k = tm.kind
    if k == "const":
        if tm.name == "0":
            return 0
        if tm.name == "1":
            return 1
        tag = getattr(tm, "tag", None)
        if isinstance(tag, Defined):
            return _model_value(tag.defn.arg)
        raise LookupError(tm.name)
    if k == "comb" and tm.fn.kind == "comb" and tm.fn.fn.kind == "const" and tm.fn.fn.name == "=":
        return _model_value(tm.fn.arg) == _model_value(tm.arg)
    raise LookupError(repr(tm))


def _is_zero_eq_one(th):
    c = th.concl
    return (not th.hyps and c.kind == "comb" and c.fn.kind == "comb"
            and {c.fn.arg.name, c.arg.name} == {"0", "1"}
            and c.fn.arg.kind == "const" and c.arg.kind == "const")


def _same_name_distinct_tags(th):
    c = th.concl
    if c.kind != "comb" or c.fn.kind != "comb":
        return False
    lhs, rhs = c.fn.arg, c.arg
    return (lhs.kind == "const" and rhs.kind == "const" and lhs.name == rhs.name
            and getattr(lhs, "tag", None) != getattr(rhs, "tag", None))


_CHAINS = [
    "TRANS {a} {b}",
    "TRANS (SYM {a}) {b}",
    "TRANS {a} (SYM {b})",
    "TRANS (SYM {a}) (SYM {b})",
    "EQ_MP {a} {b}",
    "MK_COMB (AP_TERM `(=):num->num->bool` {a}) {b}",
]


def _attempt(rng, session):
    """One random script against ``session``; returns (script lines, violations,
    whether two same-named constants with different definitions coexisted)."""
    names = ["X", "Y"]
    defined = set()
    lines = []
    thms = []
    violations = []
    same_name_true = []
    stale = {}
    for i in range(rng.randint(4, 12)):
        r = rng.random()
        name = rng.choice(names)
        if r < 0.4:
            others = sorted(defined - {name})
            body = rng.choice(["0", "1"] + others)
            line = f"def D{i}: `{name} = {body}`"
        elif r < 0.6:
            line = f"undo {name}"
        else:
            if len(thms) < 1:
                continue
            a, b = rng.choice(thms), rng.choice(thms)
            line = f"thm T{i} = " + rng.choice(_CHAINS).format(a=a, b=b)
        lines.append(line)
        before = len(session.thms)
        session.run(parse_command(line), None)
        if line.startswith("undo"):
            defined.discard(name)
        elif line.startswith("def") and len(session.thms) > before:
            defined.add(name)
            th = session.thms[f"D{i}"]
            stale.setdefault(name, set()).add(th.concl.fn.arg)
        if len(session.thms) > before:
            label = line.split()[1].rstrip(":")
            thms.append(label)
            th = session.thms[label]
            if _is_zero_eq_one(th):
                violations.append((label, "|- 0 = 1"))
            try:
                true = _model_value(th.concl)
            except LookupError:
                true = None
            if _same_name_distinct_tags(th):
                # Two definitions of one name may still denote the same value,
                # in which case the equation is a genuine theorem.
                if true:
                    same_name_true.append(label)
                else:
                    violations.append((label, "same name, distinct tags, different values"))
            elif true is False and not th.hyps:
                violations.append((label, "false in the standard model"))
    conflict = any(len(cs) > 1 for cs in stale.values())
    return lines, violations, conflict, same_name_true


def _search(make_session, attempts, seed):
    rng = random.Random(seed)
    found = []
    conflicts = 0
    same_name_true = 0
    for _ in range(attempts):
        lines, violations, conflict, benign = _attempt(rng, make_session())
        conflicts += conflict
        same_name_true += len(benign)
        if violations:
            found.append((lines, violations))
    return found, conflicts, same_name_true


def _prelude_session(kern):
    s = Session(kern, "none", render=False)
    for line in bench.PRELUDE:
        s.run(parse_command(line), None)
    return s


def _naive_undo_session():
    # Negative control: the stateful kernel with the textbook unsound undo
    # that simply forgets the name.
    s = _prelude_session("stateful")
    constants = s.table._constants
    s.table.undo_definition = lambda name: constants.pop(name, None)
    return s


def test_criterion_2_soundness(criterion):
    found, conflicts, benign = _search(lambda: _prelude_session("stateless"), 10_000, 2)
    control, _, _ = _search(_naive_undo_session, 2000, 2)
    ok = not found and conflicts > 1000 and bool(control)
    criterion(2, "soundness with undo", ok,
              f"10000 attempts, {conflicts} with redefined constants, {len(found)} violations, "
              f"{benign} true equations between equal-valued redefinitions; "
              f"naive-undo control caught {len(control)}/2000")
    assert not found, found[:1]
    assert conflicts > 1000
    assert control, "the exploit detector never fired on the unsound control"


# ---------------------------------------------------------------------------
# 3. Oracle equivalence on undo-free scripts


def test_criterion_3_oracle_equivalence(criterion):
    modes = ["none", "linear", "precise"]
    mismatches = []
    sizes = []
    for seed in range(100):
        script, stats = bench.gen_workload(seed, 10, 4000, 5, with_stats=True)
        sizes.append(stats["commands"])
        cmds = compile_script(script)
        assert not any(c.kind == "undo" for c in cmds)
        ref = run_script(script, "stateful", prelude=None)
        new = run_script(script, "stateless", modes[seed % 3], prelude=None)
        if ref.text != new.text or not ref.ok or not new.ok:
            mismatches.append(seed)
    ok = not mismatches and min(sizes) >= 1000
    criterion(3, "oracle equivalence", ok,
              f"100 scripts, {min(sizes)}..{max(sizes)} commands, mismatched seeds {mismatches}")
    assert ok


# ---------------------------------------------------------------------------
# 4. Axiom tracking


def _derive_with_axioms(mode, rng, count=150):
    """Three axioms, then ``count`` random derivations from them.  Each result
    is paired with the set of axiom indices its derivation used."""
    table = SymbolTable(mode)
    table.new_type("num", 0)
    num = table.mk_type("num")
    table.new_constant("0", num)
    table.new_constant("1", num)
    zero, one = table.mk_const("0"), table.mk_const("1")
    s = Var("s", mk_fun_ty(num, num))
    axioms = [
        table.new_axiom(safe_mk_eq(zero, one)),
        table.new_axiom(safe_mk_eq(one, zero)),
        table.new_axiom(safe_mk_eq(Comb(s, zero), zero)),
    ]
    pool = [(a, {i}) for i, a in enumerate(axioms)] + [(kernel.refl(zero), set())]
    derived = []
    while len(derived) < count:
        (a, da), (b, db) = rng.choice(pool), rng.choice(pool)
        rule = rng.randrange(5)
        try:
            if rule == 0:
                entry = (kernel.trans(a, b), da | db)
            elif rule == 1:
                entry = (SYM(a), da)
            elif rule == 2:
                entry = (kernel.mk_comb(kernel.refl(s), a), da)
            elif rule == 3:
                entry = (kernel.eq_mp(a, b), da | db)
            else:
                entry = (kernel.deduct_antisym(a, b), da | db)
        except Failure:
            continue
        pool.append(entry)
        derived.append(entry)
    return table, derived


def test_criterion_4_axiom_tracking(criterion):
    rng = random.Random(4)
    # (a) linear: contexts are suffix views of the one global history
    table, derived = _derive_with_axioms("linear", rng)
    g = table.current_ctx
    linear_ok = g.n == 3 and [len(h) for h in g.history] == [3, 2, 1, 0]
    for th, deps in derived:
        c = th.ctx
        linear_ok &= c.n == (max(deps) + 1 if deps else 0)
        linear_ok &= all(c.history[i] is g.history[g.n - c.n + i] for i in range(c.n + 1))
    # (b) precise: set bits name exactly the axioms used, all present in history[0]
    table_p, derived_p = _derive_with_axioms("precise", random.Random(4))
    precise_ok = True
    for th, deps in derived_p:
        c = th.ctx
        bits = {i for i in range(kernel.MASK_BITS) if c.mask >> i & 1}
        precise_ok &= bits == deps and all(i < c.n for i in bits)
        precise_ok &= all(table_p.axioms[::-1][i].concl in c.history[0] for i in bits)
    mixed = sum(len(d) >= 2 for _, d in derived)
    # (c) independent one-axiom contexts
    p = Var("p", BOOL_TY)
    a1, c1 = kernel.axiom_sequent(EMPTY_CONTEXT, p)
    a2, c2 = kernel.axiom_sequent(EMPTY_CONTEXT, p)
    merge_msgs = []
    for f in (lambda: kernel.merge_contexts(c1, c2), lambda: kernel.deduct_antisym(a1, a2)):
        try:
            f()
            merge_msgs.append(None)
        except Failure as e:
            merge_msgs.append(str(e))
    merge_ok = merge_msgs == ["merge_contexts", "merge_contexts"]
    # (d) the 33rd axiom in precise mode
    t = SymbolTable("precise")
    for i in range(32):
        t.new_axiom(Var(f"a{i}", BOOL_TY))
    try:
        t.new_axiom(p)
        limit_msg = None
    except Failure as e:
        limit_msg = str(e)
    limit_ok = limit_msg == "axiom_sequent: mask full"
    ok = linear_ok and precise_ok and merge_ok and limit_ok and len(derived) >= 100 and mixed >= 10
    criterion(4, "axiom tracking", ok,
              f"a={linear_ok} b={precise_ok} c={merge_ok} d={limit_ok}; "
              f"{len(derived)} theorems, {mixed} using two or more axioms")
    assert ok


# ---------------------------------------------------------------------------
# 5. Performance shape


def test_criterion_5_performance_shape(criterion):
    start = time.perf_counter()
    report = bench.run_bench(defs=100, inferences=100_000, depth=50, reps=7, seed=7,
                             check=True, equality=False)
    elapsed = time.perf_counter() - start
    oh = report["overhead_pct"]
    modes = [oh["stateless/none"], oh["stateless/linear"], oh["stateless/precise"]]
    spread = max(modes) - min(modes)
    w = report["workload"]
    ok = (w["primitive_inferences"] >= 100_000 and w["depth"] >= 50 and oh["stateless/none"] < 50
          and spread <= 10 and elapsed < 120)
    criterion(5, "performance shape", ok,
              f"{w['primitive_inferences']} inferences, overhead none/linear/precise "
              f"{modes[0]:+.1f}/{modes[1]:+.1f}/{modes[2]:+.1f}%, spread {spread:.1f} pts, {elapsed:.0f} s")
    assert ok


# ---------------------------------------------------------------------------
# 6. Equality fast path


def test_criterion_6_equality_fast_path(criterion):
    r = bench.equality_microbench(depth=100, comparisons=10_000)
    ok = r["slowdown"] >= 5 and r["payload_traversals_on"] == 0 and r["payload_traversals_off"] > 0
    criterion(6, "equality fast path", ok,
              f"on {r['fast_path_on_s'] * 1e3:.1f} ms, off {r['fast_path_off_s'] * 1e3:.0f} ms, "
              f"{r['slowdown']:.0f}x, traversals on={r['payload_traversals_on']}")
    assert ok


# ---------------------------------------------------------------------------
# 7. Core property suites


def _no_capture(n, seed):
    rng = random.Random(seed)
    gen = _gen(rng)
    checked = 0
    for _ in range(n):
        t = gen.term(gen.ty(1))
        fv = sorted(oracle_frees(t), key=repr)
        if not fv:
            continue
        theta = [(gen.term(ty, 2), Var(name, ty)) for name, ty in fv[: rng.randint(1, len(fv))]]
        r = vsubst(theta, t)
        dom = {(v.name, v.ty) for _, v in theta}
        allowed = set().union(*(oracle_frees(s) for s, _ in theta)) | (oracle_frees(t) - dom)
        if not oracle_frees(r) <= allowed or type_of(r) != type_of(t):
            return False, checked
        # substituting back the variables themselves is the identity up to alpha
        if not aconv(vsubst([(v, v) for _, v in theta], t), t):
            return False, checked
        checked += 1
    return True, checked


def _identity(n, seed):
    for a, _ in random_pairs(seed, n, _gen):
        if vsubst([], a) is not a or inst_type([], a) is not a:
            return False
        ty = type_of(a)
        if type_subst([], ty) is not ty:
            return False
        c = rebuild(a)
        if inst_type([(BOOL_TY, A)], c) != c:  # no A in the generator's terms
            return False
    return True


def test_criterion_7_core_properties(criterion, rich):
    capture_ok, captured = _no_capture(3000, 70)
    pairs = random_pairs(77, 10_000, _gen)
    alpha_ok = all(aconv(a, b) == oracle_aconv(a, b) for a, b in pairs)
    positives = sum(oracle_aconv(a, b) for a, b in pairs)
    ident_ok = _identity(2000, 71)
    terms, _ = generated_terms(rich, 99, 1000)
    failures = round_trip_failures(rich, terms)
    rt_ok = not failures
    ok = capture_ok and alpha_ok and ident_ok and rt_ok and captured > 1000 and positives > 1000
    criterion(7, "core property suites", ok,
              f"no-capture={capture_ok} ({captured}), alpha vs de Bruijn={alpha_ok} "
              f"(10000 pairs, {positives} alpha-equal), identity={ident_ok}, "
              f"round trip={rt_ok} (1000 terms)")
    assert ok, failures[:3]
