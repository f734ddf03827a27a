"""Synthetic workloads and timing of the stateful and stateless kernels."""

import argparse
import gc
import json
import random
import statistics
import sys
import time

from . import core_types
from .core_types import Const, term_eq
from .repl import Session, Transcript, compile_script, run_commands
from .state import SymbolTable
from .syntax import parse_term, parse_type

CONFIGS = (
    ("stateful", "stateful", "linear"),
    ("stateless/none", "stateless", "none"),
    ("stateless/linear", "stateless", "linear"),
    ("stateless/precise", "stateless", "precise"),
)

PRELUDE = ["tyop num 0", "const 0 : num", "const 1 : num"]

# Primitive inferences performed by each generated command kind.
_COST = {"REFL": 1, "TRANS": 1, "MK_COMB": 3, "EQ_MP": 1, "SYM": 5, "AP_TERM": 2,
         "BETA": 1, "ASSUME": 1, "DEDUCT_ANTISYM": 1, "INST": 3, "TRANS_SYM": 11, "def": 0,
         "TRANS_fail": 0}

_MAX_SIZE = 40


def _atom(s):
    return s if " " not in s else f"({s})"


class _Gen:
    def __init__(self, seed, n_defs, chain_depth):
        self.rng = random.Random(seed)
        self.lines = list(PRELUDE)
        self.pool = []          # (name, lhs, rhs, size), all equations over num
        self.by_lhs = {}
        self.slot = 0
        self.mix = {k: 0 for k in _COST}
        self.inferences = 0
        self.consts = ["0", "1"]
        self.n_defs = n_defs
        self.depth = max(1, chain_depth)
        self.live = {}

    def emit(self, line, kind):
        self.lines.append(line)
        self.mix[kind] += 1
        self.inferences += _COST[kind]

    def fresh_name(self):
        # Names are recycled so the live set of theorems stays bounded.
        name = f"t{self.slot % 4096}"
        self.slot += 1
        self.live.pop(name, None)
        return name

    def remember(self, entry):
        lhs = entry[1]
        if len(self.pool) < 4096:
            self.pool.append(entry)
        else:
            self.pool[self.rng.randrange(len(self.pool))] = entry
        self.by_lhs.setdefault(lhs, []).append(entry)
        if len(self.by_lhs[lhs]) > 8:
            self.by_lhs[lhs].pop(0)

    def alive(self, entry):
        return self.live.get(entry[0]) is entry

    def definitions(self):
        self.lines.append("const suc : num->num")
        self.lines.append("const add : num->num->num")
        for i, ax in enumerate(("suc 0 = 1", "add 0 1 = 1", "add 1 0 = suc 0")):
            name = f"ax{i}"
            self.lines.append(f"axiom {name}: `{ax}`")
            lhs, rhs = ax.split(" = ")
            self._track(name, lhs, rhs)
        chains = (self.n_defs + self.depth - 1) // self.depth
        made = 0
        for j in range(chains):
            prev = self.rng.choice(["0", "1"])
            for k in range(self.depth):
                if made >= self.n_defs:
                    break
                c = f"c{j}_{k}"
                r = self.rng.random()
                if r < 0.5:
                    body = f"suc {prev}"
                elif r < 0.8:
                    body = f"add {prev} {self.rng.choice(['0', '1'])}"
                else:
                    body = f"add {self.rng.choice(['0', '1'])} {prev}"
                self.emit(f"def d{j}_{k}: `{c} = {body}`", "def")
                self._track(f"d{j}_{k}", c, body)
                self.consts.append(c)
                prev = c
                made += 1

    def _track(self, name, lhs, rhs):
        entry = (name, lhs, rhs, len(lhs) + len(rhs))
        self.live[name] = entry
        self.remember(entry)

    def pick(self, small=False):
        for _ in range(20):
            e = self.rng.choice(self.pool)
            if self.alive(e) and (not small or e[3] < _MAX_SIZE):
                return e
        return None

    def step(self):
        rng = self.rng
        r = rng.random()
        if r < 0.08 or not self.pool:
            t = rng.choice(self.consts)
            if rng.random() < 0.3:
                t = f"suc {t}"
            name = self.fresh_name()
            self.emit(f"thm {name} = REFL `{t}`", "REFL")
            self._track(name, t, t)
            return
        if r < 0.30:
            a = self.pick()
            if a is None:
                return
            cands = [e for e in self.by_lhs.get(a[2], ()) if self.alive(e)]
            if not cands:
                # close the gap with a reflexivity step on the right-hand side
                b_name = self.fresh_name()
                self.emit(f"thm {b_name} = REFL `{a[2]}`", "REFL")
                self._track(b_name, a[2], a[2])
                cands = [self.live[b_name]]
                if not self.alive(a):
                    return
            b = rng.choice(cands)
            name = self.fresh_name()
            self.emit(f"thm {name} = TRANS {a[0]} {b[0]}", "TRANS")
            self._track(name, a[1], b[2])
            return
        if r < 0.47:
            a = self.pick()
            if a is None:
                return
            name = self.fresh_name()
            self.emit(f"thm {name} = SYM {a[0]}", "SYM")
            self._track(name, a[2], a[1])
            return
        if r < 0.62:
            # reverse a two-step chain: from l = m and m = r derive r = l
            a = self.pick()
            if a is None:
                return
            cands = [e for e in self.by_lhs.get(a[2], ()) if self.alive(e)]
            if not cands:
                return
            b = rng.choice(cands)
            name = self.fresh_name()
            self.emit(f"thm {name} = TRANS (SYM {b[0]}) (SYM {a[0]})", "TRANS_SYM")
            self._track(name, b[2], a[1])
            return
        if r < 0.72:
            a = self.pick(small=True)
            if a is None:
                return
            name = self.fresh_name()
            self.emit(f"thm {name} = AP_TERM `suc` {a[0]}", "AP_TERM")
            self._track(name, f"suc {_atom(a[1])}", f"suc {_atom(a[2])}")
            return
        if r < 0.85:
            a = self.pick(small=True)
            b = self.pick(small=True)
            if a is None or b is None:
                return
            name = self.fresh_name()
            self.emit(f"thm {name} = MK_COMB (AP_TERM `add` {a[0]}) {b[0]}", "MK_COMB")
            self._track(name, f"add {_atom(a[1])} {_atom(b[1])}", f"add {_atom(a[2])} {_atom(b[2])}")
            return
        if r < 0.91:
            a = self.pick(small=True)
            if a is None:
                return
            e = self.fresh_name()
            self.emit(f"thm {e} = REFL `{a[1]} = {a[2]}`", "REFL")
            name = self.fresh_name()
            if not self.alive(a):
                return
            self.emit(f"thm {name} = EQ_MP {e} {a[0]}", "EQ_MP")
            self._track(name, a[1], a[2])
            return
        if r < 0.94:
            t = rng.choice(self.consts)
            name = self.fresh_name()
            self.emit(f"thm {name} = BETA `(\\x. suc x) x`", "BETA")
            name = self.fresh_name()
            self.emit(f"thm {name} = AP_TERM `suc` (REFL `{t}`)", "AP_TERM")
            self._track(name, f"suc {t}", f"suc {t}")
            return
        if r < 0.96:
            a = self.pick(small=True)
            if a is None:
                return
            h = self.fresh_name()
            self.emit(f"thm {h} = ASSUME `{a[1]} = {a[2]}`", "ASSUME")
            name = self.fresh_name()
            if not self.alive(a):
                return
            self.emit(f"thm {name} = DEDUCT_ANTISYM {h} {a[0]}", "DEDUCT_ANTISYM")
            return
        if r < 0.98:
            name = self.fresh_name()
            t = rng.choice(self.consts)
            self.emit(f"thm {name} = INST [(`{t}`, `x:num`)] (ABS `y:num` (REFL `x:num`))", "INST")
            return
        # A deliberately rejected step, as in interactive use.
        a = self.pick()
        b = self.pick()
        if a is None or b is None or a[2] == b[1]:
            return
        self.emit(f"assert_fails TRANS {a[0]} {b[0]} \"TRANS\"", "TRANS_fail")


def gen_workload(seed, n_defs, n_inferences, chain_depth, with_stats=False):
    """A self-contained script (it declares its own prelude).

    ``n_defs`` constants are defined in chains of length ``chain_depth``, each
    in terms of its predecessor, then roughly ``n_inferences`` primitive
    inferences are performed over them.
    """
    g = _Gen(seed, n_defs, chain_depth)
    if n_defs or n_inferences:
        g.definitions()
        while g.inferences < n_inferences:
            g.step()
    text = "\n".join(g.lines) + "\n"
    if with_stats:
        return text, {"commands": len(g.lines), "estimated_inferences": g.inferences, "mix": g.mix}
    return text


# ---------------------------------------------------------------------------


def _count_primitives(cmds):
    counts = {}

    def wrap(name, fn):
        def counted(*args):
            counts[name] = counts.get(name, 0) + 1
            return fn(*args)

        return counted

    session = Session("stateless", "none", render=False, wrap=wrap)
    t = Transcript()
    run_commands(session, cmds, t, render=False)
    return counts


def _time_once(cmds, kernel, mode):
    session = Session(kernel, mode, render=False)
    t = Transcript()
    gc.collect()
    gc.disable()
    try:
        start = time.perf_counter()
        run_commands(session, cmds, t, render=False)
        elapsed = time.perf_counter() - start
    finally:
        gc.enable()
    if not t.ok:
        raise RuntimeError(f"benchmark script failed under {kernel}/{mode}: {t.errors[:3]}")
    return elapsed


def check_transcripts(cmds):
    """Run every configuration with full transcripts; they must agree."""
    texts = {}
    for label, kernel, mode in CONFIGS:
        session = Session(kernel, mode)
        t = Transcript()
        run_commands(session, cmds, t)
        if not t.ok:
            raise RuntimeError(f"benchmark script failed under {label}: {t.errors[:3]}")
        texts[label] = t.text
    ref = texts["stateful"]
    for label, text in texts.items():
        if text != ref:
            raise RuntimeError(f"transcript of {label} differs from the stateful kernel")
    return ref


def equality_microbench(depth=100, comparisons=10_000, reps=5):
    """Time term_eq on two distinct but equal constants at the end of a
    definition chain, with the identity fast path on and off."""
    table = SymbolTable("none")
    table.new_type("num", 0)
    table.new_constant("0", parse_type("num", table))
    table.new_constant("suc", parse_type("num->num", table))
    prev = "0"
    for k in range(depth):
        table.new_basic_definition(parse_term(f"c{k} = suc {prev}", table))
        prev = f"c{k}"
    a = table.mk_const(prev)
    b = Const(a.name, a.ty, a.tag)

    def run(enabled, reps):
        times = []
        with core_types.fast_path(enabled):
            core_types.reset_payload_traversals()
            for _ in range(reps):
                start = time.perf_counter()
                for _ in range(comparisons):
                    if not term_eq(a, b):
                        raise AssertionError("equal constants compared unequal")
                times.append(time.perf_counter() - start)
            traversals = core_types.payload_traversals
        return statistics.median(times), traversals

    on, on_trav = run(True, reps)
    # Each slow comparison walks the whole chain, so one pass is plenty.
    off, off_trav = run(False, 1)
    return {
        "depth": depth,
        "comparisons": comparisons,
        "fast_path_on_s": on,
        "fast_path_off_s": off,
        "slowdown": off / on if on > 0 else float("inf"),
        "payload_traversals_on": on_trav,
        "payload_traversals_off": off_trav,
    }


def run_bench(defs=100, inferences=100_000, depth=50, reps=5, seed=7, check=True,
              equality=True):
    script, stats = gen_workload(seed, defs, inferences, depth, with_stats=True)
    cmds = compile_script(script, "<workload>")
    if check:
        check_transcripts(cmds)
    counts = _count_primitives(cmds)
    samples = {label: [] for label, _, _ in CONFIGS}
    for _, kernel, mode in CONFIGS:
        _time_once(cmds, kernel, mode)  # warmup
    for rep in range(reps):
        # rotate the order so no configuration always runs first or last
        k = rep % len(CONFIGS)
        for label, kernel, mode in CONFIGS[k:] + CONFIGS[:k]:
            samples[label].append(_time_once(cmds, kernel, mode))
    medians = {label: statistics.median(v) for label, v in samples.items()}
    base = medians["stateful"]
    overhead = {label: 100.0 * (m - base) / base for label, m in medians.items()}
    report = {
        "workload": {"seed": seed, "defs": defs, "inferences": inferences, "depth": depth,
                     "commands": stats["commands"], "command_mix": stats["mix"],
                     "primitive_inferences": sum(counts.values()),
                     "primitive_counts": counts},
        "reps": reps,
        "transcripts_checked": bool(check),
        "median_s": medians,
        "samples_s": samples,
        "overhead_pct": overhead,
    }
    if equality:
        report["equality"] = equality_microbench()
    return report


def format_table(report):
    rows = [("kernel", "median s", "overhead")]
    for label, _, _ in CONFIGS:
        rows.append((label, f"{report['median_s'][label]:.3f}",
                     f"{report['overhead_pct'][label]:+.1f}%"))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
             for r in rows]
    w = report["workload"]
    lines.insert(0, f"workload: {w['defs']} defs, depth {w['depth']}, "
                    f"{w['primitive_inferences']} primitive inferences, {report['reps']} reps")
    eq = report.get("equality")
    if eq:
        lines.append(f"equality at depth {eq['depth']} x{eq['comparisons']}: "
                     f"fast path on {eq['fast_path_on_s'] * 1e3:.2f} ms, "
                     f"off {eq['fast_path_off_s'] * 1e3:.2f} ms ({eq['slowdown']:.1f}x), "
                     f"payload traversals with fast path: {eq['payload_traversals_on']}")
    return "\n".join(lines)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="bench", description="Compare kernel running times.")
    ap.add_argument("--defs", type=int, default=100)
    ap.add_argument("--inferences", type=int, default=100_000)
    ap.add_argument("--depth", type=int, default=50)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=None, help="write the JSON report here")
    ap.add_argument("--no-check", action="store_true", help="skip the transcript comparison")
    args = ap.parse_args(argv)
    report = run_bench(args.defs, args.inferences, args.depth, args.reps, args.seed,
                       check=not args.no_check)
    print(format_table(report))
    if args.out:
        with open(args.out, "w") as f:
            json.dump(report, f, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
