"""Acceptance suite: every criterion as a timed pass/fail check."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, List, Optional, Set, Tuple

from .automata import accepts, enumerate_language, finite_automaton, parse_automaton
from .classifier import BOTTOMUP, CLASSES, PREFIX, SUFFIX, TOPDOWN, classify, encode_turing_machine, parse_tm
from .generators import random_ground_terms, random_systems
from .grammars import enumerate_tuples, iterate_subst, parse_grammar, subst_product
from .rewriting import Trs, parse_trs, reachable, suffix_reachable, topdown_reachable
from .suffix import (
    bridge_violations,
    build_suffix_grammar,
    image_automaton_suffix,
    saturate,
    to_state_system,
    two_phase_reachable,
)
from .terms import App, RankedAlphabet, Term, Var, format_term, ground_terms, hole, parse_term, size
from .topdown import ClassVeto, bounded_preimages, build_grammar, image_automaton, overlap_set, refuse_inverse_image


def data_text(name: str) -> str:
    return resources.files("ratrw").joinpath("data", name).read_text(encoding="utf-8")


def load_data_trs(name: str) -> Trs:
    return parse_trs(data_text(name))


def g_pow(n: int, t: Term) -> Term:
    for _ in range(n):
        t = App("g", (t,))
    return t


@dataclass
class AcceptanceConfig:
    pair_bound: int = 7          # criterion 2: both sides of a pair
    pair_slack: int = 13         # criterion 2: oracle size cap
    pair_steps: int = 12
    random_systems: int = 50
    system_seed: int = 2024
    seeds_per_system: int = 20
    seed_size: int = 6
    fixpoint_size: int = 12      # criterion 3: size cap of the fixpoints
    reference_size: int = 20
    image_bound: int = 12
    image_slack: int = 6
    suffix_pairs: int = 8
    suffix_slack: int = 14
    two_phase_bound: int = 7
    bridge_bound: int = 6
    prop3_bound: int = 8
    rational_bound: int = 11


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    limit: float
    detail: str = ""

    @property
    def in_time(self) -> bool:
        return self.seconds <= self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        timing = f"{self.seconds:.1f}s/{self.limit:.0f}s"
        if self.passed and not self.in_time:
            timing += " (over time)"
        return f"[{status}] {self.number}. {self.title} ({timing}) {self.detail}".rstrip()


def _pairs_upto(G, bound: int) -> Set[Tuple[Term, Term]]:
    return set(enumerate_tuples(G, None, 2 * bound, max_component=bound))


def _oracle_pairs(R: Trs, bound: int, slack: int, steps: Optional[int]) -> Set[Tuple[Term, Term]]:
    out = set()
    for s in ground_terms(R.alphabet, bound):
        for t in reachable(R, s, max_steps=steps, max_size=slack):
            if size(t) <= bound:
                out.add((s, t))
    return out


# ---------------------------------------------------------------------------

def c1_reference_grammar(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    R = load_data_trs("topdown_fg.trs")
    O = [o.context for o in overlap_set(R)]
    expected_o = [hole(1), App("f", (hole(1), hole(2)))]
    G = build_grammar(R)
    E = parse_grammar(data_text("fg_reference.grammar"))
    ours = enumerate_tuples(G, None, cfg.reference_size)
    ref = enumerate_tuples(E, None, cfg.reference_size)
    ok = O == expected_o and ours == ref
    return ok, f"O={{{', '.join(map(format_term, O))}}}, {len(ours)} vs {len(ref)} tuples"


def c2_topdown_oracle(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    systems = [load_data_trs("topdown_fg.trs")] + random_systems(cfg.system_seed, cfg.random_systems)
    bad = []
    total = 0
    for k, R in enumerate(systems):
        G = build_grammar(R)
        ours = _pairs_upto(G, cfg.pair_bound)
        oracle = _oracle_pairs(R, cfg.pair_bound, cfg.pair_slack, cfg.pair_steps)
        total += len(oracle)
        if ours != oracle:
            bad.append(k)
    return not bad, f"{len(systems)} systems, {total} pairs, mismatches {bad}"


def c3_topdown_restriction(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    bad = 0
    checked = 0
    for k, R in enumerate(random_systems(cfg.system_seed, cfg.random_systems)):
        rng = random.Random(k)
        for s in random_ground_terms(rng, R.alphabet, cfg.seeds_per_system, cfg.seed_size):
            checked += 1
            a = {t for t in reachable(R, s, None, cfg.fixpoint_size) if size(t) <= cfg.seed_size}
            b = {t for t in topdown_reachable(R, s, None, cfg.fixpoint_size) if size(t) <= cfg.seed_size}
            bad += a != b
    return bad == 0, f"{checked} seeds, {bad} differ"


def c4_classification(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    fg = load_data_trs("topdown_fg.trs")
    cases = [
        ("fg", fg, {TOPDOWN}),
        ("fg inverse", fg.inverse(), {BOTTOMUP}),
        ("swap/pump", load_data_trs("swap_pump.trs"), None),
        ("g->fgf", load_data_trs("nested_g.trs"), None),
        ("tm", encode_turing_machine(parse_tm(data_text("one_step.tm"))), {PREFIX}),
    ]
    wrong = []
    for name, R, want in cases:
        got = set(classify(R).classes)
        if name == "swap/pump":
            good = SUFFIX in got
        elif name == "g->fgf":
            good = TOPDOWN not in got
        else:
            good = got == want
        if not good:
            wrong.append(f"{name}: {sorted(got)}")
    return not wrong, "; ".join(wrong) or "5/5 rows"


def c5_topdown_image(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    R = load_data_trs("topdown_fg.trs")
    A = parse_automaton(data_text("fgga.aut"))
    seeds = enumerate_language(A, cfg.image_bound)
    image = image_automaton(R, A)
    oracle = set()
    for s in seeds:
        oracle |= reachable(R, s, None, cfg.image_bound + cfg.image_slack)
    bad = 0
    count = 0
    for t in ground_terms(R.alphabet, cfg.image_bound):
        count += 1
        bad += accepts(image, t) != (t in oracle)
    return bad == 0, f"{count} terms, {bad} disagree, image size {len({t for t in oracle if size(t) <= cfg.image_bound})}"


def c6_suffix_pipeline(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    R = load_data_trs("swap_pump.trs")
    T = saturate(to_state_system(R))
    viol = bridge_violations(T, cfg.bridge_bound)
    two_phase_bad = 0
    for s in ground_terms(R.alphabet, cfg.two_phase_bound):
        bound = cfg.two_phase_bound + 2
        a = {t for t in suffix_reachable(R, s, None, bound) if size(t) <= cfg.two_phase_bound}
        b = {t for t in two_phase_reachable(T, s, bound) if size(t) <= cfg.two_phase_bound and not _has_var(t)}
        two_phase_bad += a != b
    G = build_suffix_grammar(R, T)
    ours = _pairs_upto(G, cfg.suffix_pairs)
    oracle = _oracle_pairs(R, cfg.suffix_pairs, cfg.suffix_slack, None)
    a = App("a", ())
    swaps = {(App("f", (g_pow(m, a), g_pow(n, a))), App("f", (g_pow(n, a), g_pow(m, a))))
             for m in range(3) for n in range(3)}
    ok = not viol and two_phase_bad == 0 and ours == oracle and swaps <= ours
    return ok, (f"bridge violations {len(viol)}; two-phase mismatches {two_phase_bad}; "
                f"{len(ours)} vs {len(oracle)} pairs; swaps {'in' if swaps <= ours else 'missing'}")


def _has_var(t: Term) -> bool:
    return isinstance(t, Var) or any(_has_var(a) for a in t.args)


def c7_suffix_images(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    R = load_data_trs("swap_pump.trs")
    A = parse_automaton(data_text("faa.aut"))
    G = build_suffix_grammar(R)
    fwd = enumerate_language(image_automaton_suffix(R, A, "forward", G), cfg.prop3_bound)
    inv = enumerate_language(image_automaton_suffix(R, A, "inverse", G), cfg.prop3_bound)
    seeds = enumerate_language(A, cfg.prop3_bound)
    slack = cfg.prop3_bound + 6
    want_fwd = {t for s in seeds for t in reachable(R, s, None, slack) if size(t) <= cfg.prop3_bound}
    want_inv = {s for s in ground_terms(R.alphabet, cfg.prop3_bound)
                if reachable(R, s, None, slack) & seeds}
    ok = fwd == want_fwd and inv == want_inv
    return ok, f"forward {len(fwd)}/{len(want_fwd)}, inverse {len(inv)}/{len(want_inv)}"


def c8_negative_controls(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    notes = []
    R = load_data_trs("nested_g.trs")
    a = App("a", ())

    def f_pow(n, t):
        for _ in range(n):
            t = App("f", (t,))
        return t

    want = {f_pow(n, App("g", (f_pow(n, a),))) for n in range(5)}
    got = reachable(R, App("g", (a,)), max_steps=4)
    ok_a = got == want
    try:
        build_grammar(R)
        refused = False
    except ClassVeto:
        refused = True
    notes.append(f"(a) closure {'ok' if ok_a else 'wrong'}, builder {'refuses' if refused else 'accepts'}")
    fg = load_data_trs("topdown_fg.trs")
    try:
        refuse_inverse_image(fg)
        vetoed = False
    except ClassVeto:
        vetoed = True
    t1 = parse_term("h(f(a,a))")
    t2 = parse_term("h(h(f(a,a)))")
    G = build_grammar(fg)
    pre1 = bounded_preimages(fg, [t1], 9, G)
    pre2 = bounded_preimages(fg, [t2], 9, G)
    ok_b = vetoed and pre1 == {t1, parse_term("f(g(a),g(a))")} and parse_term("f(g(g(a)),g(g(a)))") in pre2
    notes.append(f"(b) inverse {'vetoed' if vetoed else 'allowed'}, preimages {len(pre1)}/{len(pre2)}")
    return ok_a and refused and ok_b, "; ".join(notes)


def c9_rational_expression(cfg: AcceptanceConfig) -> Tuple[bool, str]:
    x = ("□1", "□2")
    h1, h2 = Var(x[0]), Var(x[1])
    a = App("a", ())
    outer = [(App("f", (h1, h2)),)]
    step = [(App("g", (h1,)), App("g", (h2,)))]
    star = iterate_subst(step, x, cfg.rational_bound)
    got = subst_product(subst_product(outer, x, star, cfg.rational_bound), x, [(a, a)], cfg.rational_bound)
    want = {(App("f", (g_pow(n, a), g_pow(n, a))),) for n in range(4)}
    ns = sorted((size(w[0]) - 3) // 2 for w in got)
    return set(got) == want, f"got n in {ns}, expected n <= 3"


CRITERIA: List[Tuple[int, str, float, Callable[[AcceptanceConfig], Tuple[bool, str]]]] = [
    (1, "reference grammar reproduction", 10, c1_reference_grammar),
    (2, "top-down grammar = oracle pairs", 120, c2_topdown_oracle),
    (3, "top-down restricted reachability", 60, c3_topdown_restriction),
    (4, "classification table", 1, c4_classification),
    (5, "top-down image automaton", 30, c5_topdown_image),
    (6, "suffix pipeline", 180, c6_suffix_pipeline),
    (7, "suffix image and inverse image", 60, c7_suffix_images),
    (8, "negative controls", 30, c8_negative_controls),
    (9, "rational expression evaluation", 1, c9_rational_expression),
]


def run_criterion(number: int, cfg: Optional[AcceptanceConfig] = None) -> CriterionResult:
    cfg = cfg or AcceptanceConfig()
    for n, title, limit, fn in CRITERIA:
        if n == number:
            t0 = time.perf_counter()
            try:
                passed, detail = fn(cfg)
            except Exception as exc:  # a crash is a failure, reported not raised
                passed, detail = False, f"error: {type(exc).__name__}: {exc}"
            return CriterionResult(n, title, passed, time.perf_counter() - t0, limit, detail)
    raise KeyError(number)


def run_all(cfg: Optional[AcceptanceConfig] = None, only: Optional[List[int]] = None) -> List[CriterionResult]:
    return [run_criterion(n, cfg) for n, *_ in CRITERIA if only is None or n in only]
