"""Sequent calculus proof trees.

Every inference is built by a rule constructor that computes the conclusion
from the premises and records, per conclusion occurrence, which premise
occurrences it descends from.  That flow relation is the single source of
truth for the checker, ancestor marking, and the extraction passes.

Rules: axioms (any all-atomic sequent), proof links, the propositional and
quantifier rules, weakening/contraction, cut, a rewrite rule `e_l`/`e_r`
replacing a formula by one with the same normal form, and the two induction
rules `ind` (unary) and `ind2` (binary).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .errors import CheckReport, SchemaError
from .lang import (
    ZERO,
    Atom,
    Exists,
    Forall,
    Formula,
    Impl,
    Neg,
    And,
    Or,
    Subst,
    SymbolTable,
    Term,
    V2App,
    V2Subst,
    Var,
    alpha_equal,
    alpha_key,
    apply_v2_formula,
    apply_v2_term,
    free_terms,
    normalize_formula,
    normalize_term,
    occurs_free,
    s as succ,
    subst_formula,
    subst_term,
    substitute,
    svar,
)
from .sequents import Sequent, multiset_equal, normalize_sequent, remove_at, replace_at

Pos = tuple[str, int]
Flow = dict[Pos, tuple[tuple[int, str, int], ...]]

UNARY_RULES = {
    "neg_l", "neg_r", "and_l1", "and_l2", "or_r1", "or_r2", "imp_r",
    "all_l", "all_r", "ex_l", "ex_r", "w_l", "w_r", "c_l", "c_r",
    "e_l", "e_r", "ind",
}
BINARY_RULES = {"and_r", "or_l", "imp_l", "cut", "ind2"}


class Proof:
    """Base class; nodes use identity semantics."""

    rule: str
    premises: tuple["Proof", ...]
    sequent: Sequent

    def end_sequent(self) -> Sequent:
        return self.sequent

    def nodes(self) -> Iterator["Proof"]:
        yield self
        for p in self.premises:
            yield from p.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


class PAxiom(Proof):
    rule = "ax"
    premises = ()

    def __init__(self, sequent: Sequent):
        self.sequent = sequent


class PLink(Proof):
    rule = "link"
    premises = ()

    def __init__(self, target: str, arith_arg: Term, term_args: tuple[Term, ...], sequent: Sequent):
        self.target = target
        self.arith_arg = arith_arg
        self.term_args = term_args
        self.sequent = sequent


class PRule(Proof):
    def __init__(
        self,
        rule: str,
        premises: tuple[Proof, ...],
        sequent: Sequent,
        flows: Flow,
        aux: tuple[tuple[int, str, int], ...],
        main: Optional[Pos] = None,
        inst_term: Optional[Term] = None,
        eigen: Optional[Term] = None,
        cut_formula: Optional[Formula] = None,
        main_formula: Optional[Formula] = None,
        ind_var: Optional[str] = None,
        ind_target: Optional[Term] = None,
    ):
        self.rule = rule
        self.premises = premises
        self.sequent = sequent
        self.flows = flows
        self.aux = aux
        self.main = main
        self.inst_term = inst_term
        self.eigen = eigen
        self.cut_formula = cut_formula
        self.main_formula = main_formula
        self.ind_var = ind_var
        self.ind_target = ind_target


def _context_flow(flow: Flow, concl_side: str, start: int, prem_idx: int,
                  prem: Sequent, prem_side: str, skip: tuple[int, ...] = ()) -> int:
    """Map a premise side's non-auxiliary occurrences onto consecutive
    conclusion positions starting at `start`; returns the next free index."""
    i = start
    formulas = prem.ant if prem_side == "ant" else prem.suc
    for j in range(len(formulas)):
        if j in skip:
            continue
        flow[(concl_side, i)] = ((prem_idx, prem_side, j),)
        i += 1
    return i


# ---------------------------------------------------------------------------
# rule constructors


def ax(sequent: Sequent) -> PAxiom:
    return PAxiom(sequent)


def link(target: str, arith_arg: Term, term_args: tuple[Term, ...], sequent: Sequent) -> PLink:
    return PLink(target, arith_arg, term_args, sequent)


def _inplace_unary(rule: str, prem: Proof, side: str, i: int, main: Formula, **extra) -> PRule:
    s = prem.sequent
    concl = replace_at(s, side, i, main)
    flow: Flow = {}
    for sd in ("ant", "suc"):
        formulas = s.ant if sd == "ant" else s.suc
        for j in range(len(formulas)):
            flow[(sd, j)] = ((0, sd, j),)
    return PRule(
        rule, (prem,), concl, flow, aux=((0, side, i),), main=(side, i),
        main_formula=main, **extra,
    )


def neg_l(prem: Proof, i: int) -> PRule:
    s = prem.sequent
    a = s.suc[i]
    concl = Sequent((Neg(a),) + s.ant, s.suc[:i] + s.suc[i + 1 :])
    flow: Flow = {("ant", 0): ((0, "suc", i),)}
    _context_flow(flow, "ant", 1, 0, s, "ant")
    _context_flow(flow, "suc", 0, 0, s, "suc", skip=(i,))
    return PRule("neg_l", (prem,), concl, flow, aux=((0, "suc", i),), main=("ant", 0),
                 main_formula=Neg(a))


def neg_r(prem: Proof, i: int) -> PRule:
    s = prem.sequent
    a = s.ant[i]
    concl = Sequent(s.ant[:i] + s.ant[i + 1 :], s.suc + (Neg(a),))
    flow: Flow = {("suc", len(s.suc)): ((0, "ant", i),)}
    _context_flow(flow, "ant", 0, 0, s, "ant", skip=(i,))
    _context_flow(flow, "suc", 0, 0, s, "suc")
    return PRule("neg_r", (prem,), concl, flow, aux=((0, "ant", i),),
                 main=("suc", len(s.suc)), main_formula=Neg(a))


def and_l1(prem: Proof, i: int, other: Formula) -> PRule:
    a = prem.sequent.ant[i]
    return _inplace_unary("and_l1", prem, "ant", i, And(a, other))


def and_l2(prem: Proof, i: int, other: Formula) -> PRule:
    a = prem.sequent.ant[i]
    return _inplace_unary("and_l2", prem, "ant", i, And(other, a))


def or_r1(prem: Proof, i: int, other: Formula) -> PRule:
    a = prem.sequent.suc[i]
    return _inplace_unary("or_r1", prem, "suc", i, Or(a, other))


def or_r2(prem: Proof, i: int, other: Formula) -> PRule:
    a = prem.sequent.suc[i]
    return _inplace_unary("or_r2", prem, "suc", i, Or(other, a))


def _two_premise(rule: str, pl: Proof, pr: Proof, concl_ant, concl_suc, flow, aux,
                 main=None, main_formula=None, **extra) -> PRule:
    return PRule(rule, (pl, pr), Sequent(tuple(concl_ant), tuple(concl_suc)), flow,
                 aux=aux, main=main, main_formula=main_formula, **extra)


def and_r(pl: Proof, pr: Proof, i: int, j: int) -> PRule:
    sl, sr = pl.sequent, pr.sequent
    a, b = sl.suc[i], sr.suc[j]
    main = And(a, b)
    ant = sl.ant + sr.ant
    suc = sl.suc[:i] + sl.suc[i + 1 :] + sr.suc[:j] + sr.suc[j + 1 :] + (main,)
    flow: Flow = {}
    nxt = _context_flow(flow, "ant", 0, 0, sl, "ant")
    _context_flow(flow, "ant", nxt, 1, sr, "ant")
    nxt = _context_flow(flow, "suc", 0, 0, sl, "suc", skip=(i,))
    nxt = _context_flow(flow, "suc", nxt, 1, sr, "suc", skip=(j,))
    flow[("suc", nxt)] = ((0, "suc", i), (1, "suc", j))
    return _two_premise("and_r", pl, pr, ant, suc, flow,
                        aux=((0, "suc", i), (1, "suc", j)), main=("suc", nxt),
                        main_formula=main)


def or_l(pl: Proof, pr: Proof, i: int, j: int) -> PRule:
    sl, sr = pl.sequent, pr.sequent
    a, b = sl.ant[i], sr.ant[j]
    main = Or(a, b)
    ant = (main,) + sl.ant[:i] + sl.ant[i + 1 :] + sr.ant[:j] + sr.ant[j + 1 :]
    suc = sl.suc + sr.suc
    flow: Flow = {("ant", 0): ((0, "ant", i), (1, "ant", j))}
    nxt = _context_flow(flow, "ant", 1, 0, sl, "ant", skip=(i,))
    _context_flow(flow, "ant", nxt, 1, sr, "ant", skip=(j,))
    nxt = _context_flow(flow, "suc", 0, 0, sl, "suc")
    _context_flow(flow, "suc", nxt, 1, sr, "suc")
    return _two_premise("or_l", pl, pr, ant, suc, flow,
                        aux=((0, "ant", i), (1, "ant", j)), main=("ant", 0),
                        main_formula=main)


def imp_l(pl: Proof, pr: Proof, i: int, j: int) -> PRule:
    """Left premise provides the implicans (succedent i), right premise the
    implicatum (antecedent j)."""
    sl, sr = pl.sequent, pr.sequent
    a, b = sl.suc[i], sr.ant[j]
    main = Impl(a, b)
    ant = (main,) + sl.ant + sr.ant[:j] + sr.ant[j + 1 :]
    suc = sl.suc[:i] + sl.suc[i + 1 :] + sr.suc
    flow: Flow = {("ant", 0): ((0, "suc", i), (1, "ant", j))}
    nxt = _context_flow(flow, "ant", 1, 0, sl, "ant")
    _context_flow(flow, "ant", nxt, 1, sr, "ant", skip=(j,))
    nxt = _context_flow(flow, "suc", 0, 0, sl, "suc", skip=(i,))
    _context_flow(flow, "suc", nxt, 1, sr, "suc")
    return _two_premise("imp_l", pl, pr, ant, suc, flow,
                        aux=((0, "suc", i), (1, "ant", j)), main=("ant", 0),
                        main_formula=main)


def imp_r(prem: Proof, i: int, j: int) -> PRule:
    s = prem.sequent
    a, b = s.ant[i], s.suc[j]
    main = Impl(a, b)
    ant = s.ant[:i] + s.ant[i + 1 :]
    suc = s.suc[:j] + s.suc[j + 1 :] + (main,)
    flow: Flow = {}
    _context_flow(flow, "ant", 0, 0, s, "ant", skip=(i,))
    nxt = _context_flow(flow, "suc", 0, 0, s, "suc", skip=(j,))
    flow[("suc", nxt)] = ((0, "ant", i), (0, "suc", j))
    return PRule("imp_r", (prem,), Sequent(ant, suc), flow,
                 aux=((0, "ant", i), (0, "suc", j)), main=("suc", nxt), main_formula=main)


def all_l(prem: Proof, i: int, main: Forall, t: Term) -> PRule:
    return _inplace_unary("all_l", prem, "ant", i, main, inst_term=t)


def all_r(prem: Proof, i: int, main: Forall, eigen: Term) -> PRule:
    return _inplace_unary("all_r", prem, "suc", i, main, eigen=eigen)


def ex_l(prem: Proof, i: int, main: Exists, eigen: Term) -> PRule:
    return _inplace_unary("ex_l", prem, "ant", i, main, eigen=eigen)


def ex_r(prem: Proof, i: int, main: Exists, t: Term) -> PRule:
    return _inplace_unary("ex_r", prem, "suc", i, main, inst_term=t)


def w_l(prem: Proof, a: Formula) -> PRule:
    s = prem.sequent
    concl = Sequent((a,) + s.ant, s.suc)
    flow: Flow = {}
    _context_flow(flow, "ant", 1, 0, s, "ant")
    _context_flow(flow, "suc", 0, 0, s, "suc")
    return PRule("w_l", (prem,), concl, flow, aux=(), main=("ant", 0), main_formula=a)


def w_r(prem: Proof, a: Formula) -> PRule:
    s = prem.sequent
    concl = Sequent(s.ant, s.suc + (a,))
    flow: Flow = {}
    _context_flow(flow, "ant", 0, 0, s, "ant")
    _context_flow(flow, "suc", 0, 0, s, "suc")
    return PRule("w_r", (prem,), concl, flow, aux=(), main=("suc", len(s.suc)),
                 main_formula=a)


def c_l(prem: Proof, i: int, j: int) -> PRule:
    if not i < j:
        raise SchemaError("contraction wants i < j")
    s = prem.sequent
    concl = remove_at(s, "ant", j)
    flow: Flow = {}
    ii = 0
    for jj in range(len(s.ant)):
        if jj == j:
            continue
        if jj == i:
            flow[("ant", ii)] = ((0, "ant", i), (0, "ant", j))
        else:
            flow[("ant", ii)] = ((0, "ant", jj),)
        ii += 1
    _context_flow(flow, "suc", 0, 0, s, "suc")
    return PRule("c_l", (prem,), concl, flow, aux=((0, "ant", i), (0, "ant", j)),
                 main=("ant", i), main_formula=s.ant[i])


def c_r(prem: Proof, i: int, j: int) -> PRule:
    if not i < j:
        raise SchemaError("contraction wants i < j")
    s = prem.sequent
    concl = remove_at(s, "suc", j)
    flow: Flow = {}
    _context_flow(flow, "ant", 0, 0, s, "ant")
    ii = 0
    for jj in range(len(s.suc)):
        if jj == j:
            continue
        if jj == i:
            flow[("suc", ii)] = ((0, "suc", i), (0, "suc", j))
        else:
            flow[("suc", ii)] = ((0, "suc", jj),)
        ii += 1
    return PRule("c_r", (prem,), concl, flow, aux=((0, "suc", i), (0, "suc", j)),
                 main=("suc", i), main_formula=s.suc[i])


def cut(pl: Proof, pr: Proof, i: int, j: int) -> PRule:
    sl, sr = pl.sequent, pr.sequent
    a = sl.suc[i]
    ant = sl.ant + sr.ant[:j] + sr.ant[j + 1 :]
    suc = sl.suc[:i] + sl.suc[i + 1 :] + sr.suc
    flow: Flow = {}
    nxt = _context_flow(flow, "ant", 0, 0, sl, "ant")
    _context_flow(flow, "ant", nxt, 1, sr, "ant", skip=(j,))
    nxt = _context_flow(flow, "suc", 0, 0, sl, "suc", skip=(i,))
    _context_flow(flow, "suc", nxt, 1, sr, "suc")
    return _two_premise("cut", pl, pr, ant, suc, flow,
                        aux=((0, "suc", i), (1, "ant", j)), cut_formula=a)


def e_l(prem: Proof, i: int, to: Formula) -> PRule:
    return _inplace_unary("e_l", prem, "ant", i, to)


def e_r(prem: Proof, i: int, to: Formula) -> PRule:
    return _inplace_unary("e_r", prem, "suc", i, to)


def ind(prem: Proof, i: int, j: int, var: str, target: Term) -> PRule:
    """From A(k), G |- D, A(k+1) conclude A(0), G |- D, A(t)."""
    s = prem.sequent
    a_k = s.ant[i]
    a_0 = substitute(a_k, {svar(var): ZERO})
    a_t = substitute(a_k, {svar(var): target})
    concl = replace_at(replace_at(s, "ant", i, a_0), "suc", j, a_t)
    flow: Flow = {}
    for sd in ("ant", "suc"):
        formulas = s.ant if sd == "ant" else s.suc
        for jj in range(len(formulas)):
            flow[(sd, jj)] = ((0, sd, jj),)
    return PRule("ind", (prem,), concl, flow, aux=((0, "ant", i), (0, "suc", j)),
                 main=("suc", j), main_formula=a_t, ind_var=var, ind_target=target)


def ind2(pl: Proof, pr: Proof, i0: int, ia: int, ja: int, var: str, target: Term) -> PRule:
    """Left premise G |- D, A(0) (succedent i0); right premise
    A(k), P |- L, A(k+1) (antecedent ia, succedent ja); conclusion
    G, P |- D, L, A(t)."""
    sl, sr = pl.sequent, pr.sequent
    a_k = sr.ant[ia]
    a_t = substitute(a_k, {svar(var): target})
    ant = sl.ant + sr.ant[:ia] + sr.ant[ia + 1 :]
    suc = sl.suc[:i0] + sl.suc[i0 + 1 :] + sr.suc[:ja] + sr.suc[ja + 1 :] + (a_t,)
    flow: Flow = {}
    nxt = _context_flow(flow, "ant", 0, 0, sl, "ant")
    _context_flow(flow, "ant", nxt, 1, sr, "ant", skip=(ia,))
    nxt = _context_flow(flow, "suc", 0, 0, sl, "suc", skip=(i0,))
    nxt = _context_flow(flow, "suc", nxt, 1, sr, "suc", skip=(ja,))
    flow[("suc", nxt)] = ((0, "suc", i0), (1, "ant", ia), (1, "suc", ja))
    return _two_premise("ind2", pl, pr, ant, suc, flow,
                        aux=((0, "suc", i0), (1, "ant", ia), (1, "suc", ja)),
                        main=("suc", nxt), main_formula=a_t, ind_var=var,
                        ind_target=target)


# ---------------------------------------------------------------------------
# rebuilding under substitution


def _rebuild(node: PRule, premises: tuple[Proof, ...],
             aux: tuple[tuple[int, str, int], ...] | None = None) -> PRule:
    r = node.rule
    aux = node.aux if aux is None else aux
    if r == "neg_l":
        return neg_l(premises[0], aux[0][2])
    if r == "neg_r":
        return neg_r(premises[0], aux[0][2])
    if r == "and_l1":
        return and_l1(premises[0], aux[0][2], node.main_formula.right)
    if r == "and_l2":
        return and_l2(premises[0], aux[0][2], node.main_formula.left)
    if r == "or_r1":
        return or_r1(premises[0], aux[0][2], node.main_formula.right)
    if r == "or_r2":
        return or_r2(premises[0], aux[0][2], node.main_formula.left)
    if r == "and_r":
        return and_r(premises[0], premises[1], aux[0][2], aux[1][2])
    if r == "or_l":
        return or_l(premises[0], premises[1], aux[0][2], aux[1][2])
    if r == "imp_l":
        return imp_l(premises[0], premises[1], aux[0][2], aux[1][2])
    if r == "imp_r":
        return imp_r(premises[0], aux[0][2], aux[1][2])
    if r == "all_l":
        return all_l(premises[0], aux[0][2], node.main_formula, node.inst_term)
    if r == "all_r":
        return all_r(premises[0], aux[0][2], node.main_formula, node.eigen)
    if r == "ex_l":
        return ex_l(premises[0], aux[0][2], node.main_formula, node.eigen)
    if r == "ex_r":
        return ex_r(premises[0], aux[0][2], node.main_formula, node.inst_term)
    if r == "w_l":
        return w_l(premises[0], node.main_formula)
    if r == "w_r":
        return w_r(premises[0], node.main_formula)
    if r == "c_l":
        return c_l(premises[0], aux[0][2], aux[1][2])
    if r == "c_r":
        return c_r(premises[0], aux[0][2], aux[1][2])
    if r == "cut":
        return cut(premises[0], premises[1], aux[0][2], aux[1][2])
    if r == "e_l":
        return e_l(premises[0], aux[0][2], node.main_formula)
    if r == "e_r":
        return e_r(premises[0], aux[0][2], node.main_formula)
    if r == "ind":
        return ind(premises[0], aux[0][2], aux[1][2], node.ind_var, node.ind_target)
    if r == "ind2":
        return ind2(premises[0], premises[1], aux[0][2], aux[1][2], aux[2][2],
                    node.ind_var, node.ind_target)
    raise SchemaError(f"unknown rule {r}")


def map_proof(p: Proof, fo: Subst | None = None, theta: V2Subst | None = None,
              table: SymbolTable | None = None,
              link_fn: Optional[Callable[[PLink, Callable], Proof]] = None) -> Proof:
    """Rebuild a proof applying substitutions (and optionally normalization)
    to every formula and term; links may be transformed or spliced out."""
    fo = fo or {}
    theta = theta or {}

    def tr_formula(f: Formula) -> Formula:
        if theta:
            f = apply_v2_formula(f, theta)
        if fo:
            f = subst_formula(f, fo)
        if table is not None:
            f = normalize_formula(f, table)
        return f

    def tr_term(t: Term) -> Term:
        if theta:
            t = apply_v2_term(t, theta)
        if fo:
            t = subst_term(t, fo)
        if table is not None:
            t = normalize_term(t, table)
        return t

    def tr_sequent(s: Sequent) -> Sequent:
        return Sequent(tuple(tr_formula(f) for f in s.ant),
                       tuple(tr_formula(f) for f in s.suc))

    def walk(node: Proof) -> Proof:
        if isinstance(node, PAxiom):
            return PAxiom(tr_sequent(node.sequent))
        if isinstance(node, PLink):
            if link_fn is not None:
                return link_fn(node, tr_term)
            return PLink(node.target, tr_term(node.arith_arg),
                         tuple(tr_term(t) for t in node.term_args),
                         tr_sequent(node.sequent))
        assert isinstance(node, PRule)
        prems = tuple(walk(p) for p in node.premises)
        twin = PRule(
            node.rule, node.premises, node.sequent, node.flows, node.aux,
            main=node.main,
            inst_term=tr_term(node.inst_term) if node.inst_term is not None else None,
            eigen=tr_term(node.eigen) if node.eigen is not None else None,
            cut_formula=tr_formula(node.cut_formula) if node.cut_formula is not None else None,
            main_formula=tr_formula(node.main_formula) if node.main_formula is not None else None,
            ind_var=node.ind_var,
            ind_target=tr_term(node.ind_target) if node.ind_target is not None else None,
        )
        return _rebuild(twin, prems)

    return walk(p)


# ---------------------------------------------------------------------------
# checking


LinkEnv = Callable[[PLink], Optional[Sequent]]


def check_proof(
    p: Proof,
    table: SymbolTable,
    link_env: Optional[LinkEnv] = None,
    allow_links: bool = True,
    allow_ind: bool = True,
    cut_grade: str = "any",
) -> CheckReport:
    """Validate every inference; diagnostics carry the node path (premise
    indices from the root).  cut_grade: any | atomic-only | none."""
    report = CheckReport()

    def norm(f: Formula) -> Formula:
        return normalize_formula(f, table)

    def eq(a: Formula, b: Formula) -> bool:
        return alpha_equal(norm(a), norm(b))

    def walk(node: Proof, path: str):
        if isinstance(node, PAxiom):
            for side, i, fml in node.sequent.formulas():
                if not isinstance(fml, Atom):
                    report.add(path, f"axiom formula is not atomic: {fml}")
            return
        if isinstance(node, PLink):
            if not allow_links:
                report.add(path, f"proof link to {node.target} not allowed here")
            if link_env is not None:
                expected = link_env(node)
                if expected is None:
                    report.add(path, f"link target {node.target} is not declared")
                elif not multiset_equal(normalize_sequent(expected, table),
                                        normalize_sequent(node.sequent, table)):
                    report.add(path, f"link sequent mismatch for {node.target}: "
                                     f"{node.sequent} vs {expected}")
            return
        assert isinstance(node, PRule)
        for idx, prem in enumerate(node.premises):
            walk(prem, f"{path}.{idx}")
        # structural re-derivation
        try:
            again = _rebuild(node, node.premises)
        except Exception as exc:  # noqa: BLE001 - diagnostics must not abort
            report.add(path, f"rule {node.rule} does not apply: {exc}")
            return
        if again.sequent != node.sequent:
            report.add(path, f"conclusion of {node.rule} does not match: "
                             f"{node.sequent} vs {again.sequent}")
        r = node.rule
        if r in ("all_l", "ex_r"):
            q = node.main_formula
            inst = substitute(q.body, {q.var: node.inst_term})
            auxf = node.premises[0].sequent.get(*node.aux[0][1:])
            if not eq(inst, auxf):
                report.add(path, f"{r}: auxiliary formula is not the {node.inst_term} instance "
                                 f"of {q}: {auxf}")
        if r in ("all_r", "ex_l"):
            q = node.main_formula
            ev = node.eigen
            if not isinstance(ev, (Var, V2App)):
                report.add(path, f"{r}: eigenterm {ev} is not a variable")
            else:
                inst = substitute(q.body, {q.var: ev})
                auxf = node.premises[0].sequent.get(*node.aux[0][1:])
                if not eq(inst, auxf):
                    report.add(path, f"{r}: auxiliary formula is not the eigenvariable instance "
                                     f"of {q}: {auxf}")
                for side, i, fml in node.sequent.formulas():
                    if occurs_free(ev, norm(fml)):
                        report.add(path, f"{r}: eigenvariable {ev} occurs in the conclusion")
                        break
        if r in ("c_l", "c_r"):
            a = node.premises[0].sequent.get(*node.aux[0][1:])
            b = node.premises[0].sequent.get(*node.aux[1][1:])
            if not eq(a, b):
                report.add(path, f"{r}: contracted formulas differ: {a} vs {b}")
        if r == "cut":
            a = node.premises[0].sequent.get(*node.aux[0][1:])
            b = node.premises[1].sequent.get(*node.aux[1][1:])
            if not eq(a, b):
                report.add(path, f"cut formulas differ: {a} vs {b}")
            if cut_grade == "none":
                report.add(path, f"cut not allowed here (on {a})")
            elif cut_grade == "atomic-only" and not isinstance(norm(a), Atom):
                report.add(path, f"non-atomic cut on {a}")
        if r in ("e_l", "e_r"):
            a = node.premises[0].sequent.get(*node.aux[0][1:])
            if not eq(a, node.main_formula):
                report.add(path, f"{r}: {a} and {node.main_formula} have different normal forms")
        if r in ("ind", "ind2"):
            if not allow_ind:
                report.add(path, "induction not allowed here")
            kv = svar(node.ind_var)
            if r == "ind":
                a_k = node.premises[0].sequent.get(*node.aux[0][1:])
                a_k1 = node.premises[0].sequent.get(*node.aux[1][1:])
                ctx = [f for sd, i, f in node.premises[0].sequent.formulas()
                       if (0, sd, i) not in node.aux]
            else:
                a_k = node.premises[1].sequent.get(*node.aux[1][1:])
                a_k1 = node.premises[1].sequent.get(*node.aux[2][1:])
                a_0 = node.premises[0].sequent.get(*node.aux[0][1:])
                if not eq(a_0, substitute(a_k, {kv: ZERO})):
                    report.add(path, f"{r}: base formula {a_0} is not the 0 instance of {a_k}")
                ctx = [f for sd, i, f in node.premises[0].sequent.formulas()
                       if (0, sd, i) not in node.aux]
                ctx += [f for sd, i, f in node.premises[1].sequent.formulas()
                        if (1, sd, i) not in node.aux]
            if not eq(a_k1, substitute(a_k, {kv: succ(kv)})):
                report.add(path, f"{r}: step formulas are not k and k+1 instances: "
                                 f"{a_k} vs {a_k1}")
            a_0v = substitute(a_k, {kv: ZERO})
            for fml in ctx + [a_0v]:
                if occurs_free(kv, norm(fml)):
                    report.add(path, f"{r}: induction variable {node.ind_var} occurs in the "
                                     f"context or base formula {fml}")
                    break

    walk(p, "root")
    return report


# ---------------------------------------------------------------------------
# ancestor marking


@dataclass
class Marking:
    """Per node: which conclusion occurrences are cut- or configuration-ancestors."""

    marks: dict[int, tuple[tuple[bool, ...], tuple[bool, ...]]] = field(default_factory=dict)

    def of(self, node: Proof) -> tuple[tuple[bool, ...], tuple[bool, ...]]:
        return self.marks[id(node)]

    def marked_positions(self, node: Proof) -> set[Pos]:
        am, sm = self.of(node)
        out = {("ant", i) for i, b in enumerate(am) if b}
        out |= {("suc", i) for i, b in enumerate(sm) if b}
        return out

    def is_marked(self, node: Proof, side: str, i: int) -> bool:
        am, sm = self.of(node)
        return am[i] if side == "ant" else sm[i]


def align_positions(sequent: Sequent, wanted: list[tuple[str, Formula]],
                    table: SymbolTable) -> set[Pos]:
    """Greedy left-to-right pairing of a (side, formula) multiset with
    occurrence positions."""
    out: set[Pos] = set()
    pool = [(side, alpha_key(normalize_formula(f, table))) for side, f in wanted]
    for side, i, f in sequent.formulas():
        key = (side, alpha_key(normalize_formula(f, table)))
        if key in pool:
            pool.remove(key)
            out.add((side, i))
    if pool:
        raise SchemaError(f"configuration formulas not present in {sequent}: {pool}")
    return out


def mark_ancestors(p: Proof, root_marks: set[Pos]) -> Marking:
    """Propagate cut/configuration ancestry from the end-sequent upward."""
    marking = Marking()

    def walk(node: Proof, marked: set[Pos]):
        am = tuple(("ant", i) in marked for i in range(len(node.sequent.ant)))
        sm = tuple(("suc", i) in marked for i in range(len(node.sequent.suc)))
        marking.marks[id(node)] = (am, sm)
        if not isinstance(node, PRule):
            return
        per_prem: list[set[Pos]] = [set() for _ in node.premises]
        for pos in marked:
            for (pi, side, j) in node.flows.get(pos, ()):
                per_prem[pi].add((side, j))
        if node.rule == "cut":
            (pi0, s0, i0), (pi1, s1, i1) = node.aux
            per_prem[pi0].add((s0, i0))
            per_prem[pi1].add((s1, i1))
        for prem, marks in zip(node.premises, per_prem):
            walk(prem, marks)

    walk(p, root_marks)
    return marking
