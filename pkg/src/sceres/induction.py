"""Translation between linked proof schemata and induction proofs.

`schema_to_lki` compiles a schema into one link-free proof: each pair's
end-sequent is folded into a single invariant formula, the pair's
recursion becomes a binary induction inference over that invariant, and
links turn into cuts against the closed proofs of the pairs they name.
`lki_to_schema` runs the other way, carving every induction inference
out into a recursive pair of its own.
"""
from __future__ import annotations

from typing import Callable, Optional

from .errors import SchemaError
from .lang import (
    ZERO,
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Impl,
    Neg,
    Or,
    SymbolTable,
    Term,
    free_terms,
    s as succ,
    substitute,
    svar,
)
from .proofs import (
    PAxiom,
    PLink,
    PRule,
    Proof,
    _rebuild,
    all_l,
    all_r,
    and_l1,
    and_l2,
    and_r,
    ax,
    c_l,
    c_r,
    cut,
    ex_l,
    ex_r,
    imp_l,
    imp_r,
    ind2,
    link,
    map_proof,
    neg_l,
    neg_r,
    or_l,
    or_r1,
    or_r2,
    w_l,
)
from .schema import PARAM, STEP_PARAM, ProofSchema, SchemaPair, check_schema
from .sequents import Sequent, normalize_sequent, sequent_str, subst_sequent


# ---------------------------------------------------------------------------
# folding a sequent into one formula


def _conj(fs: tuple[Formula, ...]) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def _disj(fs: tuple[Formula, ...]) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def sequent_formula(s: Sequent) -> Formula:
    """Fold a sequent into one formula: the conjoined antecedent implies
    the disjoined succedent, with an empty side dropped."""
    if not s.ant and not s.suc:
        raise SchemaError("cannot fold the empty sequent into a formula")
    if not s.ant:
        return _disj(s.suc)
    if not s.suc:
        return Neg(_conj(s.ant))
    return Impl(_conj(s.ant), _disj(s.suc))


def identity_proof(f: Formula) -> Proof:
    """Prove f |- f from atomic axioms by unfolding the connectives."""
    if isinstance(f, Atom):
        return ax(Sequent((f,), (f,)))
    if isinstance(f, Neg):
        return neg_r(neg_l(identity_proof(f.body), 0), 1)
    if isinstance(f, And):
        p = and_r(and_l1(identity_proof(f.left), 0, f.right),
                  and_l2(identity_proof(f.right), 0, f.left), 0, 0)
        return c_l(p, 0, 1)
    if isinstance(f, Or):
        p = or_l(or_r1(identity_proof(f.left), 0, f.right),
                 or_r2(identity_proof(f.right), 0, f.left), 0, 0)
        return c_r(p, 0, 1)
    if isinstance(f, Impl):
        return imp_r(imp_l(identity_proof(f.left), identity_proof(f.right), 0, 0), 1, 0)
    if isinstance(f, Forall):
        return all_r(all_l(identity_proof(f.body), 0, f, f.var), 0, f, f.var)
    if isinstance(f, Exists):
        return ex_l(ex_r(identity_proof(f.body), 0, f, f.var), 0, f, f.var)
    raise SchemaError(f"cannot build an identity proof for {f}")


def _conj_intro(fs: tuple[Formula, ...]) -> Proof:
    # G1, ..., Gm |- G1 & (G2 & ...)
    if len(fs) == 1:
        return identity_proof(fs[0])
    return and_r(identity_proof(fs[0]), _conj_intro(fs[1:]), 0, 0)


def _disj_elim(fs: tuple[Formula, ...]) -> Proof:
    # D1 v (D2 v ...) |- D1, ..., Dm
    if len(fs) == 1:
        return identity_proof(fs[0])
    return or_l(identity_proof(fs[0]), _disj_elim(fs[1:]), 0, 0)


def _unfold_proof(s: Sequent) -> Proof:
    """Prove F, ant |- suc where F is the sequent's folded formula."""
    if not s.ant and not s.suc:
        raise SchemaError("cannot fold the empty sequent into a formula")
    if not s.ant:
        return _disj_elim(s.suc)
    if not s.suc:
        return neg_l(_conj_intro(s.ant), 0)
    return imp_l(_conj_intro(s.ant), _disj_elim(s.suc), 0, 0)


def _merge_ant(p: Proof, keep: Optional[int]) -> tuple[Proof, Optional[int], Optional[int]]:
    ps = [i for i in range(len(p.sequent.ant)) if i != keep]
    while len(ps) > 1:
        gi, ti = ps[-2], ps[-1]
        left, right = p.sequent.ant[gi], p.sequent.ant[ti]
        p = and_l1(p, gi, right)
        p = and_l2(p, ti, left)
        p = c_l(p, gi, ti)
        ps.pop()
        if keep is not None and keep > ti:
            keep -= 1
    return p, (ps[0] if ps else None), keep


def _merge_suc(p: Proof) -> tuple[Proof, Optional[int]]:
    ps = list(range(len(p.sequent.suc)))
    while len(ps) > 1:
        di, ui = ps[-2], ps[-1]
        left, right = p.sequent.suc[di], p.sequent.suc[ui]
        p = or_r1(p, di, right)
        p = or_r2(p, ui, left)
        p = c_r(p, di, ui)
        ps.pop()
    return p, (ps[0] if ps else None)


def _fold_proof(p: Proof, keep: Optional[int] = None) -> tuple[Proof, Optional[int]]:
    """Fold the whole sequent, apart from the kept antecedent position,
    into its sequent formula on the right."""
    p, cpos, keep = _merge_ant(p, keep)
    p, dpos = _merge_suc(p)
    if cpos is None and dpos is None:
        raise SchemaError("cannot fold the empty sequent into a formula")
    if cpos is None:
        return p, keep
    p = neg_r(p, cpos) if dpos is None else imp_r(p, cpos, dpos)
    if keep is not None and keep > cpos:
        keep -= 1
    return p, keep


# ---------------------------------------------------------------------------
# grafting link replacements that may open hypotheses

Replacement = Callable[[PLink], tuple[Proof, dict[int, int], list[int]]]


def _graft(node: Proof, replace: Replacement) -> tuple[Proof, dict[int, int], list[int]]:
    """Rebuild a proof while `replace` swaps out each link; replacements
    may carry extra hypothesis formulas in their antecedent, so original
    antecedent positions are re-threaded and the hypothesis positions at
    the conclusion reported alongside."""
    if isinstance(node, PAxiom):
        return node, {i: i for i in range(len(node.sequent.ant))}, []
    if isinstance(node, PLink):
        return replace(node)
    assert isinstance(node, PRule)
    grafted = [_graft(q, replace) for q in node.premises]
    prems = tuple(g[0] for g in grafted)
    pmaps = [g[1] for g in grafted]
    pextra = [set(g[2]) for g in grafted]
    aux = tuple((pi, side, pmaps[pi][ix] if side == "ant" else ix)
                for pi, side, ix in node.aux)
    new = _rebuild(node, prems, aux=aux)
    inv: dict[tuple[int, int], int] = {}
    for pos in range(len(node.sequent.ant)):
        srcs = node.flows.get(("ant", pos), ())
        if len(srcs) == 1 and srcs[0][1] == "ant":
            pi, _, old = srcs[0]
            inv[(pi, pmaps[pi][old])] = pos
    amap: dict[int, int] = {}
    extras: list[int] = []
    for pos in range(len(new.sequent.ant)):
        srcs = new.flows.get(("ant", pos), ())
        if len(srcs) == 1 and srcs[0][1] == "ant":
            pi, _, here = srcs[0]
            if here in pextra[pi]:
                extras.append(pos)
                continue
            amap[inv[(pi, here)]] = pos
        else:
            # only the rule's own main formula lacks a plain antecedent source
            amap[node.main[1]] = pos
    return new, amap, extras


# ---------------------------------------------------------------------------
# schema -> induction proof


def _instance(schema: ProofSchema, pair: SchemaPair, t: Term) -> Sequent:
    inst = subst_sequent(pair.sequent, {svar(PARAM): t})
    return normalize_sequent(inst, schema.table)


def _invariant(schema: ProofSchema, pair: SchemaPair, t: Term) -> Formula:
    return sequent_formula(_instance(schema, pair, t))


def _closure(parts: tuple[Proof, Proof], t: Term) -> Proof:
    base, step = parts
    return ind2(base, step, 0, 0, 0, STEP_PARAM, t)


def _pair_parts(schema: ProofSchema, pair: SchemaPair,
                parts: dict[str, tuple[Proof, Proof]]) -> tuple[Proof, Proof]:
    """Close one pair into a proof of |- A(0) and a proof of A(k) |- A(k+1)
    over its folded invariant A."""
    kt = svar(STEP_PARAM)
    hyp = _invariant(schema, pair, kt)

    def replace(node: PLink) -> tuple[Proof, dict[int, int], list[int]]:
        n_ant = len(node.sequent.ant)
        if node.target == pair.name:
            u = _unfold_proof(_instance(schema, pair, kt))
            return u, {i: i + 1 for i in range(n_ant)}, [0]
        if node.target not in parts:
            raise SchemaError(f"link to {node.target} runs against the pair order")
        other = schema.by_name[node.target]
        top = _closure(parts[node.target], node.arith_arg)
        u = _unfold_proof(_instance(schema, other, node.arith_arg))
        return cut(top, u, 0, 0), {i: i for i in range(n_ant)}, []

    stepped, _, extras = _graft(pair.step, replace)
    if extras:
        while len(extras) > 1:
            stepped = c_l(stepped, extras[0], extras[1])
            extras = [extras[0]] + [e - 1 for e in extras[2:]]
        hpos: Optional[int] = extras[0]
    else:
        stepped = w_l(stepped, hyp)
        hpos = 0
    lam, _ = _fold_proof(stepped, keep=hpos)

    based, _, stray = _graft(pair.base, replace)
    if stray:
        raise SchemaError(f"{pair.name}: self link in the base proof")
    folded, _ = _fold_proof(based)
    return folded, lam


def schema_to_lki(schema: ProofSchema) -> Proof:
    """Compile the schema into a single link-free proof of the start
    pair's end-sequent at parameter k, carrying each pair's recursion in
    one binary induction inference over its folded invariant."""
    report = check_schema(schema)
    if not report.ok:
        joined = "; ".join(str(d) for d in report.diagnostics)
        raise SchemaError(f"schema does not check: {joined}")
    parts: dict[str, tuple[Proof, Proof]] = {}
    for pair in reversed(schema.pairs):
        parts[pair.name] = _pair_parts(schema, pair, parts)
    start = schema.pairs[0]
    kt = svar(STEP_PARAM)
    top = _closure(parts[start.name], kt)
    return cut(top, _unfold_proof(_instance(schema, start, kt)), 0, 0)


# ---------------------------------------------------------------------------
# induction proof -> schema


def lki_to_schema(p: Proof, table: SymbolTable) -> ProofSchema:
    """Split a proof whose recursion sits in induction inferences into a
    schema: a start pair for the surrounding derivation plus one
    recursive pair per induction inference."""
    kt = svar(STEP_PARAM)
    nv = svar(PARAM)
    for node in p.nodes():
        for f in node.sequent.ant + node.sequent.suc:
            if nv in free_terms(f):
                raise SchemaError(f"the proof already uses the parameter {PARAM}: {f}")
    pairs: list[Optional[SchemaPair]] = []

    def carve(node: PRule) -> Proof:
        where = sequent_str(node.sequent)
        stray = [t for t in free_terms(node.ind_target) if t != kt]
        if stray:
            raise SchemaError(f"induction target {node.ind_target} at {where} uses "
                              f"{stray[0]}; only {STEP_PARAM} may appear")
        if node.ind_var != STEP_PARAM:
            raise SchemaError(f"induction over {node.ind_var} at {where}; the "
                              f"recursion parameter must be {STEP_PARAM}")
        slot = len(pairs)
        pairs.append(None)
        name = f"ind{slot + 1}"
        if node.rule == "ind":
            prem = node.premises[0]
            if len(prem.sequent.ant) != 1 or len(prem.sequent.suc) != 1:
                raise SchemaError(f"induction with side formulas at {where}; "
                                  f"use the binary form")
            a_k = prem.sequent.ant[0]
            base: Proof = identity_proof(substitute(a_k, {kt: ZERO}))
            stepped = walk(prem)
        else:
            left, right = node.premises
            if len(right.sequent.ant) != 1 or len(right.sequent.suc) != 1:
                raise SchemaError(f"induction step premise carries side formulas "
                                  f"at {where}")
            if node.aux[0][2] != len(left.sequent.suc) - 1:
                raise SchemaError(f"induction base formula must be the last "
                                  f"succedent formula at {where}")
            a_k = right.sequent.ant[0]
            base = walk(left)
            stepped = walk(right)
        a_n = substitute(a_k, {kt: nv})
        tpl = Sequent(node.sequent.ant, node.sequent.suc[:-1] + (a_n,))
        for f in tpl.ant + tpl.suc[:-1]:
            if kt in free_terms(f):
                raise SchemaError(f"context around the induction at {where} "
                                  f"mentions {STEP_PARAM}: {f}")
        link_s = subst_sequent(tpl, {nv: kt})
        nu = cut(link(name, kt, (), link_s), stepped, len(link_s.suc) - 1, 0)
        pairs[slot] = SchemaPair(name, tpl, base, nu)
        return link(name, node.ind_target, (), node.sequent)

    def walk(node: Proof) -> Proof:
        if isinstance(node, PAxiom):
            return node
        if isinstance(node, PLink):
            raise SchemaError(f"proof links have no place here: {node.target}")
        assert isinstance(node, PRule)
        if node.rule in ("ind", "ind2"):
            return carve(node)
        return _rebuild(node, tuple(walk(q) for q in node.premises))

    body = walk(p)
    template = subst_sequent(p.sequent, {kt: nv})
    start = SchemaPair("main", template,
                       map_proof(body, fo={kt: ZERO}),
                       map_proof(body, fo={kt: succ(kt)}))
    done = [q for q in pairs if q is not None]
    return ProofSchema([start] + done, table)
