"""Projection terms and their evaluation to cut-free proofs.

Extraction walks a proof with its ancestor marking, like the clause-set
extraction, but keeps the inferences operating on end-sequent ancestors:
axioms stay whole, marked inferences are skipped, binary inferences on
marked auxiliaries fork into a sum whose branches weaken in the other
premise's end-sequent ancestors.  Evaluating a term at a parameter value
yields proofs of the instance end-sequent extended by a characteristic
clause; the clause positions are tracked as a mask.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .clauseterms import marked_part
from .errors import SchemaError
from .lang import (
    Formula,
    Subst,
    SymbolTable,
    Term,
    alpha_key,
    formula_str,
    normalize_formula,
    normalize_term,
    numeral,
    numeral_value,
    subst_term,
    substitute,
    svar,
    term_str,
)
from .proofs import (
    Marking,
    PAxiom,
    PLink,
    PRule,
    Pos,
    Proof,
    all_l,
    all_r,
    and_l1,
    and_l2,
    and_r,
    ax,
    c_l,
    c_r,
    check_proof,
    ex_l,
    ex_r,
    imp_l,
    imp_r,
    mark_ancestors,
    neg_l,
    neg_r,
    or_l,
    or_r1,
    or_r2,
    w_l,
    w_r,
)
from .schema import (
    STEP_PARAM,
    ConfigKey,
    ProofSchema,
    canonical_config,
    reachable_configs,
)
from .sequents import (
    Sequent,
    is_variant,
    multiset_equal,
    multiset_key,
    normalize_sequent,
    sequent_str,
    subst_sequent,
)

Mask = tuple[tuple[bool, ...], tuple[bool, ...]]


@dataclass(frozen=True)
class PTLeaf:
    sequent: Sequent
    mask: Mask


@dataclass(frozen=True)
class PTApp:
    node: PRule
    inner: "ProjTerm"


@dataclass(frozen=True)
class PTWeak:
    ant: tuple[Formula, ...]
    suc: tuple[Formula, ...]
    inner: "ProjTerm"


@dataclass(frozen=True)
class PTPlus:
    left: "ProjTerm"
    right: "ProjTerm"


@dataclass(frozen=True)
class PTTimes:
    node: PRule
    left: "ProjTerm"
    right: "ProjTerm"


@dataclass(frozen=True)
class PTSym:
    target: str
    config: tuple[Pos, ...]
    arg: Term


ProjTerm = PTLeaf | PTApp | PTWeak | PTPlus | PTTimes | PTSym


def xi_str(t: ProjTerm) -> str:
    if isinstance(t, PTLeaf):
        return f"[{sequent_str(t.sequent)}]"
    if isinstance(t, PTApp):
        return f"{t.node.rule}({xi_str(t.inner)})"
    if isinstance(t, PTWeak):
        added = sequent_str(Sequent(t.ant, t.suc))
        return f"w[{added}]({xi_str(t.inner)})"
    if isinstance(t, PTPlus):
        return f"({xi_str(t.left)} + {xi_str(t.right)})"
    if isinstance(t, PTTimes):
        return f"({xi_str(t.left)} x[{t.node.rule}] {xi_str(t.right)})"
    cfg = ",".join(f"{side}.{i}" for side, i in t.config)
    return f"pr[{t.target};{cfg}]({term_str(t.arg)})"


def _unmarked_part(sequent: Sequent, flags: Mask) -> Sequent:
    am, sm = flags
    return Sequent(
        tuple(f for f, b in zip(sequent.ant, am) if not b),
        tuple(f for f, b in zip(sequent.suc, sm) if not b),
    )


def extract_xi(
    proof: Proof,
    omega: Iterable[Pos] = (),
    table: Optional[SymbolTable] = None,
    marking: Optional[Marking] = None,
    link_configs: Optional[dict[int, ConfigKey]] = None,
) -> ProjTerm:
    """Projection term of a proof under a configuration."""
    if marking is None:
        marking = mark_ancestors(proof, set(omega))

    def link_sym(node: PLink) -> PTSym:
        if link_configs is not None and id(node) in link_configs:
            target, cfg = link_configs[id(node)]
            return PTSym(target, cfg, node.arith_arg)
        marked = marking.marked_positions(node)
        if table is not None:
            cfg = canonical_config(node.sequent, marked, table)
        else:
            cfg = tuple(sorted(marked))
        return PTSym(node.target, cfg, node.arith_arg)

    def walk(node: Proof) -> ProjTerm:
        if isinstance(node, PAxiom):
            return PTLeaf(node.sequent, marking.of(node))
        if isinstance(node, PLink):
            return link_sym(node)
        assert isinstance(node, PRule)
        if node.rule in ("ind", "ind2"):
            raise SchemaError("induction rule inside projection extraction")
        if len(node.premises) == 1:
            inner = walk(node.premises[0])
            if node.rule in ("e_l", "e_r"):
                return inner
            if not node.aux:
                # weakening: kept unless the added formula is an ancestor
                if marking.is_marked(node, *node.main):
                    return inner
                return PTApp(node, inner)
            statuses = [marking.is_marked(node.premises[pi], side, i)
                        for pi, side, i in node.aux]
            if all(statuses):
                return inner
            if not any(statuses):
                return PTApp(node, inner)
            raise SchemaError(f"unary rule {node.rule} with mixed-ancestry auxiliaries")
        left, right = node.premises
        statuses = [marking.is_marked(node.premises[pi], side, i)
                    for pi, side, i in node.aux]
        if all(statuses):
            lw = _unmarked_part(left.sequent, marking.of(left))
            rw = _unmarked_part(right.sequent, marking.of(right))
            return PTPlus(
                PTWeak(rw.ant, rw.suc, walk(left)),
                PTWeak(lw.ant, lw.suc, walk(right)),
            )
        if not any(statuses):
            return PTTimes(node, walk(left), walk(right))
        raise SchemaError(f"binary rule {node.rule} with mixed-ancestry auxiliaries")

    return walk(proof)


@dataclass
class ProjRule:
    base: ProjTerm
    step: ProjTerm


@dataclass
class ProjSchema:
    rules: dict[ConfigKey, ProjRule]
    table: SymbolTable
    start: ConfigKey


def build_proj_schema(schema: ProofSchema) -> ProjSchema:
    """One base and one step projection rewrite rule per reachable (pair,
    configuration); shares the configuration closure with the clause-set
    side."""
    configs = reachable_configs(schema)
    rules: dict[ConfigKey, ProjRule] = {}
    for key, info in configs.items():
        base = extract_xi(info.pair.base, marking=info.base_marking,
                          table=schema.table, link_configs=info.link_targets)
        step = extract_xi(info.pair.step, marking=info.step_marking,
                          table=schema.table, link_configs=info.link_targets)
        rules[key] = ProjRule(base, step)
    return ProjSchema(rules, schema.table, (schema.main.name, ()))


@dataclass
class Projection:
    proof: Proof
    mask: Mask

    def clause_part(self) -> Sequent:
        return marked_part(self.proof.end_sequent(), self.mask)

    def base_part(self) -> Sequent:
        return _unmarked_part(self.proof.end_sequent(), self.mask)


def _proof_key(p: Proof):
    if isinstance(p, PAxiom):
        return ("ax", p.sequent)
    if isinstance(p, PLink):
        return ("link", p.target, p.arith_arg, p.term_args, p.sequent)
    return (p.rule, p.sequent, p.aux, tuple(_proof_key(q) for q in p.premises))


def _dedupe(projs: Iterable[Projection]) -> list[Projection]:
    out: list[Projection] = []
    seen = set()
    for pr in projs:
        key = (_proof_key(pr.proof), pr.mask)
        if key not in seen:
            seen.add(key)
            out.append(pr)
    return out


def _mask_after(node: PRule, prem_masks: list[Mask]) -> Mask:
    am = [False] * len(node.sequent.ant)
    sm = [False] * len(node.sequent.suc)
    for (side, i), sources in node.flows.items():
        vals = [prem_masks[pi][0 if s == "ant" else 1][j] for pi, s, j in sources]
        if vals and all(vals):
            (am if side == "ant" else sm)[i] = True
    return (tuple(am), tuple(sm))


def _resolve_aux(proof: Proof, mask: Mask, side: str, formula: Formula,
                 taken: set[Pos], table: SymbolTable) -> int:
    want = alpha_key(normalize_formula(formula, table))
    flags = mask[0] if side == "ant" else mask[1]
    forms = proof.sequent.ant if side == "ant" else proof.sequent.suc
    for i, f in enumerate(forms):
        if flags[i] or (side, i) in taken:
            continue
        if alpha_key(normalize_formula(f, table)) == want:
            taken.add((side, i))
            return i
    raise SchemaError(
        f"projection rule application failed: no {side} occurrence of "
        f"{formula_str(formula)} in {sequent_str(proof.sequent)}")


def _apply_unary(node: PRule, prem: Projection, env: Subst,
                 table: SymbolTable) -> Projection:
    def su(f: Formula) -> Formula:
        return normalize_formula(substitute(f, env), table)

    def st(t: Term) -> Term:
        return normalize_term(subst_term(t, env), table)

    r = node.rule
    if r in ("w_l", "w_r"):
        built = (w_l if r == "w_l" else w_r)(prem.proof, su(node.main_formula))
        return Projection(built, _mask_after(built, [prem.mask]))
    taken: set[Pos] = set()
    idx = []
    for pi, side, i in node.aux:
        formula = node.premises[pi].sequent.get(side, i)
        idx.append(_resolve_aux(prem.proof, prem.mask, side, su(formula), taken, table))
    p = prem.proof
    if r == "neg_l":
        built = neg_l(p, idx[0])
    elif r == "neg_r":
        built = neg_r(p, idx[0])
    elif r == "and_l1":
        built = and_l1(p, idx[0], su(node.main_formula.right))
    elif r == "and_l2":
        built = and_l2(p, idx[0], su(node.main_formula.left))
    elif r == "or_r1":
        built = or_r1(p, idx[0], su(node.main_formula.right))
    elif r == "or_r2":
        built = or_r2(p, idx[0], su(node.main_formula.left))
    elif r == "imp_r":
        built = imp_r(p, idx[0], idx[1])
    elif r == "all_l":
        built = all_l(p, idx[0], su(node.main_formula), st(node.inst_term))
    elif r == "ex_r":
        built = ex_r(p, idx[0], su(node.main_formula), st(node.inst_term))
    elif r == "all_r":
        built = all_r(p, idx[0], su(node.main_formula), st(node.eigen))
    elif r == "ex_l":
        built = ex_l(p, idx[0], su(node.main_formula), st(node.eigen))
    elif r == "c_l":
        built = c_l(p, *sorted(idx))
    elif r == "c_r":
        built = c_r(p, *sorted(idx))
    else:
        raise SchemaError(f"unsupported rule in projection term: {r}")
    return Projection(built, _mask_after(built, [prem.mask]))


def _apply_binary(node: PRule, left: Projection, right: Projection,
                  env: Subst, table: SymbolTable) -> Projection:
    def su(f: Formula) -> Formula:
        return normalize_formula(substitute(f, env), table)

    r = node.rule
    if r == "cut":
        raise SchemaError("cut inside a projection product")
    (pl, sl, il), (pr_, sr, jr) = node.aux
    i = _resolve_aux(left.proof, left.mask, sl,
                     su(node.premises[pl].sequent.get(sl, il)), set(), table)
    j = _resolve_aux(right.proof, right.mask, sr,
                     su(node.premises[pr_].sequent.get(sr, jr)), set(), table)
    if r == "and_r":
        built = and_r(left.proof, right.proof, i, j)
    elif r == "or_l":
        built = or_l(left.proof, right.proof, i, j)
    elif r == "imp_l":
        built = imp_l(left.proof, right.proof, i, j)
    else:
        raise SchemaError(f"unsupported rule in projection term: {r}")
    return Projection(built, _mask_after(built, [left.mask, right.mask]))


def eval_proj_term(
    t: ProjTerm,
    env: Subst,
    rules: Optional[dict[ConfigKey, ProjRule]],
    table: SymbolTable,
) -> list[Projection]:
    """Evaluate a projection term to concrete cut-free proofs; `env` carries
    the parameter instantiation for the current rule body."""

    def ev(t: ProjTerm, env: Subst) -> list[Projection]:
        if isinstance(t, PTLeaf):
            s = normalize_sequent(subst_sequent(t.sequent, env), table)
            return [Projection(ax(s), t.mask)]
        if isinstance(t, PTApp):
            return _dedupe(_apply_unary(t.node, pr, env, table)
                           for pr in ev(t.inner, env))
        if isinstance(t, PTWeak):
            out = []
            for pr in ev(t.inner, env):
                p, (am, sm) = pr.proof, pr.mask
                for f in reversed(t.ant):
                    p = w_l(p, normalize_formula(substitute(f, env), table))
                    am = (False,) + am
                for f in t.suc:
                    p = w_r(p, normalize_formula(substitute(f, env), table))
                    sm = sm + (False,)
                out.append(Projection(p, (am, sm)))
            return _dedupe(out)
        if isinstance(t, PTPlus):
            return _dedupe(ev(t.left, env) + ev(t.right, env))
        if isinstance(t, PTTimes):
            return _dedupe(
                _apply_binary(t.node, a, b, env, table)
                for a in ev(t.left, env) for b in ev(t.right, env))
        assert isinstance(t, PTSym)
        if rules is None:
            raise SchemaError(f"projection symbol {xi_str(t)} without a rewrite system")
        value = numeral_value(normalize_term(subst_term(t.arg, env), table))
        if value is None:
            raise SchemaError(f"projection symbol argument is not a numeral: {xi_str(t)}")
        key = (t.target, t.config)
        if key not in rules:
            raise SchemaError(f"no rewrite rule for projection symbol {xi_str(t)}")
        rule = rules[key]
        if value == 0:
            return ev(rule.base, {})
        return ev(rule.step, {svar(STEP_PARAM): numeral(value - 1)})

    return ev(t, env)


def projections_at(ps: ProjSchema, gamma: int, key: Optional[ConfigKey] = None,
                   check: bool = True) -> list[Projection]:
    """The projection set of a (pair, configuration) symbol at a concrete
    parameter value; every member is verified cut-free unless `check` is
    disabled."""
    key = key or ps.start
    if key not in ps.rules:
        raise SchemaError(f"unknown projection symbol {key}")
    sym = PTSym(key[0], key[1], numeral(gamma))
    projs = eval_proj_term(sym, {}, ps.rules, ps.table)
    if check:
        for pr in projs:
            report = check_proof(pr.proof, ps.table, {}, allow_links=False,
                                 allow_ind=False, cut_grade="none")
            if not report.ok:
                msgs = "; ".join(d.message for d in report.diagnostics)
                raise SchemaError(f"projection fails checking: {msgs}")
    return projs


def proj_set_of_proof(proof: Proof, table: SymbolTable,
                      omega: Iterable[Pos] = ()) -> list[Projection]:
    """Projection set of a link-free proof, the evaluation-side oracle for
    the commutation property."""
    xi = extract_xi(proof, omega, table=table)
    return eval_proj_term(xi, {}, None, table)


def projection_for_clause(projs: Iterable[Projection], s_gamma: Sequent,
                          clause: Sequent, table: SymbolTable) -> Projection:
    """The projection whose clause part matches `clause` (exactly, then
    modulo variable renaming) and whose remaining end-sequent is `s_gamma`."""
    want = multiset_key(normalize_sequent(clause, table))
    goal = normalize_sequent(s_gamma, table)
    fallback = None
    for pr in projs:
        if not multiset_equal(pr.base_part(), goal):
            continue
        if multiset_key(pr.clause_part()) == want:
            return pr
        if fallback is None and is_variant(pr.clause_part(), clause):
            fallback = pr
    if fallback is not None:
        return fallback
    raise SchemaError(f"no projection for clause {sequent_str(clause)}")
