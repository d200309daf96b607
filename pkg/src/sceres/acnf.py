"""Ground refutations turned into proofs with at most atomic cuts.

Two stages.  First a ground resolution deduction is rebuilt as a proof
skeleton whose only inferences are contractions and atomic cuts.  Then the
skeleton's leaf clauses are replaced by matching projections, whose side
formulas carry the target end-sequent through every step, and the stacked
copies of that end-sequent are contracted away at the root.  The pipeline
entry point runs both stages per parameter value after extracting the
clause-set and projection schemata once up front.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .clauseterms import CharSchema, build_char_schema, clause_set_at, marked_part
from .errors import CheckReport, SchemaError
from .lang import (
    OMEGA,
    Atom,
    SymbolTable,
    V2App,
    Var,
    alpha_key,
    formula_str,
    free_terms,
    normalize_formula,
)
from .projections import Mask, Projection, ProjSchema, build_proj_schema, projections_at
from .proofs import Proof, PRule, ax, c_l, c_r, check_proof, cut, map_proof
from .resolution import (
    RDLeaf,
    RefutationWitness,
    ResolutionDeduction,
    ResolutionSchema,
    check_refutation,
    check_resolution_schema,
    check_witness,
    deduction_size,
    eval_resolution_schema,
    ground_refute,
)
from .schema import ProofSchema, check_schema, evaluate_schema, regularize
from .sequents import EMPTY, Sequent, match_clause, multiset_equal, sequent_str


def proof_inferences(p: Proof) -> int:
    """Count rule applications; axioms and links contribute nothing."""
    if isinstance(p, PRule):
        return 1 + sum(proof_inferences(q) for q in p.premises)
    return 0


def count_cuts(p: Proof) -> int:
    if isinstance(p, PRule):
        own = 1 if p.rule == "cut" else 0
        return own + sum(count_cuts(q) for q in p.premises)
    return 0


def _require_ground(d: ResolutionDeduction) -> None:
    def scan(obj, what: str) -> None:
        for t in free_terms(obj):
            if isinstance(t, Var) and t.sort == OMEGA:
                raise SchemaError(
                    f"arithmetic variable {t.name} in {what}; "
                    "instantiate the parameter first")
            if isinstance(t, V2App):
                raise SchemaError(
                    f"uninstantiated second-order variable {t} in {what}")

    if isinstance(d, RDLeaf):
        for _, _, fo in d.clause.formulas():
            scan(fo, f"leaf clause {sequent_str(d.clause)}")
        return
    scan(d.pivot, f"resolved atom {formula_str(d.pivot)}")
    _require_ground(d.left)
    _require_ground(d.right)


def _collapse(p: Proof, side: str, pivot: Atom) -> Proof:
    """Contract every occurrence of the pivot on one side down to the first."""
    while True:
        forms = p.sequent.ant if side == "ant" else p.sequent.suc
        at = [i for i, f in enumerate(forms) if f == pivot]
        if not at:
            raise SchemaError(
                f"resolved atom {formula_str(pivot)} does not occur in the "
                f"{side} of {sequent_str(p.sequent)}")
        if len(at) == 1:
            return p
        p = c_l(p, at[0], at[1]) if side == "ant" else c_r(p, at[0], at[1])


def transform_tr(d: ResolutionDeduction) -> Proof:
    """Rebuild a ground resolution deduction as a proof skeleton.

    Leaves become axiom sequents.  Each resolution step contracts the
    duplicate pivot occurrences on the two facing sides down to one and
    ends in an atomic cut, so every node of the skeleton concludes exactly
    the clause its deduction node carries.
    """
    _require_ground(d)
    return _tr(d)


def _tr(d: ResolutionDeduction) -> Proof:
    if isinstance(d, RDLeaf):
        return ax(d.clause)
    if d.pseudo:
        raise SchemaError(
            f"step on {formula_str(d.pivot)} removed nothing; "
            "no cut realizes it")
    lp = _collapse(_tr(d.left), "suc", d.pivot)
    rp = _collapse(_tr(d.right), "ant", d.pivot)
    p = cut(lp, rp, lp.sequent.suc.index(d.pivot), rp.sequent.ant.index(d.pivot))
    if p.sequent != d.clause:
        raise SchemaError(
            f"skeleton concludes {sequent_str(p.sequent)} where the deduction "
            f"has {sequent_str(d.clause)}")
    return p


# ---------------------------------------------------------------------------
# projection plugging


@dataclass
class AcnfResult:
    """Outcome for one parameter value: the assembled proof when one
    exists, size accounting, and the checker verdict."""

    proof: Optional[Proof]
    gamma: int
    stats: dict[str, int] = field(default_factory=dict)
    report: CheckReport = field(default_factory=CheckReport)


def _mask_through(node: PRule, prem_masks: list[Mask]) -> Mask:
    am = [False] * len(node.sequent.ant)
    sm = [False] * len(node.sequent.suc)
    for (side, i), sources in node.flows.items():
        vals = [prem_masks[pi][0 if s == "ant" else 1][j] for pi, s, j in sources]
        if vals and all(vals):
            (am if side == "ant" else sm)[i] = True
    return (tuple(am), tuple(sm))


def _inverted(mask: Mask) -> Mask:
    return (tuple(not b for b in mask[0]), tuple(not b for b in mask[1]))


def _plug_leaf(clause: Sequent, projections: Sequence[Projection],
               goal: Sequent, table: SymbolTable) -> tuple[Proof, Mask]:
    """First projection whose clause part matches the leaf wins; its free
    variables take the values the match assigns them."""
    for pr in projections:
        if not multiset_equal(pr.base_part(), goal):
            continue
        sub = match_clause(pr.clause_part(), clause, exact=True)
        if sub is None:
            continue
        proof = map_proof(pr.proof, fo=sub, table=table) if sub else pr.proof
        got = marked_part(proof.sequent, pr.mask)
        if not multiset_equal(got, clause):
            raise SchemaError(
                f"projection instance carries {sequent_str(got)} where the "
                f"skeleton leaf wants {sequent_str(clause)}")
        rest = marked_part(proof.sequent, _inverted(pr.mask))
        if not multiset_equal(rest, goal):
            raise SchemaError(
                f"instantiation leaked into the side formulas: "
                f"{sequent_str(rest)} is not {sequent_str(goal)}")
        return proof, pr.mask
    raise SchemaError(f"no projection matches skeleton leaf {sequent_str(clause)}")


def _collapse_marked(p: Proof, mask: Mask, side: str,
                     pivot: Atom) -> tuple[Proof, Mask, int]:
    while True:
        forms = p.sequent.ant if side == "ant" else p.sequent.suc
        flags = mask[0] if side == "ant" else mask[1]
        at = [i for i, f in enumerate(forms) if flags[i] and f == pivot]
        if not at:
            raise SchemaError(
                f"resolved atom {formula_str(pivot)} is not among the marked "
                f"{side} formulas of {sequent_str(p.sequent)}")
        if len(at) == 1:
            return p, mask, at[0]
        q = c_l(p, at[0], at[1]) if side == "ant" else c_r(p, at[0], at[1])
        mask = _mask_through(q, [mask])
        p = q


def _assemble(d: ResolutionDeduction, projections: Sequence[Projection],
              goal: Sequent, table: SymbolTable) -> tuple[Proof, Mask]:
    if isinstance(d, RDLeaf):
        return _plug_leaf(d.clause, projections, goal, table)
    if d.pseudo:
        raise SchemaError(
            f"step on {formula_str(d.pivot)} removed nothing; "
            "no cut realizes it")
    lp, lm = _assemble(d.left, projections, goal, table)
    rp, rm = _assemble(d.right, projections, goal, table)
    lp, lm, i = _collapse_marked(lp, lm, "suc", d.pivot)
    rp, rm, j = _collapse_marked(rp, rm, "ant", d.pivot)
    p = cut(lp, rp, i, j)
    mask = _mask_through(p, [lm, rm])
    got = marked_part(p.sequent, mask)
    if not multiset_equal(got, d.clause):
        raise SchemaError(
            f"clause part {sequent_str(got)} does not match the deduction "
            f"clause {sequent_str(d.clause)}")
    return p, mask


def _contract_to(p: Proof, goal: Sequent) -> Proof:
    """Contract duplicated goal formulas away, antecedent before succedent,
    always keeping the first occurrence of each formula."""
    for side, want_forms in (("ant", goal.ant), ("suc", goal.suc)):
        want = Counter(alpha_key(f) for f in want_forms)
        while True:
            forms = p.sequent.ant if side == "ant" else p.sequent.suc
            counts = Counter(alpha_key(f) for f in forms)
            first: dict = {}
            hit = None
            for idx, f in enumerate(forms):
                k = alpha_key(f)
                if k not in first:
                    first[k] = idx
                elif counts[k] > want.get(k, 0):
                    hit = (first[k], idx)
                    break
            if hit is None:
                break
            p = c_l(p, *hit) if side == "ant" else c_r(p, *hit)
    return p


def assemble_acnf(refutation: ResolutionDeduction,
                  projections: Sequence[Projection], goal: Sequent,
                  table: SymbolTable, gamma: int = 0) -> AcnfResult:
    """Plug projections into a ground refutation and contract to the goal.

    Each leaf clause is replaced by an instance of a matching projection,
    the resolution steps are replayed as atomic cuts over the accumulated
    side formulas, and the stacked copies of the goal are contracted away.
    The goal is compared as given, so normalize it first.  The result is
    checked with cut grade atomic-only.
    """
    projections = list(projections)
    _require_ground(refutation)
    if refutation.clause != EMPTY:
        raise SchemaError(
            f"deduction ends in {sequent_str(refutation.clause)}, "
            "not the empty clause")
    p, _ = _assemble(refutation, projections, goal, table)
    p = _contract_to(p, goal)
    if not multiset_equal(p.sequent, goal):
        raise SchemaError(
            f"assembled end-sequent {sequent_str(p.sequent)} does not match "
            f"the goal {sequent_str(goal)}")
    report = check_proof(p, table, allow_links=False, allow_ind=False,
                         cut_grade="atomic-only")
    stats = {
        "skeleton_size": deduction_size(refutation),
        "projection_count": len(projections),
        "max_projection_size": max(
            (proof_inferences(pr.proof) for pr in projections), default=0),
        "total_inferences": proof_inferences(p),
        "atomic_cuts": count_cuts(p),
    }
    return AcnfResult(proof=p, gamma=gamma, stats=stats, report=report)


# ---------------------------------------------------------------------------
# the pipeline


def _has_compound_cut(schema: ProofSchema) -> bool:
    def walk(p: Proof) -> bool:
        if not isinstance(p, PRule):
            return False
        if p.rule == "cut":
            f = normalize_formula(p.cut_formula, schema.table)
            if not isinstance(f, Atom):
                return True
        return any(walk(q) for q in p.premises)

    return any(walk(pair.base) or walk(pair.step) for pair in schema.pairs)


def _failed(gamma: int, message: str) -> AcnfResult:
    report = CheckReport()
    report.add(f"gamma={gamma}", message)
    return AcnfResult(proof=None, gamma=gamma, stats={}, report=report)


def _join(report: CheckReport) -> str:
    return "; ".join(str(d) for d in report.diagnostics)


def _run_one(schema: ProofSchema, cs: CharSchema, ps: ProjSchema,
             rs: Optional[ResolutionSchema], witness: Optional[RefutationWitness],
             gamma: int, table: SymbolTable) -> AcnfResult:
    clauses = clause_set_at(cs, gamma)
    projs = projections_at(ps, gamma)
    goal = schema.instantiated_sequent(gamma)
    if rs is not None:
        d = eval_resolution_schema(rs, witness or RefutationWitness(), gamma, table)
    else:
        d = ground_refute(clauses, table)
        if d is None:
            raise SchemaError("clause set saturated without the empty clause")
    rrep = check_refutation(d, clauses, table)
    if not rrep.ok:
        raise SchemaError(f"refutation does not check: {_join(rrep)}")
    result = assemble_acnf(d, projs, goal, table, gamma=gamma)
    result.stats["clause_count"] = len(clauses)
    return result


def ceres_pipeline(schema: ProofSchema, gammas: Iterable[int],
                   rs: Optional[ResolutionSchema] = None,
                   witness: Optional[RefutationWitness] = None) -> list[AcnfResult]:
    """Run the whole transformation for a range of parameter values.

    A shared first phase regularizes and checks the schema, extracts the
    clause-set and projection schemata, and admits the optional refutation
    schema and witness.  Each parameter value then gets its own clause
    set, projection set, refutation (evaluated from the schema when one is
    supplied, searched from the clause set otherwise), and assembled
    proof.  A failure at one value is recorded in its result and does not
    stop the others.  A schema with no compound cut is already in the
    target shape, so its instances are returned directly.
    """
    table = schema.table
    schema = regularize(schema)
    rep = check_schema(schema)
    if not rep.ok:
        raise SchemaError(f"schema does not check: {_join(rep)}")
    if not _has_compound_cut(schema):
        out = []
        for gamma in gammas:
            p = evaluate_schema(schema, gamma)
            report = check_proof(p, table, allow_links=False, allow_ind=False,
                                 cut_grade="atomic-only")
            stats = {
                "skeleton_size": 0,
                "projection_count": 0,
                "max_projection_size": 0,
                "total_inferences": proof_inferences(p),
                "atomic_cuts": count_cuts(p),
                "clause_count": 0,
            }
            out.append(AcnfResult(proof=p, gamma=gamma, stats=stats, report=report))
        return out
    cs = build_char_schema(schema)
    ps = build_proj_schema(schema)
    if rs is not None:
        rrep = check_resolution_schema(rs, table)
        if not rrep.ok:
            raise SchemaError(f"resolution schema does not check: {_join(rrep)}")
    if witness is not None:
        wrep = check_witness(witness, table)
        if not wrep.ok:
            raise SchemaError(f"witness does not check: {_join(wrep)}")
    out = []
    for gamma in gammas:
        try:
            out.append(_run_one(schema, cs, ps, rs, witness, gamma, table))
        except SchemaError as exc:
            out.append(_failed(gamma, str(exc)))
    return out
