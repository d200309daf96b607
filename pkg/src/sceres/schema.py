"""Proof schemata: ordered sequences of proof pairs connected by links.

A pair names a parameterized end sequent together with a base proof (the
parameter set to 0) and a step proof (the parameter set to k+1).  Links may
point at later pairs anywhere and at the pair itself only inside the step,
with argument exactly k; evaluation at a concrete value unfolds all links
and normalizes every formula.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import CheckReport, SchemaError
from .lang import (
    ZERO,
    SymbolTable,
    Term,
    V2App,
    Var,
    alpha_equal,
    free_terms,
    normalize_term,
    numeral,
    numeral_value,
    s as succ,
    svar,
    validate_rewrite_system,
)
from .proofs import (
    Marking,
    PAxiom,
    PLink,
    PRule,
    Pos,
    Proof,
    _rebuild,
    align_positions,
    all_r,
    check_proof,
    ex_l,
    map_proof,
    mark_ancestors,
)
from .sequents import Sequent, normalize_sequent, sequent_str, subst_sequent

PARAM = "n"
STEP_PARAM = "k"


@dataclass
class SchemaPair:
    """One proof pair: `sequent` has the free parameter n; `base` proves the
    0 instance and `step` the k+1 instance."""

    name: str
    sequent: Sequent
    base: Proof
    step: Proof


class ProofSchema:
    def __init__(self, pairs: Iterable[SchemaPair], table: SymbolTable):
        self.pairs = list(pairs)
        self.table = table
        self.by_name: dict[str, SchemaPair] = {}
        self.index: dict[str, int] = {}
        for i, p in enumerate(self.pairs):
            if p.name in self.by_name:
                raise SchemaError(f"duplicate proof symbol {p.name}")
            self.by_name[p.name] = p
            self.index[p.name] = i
        if not self.pairs:
            raise SchemaError("a proof schema needs at least one pair")

    @property
    def main(self) -> SchemaPair:
        return self.pairs[0]

    def pair(self, name: str) -> SchemaPair:
        if name not in self.by_name:
            raise SchemaError(f"unknown proof symbol {name}")
        return self.by_name[name]

    def instantiated_sequent(self, gamma: int, name: Optional[str] = None) -> Sequent:
        p = self.by_name[name] if name else self.main
        inst = subst_sequent(p.sequent, {svar(PARAM): numeral(gamma)})
        return normalize_sequent(inst, self.table)


def _sequents_align(a: Sequent, b: Sequent, table: SymbolTable) -> bool:
    """Position-wise match after normalization; splicing a proof for a link
    relies on the layouts agreeing, not just the multisets."""
    na, nb = normalize_sequent(a, table), normalize_sequent(b, table)
    if len(na.ant) != len(nb.ant) or len(na.suc) != len(nb.suc):
        return False
    return all(alpha_equal(x, y) for x, y in zip(na.ant + na.suc, nb.ant + nb.suc))


def _link_expected(schema: ProofSchema, node: PLink) -> Optional[Sequent]:
    if node.target not in schema.by_name:
        return None
    tpl = schema.by_name[node.target].sequent
    return subst_sequent(tpl, {svar(PARAM): node.arith_arg})


def check_schema(schema: ProofSchema) -> CheckReport:
    """Validate the rewrite system, both proofs of every pair, the link
    discipline, and the layout agreement at every link."""
    report = CheckReport()
    for msg in validate_rewrite_system(schema.table):
        report.add("signature", msg)
    table = schema.table
    for pair in schema.pairs:
        base_es = subst_sequent(pair.sequent, {svar(PARAM): ZERO})
        step_es = subst_sequent(pair.sequent, {svar(PARAM): succ(svar(STEP_PARAM))})
        if not _sequents_align(pair.base.sequent, base_es, table):
            report.add(pair.name, f"base proof ends in {sequent_str(pair.base.sequent)}, "
                                  f"wanted the 0 instance {sequent_str(base_es)}")
        if not _sequents_align(pair.step.sequent, step_es, table):
            report.add(pair.name, f"step proof ends in {sequent_str(pair.step.sequent)}, "
                                  f"wanted the k+1 instance {sequent_str(step_es)}")
        for kind, proof in (("base", pair.base), ("step", pair.step)):
            for node in proof.nodes():
                if not isinstance(node, PLink):
                    continue
                where = f"{pair.name}.{kind}"
                if node.target not in schema.by_name:
                    report.add(where, f"link to undeclared proof symbol {node.target}")
                    continue
                ti, mi = schema.index[node.target], schema.index[pair.name]
                if ti < mi:
                    report.add(where, f"link to earlier proof symbol {node.target}")
                elif ti == mi:
                    arg = normalize_term(node.arith_arg, table)
                    if kind != "step" or arg != svar(STEP_PARAM):
                        report.add(where, f"self link must sit in the step proof with "
                                          f"argument {STEP_PARAM}, got {arg}")
                expected = _link_expected(schema, node)
                if expected is not None and not _sequents_align(node.sequent, expected, table):
                    report.add(where, f"link sequent {sequent_str(node.sequent)} does not "
                                      f"match {sequent_str(expected)}")
            sub = check_proof(proof, table, link_env=lambda l: _link_expected(schema, l),
                              allow_ind=False)
            for d in sub.diagnostics:
                report.add(f"{pair.name}.{kind}.{d.path}", d.message)
    return report


def evaluate_schema(schema: ProofSchema, gamma: int, name: Optional[str] = None) -> Proof:
    """Unfold all links at a concrete parameter value; the result is link
    free with every formula normalized."""
    table = schema.table

    def eval_pair(pname: str, value: int) -> Proof:
        pair = schema.pair(pname)
        if value == 0:
            proof, fo = pair.base, {}
        else:
            proof, fo = pair.step, {svar(STEP_PARAM): numeral(value - 1)}

        def splice(lnode: PLink, tr_term) -> Proof:
            arg = tr_term(lnode.arith_arg)
            av = numeral_value(arg)
            if av is None:
                raise SchemaError(f"link to {lnode.target} has non-numeric argument "
                                  f"{arg} during evaluation")
            sub = eval_pair(lnode.target, av)
            expected = normalize_sequent(subst_sequent(lnode.sequent, fo), table)
            if not _sequents_align(sub.sequent, expected, table):
                raise SchemaError(f"unfolded {lnode.target} ends in "
                                  f"{sequent_str(sub.sequent)}, link wants "
                                  f"{sequent_str(expected)}")
            return sub

        return map_proof(proof, fo=fo, table=table, link_fn=splice)

    target = name or schema.main.name
    result = eval_pair(target, gamma)
    want = schema.instantiated_sequent(gamma, target)
    if not _sequents_align(result.sequent, want, table):
        raise SchemaError(f"evaluation at {gamma} ends in {sequent_str(result.sequent)}, "
                          f"wanted {sequent_str(want)}")
    return result


# ---------------------------------------------------------------------------
# regularization


def _global_vars(proof: Proof) -> set[Term]:
    out: set[Term] = set()
    for node in proof.nodes():
        if isinstance(node, PLink):
            for t in node.term_args:
                out |= {v for v in free_terms(t) if isinstance(v, Var)}
    return out


def _fresh_v2_name(table: SymbolTable, counter: list[int]) -> str:
    while True:
        name = f"ev{counter[0]}"
        counter[0] += 1
        if name not in table.v2_vars and name not in table.fo_vars:
            table.v2_vars.add(name)
            return name


def regularize(schema: ProofSchema) -> ProofSchema:
    """Replace every plain eigenvariable by a fresh applied variable so that
    distinct unfoldings of a step receive distinct variables: index 0 in base
    proofs, k+1 in step proofs, 0 for variables shared through link
    arguments.  Applied-variable eigenterms are left alone, so the pass is
    idempotent."""
    table = schema.table
    counter = [0]

    def regularize_proof(proof: Proof, idx: Term) -> Proof:
        global_vs = _global_vars(proof)

        def walk(node: Proof) -> Proof:
            if isinstance(node, (PAxiom, PLink)):
                return node
            assert isinstance(node, PRule)
            prems = tuple(walk(p) for p in node.premises)
            if node.rule in ("all_r", "ex_l") and isinstance(node.eigen, Var):
                fresh = V2App(_fresh_v2_name(table, counter),
                              ZERO if node.eigen in global_vs else idx)
                prem = map_proof(prems[0], fo={node.eigen: fresh}, table=table)
                build = all_r if node.rule == "all_r" else ex_l
                return build(prem, node.aux[0][2], node.main_formula, fresh)
            if prems == node.premises:
                return node
            return _rebuild(node, prems)

        return walk(proof)

    pairs = []
    for pair in schema.pairs:
        pairs.append(SchemaPair(
            pair.name,
            pair.sequent,
            regularize_proof(pair.base, ZERO),
            regularize_proof(pair.step, succ(svar(STEP_PARAM))),
        ))
    return ProofSchema(pairs, table)


# ---------------------------------------------------------------------------
# reachable configurations

ConfigKey = tuple[str, tuple[Pos, ...]]


@dataclass
class ConfigInfo:
    pair: SchemaPair
    config: tuple[Pos, ...]
    base_marking: Marking
    step_marking: Marking
    link_targets: dict[int, ConfigKey] = field(default_factory=dict)


def canonical_config(sequent: Sequent, positions: set[Pos],
                     table: SymbolTable) -> tuple[Pos, ...]:
    """Configurations are identified by the multiset of (side, formula)
    they mark; position sets carrying the same multiset collapse onto the
    leftmost alignment, so clause-set symbol identity survives occurrence
    renumbering."""
    wanted = [(side, sequent.get(side, i)) for side, i in sorted(positions)]
    return tuple(sorted(align_positions(sequent, wanted, table)))


def reachable_configs(schema: ProofSchema) -> dict[ConfigKey, ConfigInfo]:
    """Close the set of (pair, marked end-sequent positions) combinations
    under link traversal, starting from the main pair with nothing marked.
    The stored markings flag every configuration and cut ancestor."""
    out: dict[ConfigKey, ConfigInfo] = {}
    start: ConfigKey = (schema.main.name, ())
    queue: deque[ConfigKey] = deque([start])
    seen = {start}
    while queue:
        key = queue.popleft()
        pname, config = key
        pair = schema.pair(pname)
        info = ConfigInfo(pair, config,
                          mark_ancestors(pair.base, set(config)),
                          mark_ancestors(pair.step, set(config)))
        out[key] = info
        for marking, proof in ((info.base_marking, pair.base),
                               (info.step_marking, pair.step)):
            for node in proof.nodes():
                if not isinstance(node, PLink):
                    continue
                marked = marking.marked_positions(node)
                tkey: ConfigKey = (
                    node.target,
                    canonical_config(node.sequent, marked, schema.table),
                )
                info.link_targets[id(node)] = tkey
                if tkey not in seen:
                    seen.add(tkey)
                    queue.append(tkey)
    return out
