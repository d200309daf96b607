"""Characteristic clause-set terms.

Extraction walks a proof with its ancestor marking and produces a term over
clause leaves, sum (union) and product (merge) nodes, and clause-set symbols
standing for the characteristic term of a linked pair under a configuration.
A rewrite system with one base and one step rule per reachable (pair,
configuration) evaluates any such symbol at a concrete parameter value to a
plain set of clauses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import SchemaError
from .lang import (
    Subst,
    SymbolTable,
    Term,
    normalize_term,
    numeral,
    numeral_value,
    subst_term,
    svar,
    term_str,
)
from .proofs import Marking, PAxiom, PLink, PRule, Pos, Proof, mark_ancestors
from .schema import (
    STEP_PARAM,
    ConfigKey,
    ProofSchema,
    canonical_config,
    reachable_configs,
)
from .sequents import Sequent, merge_sequents, normalize_sequent, sequent_str, subst_sequent


@dataclass(frozen=True)
class CTLeaf:
    clause: Sequent


@dataclass(frozen=True)
class CTPlus:
    left: "ClauseTerm"
    right: "ClauseTerm"


@dataclass(frozen=True)
class CTTimes:
    left: "ClauseTerm"
    right: "ClauseTerm"


@dataclass(frozen=True)
class CTSym:
    """Clause-set symbol for (target pair, configuration) at an arithmetic
    argument."""

    target: str
    config: tuple[Pos, ...]
    arg: Term


@dataclass(frozen=True)
class CTVar:
    """Clause-set variable, bound only by substitutions supplied with
    resolution schemata."""

    name: str


ClauseTerm = CTLeaf | CTPlus | CTTimes | CTSym | CTVar


def ct_str(t: ClauseTerm) -> str:
    if isinstance(t, CTLeaf):
        return f"[{sequent_str(t.clause)}]"
    if isinstance(t, CTPlus):
        return f"({ct_str(t.left)} + {ct_str(t.right)})"
    if isinstance(t, CTTimes):
        return f"({ct_str(t.left)} x {ct_str(t.right)})"
    if isinstance(t, CTSym):
        cfg = ",".join(f"{side}.{i}" for side, i in t.config)
        return f"cl[{t.target};{cfg}]({term_str(t.arg)})"
    return t.name


def marked_part(sequent: Sequent, flags: tuple[tuple[bool, ...], tuple[bool, ...]]) -> Sequent:
    am, sm = flags
    return Sequent(
        tuple(f for f, b in zip(sequent.ant, am) if b),
        tuple(f for f, b in zip(sequent.suc, sm) if b),
    )


def extract_theta(
    proof: Proof,
    omega: Iterable[Pos] = (),
    table: Optional[SymbolTable] = None,
    marking: Optional[Marking] = None,
    link_configs: Optional[dict[int, ConfigKey]] = None,
) -> ClauseTerm:
    """Clause-set term of a proof under a configuration: axioms contribute
    their marked part, links contribute clause-set symbols, unary inferences
    pass through, binary inferences join by sum on marked auxiliaries and by
    product otherwise."""
    if marking is None:
        marking = mark_ancestors(proof, set(omega))

    def link_sym(node: PLink) -> CTSym:
        if link_configs is not None and id(node) in link_configs:
            target, cfg = link_configs[id(node)]
            return CTSym(target, cfg, node.arith_arg)
        marked = marking.marked_positions(node)
        if table is not None:
            cfg = canonical_config(node.sequent, marked, table)
        else:
            cfg = tuple(sorted(marked))
        return CTSym(node.target, cfg, node.arith_arg)

    def walk(node: Proof) -> ClauseTerm:
        if isinstance(node, PAxiom):
            return CTLeaf(marked_part(node.sequent, marking.of(node)))
        if isinstance(node, PLink):
            return link_sym(node)
        assert isinstance(node, PRule)
        if len(node.premises) == 1:
            return walk(node.premises[0])
        left = walk(node.premises[0])
        right = walk(node.premises[1])
        statuses = [marking.is_marked(node.premises[pi], side, i)
                    for pi, side, i in node.aux]
        if all(statuses):
            return CTPlus(left, right)
        if not any(statuses):
            return CTTimes(left, right)
        raise SchemaError(f"binary rule {node.rule} with mixed-ancestry auxiliaries")

    return walk(proof)


@dataclass
class CharRule:
    base: ClauseTerm
    step: ClauseTerm


@dataclass
class CharSchema:
    rules: dict[ConfigKey, CharRule]
    table: SymbolTable
    start: ConfigKey


def build_char_schema(schema: ProofSchema) -> CharSchema:
    """One base and one step rewrite rule per reachable (pair,
    configuration)."""
    configs = reachable_configs(schema)
    rules: dict[ConfigKey, CharRule] = {}
    for key, info in configs.items():
        base = extract_theta(info.pair.base, marking=info.base_marking,
                             table=schema.table, link_configs=info.link_targets)
        step = extract_theta(info.pair.step, marking=info.step_marking,
                             table=schema.table, link_configs=info.link_targets)
        rules[key] = CharRule(base, step)
    return CharSchema(rules, schema.table, (schema.main.name, ()))


def _dedupe(clauses: Iterable[Sequent]) -> tuple[Sequent, ...]:
    return tuple(dict.fromkeys(clauses))


def eval_clause_term(
    t: ClauseTerm,
    env: Subst,
    rules: Optional[dict[ConfigKey, CharRule]],
    table: SymbolTable,
    memo: Optional[dict] = None,
) -> tuple[Sequent, ...]:
    """Evaluate a clause-set term to concrete clauses; `env` carries the
    parameter instantiation for the current rule body."""
    if memo is None:
        memo = {}

    def ev(t: ClauseTerm, env: Subst) -> tuple[Sequent, ...]:
        if isinstance(t, CTLeaf):
            return (normalize_sequent(subst_sequent(t.clause, env), table),)
        if isinstance(t, CTPlus):
            return _dedupe(ev(t.left, env) + ev(t.right, env))
        if isinstance(t, CTTimes):
            left, right = ev(t.left, env), ev(t.right, env)
            return _dedupe(merge_sequents([a, b]) for a in left for b in right)
        if isinstance(t, CTSym):
            if rules is None:
                raise SchemaError(f"clause-set symbol {ct_str(t)} without a rewrite system")
            value = numeral_value(normalize_term(subst_term(t.arg, env), table))
            if value is None:
                raise SchemaError(f"clause-set symbol argument is not a numeral: {ct_str(t)}")
            key = (t.target, t.config)
            if key not in rules:
                raise SchemaError(f"no rewrite rule for clause-set symbol {ct_str(t)}")
            mkey = (t.target, t.config, value)
            if mkey not in memo:
                rule = rules[key]
                if value == 0:
                    memo[mkey] = ev(rule.base, {})
                else:
                    memo[mkey] = ev(rule.step, {svar(STEP_PARAM): numeral(value - 1)})
            return memo[mkey]
        raise SchemaError(f"unbound clause-set variable {t.name}")

    return ev(t, env)


def clause_set_at(cs: CharSchema, gamma: int, key: Optional[ConfigKey] = None) -> list[Sequent]:
    """The clause set of a (pair, configuration) symbol at a concrete
    parameter value; defaults to the main pair with empty configuration."""
    key = key or cs.start
    if key not in cs.rules:
        raise SchemaError(f"unknown clause-set symbol {key}")
    sym = CTSym(key[0], key[1], numeral(gamma))
    return list(eval_clause_term(sym, {}, cs.rules, cs.table))


def char_clause_set(proof: Proof, table: SymbolTable,
                    omega: Iterable[Pos] = ()) -> list[Sequent]:
    """Characteristic clause set of a link-free proof, the evaluation-side
    oracle for the commutation property."""
    theta = extract_theta(proof, omega, table=table)
    return list(eval_clause_term(theta, {}, None, table))
