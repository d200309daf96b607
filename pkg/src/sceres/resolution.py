"""Resolution over schematically defined clause sets.

The ground inference removes every occurrence of the pivot atom from the
succedent of its left premise and the antecedent of its right premise, so
factoring is built in and the step stays sound even when the pivot is
missing from one or both of those sides.  On top of it sit three layers of
recursive definitions: clause symbols (a single clause growing with the
parameter), clause-set symbols (families of clause sets built from
singletons, union and pairwise merge), and resolution symbols (recursively
defined deductions).  Evaluating a resolution schema at a parameter value
and checking the result against a clause set certifies that the clause set
is unsatisfiable; `ground_refute` searches for such a deduction directly at
the instance level when no schema is available.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Union

from .clauseterms import CharSchema, CTLeaf, CTPlus, CTSym, CTTimes, CTVar, ClauseTerm
from .errors import CheckReport, ResourceOut, SchemaError
from .lang import (
    IOTA,
    OMEGA,
    Atom,
    Subst,
    SymbolTable,
    Term,
    V2App,
    V2Subst,
    Var,
    apply_v2_formula,
    compose_substitutions,
    formula_str,
    free_terms,
    has_defined,
    normalize_formula,
    normalize_term,
    numeral,
    numeral_value,
    subst_formula,
    subst_term,
    svar,
    term_str,
    unify_atoms,
)
from .schema import PARAM, STEP_PARAM, ConfigKey, ProofSchema
from .sequents import (
    EMPTY,
    Sequent,
    canonical_clause,
    clause_variables,
    is_clause,
    is_tautology,
    match_clause,
    merge,
    multiset_equal,
    normalize_sequent,
    sequent_str,
    subst_sequent,
    subsumes,
)


# ---------------------------------------------------------------------------
# the ground inference


def _require_arith_ground(s: Sequent, what: str) -> None:
    for _, _, fo in s.formulas():
        for t in free_terms(fo):
            if isinstance(t, Var) and t.sort == OMEGA:
                raise SchemaError(
                    f"arithmetic variable {t.name} in {what}; instantiate the parameter first"
                )


def resolve(c: Sequent, d: Sequent, pivot: Atom,
            table: Optional[SymbolTable] = None) -> tuple[Sequent, bool]:
    """Resolve two clauses on an atom.

    The antecedent of the left premise and the succedent of the right
    survive whole; the two facing sides lose every occurrence of the pivot.
    Returns the resolvent together with a flag marking the degenerate case
    where neither facing side contained the pivot (the inference is sound
    either way).  Rejects non-clauses, clauses with arithmetic variables,
    and, when a table is supplied, unnormalized input.
    """
    for what, part in (("left premise", c), ("right premise", d)):
        if not is_clause(part):
            raise SchemaError(f"{what} is not a clause: {part}")
        _require_arith_ground(part, what)
    for t in free_terms(pivot):
        if isinstance(t, Var) and t.sort == OMEGA:
            raise SchemaError(f"arithmetic variable {t.name} in pivot {formula_str(pivot)}")
    if table is not None:
        for what, part in (("left premise", c), ("right premise", d)):
            if any(has_defined(fo, table) for fo in part.ant + part.suc):
                raise SchemaError(f"unnormalized {what}: {part}")
        if has_defined(pivot, table):
            raise SchemaError(f"unnormalized pivot: {formula_str(pivot)}")
    kept_suc = tuple(fo for fo in c.suc if fo != pivot)
    kept_ant = tuple(fo for fo in d.ant if fo != pivot)
    pseudo = len(kept_suc) == len(c.suc) and len(kept_ant) == len(d.ant)
    return Sequent(c.ant + kept_ant, kept_suc + d.suc), pseudo


# ---------------------------------------------------------------------------
# clause expressions and clause symbols


@dataclass(frozen=True, slots=True)
class CSClause:
    """A literal clause."""

    clause: Sequent


@dataclass(frozen=True, slots=True)
class CSVar:
    """A clause variable, replaced by a clause during evaluation."""

    name: str


@dataclass(frozen=True, slots=True)
class CSCompose:
    """Side-by-side merge of two clause expressions."""

    left: "ClauseExpr"
    right: "ClauseExpr"


@dataclass(frozen=True, slots=True)
class CSApp:
    """Application of a defined clause symbol at a counter argument."""

    symbol: str
    arg: Term
    v2_args: tuple[str, ...] = ()
    clause_args: tuple["ClauseExpr", ...] = ()


ClauseExpr = Union[CSClause, CSVar, CSCompose, CSApp]


@dataclass
class ClauseSchemaDef:
    """A defined clause symbol: at 0 the base expression, at v+1 the value
    at v merged with the step delta taken at step parameter v."""

    symbol: str
    base: ClauseExpr
    step_delta: Sequent
    v2_params: tuple[str, ...] = ()
    clause_params: tuple[str, ...] = ()


def clause_expr_nodes(e: ClauseExpr) -> Iterator[ClauseExpr]:
    yield e
    if isinstance(e, CSCompose):
        yield from clause_expr_nodes(e.left)
        yield from clause_expr_nodes(e.right)
    elif isinstance(e, CSApp):
        for a in e.clause_args:
            yield from clause_expr_nodes(a)


def _check_clause_vars(s: Sequent, v2_params: tuple[str, ...], arith_ok: tuple[str, ...],
                       table: SymbolTable, path: str, report: CheckReport,
                       allow_fo: bool = False) -> None:
    for _, _, fo in s.formulas():
        for t in free_terms(fo):
            if isinstance(t, Var) and t.sort == OMEGA:
                if t.name not in arith_ok:
                    report.add(path, f"stray arithmetic variable {t.name}")
            elif isinstance(t, Var):
                if not allow_fo:
                    report.add(path, f"free individual variable {t.name}")
            elif isinstance(t, V2App):
                if t.name not in v2_params and t.name not in table.v2_vars:
                    report.add(path, f"undeclared second-order variable {t.name}")


def check_clause_schema(d: ClauseSchemaDef, table: SymbolTable) -> CheckReport:
    """Variable discipline for a clause symbol: the base is a clause over
    the declared parameters with no free individual variables, the step
    delta may additionally use the step parameter."""
    report = CheckReport()
    path = f"{d.symbol}/base"
    for node in clause_expr_nodes(d.base):
        if isinstance(node, CSApp):
            report.add(path, "the base of a clause symbol cannot apply other clause symbols")
        elif isinstance(node, CSVar):
            if node.name not in d.clause_params:
                report.add(path, f"unbound clause variable {node.name}")
        elif isinstance(node, CSClause):
            _check_clause_vars(normalize_sequent(node.clause, table), d.v2_params,
                               (), table, path, report)
    _check_clause_vars(normalize_sequent(d.step_delta, table), d.v2_params,
                       (STEP_PARAM,), table, f"{d.symbol}/step", report)
    return report


# evaluation environment shared by the clause, clause-set, and resolution
# layers; `arith` is `vartheta` plus the step-parameter bindings of the
# unfolding in progress, `v2map` renames formal second-order parameters to
# the actuals of the enclosing application, `bound` holds evaluated clause
# arguments.


@dataclass
class _Env:
    table: SymbolTable
    clause_defs: dict[str, ClauseSchemaDef]
    vartheta: Subst
    lam: dict[str, Sequent]
    arith: Subst
    v2map: V2Subst
    bound: dict[str, Sequent]
    memo: dict


def _as_clause_defs(defs) -> dict[str, ClauseSchemaDef]:
    if isinstance(defs, dict):
        return dict(defs)
    return {d.symbol: d for d in defs}


def _v2_rename_sequent(s: Sequent, v2map: V2Subst) -> Sequent:
    if not v2map:
        return s
    return Sequent(
        tuple(apply_v2_formula(fo, v2map) for fo in s.ant),
        tuple(apply_v2_formula(fo, v2map) for fo in s.suc),
    )


def _counter_value(t: Term, arith: Subst, table: SymbolTable, what: str) -> int:
    value = numeral_value(normalize_term(subst_term(t, arith), table))
    if value is None:
        raise SchemaError(f"{what} argument is not a numeral: {term_str(t)}")
    return value


def _bind_v2(formals: tuple[str, ...], actuals: tuple[str, ...], v2map: V2Subst) -> V2Subst:
    out: V2Subst = {}
    for formal, actual in zip(formals, actuals):
        out[formal] = v2map.get(actual, ("i", V2App(actual, svar("i"))))
    return out


def _call_key(symbol: str, value: int, v2map: V2Subst, bound: dict[str, Sequent]):
    return (
        symbol,
        value,
        tuple(sorted(v2map.items(), key=lambda kv: kv[0])),
        tuple(sorted(bound.items(), key=lambda kv: kv[0])),
    )


def _eval_clause_expr(e: ClauseExpr, env: _Env) -> Sequent:
    if isinstance(e, CSClause):
        out = _v2_rename_sequent(e.clause, env.v2map)
        return normalize_sequent(subst_sequent(out, env.arith), env.table)
    if isinstance(e, CSVar):
        if e.name in env.bound:
            return env.bound[e.name]
        if e.name in env.lam:
            out = subst_sequent(env.lam[e.name], env.vartheta)
            return normalize_sequent(out, env.table)
        raise SchemaError(f"unbound clause variable {e.name}")
    if isinstance(e, CSCompose):
        return merge(_eval_clause_expr(e.left, env), _eval_clause_expr(e.right, env))
    d = env.clause_defs.get(e.symbol)
    if d is None:
        raise SchemaError(f"unknown clause symbol {e.symbol}")
    if len(e.v2_args) != len(d.v2_params) or len(e.clause_args) != len(d.clause_params):
        raise SchemaError(f"arity mismatch in application of clause symbol {e.symbol}")
    value = _counter_value(e.arg, env.arith, env.table, f"clause symbol {e.symbol}")
    v2local = _bind_v2(d.v2_params, e.v2_args, env.v2map)
    bound = {formal: _eval_clause_expr(a, env)
             for formal, a in zip(d.clause_params, e.clause_args)}
    return _eval_clause_symbol(d, value, v2local, bound, env)


def _eval_clause_symbol(d: ClauseSchemaDef, value: int, v2map: V2Subst,
                        bound: dict[str, Sequent], env: _Env) -> Sequent:
    key = _call_key(d.symbol, value, v2map, bound)
    if key in env.memo:
        return env.memo[key]
    if value == 0:
        out = _eval_clause_expr(
            d.base, replace(env, arith=env.vartheta, v2map=v2map, bound=bound))
    else:
        prev = _eval_clause_symbol(d, value - 1, v2map, bound, env)
        arith = dict(env.vartheta)
        arith[svar(STEP_PARAM)] = numeral(value - 1)
        delta = normalize_sequent(
            subst_sequent(_v2_rename_sequent(d.step_delta, v2map), arith), env.table)
        out = merge(prev, delta)
    env.memo[key] = out
    return out


def eval_clause_schema(e: ClauseExpr, vartheta: Subst, lam: dict[str, Sequent],
                       defs, table: SymbolTable) -> Sequent:
    """Evaluate a clause expression: replace clause variables via `lam`,
    instantiate the counter parameters via `vartheta`, unfold the clause
    symbols, and normalize."""
    env = _Env(table=table, clause_defs=_as_clause_defs(defs), vartheta=dict(vartheta),
               lam=dict(lam), arith=dict(vartheta), v2map={}, bound={}, memo={})
    return _eval_clause_expr(e, env)


# ---------------------------------------------------------------------------
# clause-set terms and clause-set symbols


@dataclass(frozen=True, slots=True)
class CSTVar:
    """A clause-set variable, replaced by a symbol-free term during
    evaluation."""

    name: str


@dataclass(frozen=True, slots=True)
class CSTSingleton:
    """The one-element clause set."""

    element: ClauseExpr


@dataclass(frozen=True, slots=True)
class CSTPlus:
    """Union, deduplicated."""

    left: "ClauseSetTerm"
    right: "ClauseSetTerm"


@dataclass(frozen=True, slots=True)
class CSTTimes:
    """All pairwise merges."""

    left: "ClauseSetTerm"
    right: "ClauseSetTerm"


@dataclass(frozen=True, slots=True)
class CSTApp:
    """Application of a defined clause-set symbol at a counter argument."""

    symbol: str
    arg: Term
    v2_args: tuple[str, ...] = ()
    clause_args: tuple[ClauseExpr, ...] = ()


ClauseSetTerm = Union[CSTVar, CSTSingleton, CSTPlus, CSTTimes, CSTApp]


@dataclass
class ClauseSetSymbolDef:
    """One clause-set symbol with a base and a step rule.  `rank` positions
    the symbol in the termination order; symbols sharing a rank may only
    reference each other at exactly the step parameter."""

    symbol: str
    base: ClauseSetTerm
    step: ClauseSetTerm
    v2_params: tuple[str, ...] = ()
    clause_params: tuple[str, ...] = ()
    rank: Optional[int] = None


@dataclass
class ClauseSetSchemaDef:
    """Mutually recursive clause-set symbols; the first is the entry point.
    `clause_defs` supplies the clause symbols referenced from singletons."""

    symbols: tuple[ClauseSetSymbolDef, ...]
    clause_defs: dict[str, ClauseSchemaDef] = field(default_factory=dict)

    def by_symbol(self) -> dict[str, ClauseSetSymbolDef]:
        return {d.symbol: d for d in self.symbols}


def clause_set_term_nodes(t: ClauseSetTerm) -> Iterator[ClauseSetTerm]:
    yield t
    if isinstance(t, (CSTPlus, CSTTimes)):
        yield from clause_set_term_nodes(t.left)
        yield from clause_set_term_nodes(t.right)


def _effective_ranks(d: ClauseSetSchemaDef) -> dict[str, int]:
    return {sym.symbol: sym.rank if sym.rank is not None else i
            for i, sym in enumerate(d.symbols)}


def check_clause_set_schema(d: ClauseSetSchemaDef, table: SymbolTable) -> CheckReport:
    """Shape and termination discipline for a clause-set schema.  The rank
    order is the normalization witness: every reference either goes to a
    strictly later rank (at any argument) or recurses at the same rank with
    the argument decreased to exactly the step parameter."""
    report = CheckReport()
    defs = d.by_symbol()
    if len(defs) != len(d.symbols):
        report.add("", "duplicate clause-set symbol names")
        return report
    ranks = _effective_ranks(d)
    for cd in d.clause_defs.values():
        report.extend(check_clause_schema(cd, table))
    for sym in d.symbols:
        for rule_name, body, arith_ok in (
            ("base", sym.base, ()),
            ("step", sym.step, (STEP_PARAM,)),
        ):
            path = f"{sym.symbol}/{rule_name}"
            for node in clause_set_term_nodes(body):
                if isinstance(node, CSTApp):
                    target = defs.get(node.symbol)
                    if target is None:
                        report.add(path, f"unknown clause-set symbol {node.symbol}")
                        continue
                    if (len(node.v2_args) != len(target.v2_params)
                            or len(node.clause_args) != len(target.clause_params)):
                        report.add(path, f"arity mismatch in reference to {node.symbol}")
                    if ranks[node.symbol] > ranks[sym.symbol]:
                        continue
                    if ranks[node.symbol] < ranks[sym.symbol]:
                        report.add(path, f"reference to {node.symbol} breaks the rank order")
                    elif rule_name == "base":
                        report.add(path, f"{node.symbol} referenced at the same rank in a base rule")
                    elif node.arg != svar(STEP_PARAM):
                        report.add(path, f"same-rank reference to {node.symbol} "
                                         "must recurse at exactly the step parameter")
                elif isinstance(node, CSTSingleton):
                    for sub in clause_expr_nodes(node.element):
                        if isinstance(sub, CSClause):
                            _check_clause_vars(
                                normalize_sequent(sub.clause, table), sym.v2_params,
                                arith_ok, table, path, report, allow_fo=True)
                        elif isinstance(sub, CSApp) and sub.symbol not in d.clause_defs:
                            report.add(path, f"unknown clause symbol {sub.symbol}")
    return report


def _mu_symbol_free(t: ClauseSetTerm) -> bool:
    return all(not isinstance(n, (CSTApp, CSTVar)) for n in clause_set_term_nodes(t))


_PENDING = object()


def _dedupe_clause_list(items: Iterable[Sequent]) -> tuple[Sequent, ...]:
    return tuple(dict.fromkeys(items))


def _eval_clause_set_term(t: ClauseSetTerm, d: ClauseSetSchemaDef,
                          mu: dict[str, ClauseSetTerm], env: _Env) -> tuple[Sequent, ...]:
    if isinstance(t, CSTSingleton):
        return (_eval_clause_expr(t.element, env),)
    if isinstance(t, CSTPlus):
        return _dedupe_clause_list(
            _eval_clause_set_term(t.left, d, mu, env)
            + _eval_clause_set_term(t.right, d, mu, env))
    if isinstance(t, CSTTimes):
        left = _eval_clause_set_term(t.left, d, mu, env)
        right = _eval_clause_set_term(t.right, d, mu, env)
        return _dedupe_clause_list(merge(a, b) for a in left for b in right)
    if isinstance(t, CSTVar):
        if t.name not in mu:
            raise SchemaError(f"unbound clause-set variable {t.name}")
        return _eval_clause_set_term(mu[t.name], d, mu, env)
    sym = d.by_symbol().get(t.symbol)
    if sym is None:
        raise SchemaError(f"unknown clause-set symbol {t.symbol}")
    if len(t.v2_args) != len(sym.v2_params) or len(t.clause_args) != len(sym.clause_params):
        raise SchemaError(f"arity mismatch in application of clause-set symbol {t.symbol}")
    value = _counter_value(t.arg, env.arith, env.table, f"clause-set symbol {t.symbol}")
    v2local = _bind_v2(sym.v2_params, t.v2_args, env.v2map)
    bound = {formal: _eval_clause_expr(a, env)
             for formal, a in zip(sym.clause_params, t.clause_args)}
    key = ("set",) + _call_key(sym.symbol, value, v2local, bound)
    if env.memo.get(key) is _PENDING:
        raise SchemaError(f"non-terminating unfolding of clause-set symbol {sym.symbol}")
    if key in env.memo:
        return env.memo[key]
    env.memo[key] = _PENDING
    if value == 0:
        inner = replace(env, arith=dict(env.vartheta), v2map=v2local, bound=bound)
        out = _eval_clause_set_term(sym.base, d, mu, inner)
    else:
        arith = dict(env.vartheta)
        arith[svar(STEP_PARAM)] = numeral(value - 1)
        inner = replace(env, arith=arith, v2map=v2local, bound=bound)
        out = _eval_clause_set_term(sym.step, d, mu, inner)
    env.memo[key] = out
    return out


def eval_clause_set_schema(d: ClauseSetSchemaDef, vartheta: Subst,
                           lam: dict[str, Sequent], mu: dict[str, ClauseSetTerm],
                           table: SymbolTable,
                           entry: Optional[str] = None) -> list[Sequent]:
    """Evaluate a clause-set schema to a concrete clause list.  The entry
    symbol (default: the first) is applied to the parameter and its own
    formal arguments; `lam` replaces clause variables, `mu` replaces free
    clause-set variables with symbol-free terms."""
    if not d.symbols:
        raise SchemaError("clause-set schema has no symbols")
    for name, rng in mu.items():
        if not _mu_symbol_free(rng):
            raise SchemaError(
                f"range of clause-set variable {name} must be free of "
                "clause-set symbols and variables")
    sym = d.symbols[0]
    if entry is not None:
        sym = d.by_symbol().get(entry)
        if sym is None:
            raise SchemaError(f"unknown clause-set symbol {entry}")
    env = _Env(table=table, clause_defs=dict(d.clause_defs), vartheta=dict(vartheta),
               lam=dict(lam), arith=dict(vartheta), v2map={}, bound={}, memo={})
    top = CSTApp(sym.symbol, svar(PARAM), sym.v2_params,
                 tuple(CSVar(x) for x in sym.clause_params))
    return list(_eval_clause_set_term(top, d, mu, env))


# ---------------------------------------------------------------------------
# the characteristic rules of a proof schema, viewed as a clause-set schema


def config_symbol_name(key: ConfigKey) -> str:
    name, positions = key
    if not positions:
        return name
    return name + "@" + ",".join(f"{side}.{i}" for side, i in positions)


def _clause_term_as_set_term(t: ClauseTerm) -> ClauseSetTerm:
    if isinstance(t, CTLeaf):
        return CSTSingleton(CSClause(t.clause))
    if isinstance(t, CTPlus):
        return CSTPlus(_clause_term_as_set_term(t.left), _clause_term_as_set_term(t.right))
    if isinstance(t, CTTimes):
        return CSTTimes(_clause_term_as_set_term(t.left), _clause_term_as_set_term(t.right))
    if isinstance(t, CTSym):
        return CSTApp(config_symbol_name((t.target, t.config)), t.arg)
    return CSTVar(t.name)


def char_schema_as_clause_set_schema(cs: CharSchema, schema: ProofSchema) -> ClauseSetSchemaDef:
    """View the characteristic rules of a proof schema as a clause-set
    schema: one symbol per (pair, configuration), ranked by pair position so
    the configurations of one pair may recurse together while references
    across pairs follow the pair order."""
    ranks = {pair.name: i for i, pair in enumerate(schema.pairs)}
    ordered = sorted(cs.rules.items(), key=lambda kv: kv[0] != cs.start)
    symbols = []
    for key, rule in ordered:
        symbols.append(ClauseSetSymbolDef(
            symbol=config_symbol_name(key),
            base=_clause_term_as_set_term(rule.base),
            step=_clause_term_as_set_term(rule.step),
            rank=ranks[key[0]],
        ))
    return ClauseSetSchemaDef(tuple(symbols))


# ---------------------------------------------------------------------------
# resolution terms, schemata, and deductions


@dataclass(frozen=True, slots=True)
class RSym:
    """Reference to a resolution symbol at a counter argument."""

    target: str
    arg: Term
    v2_args: tuple[str, ...] = ()
    clause_args: tuple[ClauseExpr, ...] = ()


@dataclass(frozen=True, slots=True)
class RRes:
    """A resolution inference on a pivot atom."""

    left: "ResolutionTerm"
    right: "ResolutionTerm"
    pivot: Atom


ResolutionTerm = Union[CSClause, CSVar, CSCompose, CSApp, RSym, RRes]


@dataclass
class ResolutionRule:
    """Base and step bodies of one resolution symbol."""

    symbol: str
    base: ResolutionTerm
    step: ResolutionTerm
    v2_params: tuple[str, ...] = ()
    clause_params: tuple[str, ...] = ()


@dataclass
class ResolutionSchema:
    """Recursively defined resolution deductions.  The first rule is the
    entry point; rules may reference later rules at any argument and
    themselves (in the step body) at exactly the step parameter."""

    rules: tuple[ResolutionRule, ...]
    clause_defs: dict[str, ClauseSchemaDef] = field(default_factory=dict)

    def by_symbol(self) -> dict[str, ResolutionRule]:
        return {r.symbol: r for r in self.rules}


@dataclass
class RefutationWitness:
    """The substitutions closing a resolution schema over its free
    variables: `lam` replaces clause variables, `theta` maps second-order
    variables to counter-indexed term families, `mu` replaces clause-set
    variables on the clause-set side.  `gamma_max` bounds instance checks."""

    lam: dict[str, Sequent] = field(default_factory=dict)
    theta: V2Subst = field(default_factory=dict)
    mu: dict[str, ClauseSetTerm] = field(default_factory=dict)
    gamma_max: int = 8


def check_witness(w: RefutationWitness, table: SymbolTable) -> CheckReport:
    """A witness is usable when its clause substitution maps to clauses,
    its second-order substitution only involves the global and bound
    counter parameters, and its clause-set ranges are symbol-free."""
    report = CheckReport()
    for name, clause in w.lam.items():
        if not is_clause(clause):
            report.add(f"lambda/{name}", f"range is not a clause: {clause}")
    for name, (param, body) in w.theta.items():
        for t in free_terms(body):
            if isinstance(t, Var) and t.sort == OMEGA and t.name not in (param, PARAM):
                report.add(f"theta/{name}", f"stray arithmetic variable {t.name}")
    for name, rng in w.mu.items():
        if not _mu_symbol_free(rng):
            report.add(f"mu/{name}", "range must be free of clause-set symbols and variables")
    if w.gamma_max < 0:
        report.add("gamma_max", "check bound must be non-negative")
    return report


def resolution_term_nodes(t: ResolutionTerm) -> Iterator[ResolutionTerm]:
    yield t
    if isinstance(t, RRes):
        yield from resolution_term_nodes(t.left)
        yield from resolution_term_nodes(t.right)
    elif isinstance(t, CSCompose):
        yield from resolution_term_nodes(t.left)
        yield from resolution_term_nodes(t.right)
    elif isinstance(t, (CSApp, RSym)):
        for a in t.clause_args:
            yield from resolution_term_nodes(a)


def check_resolution_schema(rs: ResolutionSchema, table: SymbolTable) -> CheckReport:
    """Reference discipline for a resolution schema: base bodies reach only
    strictly later rules, step bodies additionally their own rule at exactly
    the step parameter.  Clause symbols used at the leaves must be defined."""
    report = CheckReport()
    index = {r.symbol: i for i, r in enumerate(rs.rules)}
    if len(index) != len(rs.rules):
        report.add("", "duplicate resolution symbol names")
        return report
    for cd in rs.clause_defs.values():
        report.extend(check_clause_schema(cd, table))
    for i, rule in enumerate(rs.rules):
        for rule_name, body in (("base", rule.base), ("step", rule.step)):
            path = f"{rule.symbol}/{rule_name}"
            for node in resolution_term_nodes(body):
                if isinstance(node, RSym):
                    j = index.get(node.target)
                    if j is None:
                        report.add(path, f"unknown resolution symbol {node.target}")
                        continue
                    target = rs.rules[j]
                    if (len(node.v2_args) != len(target.v2_params)
                            or len(node.clause_args) != len(target.clause_params)):
                        report.add(path, f"arity mismatch in reference to {node.target}")
                    if j > i:
                        continue
                    if j < i:
                        report.add(path, f"reference to {node.target} breaks the rule order")
                    elif rule_name == "base":
                        report.add(path, f"{node.target} cannot reference itself in its base body")
                    elif node.arg != svar(STEP_PARAM):
                        report.add(path, f"self-reference of {node.target} "
                                         "must recurse at exactly the step parameter")
                elif isinstance(node, CSApp) and node.symbol not in rs.clause_defs:
                    report.add(path, f"unknown clause symbol {node.symbol}")
    return report


@dataclass(frozen=True, slots=True)
class RDLeaf:
    """A leaf of a resolution deduction."""

    clause: Sequent


@dataclass(frozen=True, slots=True)
class RDRes:
    """An inference of a resolution deduction; `clause` is its resolvent."""

    left: "ResolutionDeduction"
    right: "ResolutionDeduction"
    pivot: Atom
    clause: Sequent
    pseudo: bool = False


ResolutionDeduction = Union[RDLeaf, RDRes]


def deduction_size(d: ResolutionDeduction) -> int:
    if isinstance(d, RDLeaf):
        return 1
    return 1 + deduction_size(d.left) + deduction_size(d.right)


def inference_count(d: ResolutionDeduction) -> int:
    if isinstance(d, RDLeaf):
        return 0
    return 1 + inference_count(d.left) + inference_count(d.right)


def deduction_leaves(d: ResolutionDeduction) -> list[Sequent]:
    if isinstance(d, RDLeaf):
        return [d.clause]
    return deduction_leaves(d.left) + deduction_leaves(d.right)


def deduction_str(d: ResolutionDeduction) -> str:
    if isinstance(d, RDLeaf):
        return sequent_str(d.clause)
    return (f"r({deduction_str(d.left)}; {deduction_str(d.right)}; "
            f"{formula_str(d.pivot)})")


def _close_sequent(s: Sequent, theta: V2Subst, vartheta: Subst,
                   table: SymbolTable) -> Sequent:
    out = Sequent(
        tuple(apply_v2_formula(fo, theta) for fo in s.ant),
        tuple(apply_v2_formula(fo, theta) for fo in s.suc),
    )
    return normalize_sequent(subst_sequent(out, vartheta), table)


def _eval_resolution_term(t: ResolutionTerm, rules: dict[str, ResolutionRule],
                          witness: RefutationWitness, env: _Env,
                          path: str) -> ResolutionDeduction:
    if isinstance(t, RRes):
        left = _eval_resolution_term(t.left, rules, witness, env, f"{path}/l")
        right = _eval_resolution_term(t.right, rules, witness, env, f"{path}/r")
        pivot = apply_v2_formula(t.pivot, env.v2map)
        pivot = normalize_formula(subst_formula(pivot, env.arith), env.table)
        pivot = apply_v2_formula(pivot, witness.theta)
        pivot = normalize_formula(subst_formula(pivot, env.vartheta), env.table)
        in_left = any(fo == pivot for fo in left.clause.suc)
        in_right = any(fo == pivot for fo in right.clause.ant)
        if in_left != in_right:
            side = "left" if in_left else "right"
            raise SchemaError(
                f"illegal resolvent at {path}: pivot {formula_str(pivot)} "
                f"occurs only in the {side} premise")
        clause, pseudo = resolve(left.clause, right.clause, pivot, env.table)
        return RDRes(left, right, pivot, clause, pseudo)
    if isinstance(t, RSym):
        rule = rules.get(t.target)
        if rule is None:
            raise SchemaError(f"unknown resolution symbol {t.target} at {path}")
        if (len(t.v2_args) != len(rule.v2_params)
                or len(t.clause_args) != len(rule.clause_params)):
            raise SchemaError(f"arity mismatch in reference to {t.target} at {path}")
        value = _counter_value(t.arg, env.arith, env.table,
                               f"resolution symbol {t.target}")
        v2local = _bind_v2(rule.v2_params, t.v2_args, env.v2map)
        bound = {formal: _eval_clause_expr(a, env)
                 for formal, a in zip(rule.clause_params, t.clause_args)}
        if value == 0:
            body, arith = rule.base, dict(env.vartheta)
        else:
            body = rule.step
            arith = dict(env.vartheta)
            arith[svar(STEP_PARAM)] = numeral(value - 1)
        inner = replace(env, arith=arith, v2map=v2local, bound=bound)
        return _eval_resolution_term(body, rules, witness, inner,
                                     f"{path}/{t.target}({value})")
    clause = _eval_clause_expr(t, env)
    return RDLeaf(_close_sequent(clause, witness.theta, env.vartheta, env.table))


def eval_resolution_term(t: ResolutionTerm, witness: RefutationWitness, gamma: int,
                         table: SymbolTable,
                         rs: Optional[ResolutionSchema] = None) -> ResolutionDeduction:
    """Evaluate a resolution term at a parameter value: unfold the symbol
    references, close the leaves with the witness substitutions, normalize,
    and compute every resolvent.  An inference whose pivot appears on
    exactly one of the facing sides fails with a node-path diagnostic."""
    wreport = check_witness(witness, table)
    if not wreport.ok:
        raise SchemaError(f"unusable witness: {wreport}")
    rules = rs.by_symbol() if rs is not None else {}
    clause_defs = dict(rs.clause_defs) if rs is not None else {}
    vartheta: Subst = {svar(PARAM): numeral(gamma)}
    env = _Env(table=table, clause_defs=clause_defs, vartheta=vartheta,
               lam=dict(witness.lam), arith=dict(vartheta), v2map={}, bound={},
               memo={})
    return _eval_resolution_term(t, rules, witness, env, "t")


def eval_resolution_schema(rs: ResolutionSchema, witness: RefutationWitness,
                           gamma: int, table: SymbolTable) -> ResolutionDeduction:
    """Unfold the entry rule of a resolution schema at the given parameter
    value and evaluate the result to a deduction."""
    if not rs.rules:
        raise SchemaError("resolution schema has no rules")
    start = rs.rules[0]
    top = RSym(start.symbol, numeral(gamma), start.v2_params,
               tuple(CSVar(x) for x in start.clause_params))
    return eval_resolution_term(top, witness, gamma, table, rs)


# ---------------------------------------------------------------------------
# refutation checking


def check_refutation(d: ResolutionDeduction, clauses: Iterable[Sequent],
                     table: Optional[SymbolTable] = None) -> CheckReport:
    """Certify a deduction as a refutation of a clause set: every leaf must
    be a substitution instance of some member, every inference a legal
    resolvent of its premises, and the final clause empty."""
    members = list(clauses)
    report = CheckReport()

    def walk(node: ResolutionDeduction, path: str) -> None:
        if isinstance(node, RDLeaf):
            if not any(match_clause(m, node.clause, exact=True) is not None
                       for m in members):
                report.add(path, f"leaf is not an instance of the clause set: {node.clause}")
            return
        walk(node.left, f"{path}/l")
        walk(node.right, f"{path}/r")
        in_left = any(fo == node.pivot for fo in node.left.clause.suc)
        in_right = any(fo == node.pivot for fo in node.right.clause.ant)
        if in_left != in_right:
            side = "left" if in_left else "right"
            report.add(path, f"illegal resolvent: pivot {formula_str(node.pivot)} "
                             f"occurs only in the {side} premise")
            return
        try:
            expected, pseudo = resolve(node.left.clause, node.right.clause,
                                       node.pivot, table)
        except SchemaError as err:
            report.add(path, str(err))
            return
        if not multiset_equal(node.clause, expected):
            report.add(path, f"stored clause {node.clause} is not the resolvent {expected}")
        if node.pseudo != pseudo:
            report.add(path, "pseudo-resolvent flag does not match the premises")

    walk(d, "root")
    if d.clause.size != 0:
        report.add("root", f"final clause is not empty: {d.clause}")
    return report


# ---------------------------------------------------------------------------
# tree form


@dataclass(frozen=True, slots=True)
class ResolutionTree:
    """A deduction with every intermediate clause explicit."""

    clause: Sequent
    premises: tuple["ResolutionTree", ...] = ()


def tree_size(t: ResolutionTree) -> int:
    return 1 + sum(tree_size(p) for p in t.premises)


def to_tree(d: ResolutionDeduction) -> ResolutionTree:
    """Spell a deduction out as a tree of clauses; the root carries the
    final clause.  The tree stays quadratic in the deduction size."""
    def conv(node: ResolutionDeduction) -> ResolutionTree:
        if isinstance(node, RDLeaf):
            return ResolutionTree(node.clause)
        return ResolutionTree(node.clause, (conv(node.left), conv(node.right)))

    out = conv(d)
    assert tree_size(out) <= deduction_size(d) ** 2 + 1
    return out


# ---------------------------------------------------------------------------
# instance-level saturation


@dataclass
class _InputRec:
    clause: Sequent


@dataclass
class _ResRec:
    left: int
    right: int
    rho_left: Subst
    rho_right: Subst
    mgu: Subst
    pivot: Atom


@dataclass
class _FactorRec:
    parent: int
    mgu: Subst


def _rename_with_map(c: Sequent, suffix: str) -> tuple[Sequent, Subst]:
    m: Subst = {}
    for t in clause_variables(c):
        if isinstance(t, Var):
            m[t] = Var(f"{t.name}_{suffix}", t.sort)
        else:
            idx = numeral_value(t.index)
            tag = t.name if idx is None else f"{t.name}{idx}"
            m[t] = Var(f"{tag}_{suffix}", IOTA)
    return subst_sequent(c, m), m


def _collapse_duplicates(s: Sequent) -> Sequent:
    return Sequent(tuple(dict.fromkeys(s.ant)), tuple(dict.fromkeys(s.suc)))


def ground_refute(clauses: Iterable[Sequent], table: Optional[SymbolTable] = None,
                  max_generated: int = 10000,
                  max_kept: int = 2000) -> Optional[ResolutionDeduction]:
    """Saturation search for a resolution refutation of concrete clauses.

    Binary resolution with factoring over a given-clause loop: tautologies
    are dropped, clauses subsumed by an already-active clause are dropped,
    and selection alternates between the oldest and the smallest passive
    clause so that no clause is starved.  Returns a deduction whose leaves
    are instances of the input clauses (accepted by `check_refutation`), or
    None once the set saturates without deriving the empty clause.  Raises
    ResourceOut when the generation or storage budget runs out.  Input
    clauses must be normalized and free of arithmetic variables.
    """
    inputs = list(clauses)
    for i, c in enumerate(inputs):
        if not is_clause(c):
            raise SchemaError(f"input {i} is not a clause: {c}")
        _require_arith_ground(c, f"input clause {i}")
        if table is not None and any(has_defined(fo, table) for fo in c.ant + c.suc):
            raise SchemaError(f"unnormalized input clause: {c}")

    records: list = []
    clause_of: list[Sequent] = []
    passive: list[int] = []
    active: list[int] = []
    generated = 0

    def replay(cid: int) -> ResolutionDeduction:
        def go(cid: int, tau: Subst) -> ResolutionDeduction:
            rec = records[cid]
            if isinstance(rec, _InputRec):
                return RDLeaf(subst_sequent(rec.clause, tau))
            if isinstance(rec, _FactorRec):
                return go(rec.parent, compose_substitutions(rec.mgu, tau))
            mgu_tau = compose_substitutions(rec.mgu, tau)
            left = go(rec.left, compose_substitutions(rec.rho_left, mgu_tau))
            right = go(rec.right, compose_substitutions(rec.rho_right, mgu_tau))
            pivot = subst_formula(rec.pivot, tau)
            # instantiation can erase the pivot from a premise, making that
            # whole inference redundant; the pruned branch still derives a
            # sub-clause of the recorded one
            if not any(fo == pivot for fo in left.clause.suc):
                return left
            if not any(fo == pivot for fo in right.clause.ant):
                return right
            clause, pseudo = resolve(left.clause, right.clause, pivot)
            return RDRes(left, right, pivot, clause, pseudo)

        out = go(cid, {})
        assert out.clause.size == 0
        return out

    def add(clause: Sequent, rec) -> Optional[int]:
        nonlocal generated
        generated += 1
        if generated > max_generated:
            raise ResourceOut(f"resolution search exceeded {max_generated} generated clauses")
        if len(records) >= max_kept:
            raise ResourceOut(f"resolution search exceeded {max_kept} kept clauses")
        records.append(rec)
        clause_of.append(clause)
        cid = len(records) - 1
        if clause.size == 0:
            return cid
        passive.append(cid)
        return None

    for c in inputs:
        records.append(_InputRec(c))
        clause_of.append(c)
        cid = len(records) - 1
        if c.size == 0:
            return replay(cid)
        passive.append(cid)

    def weight(cid: int):
        c = clause_of[cid]
        return (c.size, sequent_str(canonical_clause(c)), cid)

    def factor_mgus(c: Sequent) -> list[Subst]:
        out: list[Subst] = []
        for atoms in (c.ant, c.suc):
            for i in range(len(atoms)):
                for j in range(i + 1, len(atoms)):
                    if atoms[i] == atoms[j]:
                        out.append({})
                        continue
                    mgu = unify_atoms(atoms[i], atoms[j], table)
                    if mgu is not None:
                        out.append(mgu)
        return out

    def resolvents(left_id: int, right_id: int):
        lc, lrho = _rename_with_map(clause_of[left_id], "l")
        rc, rrho = _rename_with_map(clause_of[right_id], "r")
        for la in lc.suc:
            for ra in rc.ant:
                mgu = unify_atoms(la, ra, table)
                if mgu is None:
                    continue
                pivot = subst_formula(la, mgu)
                clause, _ = resolve(subst_sequent(lc, mgu), subst_sequent(rc, mgu), pivot)
                yield clause, _ResRec(left_id, right_id, lrho, rrho, mgu, pivot)

    sel_count = 0
    while passive:
        if sel_count % 3 == 0:
            given_id = min(passive)
        else:
            given_id = min(passive, key=weight)
        sel_count += 1
        passive.remove(given_id)
        given = clause_of[given_id]
        if is_tautology(given):
            continue
        if any(subsumes(clause_of[a], given) for a in active):
            continue
        for mgu in factor_mgus(given):
            factor = _collapse_duplicates(subst_sequent(given, mgu))
            done = add(factor, _FactorRec(given_id, mgu))
            if done is not None:
                return replay(done)
        for other in active:
            for clause, rec in resolvents(other, given_id):
                done = add(clause, rec)
                if done is not None:
                    return replay(done)
            for clause, rec in resolvents(given_id, other):
                done = add(clause, rec)
                if done is not None:
                    return replay(done)
        for clause, rec in resolvents(given_id, given_id):
            done = add(clause, rec)
            if done is not None:
                return replay(done)
        active.append(given_id)
    return None
