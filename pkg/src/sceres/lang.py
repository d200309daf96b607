"""Two-sorted term and formula language with primitive recursive defined symbols.

Terms live in two sorts: `omega` (counters) and `iota` (individuals).  Counters
are built from 0 and the successor s; a defined function or predicate symbol
carries exactly one base and one step rewrite rule and recurses on its first
argument.  Second-order variables of type omega -> iota appear applied, as in
x(k+1); once their index is closed they behave like ordinary first-order
variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .errors import NormalizeFirstError, SchemaError

OMEGA = "omega"
IOTA = "iota"

PARAM_NAMES = ("n", "k")


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str = IOTA

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class V2App:
    """A second-order variable applied to a counter term, e.g. x(k+1)."""

    name: str
    index: "Term"

    def __str__(self) -> str:
        return f"{self.name}({term_str(self.index)})"


@dataclass(frozen=True, slots=True)
class App:
    fn: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return term_str(self)


Term = Union[Var, V2App, App]

ZERO = App("0")


def svar(name: str) -> Var:
    return Var(name, OMEGA)


def s(t: Term) -> Term:
    return App("s", (t,))


def numeral(value: int) -> Term:
    if value < 0:
        raise ValueError("numerals are non-negative")
    t: Term = ZERO
    for _ in range(value):
        t = s(t)
    return t


def numeral_value(t: Term) -> Optional[int]:
    count = 0
    while isinstance(t, App) and t.fn == "s" and len(t.args) == 1:
        count += 1
        t = t.args[0]
    if t == ZERO:
        return count
    return None


def counter_offset(t: Term) -> tuple[Term, int]:
    """Strip successors: s(s(u)) -> (u, 2)."""
    count = 0
    while isinstance(t, App) and t.fn == "s" and len(t.args) == 1:
        count += 1
        t = t.args[0]
    return t, count


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class Neg:
    body: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class Impl:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    body: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    body: "Formula"

    def __str__(self) -> str:
        return formula_str(self)


Formula = Union[Atom, Neg, And, Or, Impl, Forall, Exists]

BINARY = (And, Or, Impl)
QUANT = (Forall, Exists)


# ---------------------------------------------------------------------------
# signature


@dataclass
class FunSym:
    name: str
    arg_sorts: tuple[str, ...]
    result: str
    defined: bool = False
    # base rule: f(0, p1..pm) => base_rhs
    base_params: tuple[str, ...] = ()
    base_rhs: Optional[Term] = None
    # step rule: f(s(rec), p1..pm) => step_rhs
    step_rec: str = ""
    step_params: tuple[str, ...] = ()
    step_rhs: Optional[Term] = None


@dataclass
class PredSym:
    name: str
    arg_sorts: tuple[str, ...]
    defined: bool = False
    base_params: tuple[str, ...] = ()
    base_rhs: Optional[Formula] = None
    step_rec: str = ""
    step_params: tuple[str, ...] = ()
    step_rhs: Optional[Formula] = None


@dataclass
class SymbolTable:
    funs: dict[str, FunSym]
    preds: dict[str, PredSym]
    fo_vars: dict[str, str]
    v2_vars: set[str]

    @staticmethod
    def empty() -> "SymbolTable":
        table = SymbolTable({}, {}, {}, set())
        table.add_fun(FunSym("0", (), OMEGA))
        table.add_fun(FunSym("s", (OMEGA,), OMEGA))
        for p in PARAM_NAMES:
            table.fo_vars[p] = OMEGA
        return table

    def add_fun(self, sym: FunSym) -> None:
        if sym.name in self.funs:
            raise SchemaError(f"duplicate function symbol {sym.name}")
        self.funs[sym.name] = sym

    def add_pred(self, sym: PredSym) -> None:
        if sym.name in self.preds:
            raise SchemaError(f"duplicate predicate symbol {sym.name}")
        self.preds[sym.name] = sym

    def is_defined_fun(self, name: str) -> bool:
        sym = self.funs.get(name)
        return sym is not None and sym.defined

    def is_defined_pred(self, name: str) -> bool:
        sym = self.preds.get(name)
        return sym is not None and sym.defined


# ---------------------------------------------------------------------------
# traversal helpers


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, V2App):
        yield from subterms(t.index)


def formula_terms(f: Formula) -> Iterator[Term]:
    if isinstance(f, Atom):
        yield from f.args
    elif isinstance(f, Neg):
        yield from formula_terms(f.body)
    elif isinstance(f, BINARY):
        yield from formula_terms(f.left)
        yield from formula_terms(f.right)
    elif isinstance(f, QUANT):
        yield from formula_terms(f.body)


def free_terms(obj: Union[Term, Formula], bound: frozenset[Var] = frozenset()) -> set[Term]:
    """Free variable occurrences: Vars and V2 applications (as whole terms)."""
    out: set[Term] = set()
    if isinstance(obj, (Var, V2App, App)):
        for t in subterms(obj):
            if isinstance(t, Var) and t not in bound:
                out.add(t)
            elif isinstance(t, V2App):
                out.add(t)
        return out
    if isinstance(obj, Atom):
        for a in obj.args:
            out |= free_terms(a, bound)
    elif isinstance(obj, Neg):
        out = free_terms(obj.body, bound)
    elif isinstance(obj, BINARY):
        out = free_terms(obj.left, bound) | free_terms(obj.right, bound)
    elif isinstance(obj, QUANT):
        out = free_terms(obj.body, bound | {obj.var})
    return out


def occurs_free(needle: Term, obj: Union[Term, Formula]) -> bool:
    frees = free_terms(obj)
    if needle in frees:
        return True
    # a Var also counts as occurring inside a V2 index
    if isinstance(needle, Var):
        for t in frees:
            if isinstance(t, V2App) and any(
                isinstance(u, Var) and u == needle for u in subterms(t.index)
            ):
                return True
    return False


# ---------------------------------------------------------------------------
# substitution

Subst = dict[Term, Term]


def subst_term(t: Term, m: Subst) -> Term:
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, V2App):
        out: Term = V2App(t.name, subst_term(t.index, m))
        return m.get(out, out)
    return App(t.fn, tuple(subst_term(a, m) for a in t.args))


def _fresh_var(v: Var, taken: set[str]) -> Var:
    i = 0
    name = v.name
    while name in taken:
        i += 1
        name = f"{v.name}_r{i}"
    return Var(name, v.sort)


def subst_formula(f: Formula, m: Subst) -> Formula:
    if not m:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, m) for a in f.args))
    if isinstance(f, Neg):
        return Neg(subst_formula(f.body, m))
    if isinstance(f, And):
        return And(subst_formula(f.left, m), subst_formula(f.right, m))
    if isinstance(f, Or):
        return Or(subst_formula(f.left, m), subst_formula(f.right, m))
    if isinstance(f, Impl):
        return Impl(subst_formula(f.left, m), subst_formula(f.right, m))
    if isinstance(f, QUANT):
        inner = {k: v for k, v in m.items() if k != f.var}
        if not inner:
            return type(f)(f.var, f.body)
        var = f.var
        body = f.body
        # capture check: the bound variable must not appear in any range term
        if any(occurs_free(var, rng) for rng in inner.values()):
            taken = {t.name for rng in inner.values() for t in free_terms(rng)}
            taken |= {t.name for t in free_terms(body)}
            fresh = _fresh_var(var, taken)
            body = subst_formula(body, {var: fresh})
            var = fresh
        return type(f)(var, subst_formula(body, inner))
    raise TypeError(f"not a formula: {f!r}")


def substitute(obj, m: Subst):
    if isinstance(obj, (Var, V2App, App)):
        return subst_term(obj, m)
    return subst_formula(obj, m)


def compose_substitutions(s1: Subst, s2: Subst) -> Subst:
    """Apply s1 first, then s2."""
    out: Subst = {}
    for k, v in s1.items():
        out[k] = subst_term(v, s2)
    for k, v in s2.items():
        if k not in out:
            out[k] = v
    return {k: v for k, v in out.items() if k != v}


# second-order substitution: x <- \p. body

V2Subst = dict[str, tuple[str, Term]]


def apply_v2_term(t: Term, theta: V2Subst) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, V2App):
        idx = apply_v2_term(t.index, theta)
        if t.name in theta:
            param, body = theta[t.name]
            return subst_term(body, {svar(param): idx})
        return V2App(t.name, idx)
    return App(t.fn, tuple(apply_v2_term(a, theta) for a in t.args))


def apply_v2_formula(f: Formula, theta: V2Subst) -> Formula:
    if not theta:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(apply_v2_term(a, theta) for a in f.args))
    if isinstance(f, Neg):
        return Neg(apply_v2_formula(f.body, theta))
    if isinstance(f, BINARY):
        return type(f)(apply_v2_formula(f.left, theta), apply_v2_formula(f.right, theta))
    if isinstance(f, QUANT):
        return type(f)(f.var, apply_v2_formula(f.body, theta))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# rewriting


def validate_rewrite_system(table: SymbolTable) -> list[str]:
    """Check the shape conditions that make normalization terminate."""
    problems: list[str] = []
    deps: dict[str, set[str]] = {}

    def rule_problems(name: str, params, rhs, rec: str, is_step: bool, arity: int):
        allowed = set(params) | ({rec} if is_step else set())
        used_defined: set[str] = set()
        terms = list(subterms(rhs)) if isinstance(rhs, (Var, V2App, App)) else [
            t for u in formula_terms(rhs) for t in subterms(u)
        ]
        for t in terms:
            if isinstance(t, Var) and t.name not in allowed:
                problems.append(f"{name}: rule right side uses undeclared variable {t.name}")
            if isinstance(t, App) and table.is_defined_fun(t.fn):
                used_defined.add(t.fn)
                if t.fn == name:
                    if not is_step:
                        problems.append(f"{name}: base rule may not recurse")
                    else:
                        expected = (Var(rec, OMEGA),) + tuple(
                            Var(p, table.funs[name].arg_sorts[i + 1])
                            for i, p in enumerate(params)
                        )
                        if t.args != expected:
                            problems.append(
                                f"{name}: recursive call must be {name}({rec}, "
                                f"{', '.join(params)})"
                            )
        if not isinstance(rhs, (Var, V2App, App)):
            for sub in _subformulas(rhs):
                if isinstance(sub, Atom) and table.is_defined_pred(sub.pred):
                    used_defined.add(sub.pred)
                    if sub.pred == name:
                        if not is_step:
                            problems.append(f"{name}: base rule may not recurse")
                        else:
                            expected = (Var(rec, OMEGA),) + tuple(
                                Var(p, table.preds[name].arg_sorts[i + 1])
                                for i, p in enumerate(params)
                            )
                            if sub.args != expected:
                                problems.append(
                                    f"{name}: recursive call must be {name}({rec}, "
                                    f"{', '.join(params)})"
                                )
        deps.setdefault(name, set()).update(used_defined - {name})
        if arity < 1:
            problems.append(f"{name}: defined symbol needs a counter argument")

    for sym in list(table.funs.values()):
        if not sym.defined:
            continue
        if sym.base_rhs is None or sym.step_rhs is None:
            problems.append(f"{sym.name}: defined symbol needs both a base and a step rule")
            continue
        if sym.arg_sorts[:1] != (OMEGA,):
            problems.append(f"{sym.name}: first argument must have sort {OMEGA}")
        rule_problems(sym.name, sym.base_params, sym.base_rhs, "", False, len(sym.arg_sorts))
        rule_problems(sym.name, sym.step_params, sym.step_rhs, sym.step_rec, True, len(sym.arg_sorts))
    for sym in list(table.preds.values()):
        if not sym.defined:
            continue
        if sym.base_rhs is None or sym.step_rhs is None:
            problems.append(f"{sym.name}: defined symbol needs both a base and a step rule")
            continue
        if sym.arg_sorts[:1] != (OMEGA,):
            problems.append(f"{sym.name}: first argument must have sort {OMEGA}")
        rule_problems(sym.name, sym.base_params, sym.base_rhs, "", False, len(sym.arg_sorts))
        rule_problems(sym.name, sym.step_params, sym.step_rhs, sym.step_rec, True, len(sym.arg_sorts))

    # the uses-relation between distinct defined symbols must be acyclic
    seen: dict[str, int] = {}

    def visit(node: str, stack: tuple[str, ...]):
        if seen.get(node) == 2:
            return
        if seen.get(node) == 1:
            problems.append(f"cyclic defined symbols: {' -> '.join(stack + (node,))}")
            return
        seen[node] = 1
        for nxt in sorted(deps.get(node, ())):
            visit(nxt, stack + (node,))
        seen[node] = 2

    for name in sorted(deps):
        visit(name, ())
    return problems


def _subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Neg):
        yield from _subformulas(f.body)
    elif isinstance(f, BINARY):
        yield from _subformulas(f.left)
        yield from _subformulas(f.right)
    elif isinstance(f, QUANT):
        yield from _subformulas(f.body)


def normalize_term(t: Term, table: SymbolTable) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, V2App):
        return V2App(t.name, normalize_term(t.index, table))
    args = tuple(normalize_term(a, table) for a in t.args)
    sym = table.funs.get(t.fn)
    if sym is not None and sym.defined and args:
        rec = args[0]
        if rec == ZERO:
            m = {Var(p, sym.arg_sorts[i + 1]): args[i + 1] for i, p in enumerate(sym.base_params)}
            return normalize_term(subst_term(sym.base_rhs, m), table)
        if isinstance(rec, App) and rec.fn == "s":
            m: Subst = {svar(sym.step_rec): rec.args[0]}
            for i, p in enumerate(sym.step_params):
                m[Var(p, sym.arg_sorts[i + 1])] = args[i + 1]
            return normalize_term(subst_term(sym.step_rhs, m), table)
    return App(t.fn, args)


def normalize_formula(f: Formula, table: SymbolTable) -> Formula:
    if isinstance(f, Atom):
        args = tuple(normalize_term(a, table) for a in f.args)
        sym = table.preds.get(f.pred)
        if sym is not None and sym.defined and args:
            rec = args[0]
            if rec == ZERO:
                m = {
                    Var(p, sym.arg_sorts[i + 1]): args[i + 1]
                    for i, p in enumerate(sym.base_params)
                }
                return normalize_formula(subst_formula(sym.base_rhs, m), table)
            if isinstance(rec, App) and rec.fn == "s":
                m = {svar(sym.step_rec): rec.args[0]}
                for i, p in enumerate(sym.step_params):
                    m[Var(p, sym.arg_sorts[i + 1])] = args[i + 1]
                return normalize_formula(subst_formula(sym.step_rhs, m), table)
        return Atom(f.pred, args)
    if isinstance(f, Neg):
        return Neg(normalize_formula(f.body, table))
    if isinstance(f, BINARY):
        return type(f)(normalize_formula(f.left, table), normalize_formula(f.right, table))
    if isinstance(f, QUANT):
        return type(f)(f.var, normalize_formula(f.body, table))
    raise TypeError(f"not a formula: {f!r}")


def normalize(obj, table: SymbolTable):
    if isinstance(obj, (Var, V2App, App)):
        return normalize_term(obj, table)
    return normalize_formula(obj, table)


def has_defined(obj, table: SymbolTable) -> bool:
    if isinstance(obj, (Var, V2App, App)):
        return any(isinstance(t, App) and table.is_defined_fun(t.fn) for t in subterms(obj))
    for sub in _subformulas(obj):
        if isinstance(sub, Atom):
            if table.is_defined_pred(sub.pred):
                return True
            if any(has_defined(a, table) for a in sub.args):
                return True
    return False


def instantiate_parameter(obj, value: int, param: str = "n", table: SymbolTable | None = None):
    out = substitute(obj, {svar(param): numeral(value)})
    if table is not None:
        out = normalize(out, table)
    return out


# ---------------------------------------------------------------------------
# the full substitution family


@dataclass
class SubstitutionFamily:
    """mu: clause-set variables, lam: clause variables, theta: second-order
    variables, vartheta: counter variables.  Application order is mu, lam,
    theta, vartheta, then normalization."""

    mu: dict = None
    lam: dict = None
    theta: V2Subst = None
    vartheta: Subst = None

    def __post_init__(self):
        self.mu = self.mu or {}
        self.lam = self.lam or {}
        self.theta = self.theta or {}
        self.vartheta = self.vartheta or {}


def apply_substitution(obj, family: SubstitutionFamily, table: SymbolTable):
    """Apply the family to a term or formula (mu and lam act on clause-level
    objects and are handled by the resolution layer)."""
    if isinstance(obj, (Var, V2App, App)):
        out: Term = apply_v2_term(obj, family.theta)
        out = subst_term(out, family.vartheta)
        return normalize_term(out, table)
    out = apply_v2_formula(obj, family.theta)
    out = subst_formula(out, family.vartheta)
    return normalize_formula(out, table)


# ---------------------------------------------------------------------------
# comparison modulo bound renaming


def alpha_key(obj, env: tuple[Var, ...] = ()):
    """Hashable key; bound variables are numbered by binder depth."""
    if isinstance(obj, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == obj:
                return ("b", len(env) - 1 - i)
        return ("v", obj.name, obj.sort)
    if isinstance(obj, V2App):
        return ("w", obj.name, alpha_key(obj.index, env))
    if isinstance(obj, App):
        return ("f", obj.fn) + tuple(alpha_key(a, env) for a in obj.args)
    if isinstance(obj, Atom):
        return ("at", obj.pred) + tuple(alpha_key(a, env) for a in obj.args)
    if isinstance(obj, Neg):
        return ("neg", alpha_key(obj.body, env))
    if isinstance(obj, And):
        return ("and", alpha_key(obj.left, env), alpha_key(obj.right, env))
    if isinstance(obj, Or):
        return ("or", alpha_key(obj.left, env), alpha_key(obj.right, env))
    if isinstance(obj, Impl):
        return ("impl", alpha_key(obj.left, env), alpha_key(obj.right, env))
    if isinstance(obj, Forall):
        return ("all", alpha_key(obj.body, env + (obj.var,)))
    if isinstance(obj, Exists):
        return ("ex", alpha_key(obj.body, env + (obj.var,)))
    raise TypeError(f"no alpha key for {obj!r}")


def alpha_equal(a, b) -> bool:
    return alpha_key(a) == alpha_key(b)


# ---------------------------------------------------------------------------
# unification (syntactic, first-order; applied second-order variables with a
# closed index act as variables)


def _is_uvar(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    return isinstance(t, V2App) and not any(
        isinstance(u, Var) for u in subterms(t.index)
    )


def _occurs(v: Term, t: Term) -> bool:
    return any(u == v for u in subterms(t))


def unify(a: Term, b: Term, table: SymbolTable | None = None) -> Optional[Subst]:
    """Most general unifier with occurs check, or None."""
    if table is not None and (has_defined(a, table) or has_defined(b, table)):
        raise NormalizeFirstError(
            "terms contain defined symbols; normalize before unification"
        )
    sigma: Subst = {}
    work = [(a, b)]
    while work:
        x, y = work.pop()
        x = subst_term(x, sigma)
        y = subst_term(y, sigma)
        if x == y:
            continue
        if _is_uvar(x):
            if _occurs(x, y):
                return None
            sigma = compose_substitutions(sigma, {x: y})
            continue
        if _is_uvar(y):
            if _occurs(y, x):
                return None
            sigma = compose_substitutions(sigma, {y: x})
            continue
        if isinstance(x, App) and isinstance(y, App) and x.fn == y.fn and len(x.args) == len(y.args):
            work.extend(zip(x.args, y.args))
            continue
        if isinstance(x, V2App) and isinstance(y, V2App) and x.name == y.name:
            work.append((x.index, y.index))
            continue
        return None
    return sigma


def unify_atoms(a: Atom, b: Atom, table: SymbolTable | None = None) -> Optional[Subst]:
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    sigma: Subst = {}
    for x, y in zip(a.args, b.args):
        sub = unify(subst_term(x, sigma), subst_term(y, sigma), table)
        if sub is None:
            return None
        sigma = compose_substitutions(sigma, sub)
    return sigma


def match_term(pattern: Term, target: Term, sigma: Subst) -> Optional[Subst]:
    """One-sided matching: find sigma' extending sigma with pattern sigma' = target."""
    if _is_uvar(pattern):
        bound = sigma.get(pattern)
        if bound is None:
            if pattern == target:
                return sigma
            out = dict(sigma)
            out[pattern] = target
            return out
        return sigma if bound == target else None
    if isinstance(pattern, App) and isinstance(target, App) and pattern.fn == target.fn:
        if len(pattern.args) != len(target.args):
            return None
        for p, t in zip(pattern.args, target.args):
            sigma = match_term(p, t, sigma)
            if sigma is None:
                return None
        return sigma
    if isinstance(pattern, V2App) and isinstance(target, V2App) and pattern.name == target.name:
        return match_term(pattern.index, target.index, sigma)
    return sigma if pattern == target else None


def match_atom(pattern: Atom, target: Atom, sigma: Subst) -> Optional[Subst]:
    if pattern.pred != target.pred or len(pattern.args) != len(target.args):
        return None
    for p, t in zip(pattern.args, target.args):
        sigma = match_term(p, t, sigma)
        if sigma is None:
            return None
    return sigma


# ---------------------------------------------------------------------------
# rendering


def term_str(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, V2App):
        return f"{t.name}({term_str(t.index)})"
    base, offset = counter_offset(t)
    if base == ZERO:
        return str(offset)
    if offset:
        return f"{term_str(base)}+{offset}"
    if not t.args:
        return t.fn
    return f"{t.fn}({', '.join(term_str(a) for a in t.args)})"


def _needs_parens(child: Formula, parent: str) -> bool:
    prec = {"impl": 1, "or": 2, "and": 3, "neg": 4}
    if isinstance(child, Atom):
        return False
    if isinstance(child, Neg):
        cp = prec["neg"]
    elif isinstance(child, And):
        cp = prec["and"]
    elif isinstance(child, Or):
        cp = prec["or"]
    elif isinstance(child, Impl):
        cp = prec["impl"]
    else:
        return True
    return cp <= prec[parent]


def formula_str(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(term_str(a) for a in f.args)})"
    if isinstance(f, Neg):
        inner = formula_str(f.body)
        if _needs_parens(f.body, "neg"):
            inner = f"({inner})"
        return f"~{inner}"
    if isinstance(f, (And, Or, Impl)):
        op = {"And": "/\\", "Or": "\\/", "Impl": "->"}[type(f).__name__]
        tag = {"And": "and", "Or": "or", "Impl": "impl"}[type(f).__name__]
        ls = formula_str(f.left)
        rs = formula_str(f.right)
        if _needs_parens(f.left, tag):
            ls = f"({ls})"
        # the binary connectives associate to the right
        if isinstance(f.right, type(f)) and not isinstance(f.right, Atom):
            pass
        elif _needs_parens(f.right, tag):
            rs = f"({rs})"
        return f"{ls} {op} {rs}"
    if isinstance(f, Forall):
        return f"all {f.var.name}. {formula_str(f.body)}"
    if isinstance(f, Exists):
        return f"ex {f.var.name}. {formula_str(f.body)}"
    raise TypeError(f"not a formula: {f!r}")
