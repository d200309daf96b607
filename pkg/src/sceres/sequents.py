"""Sequents as pairs of formula lists, compared as multisets.

A clause is a sequent whose formulas are all atoms.  Clause-level operations
(variants, subsumption, tautology and reduction) treat first-order variables
and closed second-order applications as renameable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .lang import (
    Atom,
    Formula,
    Subst,
    SymbolTable,
    Term,
    V2App,
    Var,
    alpha_key,
    formula_str,
    free_terms,
    match_atom,
    normalize_formula,
    subst_formula,
    substitute,
)


@dataclass(frozen=True, slots=True)
class Sequent:
    ant: tuple[Formula, ...] = ()
    suc: tuple[Formula, ...] = ()

    def __str__(self) -> str:
        return sequent_str(self)

    @property
    def size(self) -> int:
        return len(self.ant) + len(self.suc)

    def formulas(self) -> Iterator[tuple[str, int, Formula]]:
        for i, f in enumerate(self.ant):
            yield ("ant", i, f)
        for i, f in enumerate(self.suc):
            yield ("suc", i, f)

    def get(self, side: str, i: int) -> Formula:
        return (self.ant if side == "ant" else self.suc)[i]


EMPTY = Sequent()


def sequent_str(s: Sequent) -> str:
    left = ", ".join(formula_str(f) for f in s.ant)
    right = ", ".join(formula_str(f) for f in s.suc)
    if left and right:
        return f"{left} |- {right}"
    if left:
        return f"{left} |-"
    if right:
        return f"|- {right}"
    return "|-"


def merge(a: Sequent, b: Sequent) -> Sequent:
    return Sequent(a.ant + b.ant, a.suc + b.suc)


def merge_sequents(parts: list[Sequent]) -> Sequent:
    out = EMPTY
    for p in parts:
        out = merge(out, p)
    return out


def remove_at(s: Sequent, side: str, i: int) -> Sequent:
    if side == "ant":
        return Sequent(s.ant[:i] + s.ant[i + 1 :], s.suc)
    return Sequent(s.ant, s.suc[:i] + s.suc[i + 1 :])


def replace_at(s: Sequent, side: str, i: int, f: Formula) -> Sequent:
    if side == "ant":
        return Sequent(s.ant[:i] + (f,) + s.ant[i + 1 :], s.suc)
    return Sequent(s.ant, s.suc[:i] + (f,) + s.suc[i + 1 :])


def subst_sequent(s: Sequent, m: Subst) -> Sequent:
    return Sequent(
        tuple(subst_formula(f, m) for f in s.ant),
        tuple(subst_formula(f, m) for f in s.suc),
    )


def normalize_sequent(s: Sequent, table: SymbolTable) -> Sequent:
    return Sequent(
        tuple(normalize_formula(f, table) for f in s.ant),
        tuple(normalize_formula(f, table) for f in s.suc),
    )


def multiset_key(s: Sequent):
    return (
        tuple(sorted(alpha_key(f) for f in s.ant)),
        tuple(sorted(alpha_key(f) for f in s.suc)),
    )


def multiset_equal(a: Sequent, b: Sequent) -> bool:
    return multiset_key(a) == multiset_key(b)


def is_clause(s: Sequent) -> bool:
    return all(isinstance(f, Atom) for f in s.ant + s.suc)


def is_tautology(c: Sequent) -> bool:
    left = {alpha_key(f) for f in c.ant}
    return any(alpha_key(f) in left for f in c.suc)


def clause_variables(c: Sequent) -> list[Term]:
    """Renameable terms, in first-occurrence order."""
    seen: list[Term] = []
    for _, _, f in c.formulas():
        for t in sorted(free_terms(f), key=_occurrence_order(f)):
            if t not in seen:
                seen.append(t)
    return seen


def _occurrence_order(f: Formula):
    order: dict[Term, int] = {}
    counter = [0]

    def walk(t):
        if isinstance(t, (Var, V2App)):
            if t not in order:
                order[t] = counter[0]
                counter[0] += 1
            if isinstance(t, V2App):
                walk(t.index)
        else:
            for a in t.args:
                walk(a)

    from .lang import formula_terms

    for t in formula_terms(f):
        walk(t)
    return lambda t: order.get(t, 10**9)


def canonical_clause(c: Sequent) -> Sequent:
    """Rename variables to v0, v1, ... in first-occurrence order."""
    m: Subst = {}
    for i, t in enumerate(clause_variables(c)):
        sort = t.sort if isinstance(t, Var) else "iota"
        m[t] = Var(f"v{i}", sort)
    return subst_sequent(c, m)


def match_clause(pattern: Sequent, target: Sequent, exact: bool = True) -> Optional[Subst]:
    """A substitution sigma with pattern sigma = target (exact) or
    pattern sigma a sub-multiset of target (subsumption test)."""
    if exact and (len(pattern.ant) != len(target.ant) or len(pattern.suc) != len(target.suc)):
        return None
    if len(pattern.ant) > len(target.ant) or len(pattern.suc) > len(target.suc):
        return None
    return _match_both(pattern, target, exact)


def _match_both(pattern: Sequent, target: Sequent, exact: bool) -> Optional[Subst]:
    def go(pa: list[Atom], ta: list[Atom], ua: list[bool], ps: list[Atom], ts: list[Atom],
           us: list[bool], sigma: Subst) -> Optional[Subst]:
        if pa:
            p = pa[0]
            for j, t in enumerate(ta):
                if ua[j]:
                    continue
                nxt = match_atom(p, t, sigma)
                if nxt is None:
                    continue
                ua[j] = True
                out = go(pa[1:], ta, ua, ps, ts, us, nxt)
                if out is not None:
                    return out
                ua[j] = False
            return None
        if ps:
            p = ps[0]
            for j, t in enumerate(ts):
                if us[j]:
                    continue
                nxt = match_atom(p, t, sigma)
                if nxt is None:
                    continue
                us[j] = True
                out = go(pa, ta, ua, ps[1:], ts, us, nxt)
                if out is not None:
                    return out
                us[j] = False
            return None
        if exact and not (all(ua) and all(us)):
            return None
        return sigma

    return go(
        list(pattern.ant), list(target.ant), [False] * len(target.ant),
        list(pattern.suc), list(target.suc), [False] * len(target.suc), {},
    )


def subsumes(c: Sequent, d: Sequent) -> bool:
    """c subsumes d when some instance of c is a sub-multiset of d."""
    if len(c.ant) > len(d.ant) or len(c.suc) > len(d.suc):
        return False
    return _match_both(c, d, exact=False) is not None


def is_variant(c: Sequent, d: Sequent) -> bool:
    if len(c.ant) != len(d.ant) or len(c.suc) != len(d.suc):
        return False
    sigma = match_clause(c, d, exact=True)
    if sigma is None:
        return False
    # the witness must be a variable renaming, injectively
    vals = list(sigma.values())
    return all(isinstance(v, (Var, V2App)) for v in vals) and len(set(vals)) == len(vals) and \
        match_clause(d, c, exact=True) is not None


def clause_sets_equal(xs: list[Sequent], ys: list[Sequent]) -> bool:
    """Set equality modulo variable renaming."""
    if len(xs) != len(ys):
        return False
    remaining = list(ys)
    for x in xs:
        for i, y in enumerate(remaining):
            if is_variant(x, y):
                del remaining[i]
                break
        else:
            return False
    return True


def dedupe_clauses(cs: list[Sequent]) -> list[Sequent]:
    """Remove syntactic duplicates (multiset comparison), keep first."""
    out: list[Sequent] = []
    keys = set()
    for c in cs:
        k = multiset_key(c)
        if k not in keys:
            keys.add(k)
            out.append(c)
    return out


def reduce_clause_set(cs: list[Sequent]) -> list[Sequent]:
    """Delete tautologies, collapse variants, delete subsumed clauses."""
    work = [c for c in dedupe_clauses(cs) if not is_tautology(c)]
    # collapse variant classes to their canonical-least member
    classes: list[list[Sequent]] = []
    for c in work:
        for cls in classes:
            if is_variant(c, cls[0]):
                cls.append(c)
                break
        else:
            classes.append([c])
    reps = [min(cls, key=lambda c: sequent_str(canonical_clause(c))) for cls in classes]
    # proper subsumption
    out: list[Sequent] = []
    for i, c in enumerate(reps):
        dominated = False
        for j, d in enumerate(reps):
            if i != j and subsumes(d, c) and not subsumes(c, d):
                dominated = True
                break
            if i > j and subsumes(d, c) and subsumes(c, d):
                dominated = True
                break
        if not dominated:
            out.append(c)
    return out


def rename_clause_apart(c: Sequent, suffix: str) -> Sequent:
    from .lang import numeral_value

    m: Subst = {}
    for t in clause_variables(c):
        if isinstance(t, Var):
            m[t] = Var(f"{t.name}_{suffix}", t.sort)
        else:
            idx = numeral_value(t.index)
            tag = t.name if idx is None else f"{t.name}{idx}"
            m[t] = Var(f"{tag}_{suffix}", "iota")
    return subst_sequent(c, m)


def sequent_substitute(s: Sequent, m: Subst) -> Sequent:
    return Sequent(
        tuple(substitute(f, m) for f in s.ant),
        tuple(substitute(f, m) for f in s.suc),
    )
