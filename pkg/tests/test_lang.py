import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sceres.errors import NormalizeFirstError
from sceres.lang import (
    IOTA,
    App,
    Atom,
    Forall,
    Impl,
    SubstitutionFamily,
    V2App,
    Var,
    alpha_equal,
    apply_substitution,
    compose_substitutions,
    instantiate_parameter,
    normalize,
    numeral,
    numeral_value,
    s,
    subst_term,
    substitute,
    svar,
    term_str,
    unify,
    unify_atoms,
    validate_rewrite_system,
)
from tests.conftest import C, P, f, fhat, make_table


def test_numerals_round_trip():
    assert numeral_value(numeral(5)) == 5
    assert numeral_value(svar("k")) is None
    assert term_str(numeral(3)) == "3"
    assert term_str(s(s(svar("k")))) == "k+2"


def test_normalize_unfolds_iterated_function(table):
    # fhat(2, c) -> f(f(c))
    got = normalize(fhat(2, C), table)
    assert got == f(f(C))
    # pre collapses a successor
    assert normalize(App("pre", (numeral(2),)), table) == numeral(1)


def test_normalize_stuck_on_open_counter(table):
    t = fhat(svar("k"), C)
    assert normalize(t, table) == t
    # an open index under a successor still steps once
    got = normalize(fhat(s(svar("k")), C), table)
    assert got == f(fhat(svar("k"), C))


def test_second_order_substitution_schema(table):
    # x(k+1) under x <- \k. fhat(pre(k), c), then k <- 1, normalizes to f(c)
    fam = SubstitutionFamily(
        theta={"x": ("k", App("fhat", (App("pre", (svar("k"),)), C)))},
        vartheta={svar("k"): numeral(1)},
    )
    got = apply_substitution(V2App("x", s(svar("k"))), fam, table)
    assert got == f(C)


def test_instantiate_and_normalize_commute(table):
    t = fhat(s(svar("n")), V2App("x", svar("n")))
    a = instantiate_parameter(t, 2, "n", table)
    b = instantiate_parameter(normalize(t, table), 2, "n", table)
    assert a == b == f(f(f(V2App("x", numeral(2)))))


def test_validate_rewrite_system_accepts_table(table):
    assert validate_rewrite_system(table) == []


def test_validate_rewrite_system_flags_bad_recursion(table):
    bad = table.funs["fhat"]
    bad.step_rhs = App("fhat", (s(svar("m")), Var("x", IOTA)))
    problems = validate_rewrite_system(table)
    assert any("recursive call" in p for p in problems)


def test_validate_rewrite_system_flags_unknown_variable(table):
    bad = table.funs["fhat"]
    bad.base_rhs = Var("z", IOTA)
    problems = validate_rewrite_system(table)
    assert any("undeclared variable" in p for p in problems)


def test_unify_basic_and_occurs_check(table):
    x, y = Var("x", IOTA), Var("y", IOTA)
    sigma = unify(f(x), f(C))
    assert sigma == {x: C}
    assert unify(x, f(x)) is None
    assert unify(f(x), App("g", (C,))) is None
    sigma = unify(App("g", (x,)), App("g", (y,)))
    assert sigma in ({x: y}, {y: x})


def test_unify_closed_second_order_application_is_a_variable():
    xi = V2App("x", numeral(1))
    sigma = unify(xi, f(C))
    assert sigma == {xi: f(C)}
    # a closed application is a variable even against an open one
    sigma = unify(V2App("x", svar("k")), V2App("x", numeral(3)))
    assert sigma == {V2App("x", numeral(3)): V2App("x", svar("k"))}
    # open applications are rigid: only the indices can give
    sigma = unify(V2App("x", s(svar("k"))), V2App("x", s(svar("n"))))
    assert sigma in ({svar("k"): svar("n")}, {svar("n"): svar("k")})
    assert unify(V2App("x", svar("k")), C) is None


def test_unify_requires_normalization(table):
    with pytest.raises(NormalizeFirstError):
        unify(fhat(1, Var("x", IOTA)), f(C), table)


def test_unify_atoms_and_composition():
    x, y = Var("x", IOTA), Var("y", IOTA)
    sigma = unify_atoms(Atom("R", (x, f(y))), Atom("R", (C, f(C))))
    assert sigma == {x: C, y: C}
    s1 = {x: f(y)}
    s2 = {y: C}
    assert compose_substitutions(s1, s2) == {x: f(C), y: C}


def test_capture_avoiding_substitution():
    x, y = Var("x", IOTA), Var("y", IOTA)
    fml = Forall(y, Atom("R", (x, y)))
    out = substitute(fml, {x: y})
    assert isinstance(out, Forall)
    assert out.var != y
    assert alpha_equal(out, Forall(Var("z", IOTA), Atom("R", (y, Var("z", IOTA)))))


def test_defined_predicate_expansion():
    from sceres.lang import PredSym

    t = make_table()
    t.add_pred(
        PredSym(
            "Conj",
            ("omega",),
            defined=True,
            base_params=(),
            base_rhs=P(App("fhat", (App("0"), C))),
            step_rec="m",
            step_params=(),
            step_rhs=Impl(Atom("Conj", (svar("m"),)), P(App("fhat", (s(svar("m")), C)))),
        )
    )
    got = normalize(Atom("Conj", (numeral(1),)), t)
    assert got == Impl(P(C), P(f(C)))


# --- randomized properties -------------------------------------------------


def random_term(rng: random.Random, depth: int, sort: str):
    if depth == 0:
        if sort == "omega":
            return rng.choice([numeral(rng.randrange(3)), svar("n"), svar("k")])
        return rng.choice([C, Var("x", IOTA), Var("y", IOTA), V2App("x", numeral(rng.randrange(3)))])
    if sort == "omega":
        pick = rng.randrange(3)
        if pick == 0:
            return s(random_term(rng, depth - 1, "omega"))
        if pick == 1:
            return App("pre", (random_term(rng, depth - 1, "omega"),))
        return random_term(rng, 0, "omega")
    pick = rng.randrange(4)
    if pick == 0:
        return f(random_term(rng, depth - 1, IOTA))
    if pick == 1:
        return App("g", (random_term(rng, depth - 1, IOTA),))
    if pick == 2:
        return fhat(random_term(rng, depth - 1, "omega"), random_term(rng, depth - 1, IOTA))
    return random_term(rng, 0, IOTA)


def rewrite_once_random(t, table, rng):
    """One rewrite step at a random redex, or None when t is normal."""
    redexes = []

    def collect(u, path):
        if isinstance(u, App):
            sym = table.funs.get(u.fn)
            if sym is not None and sym.defined and u.args:
                head = u.args[0]
                if head == App("0") or (isinstance(head, App) and head.fn == "s"):
                    redexes.append(path)
            for i, a in enumerate(u.args):
                collect(a, path + (i,))
        elif isinstance(u, V2App):
            collect(u.index, path + (0,))

    collect(t, ())
    if not redexes:
        return None
    path = rng.choice(redexes)

    def rebuild(u, path):
        if not path:
            sym = table.funs[u.fn]
            head = u.args[0]
            if head == App("0"):
                m = {Var(p, sym.arg_sorts[i + 1]): u.args[i + 1] for i, p in enumerate(sym.base_params)}
                return subst_term(sym.base_rhs, m)
            m = {svar(sym.step_rec): head.args[0]}
            for i, p in enumerate(sym.step_params):
                m[Var(p, sym.arg_sorts[i + 1])] = u.args[i + 1]
            return subst_term(sym.step_rhs, m)
        i, rest = path[0], path[1:]
        if isinstance(u, V2App):
            return V2App(u.name, rebuild(u.index, rest))
        args = list(u.args)
        args[i] = rebuild(args[i], rest)
        return App(u.fn, tuple(args))

    return rebuild(t, path)


def test_normalize_idempotent_and_confluent_on_random_terms(table):
    rng = random.Random(20260822)
    for _ in range(100):
        t = random_term(rng, 4, IOTA)
        nf = normalize(t, table)
        assert normalize(nf, table) == nf
        # random-order rewriting reaches the same normal form
        u = t
        for _ in range(200):
            nxt = rewrite_once_random(u, table, rng)
            if nxt is None:
                break
            u = nxt
        assert u == nf


def test_instantiation_commutes_on_random_terms(table):
    rng = random.Random(7)
    for _ in range(50):
        t = random_term(rng, 4, IOTA)
        for gamma in (0, 1, 3):
            a = instantiate_parameter(t, gamma, "n", table)
            b = instantiate_parameter(normalize(t, table), gamma, "n", table)
            assert a == b


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_unifier_is_idempotent(da, db, data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    a = random_term(rng, da, IOTA)
    b = random_term(rng, db, IOTA)
    table = make_table()
    a = normalize(a, table)
    b = normalize(b, table)
    sigma = unify(a, b)
    if sigma is not None:
        assert subst_term(a, sigma) == subst_term(b, sigma)
        assert compose_substitutions(sigma, sigma) == sigma
