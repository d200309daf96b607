import pytest

from sceres.lang import (
    IOTA,
    OMEGA,
    App,
    Atom,
    FunSym,
    PredSym,
    SymbolTable,
    Var,
    numeral,
    s,
    svar,
)


def make_table() -> SymbolTable:
    """Signature used across the tests: constants a, b, c; f, g; the defined
    symbols fhat (iterated f) and pre (predecessor); predicates P, Q."""
    t = SymbolTable.empty()
    t.add_fun(FunSym("a", (), IOTA))
    t.add_fun(FunSym("b", (), IOTA))
    t.add_fun(FunSym("c", (), IOTA))
    t.add_fun(FunSym("f", (IOTA,), IOTA))
    t.add_fun(FunSym("g", (IOTA,), IOTA))
    t.add_fun(
        FunSym(
            "fhat",
            (OMEGA, IOTA),
            IOTA,
            defined=True,
            base_params=("x",),
            base_rhs=Var("x", IOTA),
            step_rec="m",
            step_params=("x",),
            step_rhs=App("f", (App("fhat", (svar("m"), Var("x", IOTA))),)),
        )
    )
    t.add_fun(
        FunSym(
            "pre",
            (OMEGA,),
            OMEGA,
            defined=True,
            base_params=(),
            base_rhs=App("0"),
            step_rec="m",
            step_params=(),
            step_rhs=svar("m"),
        )
    )
    t.add_pred(PredSym("P", (IOTA,)))
    t.add_pred(PredSym("Q", (IOTA,)))
    t.fo_vars.update({"x": IOTA, "y": IOTA, "u": IOTA, "v": IOTA})
    t.v2_vars.add("x")
    return t


@pytest.fixture
def table() -> SymbolTable:
    return make_table()


def P(t):
    return Atom("P", (t,))


def Q(t):
    return Atom("Q", (t,))


def fhat(n, x):
    if isinstance(n, int):
        n = numeral(n)
    return App("fhat", (n, x))


def f(x):
    return App("f", (x,))


C = App("c")
A_CONST = App("a")
B_CONST = App("b")
