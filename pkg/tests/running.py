"""Programmatic construction of the two-pair iterated-f schema used across
the test suite: phi proves that a chained implication follows from the
step axiom, via a cut on the inductive lemma proved by psi."""
from conftest import C, P, f, fhat

from sceres.lang import (
    IOTA,
    OMEGA,
    ZERO,
    App,
    Forall,
    FunSym,
    Impl,
    PredSym,
    SymbolTable,
    Var,
    numeral,
    s,
    svar,
)
from sceres.proofs import (
    all_l,
    all_r,
    ax,
    c_l,
    cut,
    e_l,
    imp_l,
    imp_r,
    link,
    w_l,
)
from sceres.schema import ProofSchema, SchemaPair
from sceres.sequents import Sequent, subst_sequent

K = svar("k")
N = svar("n")
X = Var("x")

A_F = Forall(X, Impl(P(X), P(f(X))))


def g(n, x):
    if isinstance(n, int):
        n = numeral(n)
    return App("g", (n, x))


def running_table() -> SymbolTable:
    t = SymbolTable.empty()
    t.add_fun(FunSym("c", (), IOTA))
    t.add_fun(FunSym("f", (IOTA,), IOTA))
    t.add_fun(FunSym("g", (OMEGA, IOTA), IOTA))
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
    t.fo_vars.update({"x0": IOTA, "xk1": IOTA, "u": IOTA, "v": IOTA})
    t.v2_vars.add("x")
    return t


PHI_TEMPLATE = Sequent(
    (A_F,),
    (Impl(Impl(P(fhat(N, C)), P(g(N, C))), Impl(P(C), P(g(N, C)))),),
)
PSI_TEMPLATE = Sequent((A_F,), (Forall(X, Impl(P(X), P(fhat(N, X)))),))


def _chain_proof(m):
    """From the psi lemma at m derive the chained implication at m."""
    ax1 = ax(Sequent((P(C),), (P(C),)))
    ax2 = ax(Sequent((P(fhat(m, C)),), (P(fhat(m, C)),)))
    ax3 = ax(Sequent((P(g(m, C)),), (P(g(m, C)),)))
    p = imp_l(ax2, ax3, 0, 0)
    p = imp_l(ax1, p, 0, 1)
    p = imp_r(p, 1, 0)
    p = imp_r(p, 1, 0)
    return all_l(p, 0, Forall(X, Impl(P(X), P(fhat(m, X)))), C)


def _lemma_step(xv):
    """From the psi lemma at k derive it at k+1; xv is the eigenvariable."""
    axa = ax(Sequent((P(xv),), (P(xv),)))
    axb = ax(Sequent((P(fhat(K, xv)),), (P(fhat(K, xv)),)))
    axc = ax(Sequent((P(fhat(s(K), xv)),), (P(fhat(s(K), xv)),)))
    p = e_l(axc, 0, P(f(fhat(K, xv))))
    p = imp_l(axb, p, 0, 0)
    p = all_l(p, 0, A_F, fhat(K, xv))
    p = imp_l(axa, p, 0, 1)
    p = imp_r(p, 1, 0)
    p = all_l(p, 0, Forall(X, Impl(P(X), P(fhat(K, X)))), xv)
    return all_r(p, 0, Forall(X, Impl(P(X), P(fhat(s(K), X)))), xv)


def _phi_base():
    lk = link("psi", ZERO, (), subst_sequent(PSI_TEMPLATE, {N: ZERO}))
    return cut(lk, _chain_proof(ZERO), 0, 0)


def _phi_step():
    lk = link("psi", s(K), (), subst_sequent(PSI_TEMPLATE, {N: s(K)}))
    return cut(lk, _chain_proof(s(K)), 0, 0)


def _psi_base():
    x0 = Var("x0")
    p = ax(Sequent((P(fhat(0, x0)),), (P(fhat(0, x0)),)))
    p = e_l(p, 0, P(x0))
    p = imp_r(p, 0, 0)
    p = all_r(p, 0, Forall(X, Impl(P(X), P(fhat(ZERO, X)))), x0)
    return w_l(p, A_F)


def _psi_step():
    lk = link("psi", K, (), subst_sequent(PSI_TEMPLATE, {N: K}))
    p = cut(lk, _lemma_step(Var("xk1")), 0, 0)
    return c_l(p, 0, 1)


def build_running_schema(table: SymbolTable) -> ProofSchema:
    return ProofSchema(
        [
            SchemaPair("phi", PHI_TEMPLATE, _phi_base(), _phi_step()),
            SchemaPair("psi", PSI_TEMPLATE, _psi_base(), _psi_step()),
        ],
        table,
    )
