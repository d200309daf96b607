import itertools
import random
from types import SimpleNamespace

import pytest
from conftest import A_CONST, B_CONST, C, P, Q, f, fhat, make_table
from demo_proof import cut_demo
from running import build_running_schema, running_table

from sceres.clauseterms import build_char_schema, char_clause_set, clause_set_at
from sceres.errors import ResourceOut, SchemaError
from sceres.lang import (
    IOTA,
    OMEGA,
    App,
    Atom,
    FunSym,
    Impl,
    PredSym,
    SymbolTable,
    V2App,
    Var,
    numeral,
    s,
    svar,
)
from sceres.resolution import (
    CSApp,
    CSClause,
    CSCompose,
    CSTApp,
    CSTPlus,
    CSTSingleton,
    CSTTimes,
    CSTVar,
    CSVar,
    ClauseSchemaDef,
    ClauseSetSchemaDef,
    ClauseSetSymbolDef,
    RDLeaf,
    RDRes,
    RRes,
    RSym,
    RefutationWitness,
    ResolutionRule,
    ResolutionSchema,
    ResolutionTree,
    char_schema_as_clause_set_schema,
    check_clause_schema,
    check_clause_set_schema,
    check_refutation,
    check_resolution_schema,
    check_witness,
    config_symbol_name,
    deduction_leaves,
    deduction_size,
    deduction_str,
    eval_clause_schema,
    eval_clause_set_schema,
    eval_resolution_schema,
    eval_resolution_term,
    ground_refute,
    inference_count,
    resolve,
    to_tree,
    tree_size,
)
from sceres.schema import check_schema, regularize
from sceres.sequents import EMPTY, Sequent, reduce_clause_set, sequent_str

K = svar("k")
N = svar("n")
X_VAR = Var("x", IOTA)
ZERO = numeral(0)


def x_at(j):
    return V2App("x", numeral(j) if isinstance(j, int) else j)


@pytest.fixture(scope="module")
def table():
    return make_table()


@pytest.fixture(scope="module")
def demo_cl(table):
    return char_clause_set(cut_demo(), table)


@pytest.fixture(scope="module")
def rtable():
    return running_table()


@pytest.fixture(scope="module")
def rschema(rtable):
    schema = regularize(build_running_schema(rtable))
    assert check_schema(schema).ok
    return schema


@pytest.fixture(scope="module")
def rcharschema(rschema):
    return build_char_schema(rschema)


@pytest.fixture(scope="module")
def iter_res(rtable):
    """Refutation schema for the iterated-f clause sets: a chain lemma
    symbol resolves the start clause through the step clauses, and the top
    rule closes the chain against the end clause."""
    chain = ResolutionRule(
        "chain",
        base=CSClause(Sequent((), (P(C),))),
        step=RRes(
            RSym("chain", K, ("x",)),
            CSClause(Sequent((P(x_at(s(K))),), (P(f(x_at(s(K)))),))),
            P(fhat(K, C)),
        ),
        v2_params=("x",),
    )
    top = ResolutionRule(
        "top",
        base=RRes(RSym("chain", ZERO, ("x",)),
                  CSClause(Sequent((P(fhat(ZERO, C)),), ())), P(fhat(ZERO, C))),
        step=RRes(RSym("chain", s(K), ("x",)),
                  CSClause(Sequent((P(fhat(s(K), C)),), ())), P(fhat(s(K), C))),
        v2_params=("x",),
    )
    rs = ResolutionSchema((top, chain))
    witness = RefutationWitness(
        theta={"x": ("k", fhat(App("pre", (K,)), C))})
    return SimpleNamespace(rs=rs, witness=witness, table=rtable)


@pytest.fixture(scope="module")
def sig():
    """Second signature: the defined symbols expose indexed variables x(j)
    only after unfolding, so substitutions on them kick in after
    normalization."""
    t = SymbolTable.empty()
    t.add_fun(FunSym("a", (), IOTA))
    t.add_fun(FunSym("g", (IOTA,), IOTA))
    t.add_fun(FunSym("w", (OMEGA, OMEGA), IOTA, defined=True,
                     base_params=("l",), base_rhs=V2App("x", svar("l")),
                     step_rec="m", step_params=("l",),
                     step_rhs=App("g", (App("w", (svar("m"), svar("l"))),))))
    t.add_fun(FunSym("wa", (OMEGA,), IOTA, defined=True,
                     base_params=(), base_rhs=App("a"),
                     step_rec="m", step_params=(),
                     step_rhs=App("g", (App("wa", (svar("m"),)),))))
    t.add_pred(PredSym("P", (IOTA,)))
    t.add_pred(PredSym("Q", (IOTA,)))
    t.v2_vars.add("x")

    def w(i, j):
        return App("w", (i, j))

    def wa(i):
        return App("wa", (i,))

    cdef = ClauseSchemaDef(
        "grow",
        base=CSCompose(CSVar("X"), CSClause(Sequent((), (P(w(ZERO, ZERO)),)))),
        step_delta=Sequent((), (P(w(s(K), s(K))),)),
        clause_params=("X",),
    )
    collect = ClauseSetSymbolDef(
        "collect",
        base=CSTPlus(CSTApp("ends", ZERO, (), (CSVar("X"),)), CSTVar("xi")),
        step=CSTPlus(CSTApp("ends", s(K), (), (CSVar("X"),)),
                     CSTSingleton(CSApp("grow", s(K), (), (CSVar("X"),)))),
        clause_params=("X",),
    )
    ends = ClauseSetSymbolDef(
        "ends",
        base=CSTSingleton(CSClause(Sequent((P(wa(ZERO)),), ()))),
        step=CSTPlus(CSTApp("ends", K, (), (CSVar("X"),)),
                     CSTSingleton(CSClause(Sequent((P(wa(s(K))),), ())))),
        clause_params=("X",),
    )
    setdef = ClauseSetSchemaDef((collect, ends), clause_defs={"grow": cdef})
    mu = {"xi": CSTSingleton(CSClause(Sequent((), (P(x_at(0)),))))}
    refute = ResolutionRule(
        "refute",
        base=RRes(CSCompose(CSClause(Sequent((), (P(w(ZERO, ZERO)),))), CSVar("X")),
                  CSClause(Sequent((P(wa(ZERO)),), ())), P(w(ZERO, ZERO))),
        step=RRes(
            RSym("refute", K, (),
                 (CSCompose(CSClause(Sequent((), (P(w(s(K), s(K))),))), CSVar("X")),)),
            CSClause(Sequent((P(wa(s(K))),), ())), P(w(s(K), s(K)))),
        clause_params=("X",),
    )
    rs = ResolutionSchema((refute,), clause_defs={"grow": cdef})
    witness = RefutationWitness(lam={"X": EMPTY}, theta={"x": ("k", App("a"))}, mu=mu)
    return SimpleNamespace(table=t, w=w, wa=wa, cdef=cdef, setdef=setdef, mu=mu,
                           rs=rs, witness=witness)


# --- the ground inference ---


def test_resolve_removes_pivot_on_both_sides():
    left = Sequent((), (P(A_CONST),))
    right = Sequent((P(A_CONST),), (Q(A_CONST),))
    out, pseudo = resolve(left, right, P(A_CONST))
    assert out == Sequent((), (Q(A_CONST),))
    assert not pseudo


def test_resolve_removes_every_occurrence():
    left = Sequent((P(B_CONST),), (P(A_CONST), P(A_CONST)))
    right = Sequent((P(A_CONST), P(A_CONST)), (Q(A_CONST),))
    out, pseudo = resolve(left, right, P(A_CONST))
    assert out == Sequent((P(B_CONST),), (Q(A_CONST),))
    assert not pseudo


def test_resolve_flags_untouched_premises():
    out, pseudo = resolve(Sequent((P(A_CONST),), ()), Sequent((), (Q(A_CONST),)),
                          P(B_CONST))
    assert out == Sequent((P(A_CONST),), (Q(A_CONST),))
    assert pseudo


def test_resolve_accepts_one_sided_removal():
    out, pseudo = resolve(Sequent((), (P(A_CONST),)), Sequent((), (Q(A_CONST),)),
                          P(A_CONST))
    assert out == Sequent((), (Q(A_CONST),))
    assert not pseudo


def test_resolve_input_validation(table):
    with pytest.raises(SchemaError):
        resolve(Sequent((), (Impl(P(A_CONST), Q(A_CONST)),)), EMPTY, P(A_CONST))
    with pytest.raises(SchemaError):
        resolve(Sequent((), (P(fhat(N, C)),)), EMPTY, P(A_CONST))
    with pytest.raises(SchemaError):
        resolve(Sequent((), (P(fhat(2, C)),)), EMPTY, P(A_CONST), table)
    with pytest.raises(SchemaError):
        resolve(EMPTY, EMPTY, P(fhat(2, C)), table)


def test_resolve_is_sound_on_ground_clauses():
    atoms = [P(A_CONST), P(B_CONST), P(C), Q(A_CONST), Q(B_CONST), Q(C)]
    rng = random.Random(20260822)

    def holds(clause, model):
        return (any(a not in model for a in clause.ant)
                or any(a in model for a in clause.suc))

    models = [frozenset(m)
              for r in range(len(atoms) + 1)
              for m in itertools.combinations(atoms, r)]
    for _ in range(500):
        left = Sequent(tuple(rng.choice(atoms) for _ in range(rng.randint(0, 2))),
                       tuple(rng.choice(atoms) for _ in range(rng.randint(0, 2))))
        right = Sequent(tuple(rng.choice(atoms) for _ in range(rng.randint(0, 2))),
                        tuple(rng.choice(atoms) for _ in range(rng.randint(0, 2))))
        pivot = rng.choice(atoms)
        out, pseudo = resolve(left, right, pivot)
        assert pseudo == (pivot not in left.suc and pivot not in right.ant)
        for model in models:
            if holds(left, model) and holds(right, model):
                assert holds(out, model)


# --- clause symbols ---


def test_clause_symbol_value_grows_with_parameter(sig):
    lam = {"X": Sequent((Q(x_at(N)),), ())}
    out = eval_clause_schema(CSApp("grow", N, (), (CSVar("X"),)),
                             {N: numeral(2)}, lam, [sig.cdef], sig.table)
    g = lambda t: App("g", (t,))
    assert out == Sequent((Q(x_at(2)),),
                          (P(x_at(0)), P(g(x_at(1))), P(g(g(x_at(2))))))


def test_clause_symbol_base_and_empty_context(sig):
    app = CSApp("grow", N, (), (CSVar("X"),))
    out0 = eval_clause_schema(app, {N: ZERO}, {"X": EMPTY}, [sig.cdef], sig.table)
    assert out0 == Sequent((), (P(x_at(0)),))
    out2 = eval_clause_schema(app, {N: numeral(2)}, {"X": EMPTY}, [sig.cdef], sig.table)
    assert len(out2.suc) == 3 and not out2.ant


def test_clause_symbol_unfolds_large_values(sig):
    out = eval_clause_schema(CSApp("grow", N, (), (CSVar("X"),)),
                             {N: numeral(40)}, {"X": EMPTY}, [sig.cdef], sig.table)
    assert len(out.suc) == 41


def test_clause_schema_check_accepts(sig):
    assert check_clause_schema(sig.cdef, sig.table).ok


def test_clause_schema_check_rejects_bad_shapes(sig):
    bad = ClauseSchemaDef("b", base=CSApp("grow", ZERO), step_delta=EMPTY)
    rep = check_clause_schema(bad, sig.table)
    assert any("cannot apply" in d.message for d in rep.diagnostics)

    bad = ClauseSchemaDef("b", base=CSVar("Y"), step_delta=EMPTY)
    rep = check_clause_schema(bad, sig.table)
    assert any("unbound clause variable Y" in d.message for d in rep.diagnostics)

    bad = ClauseSchemaDef("b",
                          base=CSClause(Sequent((), (P(Var("z", IOTA)),))),
                          step_delta=Sequent((), (P(sig.wa(N)),)))
    rep = check_clause_schema(bad, sig.table)
    assert any("free individual variable z" in d.message for d in rep.diagnostics)
    assert any("stray arithmetic variable n" in d.message for d in rep.diagnostics)

    bad = ClauseSchemaDef("b", base=CSClause(Sequent((), (P(V2App("y", ZERO)),))),
                          step_delta=EMPTY)
    rep = check_clause_schema(bad, sig.table)
    assert any("second-order variable y" in d.message for d in rep.diagnostics)


def test_unbound_clause_variable_fails(sig):
    with pytest.raises(SchemaError):
        eval_clause_schema(CSVar("Z"), {}, {}, [sig.cdef], sig.table)


# --- clause-set symbols ---


def test_clause_set_schema_instances(sig):
    out = eval_clause_set_schema(sig.setdef, {N: numeral(2)}, {"X": EMPTY},
                                 sig.mu, sig.table)
    g = lambda t: App("g", (t,))
    a = App("a")
    assert out == [
        Sequent((P(a),), ()),
        Sequent((P(g(a)),), ()),
        Sequent((P(g(g(a))),), ()),
        Sequent((), (P(x_at(0)), P(g(x_at(1))), P(g(g(x_at(2)))))),
    ]


def test_clause_set_schema_base_substitutes_free_variables(sig):
    out = eval_clause_set_schema(sig.setdef, {N: ZERO}, {"X": EMPTY}, sig.mu, sig.table)
    assert out == [Sequent((P(App("a")),), ()), Sequent((), (P(x_at(0)),))]


def test_clause_set_free_variables_need_bindings(sig):
    with pytest.raises(SchemaError):
        eval_clause_set_schema(sig.setdef, {N: ZERO}, {"X": EMPTY}, {}, sig.table)
    # the unbound variable only lives in the base rule
    out = eval_clause_set_schema(sig.setdef, {N: numeral(1)}, {"X": EMPTY},
                                 {}, sig.table)
    assert len(out) == 3


def test_clause_set_variable_ranges_must_be_plain(sig):
    bad = {"xi": CSTApp("ends", ZERO, (), (CSVar("X"),))}
    with pytest.raises(SchemaError):
        eval_clause_set_schema(sig.setdef, {N: ZERO}, {"X": EMPTY}, bad, sig.table)


def test_clause_set_check_accepts(sig):
    assert check_clause_set_schema(sig.setdef, sig.table).ok


def test_clause_set_check_rejects_rank_violations(table):
    leaf = CSTSingleton(CSClause(Sequent((), (P(A_CONST),))))
    first = ClauseSetSymbolDef("first", base=CSTApp("second", ZERO),
                               step=CSTApp("first", s(K)))
    second = ClauseSetSymbolDef("second", base=CSTApp("first", ZERO),
                                step=CSTApp("nowhere", K))
    rep = check_clause_set_schema(ClauseSetSchemaDef((first, second)), table)
    assert not rep.ok
    messages = [d.message for d in rep.diagnostics]
    assert any("must recurse at exactly the step parameter" in m for m in messages)
    assert any("breaks the rank order" in m for m in messages)
    assert any("unknown clause-set symbol nowhere" in m for m in messages)

    selfy = ClauseSetSymbolDef("selfy", base=CSTApp("selfy", ZERO), step=leaf)
    rep = check_clause_set_schema(ClauseSetSchemaDef((selfy,)), table)
    assert any("same rank in a base rule" in d.message for d in rep.diagnostics)


def test_clause_set_unfolding_must_terminate(table):
    bad = ClauseSetSymbolDef(
        "bad",
        base=CSTSingleton(CSClause(Sequent((), (P(A_CONST),)))),
        step=CSTApp("bad", s(K)))
    d = ClauseSetSchemaDef((bad,))
    assert not check_clause_set_schema(d, table).ok
    with pytest.raises(SchemaError, match="non-terminating"):
        eval_clause_set_schema(d, {N: numeral(1)}, {}, {}, table)


def test_clause_set_union_and_product(table):
    pa = CSTSingleton(CSClause(Sequent((), (P(A_CONST),))))
    qb = CSTSingleton(CSClause(Sequent((), (Q(B_CONST),))))
    pc = CSTSingleton(CSClause(Sequent((P(C),), ())))
    sym = ClauseSetSymbolDef("pairs", base=CSTTimes(CSTPlus(pa, qb), pc),
                             step=CSTPlus(pa, pa))
    d = ClauseSetSchemaDef((sym,))
    assert eval_clause_set_schema(d, {N: ZERO}, {}, {}, table) == [
        Sequent((P(C),), (P(A_CONST),)),
        Sequent((P(C),), (Q(B_CONST),)),
    ]
    # union removes the duplicate contribution
    assert eval_clause_set_schema(d, {N: numeral(1)}, {}, {}, table) == [
        Sequent((), (P(A_CONST),)),
    ]


# --- characteristic rules as a clause-set schema ---


def test_characteristic_rules_convert(rschema, rcharschema):
    conv = char_schema_as_clause_set_schema(rcharschema, rschema)
    assert [sym.symbol for sym in conv.symbols] == ["phi", "psi@suc.0"]
    assert [sym.rank for sym in conv.symbols] == [0, 1]
    assert check_clause_set_schema(conv, rschema.table).ok


def test_converted_rules_match_direct_evaluation(rschema, rcharschema):
    conv = char_schema_as_clause_set_schema(rcharschema, rschema)
    for gamma in (0, 1, 3):
        direct = clause_set_at(rcharschema, gamma)
        viewed = eval_clause_set_schema(conv, {N: numeral(gamma)}, {}, {},
                                        rschema.table)
        assert viewed == direct


def test_config_symbol_names():
    assert config_symbol_name(("phi", ())) == "phi"
    assert config_symbol_name(("psi", (("ant", 1), ("suc", 0)))) == "psi@ant.1,suc.0"


# --- resolution schemata ---


def test_resolution_schema_check_accepts(iter_res, sig):
    assert check_resolution_schema(iter_res.rs, iter_res.table).ok
    assert check_resolution_schema(sig.rs, sig.table).ok
    assert check_witness(iter_res.witness, iter_res.table).ok
    assert check_witness(sig.witness, sig.table).ok


def test_resolution_schema_check_rejects_order_violations(table):
    pa = CSClause(Sequent((), (P(A_CONST),)))
    one = ResolutionRule("one", base=RSym("one", ZERO), step=RSym("one", s(K)))
    two = ResolutionRule("two", base=RSym("one", ZERO),
                         step=RSym("missing", K))
    rep = check_resolution_schema(ResolutionSchema((one, two)), table)
    messages = [d.message for d in rep.diagnostics]
    assert any("cannot reference itself in its base body" in m for m in messages)
    assert any("must recurse at exactly the step parameter" in m for m in messages)
    assert any("breaks the rule order" in m for m in messages)
    assert any("unknown resolution symbol missing" in m for m in messages)

    leafy = ResolutionRule("leafy", base=CSApp("nodef", ZERO), step=pa)
    rep = check_resolution_schema(ResolutionSchema((leafy,)), table)
    assert any("unknown clause symbol nodef" in d.message for d in rep.diagnostics)


def test_witness_check_flags_bad_substitutions(table):
    w = RefutationWitness(
        lam={"X": Sequent((), (Impl(P(A_CONST), Q(A_CONST)),))},
        theta={"x": ("k", fhat(svar("j"), C))},
        mu={"xi": CSTVar("other")},
        gamma_max=-1,
    )
    rep = check_witness(w, table)
    paths = {d.path for d in rep.diagnostics}
    assert paths == {"lambda/X", "theta/x", "mu/xi", "gamma_max"}


def test_refutation_schema_base_instance(iter_res):
    ded = eval_resolution_schema(iter_res.rs, iter_res.witness, 0, iter_res.table)
    assert ded == RDRes(RDLeaf(Sequent((), (P(C),))), RDLeaf(Sequent((P(C),), ())),
                        P(C), EMPTY, False)


def test_refutation_schema_unfolds_nested_steps(iter_res):
    ded = eval_resolution_schema(iter_res.rs, iter_res.witness, 2, iter_res.table)
    assert ded.clause == EMPTY
    assert inference_count(ded) == 3
    assert deduction_leaves(ded) == [
        Sequent((), (P(C),)),
        Sequent((P(C),), (P(f(C)),)),
        Sequent((P(f(C)),), (P(f(f(C))),)),
        Sequent((P(f(f(C))),), ()),
    ]
    pivots = [ded.left.left.pivot, ded.left.pivot, ded.pivot]
    assert pivots == [P(C), P(f(C)), P(f(f(C)))]


def test_refutation_schema_covers_parameter_range(iter_res, rcharschema):
    for gamma in range(9):
        ded = eval_resolution_schema(iter_res.rs, iter_res.witness, gamma,
                                     iter_res.table)
        assert ded.clause == EMPTY
        assert inference_count(ded) == gamma + 1
        faithful = clause_set_at(rcharschema, gamma)
        assert check_refutation(ded, faithful, iter_res.table).ok
        assert check_refutation(ded, reduce_clause_set(faithful), iter_res.table).ok


def test_refutation_schema_with_clause_contexts(sig):
    ded = eval_resolution_schema(sig.rs, sig.witness, 1, sig.table)
    a = App("a")
    g = lambda t: App("g", (t,))
    assert deduction_leaves(ded) == [
        Sequent((), (P(a), P(g(a)))),
        Sequent((P(a),), ()),
        Sequent((P(g(a)),), ()),
    ]
    assert ded.clause == EMPTY
    instance = eval_clause_set_schema(sig.setdef, {N: numeral(1)}, {"X": EMPTY},
                                      sig.mu, sig.table)
    assert check_refutation(ded, instance, sig.table).ok


def test_illegal_one_sided_resolvent_is_rejected(table):
    term = RRes(CSClause(Sequent((), (P(A_CONST),))),
                CSClause(Sequent((Q(A_CONST),), ())), P(A_CONST))
    with pytest.raises(SchemaError, match="only in the left premise"):
        eval_resolution_term(term, RefutationWitness(), 0, table)


def test_unknown_resolution_symbol_fails(table):
    with pytest.raises(SchemaError, match="unknown resolution symbol"):
        eval_resolution_term(RSym("nope", ZERO), RefutationWitness(), 0, table)


# --- refutation checking ---


def _demo_deduction():
    a = A_CONST
    lower = RDRes(RDLeaf(Sequent((), (P(a),))),
                  RDLeaf(Sequent((P(a), P(a)), (Q(a), Q(a)))),
                  P(a), Sequent((), (Q(a), Q(a))), False)
    return RDRes(lower, RDLeaf(Sequent((Q(a),), ())), Q(a), EMPTY, False)


def test_checker_accepts_demo_deduction(demo_cl, table):
    assert check_refutation(_demo_deduction(), demo_cl, table).ok


def test_checker_flags_wrong_clause(demo_cl, table):
    ded = _demo_deduction()
    bad = RDRes(ded.left, ded.right, ded.pivot, Sequent((), (Q(A_CONST),)), False)
    rep = check_refutation(bad, demo_cl, table)
    assert any("final clause is not empty" in d.message for d in rep.diagnostics)
    assert any("is not the resolvent" in d.message for d in rep.diagnostics)


def test_checker_flags_foreign_leaf(demo_cl, table):
    ded = RDRes(RDLeaf(Sequent((), (P(B_CONST),))),
                RDLeaf(Sequent((P(B_CONST),), ())), P(B_CONST), EMPTY, False)
    rep = check_refutation(ded, demo_cl, table)
    leaf_complaints = [d for d in rep.diagnostics if "not an instance" in d.message]
    assert len(leaf_complaints) == 2


def test_checker_flags_one_sided_pivot(demo_cl, table):
    ded = RDRes(RDLeaf(Sequent((), (P(A_CONST),))), RDLeaf(Sequent((Q(A_CONST),), ())),
                P(A_CONST), EMPTY, False)
    rep = check_refutation(ded, demo_cl, table)
    assert any("occurs only in the left premise" in d.message for d in rep.diagnostics)


def test_checker_flags_wrong_pseudo_flag(demo_cl, table):
    good = _demo_deduction()
    bad = RDRes(good.left, good.right, good.pivot, good.clause, True)
    rep = check_refutation(bad, demo_cl, table)
    assert any("pseudo-resolvent flag" in d.message for d in rep.diagnostics)


# --- tree form ---


def test_deduction_to_tree_keeps_interior_clauses():
    x = X_VAR
    p0, p1 = Atom("P0", (x,)), Atom("P1", (x,))
    q0, q1 = Atom("Q0", (x,)), Atom("Q1", (x,))
    inner_clause, pseudo = resolve(Sequent((), (q0, p0, p1)), Sequent((p1,), ()), p1)
    assert inner_clause == Sequent((), (q0, p0)) and not pseudo
    root_clause, pseudo = resolve(inner_clause, Sequent((q0, q1), ()), q0)
    assert root_clause == Sequent((q1,), (p0,)) and not pseudo
    ded = RDRes(RDRes(RDLeaf(Sequent((), (q0, p0, p1))), RDLeaf(Sequent((p1,), ())),
                      p1, inner_clause, False),
                RDLeaf(Sequent((q0, q1), ())), q0, root_clause, False)
    tree = to_tree(ded)
    assert tree.clause == root_clause
    assert tree.premises[0].clause == inner_clause
    assert tree.premises[1] == ResolutionTree(Sequent((q0, q1), ()))
    assert tree_size(tree) == deduction_size(ded) == 5


def test_tree_of_single_clause():
    c = Sequent((), (P(A_CONST),))
    assert to_tree(RDLeaf(c)) == ResolutionTree(c)


def test_tree_matches_schema_instance(iter_res):
    ded = eval_resolution_schema(iter_res.rs, iter_res.witness, 1, iter_res.table)
    tree = to_tree(ded)
    assert tree.clause == EMPTY
    assert [leaf for leaf in deduction_leaves(ded)] == [
        t.clause for t in _tree_leaves(tree)]


def _tree_leaves(t):
    if not t.premises:
        return [t]
    return [leaf for p in t.premises for leaf in _tree_leaves(p)]


# --- instance-level search ---


def test_search_refutes_demo_clause_set(demo_cl, table):
    ded = ground_refute(demo_cl, table)
    assert ded is not None
    assert check_refutation(ded, demo_cl, table).ok


def test_search_refutes_chain_in_three_steps(table):
    x = Var("x", IOTA)
    clauses = [Sequent((), (P(C),)), Sequent((P(x),), (P(f(x)),)),
               Sequent((P(f(f(C))),), ())]
    ded = ground_refute(clauses, table)
    assert ded is not None
    assert inference_count(ded) == 3
    assert check_refutation(ded, clauses, table).ok


def test_search_reports_saturation(table):
    assert ground_refute([Sequent((), (P(A_CONST),))], table) is None
    assert ground_refute([Sequent((P(A_CONST),), (Q(A_CONST),)),
                          Sequent((), (P(A_CONST),))], table) is None


def test_search_respects_budget(table):
    x = Var("x", IOTA)
    clauses = [Sequent((), (P(C),)), Sequent((P(x),), (P(f(x)),)),
               Sequent((P(f(f(C))),), ())]
    with pytest.raises(ResourceOut):
        ground_refute(clauses, table, max_generated=2)
    with pytest.raises(ResourceOut):
        ground_refute(clauses, table, max_kept=3)


def test_search_covers_schema_clause_sets(rcharschema, rtable):
    for gamma in range(9):
        clauses = clause_set_at(rcharschema, gamma)
        ded = ground_refute(clauses, rtable)
        assert ded is not None
        assert check_refutation(ded, clauses, rtable).ok
        assert inference_count(ded) == gamma + 1


def test_search_input_validation(table):
    with pytest.raises(SchemaError):
        ground_refute([Sequent((), (Impl(P(A_CONST), Q(A_CONST)),))], table)
    with pytest.raises(SchemaError):
        ground_refute([Sequent((), (P(fhat(N, C)),))], table)
    with pytest.raises(SchemaError):
        ground_refute([Sequent((), (P(fhat(2, C)),))], table)


def test_search_accepts_immediate_contradiction(table):
    ded = ground_refute([Sequent((), (P(A_CONST),)), EMPTY], table)
    assert ded == RDLeaf(EMPTY)
