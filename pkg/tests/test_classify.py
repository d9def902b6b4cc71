import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcsp.behaviours import B_EDGEDEL, B_H3, B_MIN, B_XNOR3
from hcsp.classify import NotPreserved, classify, classify_equality, collapse_equality, lift_value
from hcsp.core import (EQ, E, N, OMEGA, BaseStructure, Instance, InvariantBreach, OrbitRelation, Signature,
                       SolveResult, TypeMatrix, check_witness)
from hcsp.corpus import XOR_PATTERN, catalog_cases, parity_signature
from hcsp.formula import compile_formula
from hcsp.oracle import oracle_solve, random_instance, random_relation
import importlib
from hcsp.solve import run_solver, solve, solve_trivial

H3, H4 = BaseStructure.henson(3), BaseStructure.henson(4)
CW2, C2W = BaseStructure.equiv(OMEGA, 2), BaseStructure.equiv(2, OMEGA)
CW3, C3W = BaseStructure.equiv(OMEGA, 3), BaseStructure.equiv(3, OMEGA)
EQB = BaseStructure.equality()


def sig_of(base, *specs):
    return Signature(base, tuple(compile_formula(f, k, base, name) for name, k, f in specs))


class TestExamples:
    @pytest.mark.parametrize("label,sig,expected", catalog_cases(), ids=[c[0] for c in catalog_cases()])
    def test_catalog(self, label, sig, expected):
        assert classify(sig).outcome == expected

    def test_horn_witness(self):
        v = classify(sig_of(H3, ("E", 2, "E(1,2)"), ("R", 4, "!E(1,2)|E(3,4)")))
        assert v.witness == {"solver": "horn", "behaviour": "B_min"}

    def test_hard_label_and_trail(self):
        v = classify(sig_of(H3, ("R", 4, "E(1,2)|E(3,4)")))
        assert v.outcome == "NPC" and v.witness == {"label": "henson-hard"}
        tests = [e["test"] for e in v.trail]
        assert "collapse detection" in tests
        assert any(e["result"] == "no" and "detail" in e for e in v.trail)

    def test_parity_language(self):
        v = classify(parity_signature())
        assert v.witness == {"solver": "cw2_parity", "behaviour": "B_H3"}

    def test_minority_language(self):
        v = classify(sig_of(C2W, ("N", 2, "N(1,2)"), ("neq", 2, "neq(1,2)")))
        assert v.witness == {"solver": "c2w_minority", "behaviour": "B_xnor3"}

    def test_collapse_to_equality_horn(self):
        v = classify(sig_of(CW3, ("neq", 2, "neq(1,2)"), ("N", 2, "N(1,2)")))
        assert v.witness == {"solver": "horn", "behaviour": "B_eqmeet", "collapse": "B_edgedel"}

    def test_collapse_to_equality_hard(self):
        v = classify(sig_of(CW3, ("X", 4, XOR_PATTERN)))
        assert v.outcome == "NPC" and v.witness == {"label": "equality-hard"}

    def test_constant_collapse(self):
        v = classify(sig_of(C3W, ("E", 2, "E(1,2)|eq(1,2)")))
        assert v.outcome == "P" and v.witness["solver"] == "trivial"

    def test_delegated_finite_quotient(self):
        v = classify(sig_of(C3W, ("N", 2, "N(1,2)")))
        assert v.outcome == "DELEGATED"
        assert v.witness["collapse"] == "B_quotient" and v.witness["residual"] == {"N": ["N"]}

    def test_deep_lists_unary_tables(self):
        v = classify(sig_of(H3, ("E", 2, "E(1,2)")), deep=True)
        assert sum(e["test"].startswith("deep:") for e in v.trail) == 9

    def test_empty_relation_is_trivially_p(self):
        v = classify(sig_of(H3, ("F", 2, "false"), ("X", 4, XOR_PATTERN)))
        assert v.outcome == "NPC"
        assert classify(sig_of(H3, ("F", 2, "false"))).outcome == "P"


class TestEquality:
    def test_collapse_of_neq(self):
        out = collapse_equality(sig_of(H3, ("neq", 2, "neq(1,2)")), B_EDGEDEL)
        assert out.base == EQB and out["neq"].types == {TypeMatrix.from_string(2, "N")}

    def test_collapse_needs_preservation(self):
        with pytest.raises(NotPreserved):
            collapse_equality(sig_of(CW2, ("Eq", 2, "Eq(1,2)")), B_EDGEDEL)

    def test_collapse_needs_realizability(self):
        with pytest.raises(NotPreserved):
            collapse_equality(sig_of(CW2, ("N", 2, "N(1,2)")), B_XNOR3)

    def test_all_equal_everywhere_is_trivial(self):
        v = classify_equality(sig_of(EQB, ("R", 3, "eq(1,2)|neq(2,3)")))
        assert v.witness == {"solver": "trivial", "behaviour": "B_const"}

    def test_neq_is_horn(self):
        v = classify_equality(sig_of(EQB, ("neq", 2, "neq(1,2)")))
        assert v.witness == {"solver": "horn", "behaviour": "B_eqmeet"}

    def test_xor_is_hard(self):
        assert classify_equality(sig_of(EQB, ("X", 4, XOR_PATTERN))).outcome == "NPC"

    def test_wrong_base(self):
        with pytest.raises(ValueError):
            classify_equality(sig_of(H3, ("E", 2, "E(1,2)")))

    def test_lift_values(self):
        assert lift_value("B_cliquecol") == E
        assert lift_value("B_edgedel") == lift_value("B_quotient") == lift_value("B_const") == N


LANGUAGES = [
    sig_of(H3, ("E", 2, "E(1,2)"), ("R", 4, "!E(1,2)|E(3,4)")),
    sig_of(H3, ("E", 2, "E(1,2)"), ("N", 2, "N(1,2)"), ("R", 4, "E(1,2)|E(3,4)")),
    sig_of(CW2, ("Eq", 2, "Eq(1,2)"), ("neq", 2, "neq(1,2)")),
    sig_of(C2W, ("N", 2, "N(1,2)"), ("X", 4, "(E(1,2)&E(3,4))|(N(1,2)&N(3,4))")),
    sig_of(CW3, ("X", 4, XOR_PATTERN), ("neq", 2, "neq(1,2)")),
    sig_of(CW3, ("neq", 2, "neq(1,2)"), ("N", 2, "N(1,2)")),
]


class TestInvariance:
    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(LANGUAGES), st.randoms(use_true_random=False))
    def test_renaming_and_reordering_relations(self, sig, rnd):
        rels = list(sig.relations)
        rnd.shuffle(rels)
        renamed = tuple(OrbitRelation(f"Q{i}", r.arity, r.types, r.base) for i, r in enumerate(rels))
        assert classify(Signature(sig.base, renamed)).outcome == classify(sig).outcome

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(LANGUAGES), st.randoms(use_true_random=False))
    def test_permuting_relation_arguments(self, sig, rnd):
        rels = []
        for r in sig.relations:
            perm = list(range(r.arity))
            rnd.shuffle(perm)
            rels.append(OrbitRelation(r.name, r.arity, frozenset(t.permuted(perm) for t in r.types), r.base))
        assert classify(Signature(sig.base, tuple(rels))).outcome == classify(sig).outcome

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([(H3, B_MIN), (H4, B_MIN), (CW2, B_H3), (C2W, B_XNOR3)]), st.integers(0, 10 ** 6))
    def test_adding_preserved_relation_keeps_p(self, pair, seed):
        base, b = pair
        rng = random.Random(seed)
        rels = tuple(random_relation(base, rng.randint(2, 4), rng.randrange(10 ** 9), close_under=b, name=f"R{i}")
                     for i in range(3))
        small = classify(Signature(base, rels[:2]))
        assert small.outcome == "P"
        assert classify(Signature(base, rels)).outcome == "P"


class TestSolve:
    @pytest.mark.parametrize("sig", [s for s in LANGUAGES if classify(s).outcome == "P"], ids=str)
    def test_p_verdicts_are_executable(self, sig):
        verdict = classify(sig)
        rng = random.Random(1)
        for seed in range(200):
            inst = random_instance(sig, rng.randint(1, 6), rng.randint(1, 6), seed)
            got = solve(sig, inst, verdict=verdict)
            assert got.solver != "oracle"
            assert got.sat == oracle_solve(sig, inst).sat
            if got.sat:
                assert check_witness(sig, inst, got.witness) == []

    def test_collapsed_solver_name(self):
        sig = sig_of(CW3, ("neq", 2, "neq(1,2)"), ("N", 2, "N(1,2)"))
        inst = Instance(("a", "b"), (("neq", ("a", "b")),))
        res = solve(sig, inst)
        assert res.solver == "horn+B_edgedel" and res.witness.entries == (lift_value("B_edgedel"),)

    def test_npc_falls_back_to_oracle(self):
        sig = LANGUAGES[1]
        res = solve(sig, Instance(("a", "b"), (("E", ("a", "b")),)))
        assert res.solver == "oracle" and res.reason.startswith("language is NPC")

    def test_explicit_solver(self):
        sig = LANGUAGES[0]
        res = solve(sig, Instance(("a", "b"), (("E", ("a", "b")),)), solver="horn")
        assert res.sat and res.solver == "horn"

    def test_unknown_solver(self):
        with pytest.raises(ValueError):
            run_solver("simplex", LANGUAGES[0], Instance(()))

    def test_trivial_solver(self):
        sig = sig_of(EQB, ("R", 3, "eq(1,2)|neq(2,3)"), ("F", 2, "false"))
        assert solve_trivial(sig, Instance(("a", "b", "c"), (("R", ("a", "b", "c")),))).witness.entries == (EQ,) * 3
        assert not solve_trivial(sig, Instance(("a", "b"), (("F", ("a", "b")),))).sat

    def test_trivial_solver_misuse(self):
        sig = sig_of(EQB, ("neq", 2, "neq(1,2)"))
        with pytest.raises(InvariantBreach):
            solve_trivial(sig, Instance(("a", "b"), (("neq", ("a", "b")),)))

    def test_bad_witness_is_caught(self, monkeypatch):
        sig = LANGUAGES[0]
        inst = Instance(("a", "b"), (("E", ("a", "b")),))
        monkeypatch.setitem(importlib.import_module("hcsp.solve").SOLVERS, "horn",
                            lambda s, i: SolveResult("SAT", TypeMatrix.from_string(2, "N"), solver="horn"))
        with pytest.raises(InvariantBreach):
            solve(sig, inst, solver="horn")
