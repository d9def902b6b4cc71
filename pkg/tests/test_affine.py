import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcsp.affine import (NotAffine, ParityClause, Rejected, class_patterns, compile_parity, injectivize,
                         solve_c2w_minority, solve_cw2_parity)
from hcsp.behaviours import B_H3, B_XNOR3
from hcsp.core import (OMEGA, BaseStructure, Constraint, Instance, InvariantBreach, OrbitRelation, Signature,
                       check_witness, enumerate_types)
from hcsp.corpus import A_FORMULA, minority_signature, parity_signature
from hcsp.formula import compile_formula
from hcsp.horn import Inexact
from hcsp.oracle import oracle_solve, random_instance, random_relation

C2W = BaseStructure.equiv(2, OMEGA)
CW2 = BaseStructure.equiv(OMEGA, 2)


def sig_of(base, **formulas):
    return Signature(base, tuple(compile_formula(f, k, base, name) for name, (k, f) in formulas.items()))


def random_sig(base, closer, rng):
    rels = tuple(random_relation(base, rng.randint(2, 4), rng.randrange(10 ** 9), close_under=closer,
                                 name=f"R{j}") for j in range(rng.randint(1, 3)))
    return Signature(base, rels)


class TestInjectivize:
    def test_eq_merges(self):
        sig = sig_of(C2W, eq=(2, "eq(1,2)"), E=(2, "E(1,2)"))
        inst = Instance(("a", "b", "c"), (("eq", ("a", "b")), ("E", ("b", "c"))))
        red = injectivize(sig, inst)
        assert red.merges == (("a", "b"),)
        assert red.instance.variables == ("a", "c")
        assert red.rep == (0, 0, 1)
        assert [c.rel for c in red.instance.constraints] == ["E#0"]

    def test_rejected_after_merge(self):
        sig = sig_of(C2W, eq=(2, "eq(1,2)"), neq=(2, "neq(1,2)"))
        inst = Instance(("a", "b"), (("eq", ("a", "b")), ("neq", ("a", "b"))))
        with pytest.raises(Rejected):
            injectivize(sig, inst)

    def test_chained_merges_reach_fixpoint(self):
        # R(x,y,z) forces x=y only when y=z already holds
        sig = sig_of(C2W, eq=(2, "eq(1,2)"), R=(3, "!eq(2,3)|eq(1,2)"))
        inst = Instance(("x", "y", "z"), (("R", ("x", "y", "z")), ("eq", ("y", "z"))))
        red = injectivize(sig, inst)
        assert len(red.instance.variables) == 1 and red.instance.constraints == ()

    def test_forced_merges_are_genuine(self):
        sig = minority_signature()
        sig = Signature(sig.base, sig.relations + (compile_formula("eq(1,2)", 2, sig.base, "eq"),))
        rng = random.Random(11)
        checked = 0
        for seed in range(300):
            inst = random_instance(sig, rng.randint(2, 5), rng.randint(1, 6), seed)
            try:
                red = injectivize(sig, inst)
            except Rejected:
                assert not oracle_solve(sig, inst).sat
                continue
            for a, b in red.merges:
                extra = Instance(inst.variables, inst.constraints + (Constraint("neq", (a, b)),))
                assert not oracle_solve(sig, extra).sat
                checked += 1
        assert checked > 20


class TestMinority:
    def test_class_patterns_of_edge(self):
        rel = compile_formula("E(1,2)", 2, C2W)
        assert class_patterns(rel) == {(0, 0), (1, 1)}

    def test_non_affine_patterns(self):
        rel = OrbitRelation("or", 3, compile_formula("E(1,2)|E(1,3)", 3, C2W).types, C2W)
        with pytest.raises(NotAffine) as info:
            solve_c2w_minority(Signature(C2W, (rel,)), Instance(("a", "b", "c"), (("or", ("a", "b", "c")),)))
        assert isinstance(info.value, InvariantBreach)

    def test_three_pairwise_non_edges_unsat(self):
        sig = minority_signature()
        inst = Instance(("a", "b", "c"), (("N", ("a", "b")), ("N", ("b", "c")), ("N", ("a", "c"))))
        res = solve_c2w_minority(sig, inst)
        assert res.status == "UNSAT" and not oracle_solve(sig, inst).sat

    def test_sat_witness(self):
        sig = minority_signature()
        inst = Instance(("a", "b", "c", "d"), (("N", ("a", "b")), ("same_pattern", ("a", "b", "c", "d"))))
        res = solve_c2w_minority(sig, inst)
        assert res.sat and check_witness(sig, inst, res.witness) == []
        assert res.witness.to_string().count("=") == 0

    def test_wrong_base(self):
        with pytest.raises(ValueError):
            solve_c2w_minority(parity_signature(), Instance(("a",)))

    def test_agrees_with_oracle(self):
        rng = random.Random(3)
        for _ in range(200):
            sig = random_sig(C2W, B_XNOR3, rng)
            inst = random_instance(sig, rng.randint(1, 6), rng.randint(1, 6), rng.randrange(10 ** 9))
            got = solve_c2w_minority(sig, inst)
            assert got.sat == oracle_solve(sig, inst).sat
            if got.sat:
                assert check_witness(sig, inst, got.witness) == []


class TestCompileParity:
    def test_disequality(self):
        (clause,) = compile_parity(compile_formula("neq(1,2)", 2, CW2, "neq"))
        assert str(clause) == "N(1,2) | E(1,2)=1"

    def test_same_class(self):
        (clause,) = compile_parity(compile_formula("Eq(1,2)", 2, CW2, "Eq"))
        assert str(clause) == "Eq(1,2)"

    def test_relation_a(self):
        (clause,) = compile_parity(compile_formula(A_FORMULA, 6, CW2, "A"))
        assert str(clause) == "N(1,2) | N(3,4) | N(5,6) | E(1,2)+E(3,4)+E(5,6)=1"
        assert clause.to_json()["head"] == {"kind": "PARITY", "pairs": [[1, 2], [3, 4], [5, 6]], "rhs": 1}

    def test_not_h3_preserved_is_inexact(self):
        with pytest.raises(Inexact):
            compile_parity(compile_formula("E(1,2)|E(3,4)", 4, CW2, "or"))

    def test_wrong_base(self):
        with pytest.raises(ValueError):
            compile_parity(compile_formula("E(1,2)", 2, C2W))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 10 ** 6))
    def test_exact_on_closed_relations(self, k, seed):
        rel = random_relation(CW2, k, seed, close_under=B_H3)
        clauses = compile_parity(rel)
        for t in enumerate_types(k, CW2):
            assert all(c.satisfied_by(t) for c in clauses) == (t in rel.types)


class TestParitySolve:
    def test_triangle_of_same_class_distinct(self):
        sig = parity_signature()
        cons = [("Eq", p) for p in (("a", "b"), ("b", "c"), ("a", "c"))]
        cons += [("neq", p) for p in (("a", "b"), ("b", "c"), ("a", "c"))]
        inst = Instance(("a", "b", "c"), tuple(cons))
        assert solve_cw2_parity(sig, inst).status == "UNSAT"
        assert not oracle_solve(sig, inst).sat

    def test_a_with_all_same_class(self):
        sig = parity_signature()
        vs = tuple("uvwxyz")
        cons = [("Eq", (vs[0], vs[1])), ("Eq", (vs[2], vs[3])), ("Eq", (vs[4], vs[5])), ("A", vs)]
        res = solve_cw2_parity(sig, Instance(vs, tuple(cons)))
        assert res.sat and check_witness(sig, Instance(vs, tuple(cons)), res.witness) == []

    def test_missing_compiled(self):
        from hcsp.horn import NotCompiled
        sig = parity_signature()
        with pytest.raises(NotCompiled):
            solve_cw2_parity(sig, Instance(("a", "b"), (("Eq", ("a", "b")),)), compiled={})

    def test_bad_encoding_name(self):
        with pytest.raises(ValueError):
            solve_cw2_parity(parity_signature(), Instance(()), triangles="some")

    def test_encodings_and_oracle_agree(self):
        rng = random.Random(8)
        sigs = [parity_signature()] + [random_sig(CW2, B_H3, rng) for _ in range(40)]
        for i in range(240):
            sig = sigs[i % len(sigs)]
            inst = random_instance(sig, rng.randint(1, 6), rng.randint(1, 8), rng.randrange(10 ** 9))
            a = solve_cw2_parity(sig, inst)
            b = solve_cw2_parity(sig, inst, triangles="all")
            assert a.sat == b.sat == oracle_solve(sig, inst).sat
            for res in (a, b):
                if res.sat:
                    assert check_witness(sig, inst, res.witness) == []

    def test_system_is_exposed(self):
        sig = parity_signature()
        inst = Instance(("a", "b"), (("neq", ("a", "b")), ("Eq", ("a", "b"))))
        res = solve_cw2_parity(sig, inst)
        assert res.sat and res.details["system"].rows == [(0b11, 1)]


def test_parity_clause_satisfaction():
    clause = ParityClause(frozenset({(0, 1)}), ("EQ", (0, 2)))
    t = enumerate_types(3, CW2)
    for m in t:
        expected = m[0, 1] == 1 or m[0, 2] != 1
        assert clause.satisfied_by(m) == expected
