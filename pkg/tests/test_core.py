import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcsp.core import (EQ, OMEGA, BaseStructure, DelegatedBase, E, N, OrbitRelation, TypeMatrix,
                       all_eq_type, enumerate_types, skeleton, validate_type, CapExceeded)
from hcsp.formula import compile_formula, parse_formula
from hcsp.core import ParseError

from models import equality_types, equiv_types, henson_types

H3, H4 = BaseStructure.henson(3), BaseStructure.henson(4)
CW2 = BaseStructure.equiv(OMEGA, 2)
C2W = BaseStructure.equiv(2, OMEGA)
EQB = BaseStructure.equality()

BASES = [H3, H4, CW2, C2W, BaseStructure.equiv(3, OMEGA), BaseStructure.equiv(OMEGA, 3), EQB]


def reference_types(k, base):
    if base.kind == "henson":
        return henson_types(k, base.n)
    if base.kind == "equiv":
        return equiv_types(k, base.n, base.s)
    return equality_types(k)


def t3(text):
    return TypeMatrix.from_string(3, text)


class TestValidate:
    def test_triangle_invalid_in_henson3(self):
        v = validate_type(t3("EEE"), H3)
        assert not v and v.rule == "clique"

    def test_triangle_valid_in_henson4(self):
        assert validate_type(t3("EEE"), H4)

    def test_path_exceeds_class_size(self):
        # (1,2)=E, (1,3)=N, (2,3)=E; entries are ordered (1,2),(1,3),(2,3)
        v = validate_type(t3("ENE"), CW2)
        assert not v and v.rule == "class-size"

    def test_congruence(self):
        v = validate_type(t3("=EN"), H3)
        assert not v and v.rule == "congruence"

    def test_class_count(self):
        v = validate_type(t3("NNN"), C2W)
        assert not v and v.rule == "class-count"

    def test_transitivity(self):
        v = validate_type(TypeMatrix.from_string(3, "EEN"), BaseStructure.equiv(OMEGA, 3))
        assert not v and v.rule == "transitivity"

    def test_alphabet_over_equality(self):
        v = validate_type(TypeMatrix.from_string(2, "E"), EQB)
        assert not v and v.rule == "alphabet"


class TestEnumerate:
    @pytest.mark.parametrize("base", BASES, ids=str)
    @pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5])
    def test_matches_model_reference(self, base, k):
        assert set(enumerate_types(k, base)) == reference_types(k, base)

    @pytest.mark.parametrize("base,k,count", [
        (H3, 2, 3), (H3, 3, 14), (H3, 4, 98), (H3, 5, 1004), (H3, 6, 14967),
        (H4, 3, 15), (H4, 4, 126), (H4, 5, 1819),
        (CW2, 3, 11), (CW2, 4, 49), (CW2, 5, 257), (CW2, 6, 1539),
        (C2W, 3, 11), (C2W, 4, 47), (C2W, 5, 227), (C2W, 6, 1215),
        (EQB, 3, 5), (EQB, 4, 15), (EQB, 5, 52), (EQB, 6, 203),
    ])
    def test_frozen_counts(self, base, k, count):
        assert len(enumerate_types(k, base)) == count

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_types(7, H3)

    def test_sorted_and_unique(self):
        types = enumerate_types(4, CW2)
        assert types == sorted(set(types))

    @pytest.mark.parametrize("base", BASES, ids=str)
    def test_closed_under_index_permutation(self, base):
        types = set(enumerate_types(4, base))
        for perm in itertools.permutations(range(4)):
            assert {t.permuted(perm) for t in types} == types

    @pytest.mark.parametrize("base", BASES, ids=str)
    def test_single_flip_into_violation_is_rejected(self, base):
        # every matrix one entry away from a valid type is valid iff the model says so
        valid = set(enumerate_types(4, base))
        reference = reference_types(4, base)
        for t in valid:
            for p in range(len(t.entries)):
                for v in (E, N, EQ):
                    m = TypeMatrix(4, t.entries[:p] + (v,) + t.entries[p + 1:])
                    assert bool(validate_type(m, base)) == (m in reference)


class TestBases:
    @pytest.mark.parametrize("n,s", [(OMEGA, OMEGA), (1, OMEGA), (OMEGA, 1)])
    def test_delegated(self, n, s):
        with pytest.raises(DelegatedBase):
            BaseStructure.equiv(n, s)

    @pytest.mark.parametrize("args", [("henson", 2), ("henson", OMEGA)])
    def test_invalid_henson(self, args):
        with pytest.raises(ValueError):
            BaseStructure(*args)

    def test_equiv_needs_one_infinite_parameter(self):
        with pytest.raises(ValueError):
            BaseStructure.equiv(2, 3)

    def test_str(self):
        assert str(CW2) == "equiv(omega,2)" and str(H3) == "henson(3)"


class TestFormula:
    def test_single_edge(self):
        assert compile_formula("E(1,2)", 2, H3).types == {TypeMatrix.from_string(2, "E")}

    def test_eq_atom_over_classes(self):
        assert compile_formula("Eq(1,2)", 2, CW2).types == {TypeMatrix.from_string(2, "E"),
                                                           TypeMatrix.from_string(2, "=")}

    @pytest.mark.parametrize("text", ["E(1,", "E(1,3)", "Q(1,2)", "E(1,2) E(1,2)", "(E(1,2)", ""])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_formula(text, 2)

    def test_precedence(self):
        # & binds tighter than |
        r1 = compile_formula("E(1,2)|N(1,2)&eq(1,2)", 2, H3)
        assert r1.types == {TypeMatrix.from_string(2, "E")}

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from(["E(1,2)", "N(2,3)", "eq(1,3)", "neq(2,3)", "Eq(1,2)", "true"]),
                    min_size=1, max_size=4),
           st.lists(st.sampled_from(["&", "|"]), min_size=3, max_size=3))
    def test_formula_and_negation_partition_types(self, atoms, ops):
        text = atoms[0]
        for op, atom in zip(ops, atoms[1:]):
            text = f"{text}{op}{atom}"
        pos = compile_formula(text, 3, CW2).types
        neg = compile_formula(f"!({text})", 3, CW2).types
        assert pos | neg == set(enumerate_types(3, CW2)) and not pos & neg


class TestSkeleton:
    def test_edge_becomes_distinct(self):
        assert skeleton(TypeMatrix.from_string(2, "E")) == TypeMatrix.from_string(2, "N")

    def test_all_equal_fixed(self):
        assert skeleton(all_eq_type(4)) == all_eq_type(4)

    def test_h_type_is_all_distinct(self):
        from hcsp.gadgets import relation_H
        first = relation_H(3).sorted_types[0]
        assert skeleton(first) == TypeMatrix(6, (N,) * 15)

    @given(st.sampled_from(enumerate_types(4, H3)))
    def test_idempotent(self, t):
        assert skeleton(skeleton(t)) == skeleton(t)


class TestTypeMatrix:
    @given(st.sampled_from(enumerate_types(4, CW2)))
    def test_string_roundtrip(self, t):
        assert TypeMatrix.from_string(4, t.to_string()) == t

    def test_parse_accepts_long_names(self):
        assert TypeMatrix.from_string(2, "=") == TypeMatrix(2, (EQ,))

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            TypeMatrix.from_string(3, "EE")

    def test_relation_rejects_invalid_type(self):
        with pytest.raises(ValueError):
            OrbitRelation("R", 3, frozenset({t3("EEE")}), H3)

    def test_induced_repeats_give_eq(self):
        t = t3("ENE")
        assert t.induced((0, 0, 2)) == t3("=NN")
