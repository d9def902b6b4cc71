import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcsp.gf2 import (EmptyInput, Gf2System, Inconsistent, Solution, affine_hull, bits_to_int, gf2_solve,
                      int_to_bits, parity)


def brute_solutions(system):
    return [bits for bits in itertools.product((0, 1), repeat=system.n_vars) if system.satisfied_by(bits)]


class TestBasics:
    def test_bit_roundtrip(self):
        assert int_to_bits(bits_to_int((1, 0, 1, 1)), 4) == (1, 0, 1, 1)

    def test_parity(self):
        assert parity(0b1011) == 1 and parity(0) == 0

    def test_mask_too_wide(self):
        with pytest.raises(ValueError):
            Gf2System(2).add(0b100, 1)

    def test_json_names_variables(self):
        s = Gf2System(3, names=["a", "b", "c"])
        s.add(0b101, 1)
        assert s.to_json() == {"variables": ["a", "b", "c"], "rows": [{"vars": ["a", "c"], "rhs": 1}]}


class TestSolve:
    def test_simple(self):
        s = Gf2System(3)
        s.add(0b011, 1)
        s.add(0b110, 0)
        res = gf2_solve(s)
        assert isinstance(res, Solution) and s.satisfied_by(res.bits)

    def test_inconsistent_certificate(self):
        s = Gf2System(3)
        s.add(0b011, 1)
        s.add(0b110, 1)
        s.add(0b111, 0)  # unrelated row, not part of the certificate
        s.add(0b101, 1)
        res = gf2_solve(s)
        assert isinstance(res, Inconsistent) and res.rows == (0, 1, 3)

    def test_zero_row_with_one(self):
        s = Gf2System(1)
        s.add(0, 1)
        assert gf2_solve(s) == Inconsistent((0,))

    def test_empty_system(self):
        assert gf2_solve(Gf2System(2)) == Solution((0, 0))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 7), st.lists(st.tuples(st.integers(0, 127), st.integers(0, 1)), max_size=10))
    def test_matches_brute_force(self, n, rows):
        s = Gf2System(n)
        for mask, rhs in rows:
            s.add(mask & ((1 << n) - 1), rhs)
        res = gf2_solve(s)
        if isinstance(res, Solution):
            assert s.satisfied_by(res.bits)
        else:
            assert not brute_solutions(s)
            total_mask = total_rhs = 0
            for i in res.rows:
                total_mask ^= s.rows[i][0]
                total_rhs ^= s.rows[i][1]
            assert total_mask == 0 and total_rhs == 1


class TestHull:
    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            affine_hull([], 3)

    def test_single_point(self):
        system, exact = affine_hull([(1, 0, 1)], 3)
        assert exact and brute_solutions(system) == [(1, 0, 1)]

    def test_even_weight_is_exact(self):
        vecs = [v for v in itertools.product((0, 1), repeat=3) if sum(v) % 2 == 0]
        system, exact = affine_hull(vecs, 3)
        assert exact and len(system.rows) == 1

    def test_three_points_not_exact(self):
        system, exact = affine_hull([(0, 0), (0, 1), (1, 0)], 2)
        assert not exact and system.rows == []

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 6), st.data())
    def test_hull_is_smallest_affine_superset(self, width, data):
        vecs = data.draw(st.lists(st.tuples(*[st.integers(0, 1)] * width), min_size=1, max_size=8))
        system, exact = affine_hull(vecs, width)
        sols = set(brute_solutions(system))
        assert set(vecs) <= sols
        # closure under x + y + z is the affine hull
        closure = set(vecs)
        while True:
            new = {tuple(a ^ b ^ c for a, b, c in zip(x, y, z)) for x in closure for y in closure for z in closure}
            if new <= closure:
                break
            closure |= new
        assert sols == closure
        assert exact == (closure == set(vecs))
