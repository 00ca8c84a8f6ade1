import itertools
import json
import random
from fractions import Fraction

import pytest

from trapdoorfc.corpus import random_corpus
from trapdoorfc.errors import SearchBudgetExceeded
from trapdoorfc.fc import FcInstance, VarUniverse, brute_force_min_coloring, verify_coloring
from trapdoorfc.qubo import (
    BinaryPolynomial, IsingPolynomial, color_var, decode_state, energy, energy_table, fc_to_hamiltonian,
    ground_states, hamiltonian_names, ising_matches, ising_table, solve_increasing_k, to_ising, usage_var,
)

flat = VarUniverse.flat


def direct_energy(F, k, A, bits):
    """The penalty sum evaluated straight from its definition."""
    m = F.num_vars
    b = lambda v, c: bits[(v) * k + c]
    w = lambda c: bits[m * k + c]
    same = lambda u, v: sum(b(u, c) * b(v, c) for c in range(k))
    hard = sum((1 - sum(b(v, c) for c in range(k))) ** 2 for v in range(m))
    hard += sum(same(u, v) for u, v in F.neq.tolist())
    hard += sum(same(u, v) * (1 - same(p, q)) for u, v, p, q in F.impl.tolist())
    hard += sum(b(v, c) - b(v, c) * w(c) for v in range(m) for c in range(k))
    return A * hard + sum(w(c) for c in range(k))


def all_bits(n):
    return itertools.product((0, 1), repeat=n)


def random_poly(rng, n, max_degree, count):
    terms = {}
    for _ in range(count):
        t = tuple(sorted(rng.sample(range(n), rng.randint(0, min(n, max_degree)))))
        terms[t] = terms.get(t, 0) + Fraction(rng.randint(-9, 9), rng.randint(1, 6))
    return BinaryPolynomial([f"v{i}" for i in range(n)], terms)


class TestHamiltonian:
    def test_empty_instance_m1_k1(self):
        F = FcInstance(flat(1))
        H = fc_to_hamiltonian(F, 1, 2)
        assert list(H.names) == ["b_1_1", "w_1"]
        # A(1 - b)^2 + A(b - b w) + w = A - A b w + w once b^2 = b
        assert H.terms == {(): 2, (1,): 1, (0, 1): -2}
        assert energy(H, [0, 0]) == 2
        assert ground_states(H) == (1, [(1, 1)])

    def test_neq_k2_a3(self):
        F = FcInstance(flat(2), [(0, 1)])
        H = fc_to_hamiltonian(F, 2, 3)
        e, states = ground_states(H)
        assert e == 2
        assert states == [(0, 1, 1, 0, 1, 1), (1, 0, 0, 1, 1, 1)]
        for s in states:
            P = decode_state(F, 2, s)
            assert verify_coloring(F, P) and P.k == 2

    def test_neq_k1_exceeds_weight(self):
        F = FcInstance(flat(2), [(0, 1)])
        e, _ = ground_states(fc_to_hamiltonian(F, 1))
        assert e >= 2

    def test_matches_direct_definition(self):
        for F in random_corpus(30, 3, 4, seed=5):
            for k in (1, 2, 3):
                if F.num_vars * k + k > 12:
                    continue
                A = Fraction(2 * k + 3, 2)
                H = fc_to_hamiltonian(F, k, A)
                for bits in all_bits(H.num_vars):
                    assert H.energy(bits) == direct_energy(F, k, A, bits)

    def test_variable_layout(self):
        assert hamiltonian_names(2, 3) == ["b_1_1", "b_1_2", "b_1_3", "b_2_1", "b_2_2", "b_2_3", "w_1", "w_2", "w_3"]
        assert color_var(2, 3, 3) == 5 and usage_var(1, 2, 3) == 6

    def test_weight_validation(self):
        F = FcInstance(flat(2))
        with pytest.raises(ValueError):
            fc_to_hamiltonian(F, 2, 2)
        with pytest.raises(ValueError):
            fc_to_hamiltonian(F, 0)
        assert fc_to_hamiltonian(F, 2, Fraction(7, 2)).terms[()] == Fraction(7)

    def test_degree_bounds(self):
        for F in random_corpus(40, 4, 4, seed=8):
            H = fc_to_hamiltonian(F, 2)
            assert H.degree <= (4 if F.R else 2)
            assert all(c != 0 for c in H.terms.values())
            assert all(len(set(t)) == len(t) for t in H.terms)

    def test_multilinear_flip_difference(self):
        """Energy is affine in each variable: E(x with x_i=1) - E(x with x_i=0) ignores x_i."""
        H = fc_to_hamiltonian(FcInstance(flat(3), [(0, 1)], [(0, 2, 1, 2)]), 2)
        rng = random.Random(2)
        for _ in range(100):
            x = [rng.randint(0, 1) for _ in range(H.num_vars)]
            i = rng.randrange(H.num_vars)
            lo, hi = list(x), list(x)
            lo[i], hi[i] = 0, 1
            mid = Fraction(1, 2)
            # multilinear extension at x_i = 1/2 is the average of the two endpoints
            ext = sum((c * (mid if i in t else 1) for t, c in H.terms.items()
                       if all(hi[j] for j in t if j != i)), Fraction(0))
            assert ext == (H.energy(lo) + H.energy(hi)) / 2

    def test_missing_variable(self):
        H = fc_to_hamiltonian(FcInstance(flat(1)), 1)
        with pytest.raises(KeyError):
            H.energy({"b_1_1": 1})
        with pytest.raises(ValueError):
            H.energy([1])
        assert H.energy({"b_1_1": 1, "w_1": 1}) == 1

    def test_json_round_trip(self):
        H = fc_to_hamiltonian(FcInstance(flat(3), [(0, 1)], [(0, 2, 1, 2)]), 2, Fraction(7, 2))
        doc = json.loads(H.to_json())
        assert set(doc) == {"vars", "terms", "offset"}
        # three one-hot squares contribute A each
        assert doc["offset"] == "21/2"
        assert BinaryPolynomial.from_json(H.to_json()) == H
        I = to_ising(H)
        assert IsingPolynomial.from_json(I.to_json()) == I


class TestIsing:
    def test_single_variable(self):
        I = to_ising(BinaryPolynomial(["b"], {(0,): 1}))
        assert I.offset == Fraction(1, 2) and I.terms[(0,)] == Fraction(-1, 2)

    def test_product(self):
        I = to_ising(BinaryPolynomial(["b1", "b2"], {(0, 1): 1}))
        q = Fraction(1, 4)
        assert I.terms == {(): q, (0,): -q, (1,): -q, (0, 1): q}

    def test_random_degree4_on_6_vars(self):
        rng = random.Random(3)
        for _ in range(30):
            H = random_poly(rng, 6, 4, 25)
            I = to_ising(H)
            for bits in all_bits(6):
                assert I.evaluate_bits(bits) == H.energy(bits)
            assert ising_matches(H, I)

    def test_tables_match_scalar_evaluation(self):
        rng = random.Random(4)
        H = random_poly(rng, 7, 4, 30)
        I = to_ising(H)
        scale, E = energy_table(H)
        s2, Z = ising_table(I)
        for x in range(1 << 7):
            bits = [(x >> i) & 1 for i in range(7)]
            assert Fraction(int(E[x]), scale) == H.energy(bits)
            assert Fraction(int(Z[x]), s2) == I.evaluate_bits(bits)

    def test_mismatch_detected(self):
        H = random_poly(random.Random(5), 5, 3, 12)
        I = to_ising(H)
        bent = IsingPolynomial(I.names, {**I.terms, (0, 1): I.terms.get((0, 1), 0) + Fraction(1, 8)})
        assert not ising_matches(H, bent)

    def test_hamiltonians(self):
        for F in random_corpus(20, 4, 4, seed=6):
            H = fc_to_hamiltonian(F, 3)
            assert ising_matches(H)

    def test_spin_validation(self):
        I = to_ising(BinaryPolynomial(["b"], {(0,): 1}))
        with pytest.raises(ValueError):
            I.evaluate([0])


class TestGroundStates:
    def test_zero_polynomial(self):
        H = BinaryPolynomial(["a", "b", "c"], {})
        e, states = ground_states(H)
        assert e == 0 and states == sorted(all_bits(3))

    def test_matches_enumeration(self, backend):
        rng = random.Random(7)
        for _ in range(25):
            n = rng.randint(1, 9)
            H = random_poly(rng, n, 4, 3 * n)
            vals = {bits: H.energy(bits) for bits in all_bits(n)}
            best = min(vals.values())
            assert ground_states(H) == (best, sorted(b for b, v in vals.items() if v == best))

    def test_variable_limit(self):
        with pytest.raises(SearchBudgetExceeded):
            ground_states(BinaryPolynomial([f"v{i}" for i in range(5)], {}), max_vars=4)

    def test_overflow_guard(self):
        H = BinaryPolynomial(["a", "b"], {(0,): 1 << 62, (1,): 1 << 62})
        with pytest.raises(OverflowError):
            ground_states(H)

    def test_decode(self):
        F = FcInstance(flat(2))
        assert decode_state(F, 2, [1, 0, 0, 1, 1, 1]).colors.tolist() == [1, 2]
        assert decode_state(F, 2, [1, 1, 0, 1, 1, 1]) is None
        # colors are renumbered by first use
        assert decode_state(F, 2, [0, 1, 0, 1, 0, 1]).colors.tolist() == [1, 1]


class TestIncreasingK:
    def test_triangle(self):
        F = FcInstance(flat(3), [(0, 1), (1, 2), (0, 2)])
        r = solve_increasing_k(F)
        assert r.k == 3 and r.budgets_tried == (1, 2, 3) and verify_coloring(F, r.coloring)

    def test_matches_coloring_oracle_without_impl(self):
        for F in random_corpus(30, 4, 4, seed=12):
            if F.R:
                continue
            r = solve_increasing_k(F)
            assert r.coloring.k == brute_force_min_coloring(F).k

    def test_budget(self):
        with pytest.raises(SearchBudgetExceeded):
            solve_increasing_k(FcInstance(flat(3), [(0, 1), (1, 2), (0, 2)]), k_max=2)


class TestImplPenaltySign:
    """The Impl product can go negative once one-hot rows are violated."""

    def test_negative_ground_energy(self):
        F = FcInstance(flat(3), impl=[(0, 1, 0, 2), (0, 2, 0, 1), (1, 2, 0, 1)])
        assert brute_force_min_coloring(F).k == 1
        e, states = ground_states(fc_to_hamiltonian(F, 2))
        assert e == -7
        assert all(decode_state(F, 2, s) is None for s in states)

    def test_reference_oracle_agrees(self):
        F = FcInstance(flat(3), impl=[(0, 1, 0, 2), (0, 2, 0, 1), (1, 2, 0, 1)])
        best = min(direct_energy(F, 2, 3, bits) for bits in all_bits(8))
        assert best == -7
