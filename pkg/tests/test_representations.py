import itertools
import random

import pytest

from trapdoorfc.errors import InconsistentSampleError
from trapdoorfc.instances import make_layout
from trapdoorfc.numtheory import key_from_primes, keygen, powers, rsa_encrypt
from trapdoorfc.instances import encode_example, generate_sample
from trapdoorfc.representations import (
    And, BooleanCircuit, BooleanFormula, Dfa, Gate, Not, Or, Var, build_crsa_hypothesis,
    build_prefix_tree_dfa, circuit_to_formula, circuit_truth_table, eval_circuit, eval_formula,
    formula_truth_table, minimize_dfa, random_circuit, run_dfa,
)
from trapdoorfc.representations.dfa import reachable_states

PARITY = Dfa(2, frozenset({1}), ((0, 1), (1, 0)))


def strings_up_to(n):
    for length in range(n + 1):
        for bits in itertools.product("01", repeat=length):
            yield "".join(bits)


def random_dfa(rng, k):
    delta = tuple((rng.randrange(k), rng.randrange(k)) for _ in range(k))
    acc = frozenset(s for s in range(k) if rng.random() < 0.5)
    return Dfa(k, acc, delta)


def myhill_nerode_size(t):
    """Reachable-state count after table-filling distinguishability."""
    states = reachable_states(t)
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    dist = [[False] * n for _ in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        dist[a][b] = (states[a] in t.accepting) != (states[b] in t.accepting)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(range(n), 2):
            if dist[a][b]:
                continue
            for c in (0, 1):
                x, y = sorted((idx[t.delta[states[a]][c]], idx[t.delta[states[b]][c]]))
                if x != y and dist[x][y]:
                    dist[a][b] = changed = True
                    break
    classes = 0
    seen = set()
    for a in range(n):
        if a in seen:
            continue
        classes += 1
        seen.update(b for b in range(a, n) if a == b or not dist[a][b])
    return classes


class TestCircuits:
    def test_single_and(self):
        c = BooleanCircuit(2, (Gate("AND", (0, 1)),), 2)
        assert eval_circuit(c, "11") == 1 and eval_circuit(c, "10") == 0
        f = circuit_to_formula(c)
        assert f.root == And(Var(0), Var(1))

    def test_not_var(self):
        c = BooleanCircuit(1, (Gate("NOT", (0,)),), 1)
        assert eval_circuit(c, [0]) == 1

    def test_width_mismatch(self):
        c = BooleanCircuit(2, (Gate("OR", (0, 1)),), 2)
        with pytest.raises(ValueError):
            eval_circuit(c, "1")

    def test_gate_validation(self):
        with pytest.raises(ValueError):
            BooleanCircuit(1, (Gate("AND", (0, 1)),), 1)
        with pytest.raises(ValueError):
            BooleanCircuit(1, (Gate("NOT", (0, 0)),), 1)
        with pytest.raises(ValueError):
            BooleanCircuit(1, (Gate("XOR", (0,)),), 1)

    def test_diamond_duplicates_shared_wire(self):
        # wire 2 = x0 AND x1 feeds both inputs of the OR at wire 4
        c = BooleanCircuit(2, (Gate("AND", (0, 1)), Gate("NOT", (2,)), Gate("OR", (2, 3))), 4)
        f = circuit_to_formula(c)
        assert f.root == Or(And(Var(0), Var(1)), Not(And(Var(0), Var(1))))
        for x in itertools.product((0, 1), repeat=2):
            assert eval_formula(f, x) == eval_circuit(c, x) == 1

    def test_random_8_input_depth_4(self):
        rng = random.Random(1)
        c = random_circuit(8, 20, 4, rng)
        assert c.depth <= 4
        table = [eval_circuit(c, x) for x in itertools.product((0, 1), repeat=8)]
        f = circuit_to_formula(c)
        assert [eval_formula(f, x) for x in itertools.product((0, 1), repeat=8)] == table

    def test_depth_cap(self):
        gates = tuple(Gate("NOT", (i,)) for i in range(20))
        c = BooleanCircuit(1, gates, 20)
        assert c.depth == 20
        with pytest.raises(ValueError):
            circuit_to_formula(c, depth_cap=16)

    def test_truth_tables_agree_up_to_12_inputs(self):
        rng = random.Random(2)
        for _ in range(60):
            n = rng.randint(1, 12)
            c = random_circuit(n, rng.randint(1, 30), rng.randint(1, 8), rng)
            f = circuit_to_formula(c)
            assert f.size <= 2 ** (c.depth + 1) - 1
            table = circuit_truth_table(c)
            assert formula_truth_table(f) == table
            for x in rng.sample(range(1 << n), min(32, 1 << n)):
                bits = [(x >> i) & 1 for i in range(n)]
                assert eval_circuit(c, bits) == eval_formula(f, bits) == (table >> x) & 1

    def test_formula_rejects_unknown_input(self):
        with pytest.raises(ValueError):
            BooleanFormula(1, And(Var(0), Var(1)))

    def test_circuit_json_round_trip(self):
        c = random_circuit(5, 12, 6, random.Random(3))
        assert BooleanCircuit.from_json(c.to_json()) == c


class TestDfa:
    def test_run_empty_string(self):
        final, trace = run_dfa(PARITY, "")
        assert trace == [0] and final == 0 and not PARITY.accepts("")

    def test_parity(self):
        final, trace = run_dfa(PARITY, "101")
        assert final == 0 and trace == [0, 1, 1, 0]
        assert PARITY.accepts("1") and not PARITY.accepts("11")

    def test_trace_length(self):
        rng = random.Random(4)
        t = random_dfa(rng, 5)
        for w in strings_up_to(6):
            assert len(run_dfa(t, w)[1]) == len(w) + 1

    def test_prefix_tree_two_strings(self):
        t = build_prefix_tree_dfa([("0", 0), ("1", 1)])
        assert t.num_states == 4
        assert not t.accepts("0") and t.accepts("1")
        sink = t.num_states - 1
        assert t.delta[sink] == (sink, sink)
        for leaf in (t.delta[0][0], t.delta[0][1]):
            assert t.delta[leaf] == (sink, sink)

    def test_prefix_tree_contradiction(self):
        with pytest.raises(InconsistentSampleError):
            build_prefix_tree_dfa([("01", 0), ("01", 1)])

    def test_prefix_tree_consistency_on_samples(self):
        key = keygen(8, 5)
        sample = generate_sample(key, 30, 5)
        pairs = list(zip(sample.strings, sample.labels))
        t = build_prefix_tree_dfa(pairs)
        assert len(reachable_states(t)) == t.num_states
        m = minimize_dfa(t)
        for w, b in pairs:
            assert t.accepts(w) == bool(b) == m.accepts(w)

    def test_minimal_parity_is_fixed_point(self):
        assert minimize_dfa(PARITY) == PARITY

    def test_equivalent_leaves_merge(self):
        t = build_prefix_tree_dfa([("00", 1), ("01", 1), ("10", 0)])
        m = minimize_dfa(t)
        assert m.num_states < t.num_states
        assert m.num_states == myhill_nerode_size(t)

    def test_random_dfas(self):
        rng = random.Random(6)
        words = list(strings_up_to(12))
        for trial in range(40):
            t = random_dfa(rng, rng.randint(1, 16) if trial else 10)
            m = minimize_dfa(t)
            assert m.num_states == myhill_nerode_size(t)
            assert all(t.accepts(w) == m.accepts(w) for w in words)
            assert minimize_dfa(m).num_states == m.num_states

    def test_breadth_first_numbering(self):
        m = minimize_dfa(random_dfa(random.Random(8), 12))
        assert reachable_states(m) == list(range(m.num_states))

    def test_json_round_trip(self):
        t = random_dfa(random.Random(9), 6)
        assert Dfa.from_json(t.to_json()) == t


class TestCrsa:
    def test_spec_example(self):
        h = build_crsa_hypothesis(33, 3, 7)
        w = encode_example(powers(8, 33), 33, 3, make_layout(33, 3))
        assert h(w) == 0
        assert h.size == 3 + make_layout(33, 3).fields_per_example

    def test_reproduces_sample_labels(self):
        key = keygen(8, 7)
        h = build_crsa_hypothesis(key.N, key.e, key.d)
        sample = generate_sample(key, 40, 7)
        assert [h(w) for w in sample.strings] == sample.labels

    def test_d_one_reads_first_power(self):
        h = build_crsa_hypothesis(33, 3, 1)
        lay = make_layout(33, 3)
        for y in range(33):
            assert h(encode_example(powers(y, 33), 33, 3, lay)) == y & 1

    def test_agrees_with_plaintext_parity_on_all_residues(self):
        key = key_from_primes(61, 67)
        h = build_crsa_hypothesis(key.N, key.e, key.d)
        lay = make_layout(key.N, key.e)
        for x in range(key.N):
            w = encode_example(powers(rsa_encrypt(x, key.N, key.e), key.N), key.N, key.e, lay)
            assert h(w) == x & 1

    def test_foreign_key_rejected(self):
        h = build_crsa_hypothesis(35, 5, 5)
        w = encode_example(powers(8, 33), 33, 3, make_layout(33, 3))
        with pytest.raises(ValueError):
            h(w)
