import itertools
import math

import numpy as np
import pytest

from shufkde import bitsum as bs
from shufkde import shuffler as sh
from shufkde.errors import TagOutOfRange


def make_envelopes(tags, payloads):
    return sh.Envelopes(np.array(tags), np.array(payloads))


def test_shuffle_empty_and_single():
    rng = np.random.default_rng(0)
    empty = sh.Envelopes.concat([])
    assert len(sh.shuffle(empty, rng)) == 0
    one = make_envelopes([3], [1])
    out = sh.shuffle(one, rng)
    assert out.tags.tolist() == [3] and out.payloads.tolist() == [1]


def test_shuffle_preserves_multiset():
    rng = np.random.default_rng(1)
    env = make_envelopes([0, 1, 1, 2, 2, 2], [1, -1, 1, -1, 1, -1])
    out = sh.shuffle(env, rng)
    combined = sorted(zip(env.tags.tolist(), env.payloads.tolist()))
    assert sorted(zip(out.tags.tolist(), out.payloads.tolist())) == combined


def test_shuffle_is_uniform_over_orderings():
    # 3 distinct envelopes: each of the 6 orderings has probability 1/6
    rng = np.random.default_rng(2)
    env = make_envelopes([0, 1, 2], [1, 1, 1])
    orders = {perm: 0 for perm in itertools.permutations((0, 1, 2))}
    trials = 6 * 10**4
    for _ in range(trials):
        out = sh.shuffle(env, rng)
        orders[tuple(out.tags.tolist())] += 1
    se = math.sqrt((1 / 6) * (5 / 6) / trials)
    for count in orders.values():
        assert abs(count / trials - 1 / 6) <= 4.0 * se


def test_route_trivial_partitions():
    all_one_cell = make_envelopes([0, 0, 0], [1, -1, 1])
    cells = sh.route(all_one_cell, 1, 1)
    assert sorted(cells[0][0].tolist()) == [-1, 1, 1]

    I, Q, k = 3, 2, 4
    tags = np.tile(np.arange(I * Q), k)
    env = make_envelopes(tags, np.ones(tags.size, dtype=np.int8))
    cells = sh.route(env, I, Q)
    assert all(cells[i][j].size == k for i in range(I) for j in range(Q))


def test_route_matches_brute_force_filter():
    rng = np.random.default_rng(3)
    I, Q = 4, 3
    tags = rng.integers(0, I * Q, 500)
    payloads = rng.choice([-1, 1], 500).astype(np.int8)
    env = make_envelopes(tags, payloads)
    cells = sh.route(env, I, Q)
    for i in range(I):
        for j in range(Q):
            expected = sorted(payloads[tags == i * Q + j].tolist())
            assert sorted(cells[i][j].tolist()) == expected


def test_route_after_shuffle_is_permutation_invariant():
    rng = np.random.default_rng(4)
    I, Q = 5, 1
    tags = rng.integers(0, I, 300)
    payloads = rng.choice([-1, 1], 300).astype(np.int8)
    env = make_envelopes(tags, payloads)
    before = sh.route(env, I, Q)
    after = sh.route(sh.shuffle(env, rng), I, Q)
    for i in range(I):
        assert sorted(before[i][0].tolist()) == sorted(after[i][0].tolist())


def test_route_rejects_out_of_range_tags():
    env = make_envelopes([0, 7], [1, 1])
    with pytest.raises(TagOutOfRange):
        sh.route(env, 2, 3)
    with pytest.raises(TagOutOfRange):
        sh.route(make_envelopes([-1], [1]), 2, 3)


def test_bits_per_message_values():
    assert sh.bits_per_message(1, 1) == 1
    assert sh.bits_per_message(32, 1) == 6
    assert sh.bits_per_message(768, 1) == 11  # ceil(log2 d) + 1 from the d=768 setup
    assert sh.bits_per_message(768, 2) == 12


def test_meter_exact_one_message_per_user():
    cfg = bs.BitsumConfig(bs.VARIANT_EXACT, 5)
    rng = np.random.default_rng(5)
    per_user = []
    for _ in range(5):
        idx, payloads = bs.randomize_bit_vector(cfg, np.array([1]), rng)
        per_user.append(sh.Envelopes(idx, payloads))
    m = sh.meter(per_user, 1, 1)
    assert m.per_user_message_counts.tolist() == [1] * 5
    assert m.bits_per_message == 1
    assert m.total_bits == 5


def test_meter_rr_exactly_d_messages():
    d, n = 768, 10
    cfg = bs.BitsumConfig(bs.VARIANT_RR, n, p_rr=0.3)
    rng = np.random.default_rng(6)
    per_user = []
    for _ in range(n):
        bits = rng.integers(0, 2, d)
        idx, payloads = bs.randomize_bit_vector(cfg, bits, rng)
        per_user.append(sh.Envelopes(idx, payloads))
    m = sh.meter(per_user, d, 1)
    assert np.all(m.per_user_message_counts == d)
    assert m.bits_per_message == 11
    assert m.total_bits == 11 * n * d


def test_meter_3nb_matches_analytic_expectation():
    # communication-optimal regime: large eps0 and a large p' constant
    # shrink the noise means, so the count per instance approaches 1
    n = 1000
    cfg = bs.BitsumConfig(bs.VARIANT_3NB, n, eps0=8.0, delta0=1e-6, three_nb_c=30.0)
    rng = np.random.default_rng(7)
    per_user = []
    for _ in range(n):
        idx, payloads = bs.randomize_bit_vector(cfg, np.array([1]), rng)
        per_user.append(sh.Envelopes(idx, payloads))
    m = sh.meter(per_user, 1, 1)
    expected = bs.expected_messages_per_bit(cfg, 1.0)
    assert abs(m.mean_messages_per_user - expected) <= 0.1 * expected
    assert abs(m.mean_messages_per_user - 1.0) <= 0.1  # within 10% of I*Q = 1


def test_meter_is_payload_agnostic():
    env = make_envelopes([0, 0, 1], [1, -1, 1])
    flipped = make_envelopes([0, 0, 1], [-1, 1, -1])
    m1 = sh.meter([env], 2, 1)
    m2 = sh.meter([flipped], 2, 1)
    assert m1.per_user_message_counts.tolist() == m2.per_user_message_counts.tolist()
    assert m1.total_bits == m2.total_bits


def test_dump_transcript_format(tmp_path):
    env = make_envelopes([2, 0, 1], [1, -1, 1])
    path = tmp_path / "transcript.txt"
    sh.dump_transcript(env, path)
    assert path.read_text().splitlines() == ["2,1", "0,0", "1,1"]
