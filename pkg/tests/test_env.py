import json

import numpy as np
import pytest

from conftest import random_graph
from netbandit.env import (
    BanditInstance,
    LocalConfigCodec,
    RegretTrace,
    decode_local_config,
    enumerate_assignments,
    lex_rank,
    load_instance,
    local_config_of,
    optimal_assignment,
    regret_step,
    save_instance,
)
from netbandit.errors import ArmOutOfRangeError, TooLargeError
from netbandit.graph import build_graph
from netbandit.instances import random_instance


def test_codec_table_sizes(reference_graph):
    codec = LocalConfigCodec(reference_graph, 2)
    assert list(codec.table_sizes) == [8, 8, 32, 64, 64, 32, 32, 32]
    assert codec.flat_size == 272
    assert list(codec.offsets) == [0, 8, 16, 48, 112, 176, 208, 240]


def test_local_config_examples(path3):
    assert local_config_of(path3, (0, 0, 0), 1, 2) == 0
    assert local_config_of(path3, (1, 1, 1), 1, 2) == 7
    # unit 0's canonical order is (0, 1); self digit least significant
    assert local_config_of(path3, (0, 1, 0), 0, 2) == 2


def test_local_config_rejects_bad_arm(path3):
    with pytest.raises(ArmOutOfRangeError):
        local_config_of(path3, (0, 2, 0), 1, 2)


def test_encode_decode_round_trip():
    rng = np.random.default_rng(31)
    for _ in range(25):
        g = random_graph(rng)
        k = int(rng.integers(2, 4))
        a = rng.integers(0, k, size=g.n_units)
        unit = int(rng.integers(g.n_units))
        code = local_config_of(g, a, unit, k)
        local = decode_local_config(g, unit, k, code)
        assert list(local) == [a[u] for u in g.closed_neighborhood(unit)]


def test_codec_codes_match_scalar_path():
    rng = np.random.default_rng(32)
    for _ in range(10):
        g = random_graph(rng)
        k = int(rng.integers(2, 4))
        codec = LocalConfigCodec(g, k)
        batch = rng.integers(0, k, size=(6, g.n_units))
        flat = codec.flat_codes_batch(batch)
        for r, a in enumerate(batch):
            for i in range(g.n_units):
                assert flat[r, i] == codec.offsets[i] + local_config_of(g, a, i, k)


def test_locality_of_lookups():
    rng = np.random.default_rng(33)
    for _ in range(20):
        g = random_graph(rng)
        k = 2
        a = rng.integers(0, k, size=g.n_units)
        unit = int(rng.integers(g.n_units))
        outside = [j for j in range(g.n_units) if j not in g.closed_neighborhood(unit)]
        if not outside:
            continue
        j = int(rng.choice(outside))
        b = a.copy()
        b[j] = (b[j] + 1) % k
        assert local_config_of(g, a, unit, k) == local_config_of(g, b, unit, k)


def test_enumerate_assignments_lex_order():
    table = enumerate_assignments(3, 2)
    assert table.shape == (8, 3)
    assert list(table[0]) == [0, 0, 0]
    assert list(table[1]) == [0, 0, 1]  # unit 0 most significant
    assert list(table[-1]) == [1, 1, 1]
    for r in range(8):
        assert lex_rank(table[r], 2) == r


def test_instance_validation(path3):
    with pytest.raises(ValueError):
        BanditInstance(path3, 1, [[0.0, 0.0]] * 3)
    with pytest.raises(ValueError):
        BanditInstance(path3, 2, [[0.0] * 4, [0.0] * 4, [0.0] * 4])  # unit 1 needs 8
    with pytest.raises(ValueError):
        BanditInstance(path3, 2, [[0.0, 1.5, 0.0, 0.0], [0.0] * 8, [0.0] * 4])
    with pytest.raises(ValueError):
        BanditInstance(path3, 2, [[0.0] * 4, [0.0] * 8, [0.0] * 4], noise_sd=-1.0)


def _zero_instance(graph, k=2):
    means = [[0.0] * k ** (graph.degree(i) + 1) for i in range(graph.n_units)]
    return BanditInstance(graph, k, means)


def test_expected_total_reward_zero_means(path3):
    inst = _zero_instance(path3)
    for a in [(0, 0, 0), (1, 0, 1), (1, 1, 1)]:
        assert inst.expected_total_reward(a) == 0.0


def test_expected_total_reward_single_node():
    g = build_graph(1, [])
    inst = BanditInstance(g, 2, [[0.3, 0.7]])
    assert inst.expected_total_reward([1]) == 0.7
    assert inst.expected_total_reward([0]) == 0.3


def test_mean_totals_matches_expected_total_reward():
    rng = np.random.default_rng(34)
    for _ in range(8):
        g = random_graph(rng, max_units=6)
        inst = random_instance(g, 2, seed=int(rng.integers(2**31)))
        totals = inst.mean_totals()
        for a in enumerate_assignments(g.n_units, 2):
            assert totals[lex_rank(a, 2)] == inst.expected_total_reward(a)


def test_mean_totals_budget(path3):
    inst = _zero_instance(path3)
    with pytest.raises(TooLargeError):
        inst.mean_totals(budget=4)


def test_optimum_matches_naive_scan():
    rng = np.random.default_rng(35)
    for _ in range(6):
        g = random_graph(rng, max_units=5)
        inst = random_instance(g, 2, seed=int(rng.integers(2**31)))
        best_rank = None
        best_val = None
        for a in enumerate_assignments(g.n_units, 2):
            v = inst.expected_total_reward(a)
            if best_val is None or v > best_val:
                best_val, best_rank = v, lex_rank(a, 2)
        opt_a, opt_v = inst.optimum()
        assert lex_rank(opt_a, 2) == best_rank
        assert opt_v == best_val


def test_optimum_lexicographic_tie(path3):
    inst = _zero_instance(path3)
    opt_a, opt_v = inst.optimum()
    assert list(opt_a) == [0, 0, 0]
    assert opt_v == 0.0


def test_sample_rewards_zero_noise(path3):
    inst = random_instance(path3, 2, seed=5, noise_sd=0.0)
    a = (1, 0, 1)
    r = inst.sample_rewards(a, np.random.default_rng(0))
    expected = [inst.means[i][local_config_of(path3, a, i, 2)] for i in range(3)]
    assert np.allclose(r, expected, atol=0)


def test_sample_rewards_advances_stream(path3):
    inst = random_instance(path3, 2, seed=5)
    rng = np.random.default_rng(7)
    first = inst.sample_rewards((0, 0, 0), rng)
    second = inst.sample_rewards((0, 0, 0), rng)
    assert not np.array_equal(first, second)


def test_sample_rewards_reproducible(path3):
    inst = random_instance(path3, 2, seed=5)
    a = inst.sample_rewards((1, 1, 0), np.random.default_rng(42))
    b = inst.sample_rewards((1, 1, 0), np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_sample_rewards_monte_carlo_mean(path3):
    inst = random_instance(path3, 2, seed=6)
    a = (0, 1, 0)
    rng = np.random.default_rng(8)
    draws = np.stack([inst.sample_rewards(a, rng) for _ in range(10**5)])
    expected = [inst.means[i][local_config_of(path3, a, i, 2)] for i in range(3)]
    assert np.abs(draws.mean(axis=0) - expected).max() < 0.02


def test_regret_step_examples():
    g = build_graph(1, [])
    inst = BanditInstance(g, 2, [[0.2, 0.9]])
    _, opt = inst.optimum()
    assert regret_step(inst, [1], opt) == 0.0
    assert regret_step(inst, [0], opt) == pytest.approx(0.7)


def test_regret_step_bounds():
    rng = np.random.default_rng(36)
    for _ in range(10):
        g = random_graph(rng, max_units=5)
        inst = random_instance(g, 2, seed=int(rng.integers(2**31)))
        _, opt = inst.optimum()
        for _ in range(5):
            a = rng.integers(0, 2, size=g.n_units)
            r = regret_step(inst, a, opt)
            assert 0.0 <= r <= 1.0


def test_optimal_assignment_modes():
    rng = np.random.default_rng(37)
    g = random_graph(rng, max_units=6)
    inst = random_instance(g, 2, seed=9)
    exact_a, exact_v = optimal_assignment(inst, mode="exact")
    auto_a, auto_v = optimal_assignment(inst, mode="auto")
    assert np.array_equal(exact_a, auto_a) and exact_v == auto_v
    local_a, local_v = optimal_assignment(inst, mode="local", rng=np.random.default_rng(0))
    assert local_v <= exact_v + 1e-12
    assert inst.expected_total_reward(local_a) == pytest.approx(local_v, abs=1e-9)


def test_regret_trace_invariants():
    rng = np.random.default_rng(38)
    values = rng.uniform(0, 1, size=200)
    trace = RegretTrace.from_instantaneous(values)
    assert trace.n_rounds == 200
    assert np.all(np.diff(trace.cumulative) >= 0)
    assert np.abs(trace.cumulative - np.cumsum(values)).max() < 1e-9 * 200
    assert trace.final == pytest.approx(values.sum())
    tail = trace.after(50)
    assert tail.n_rounds == 150
    assert tail.final == pytest.approx(trace.final - trace.cumulative[49])


def test_instance_json_round_trip(tmp_path, reference_graph):
    inst = random_instance(reference_graph, 2, seed=3, noise_sd=0.5)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    loaded = load_instance(path)
    assert loaded.graph == inst.graph
    assert loaded.k == inst.k
    assert loaded.noise_sd == 0.5
    for mine, theirs in zip(inst.means, loaded.means):
        assert np.array_equal(mine, theirs)
    # default noise is left implicit in the file
    plain = random_instance(reference_graph, 2, seed=3)
    save_instance(plain, path)
    assert "noise_sd" not in json.loads(path.read_text())
    assert load_instance(path).noise_sd == 1.0
