import pytest

from seedtarget import strategies
from seedtarget.errors import ConfigError, InfeasibleError
from seedtarget.models import DiffusionConfig, SeedPair
from seedtarget.network import synth_ensemble
from tests.helpers import make_village


@pytest.fixture
def hub_and_spokes():
    edges = [('h', 'x'), ('h', 'y')] + [('h', f'l{i}') for i in range(3)]
    edges += [('x', f'x{i}') for i in range(3)] + [('y', f'y{i}') for i in range(3)]
    return make_village(edges)


@pytest.fixture
def small_ensemble():
    return synth_ensemble(3, 8, 1.8, 0.5, rng_seed=17)


def test_highest_degree_connections_of_the_hub(hub_and_spokes):
    trace = strategies.run_strategy(hub_and_spokes, 'D', n_initial=3, rng_substream=0)
    assert trace.chosen_pair == SeedPair('x', 'y')
    assert trace.initial_interviews == 3
    assert trace.total_interviews == 3 + hub_and_spokes.degree('h')
    assert trace.interviewed_ids[3:] == tuple(hub_and_spokes.neighbors('h'))


def test_random_connections_of_the_hub(hub_and_spokes):
    trace = strategies.run_strategy(hub_and_spokes, 'C', n_initial=3, rng_substream=5)
    assert trace.chosen_pair == SeedPair('x', 'y')


def test_hub_and_one_connection(hub_and_spokes):
    trace = strategies.run_strategy(hub_and_spokes, 'F', n_initial=3, rng_substream=1)
    assert 'h' in trace.chosen_pair
    assert set(trace.chosen_pair) <= {'h', 'x', 'y'}


def test_two_interviews_make_b_identical_to_a(small_ensemble):
    for net in small_ensemble:
        for substream in range(10):
            a = strategies.run_strategy(net, 'A', 2, substream)
            b = strategies.run_strategy(net, 'B', 2, substream)
            assert a.chosen_pair == b.chosen_pair


def test_connection_of_connection_branches(small_ensemble):
    trace = strategies.run_strategy(small_ensemble[0], 'E', n_initial=4, rng_substream=2)
    assert trace.branch_counts == (1, 1)
    assert trace.total_interviews == 4 + 2


def test_trainees_pass_the_degree_screen(small_ensemble):
    for net in small_ensemble:
        for strategy_id in strategies.STRATEGIES:
            for substream in range(5):
                try:
                    trace = strategies.run_strategy(net, strategy_id, 3, substream)
                except InfeasibleError:
                    continue
                assert all(net.degree(pid) >= strategies.MIN_DEGREE for pid in trace.chosen_pair)
                assert trace.total_interviews >= trace.initial_interviews


def test_strategies_are_deterministic(small_ensemble):
    net = small_ensemble[1]
    for strategy_id in strategies.STRATEGIES:
        assert (strategies.run_strategy(net, strategy_id, 4, 9, master_seed=3)
                == strategies.run_strategy(net, strategy_id, 4, 9, master_seed=3))


def test_degree_one_villages_are_infeasible():
    net = make_village([('a', 'b'), ('c', 'd'), ('e', 'f')])
    for strategy_id in strategies.STRATEGIES:
        with pytest.raises(InfeasibleError):
            strategies.run_strategy(net, strategy_id, 2, 0)


@pytest.mark.parametrize('strategy_id, n_initial', [('G', 2), ('A', 1)])
def test_bad_strategy_arguments(hub_and_spokes, strategy_id, n_initial):
    with pytest.raises(ConfigError):
        strategies.run_strategy(hub_and_spokes, strategy_id, n_initial, 0)


def test_percent_of_optimal_table(small_ensemble):
    config = DiffusionConfig(lambda_mean=2.0, replications=60, master_seed=2)
    rows = strategies.evaluate_strategies(small_ensemble, config, [2, 4], trials_per_cell=3)
    calibration = rows[0]
    assert calibration['strategy'] == strategies.CALIBRATION
    assert calibration['mean_ratio'] == 1.0
    assert len(rows) == 1 + len(strategies.STRATEGIES) * 2
    for row in rows[1:]:
        assert row['villages'] + row['infeasible'] == len(small_ensemble)
        if row['mean_ratio'] is not None:
            assert row['mean_ratio'] <= 1.0 + 1e-12
            assert row['ci_low'] <= row['mean_ratio'] <= row['ci_high']
            assert row['mean_total_interviews'] >= row['mean_initial_interviews']


def test_interview_grid_reaches_the_trace(hub_and_spokes):
    config = DiffusionConfig(lambda_mean=2.0, threshold_sd=0.0)
    rows = strategies.evaluate_strategies([hub_and_spokes], config, [3], 2, strategies=['D'],
                                          include_calibration=False)
    assert rows[0]['mean_total_interviews'] == 3 + hub_and_spokes.degree('h')


@pytest.mark.slow
def test_strategy_ordering_on_an_ensemble():
    ensemble = synth_ensemble(20, 30, 2.1, 0.6, rng_seed=5)
    config = DiffusionConfig(lambda_mean=2.0, replications=200, master_seed=1)
    rows = strategies.evaluate_strategies(ensemble, config, [2, 4], trials_per_cell=10)
    table = {(row['strategy'], row['n_initial']): row for row in rows}
    for row in rows:
        assert row['mean_ratio'] <= 1.0 + 1e-12
    for n_initial in (2, 4):
        assert table[('D', n_initial)]['mean_ratio'] >= table[('C', n_initial)]['mean_ratio']
        assert table[('C', n_initial)]['mean_ratio'] >= table[('A', n_initial)]['mean_ratio']
    a, b = table[('A', 2)], table[('B', 2)]
    assert a['ci_low'] <= b['ci_high'] and b['ci_low'] <= a['ci_high']
