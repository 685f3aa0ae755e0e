"""Low-cost targeting strategies built from a handful of interviews.

An extension agent draws a few random farmers, screens out anyone with
fewer than two connections, asks each respondent for their connections
and uses the answers to pick two trainees:

    A  two random respondents
    B  the two highest-degree respondents
    C  two random connections of the highest-degree respondent
    D  the two highest-degree connections of the highest-degree respondent
       (every connection of that respondent is interviewed)
    E  two random respondents; one random connection of each is
       interviewed and one of that connection's connections is trained
    F  the highest-degree respondent and one random connection

Degree ties go to the smallest person_id. Trainees are screened to
degree >= 2 like the respondents.
"""
import logging

import numpy as np

from config import Config
from seedtarget import rng as rngs
from seedtarget.errors import ConfigError, InfeasibleError
from seedtarget.evaluation import mean_interval
from seedtarget.models import SeedPair, StrategyTrace
from seedtarget.seeding import optimal_pair, score_pairs

logger = logging.getLogger(__name__)

STRATEGIES = ('A', 'B', 'C', 'D', 'E', 'F')
CALIBRATION = 'OPT'
MIN_DEGREE = 2


def _screened(net, candidates):
    return [pid for pid in candidates if net.degree(pid) >= MIN_DEGREE]


def _by_degree(net, candidates):
    return sorted(candidates, key=lambda pid: (-net.degree(pid), pid))


def _pick(generator, candidates, k):
    idx = generator.choice(len(candidates), size=k, replace=False)
    return [candidates[i] for i in idx]


def _require(candidates, k, what):
    if len(candidates) < k:
        raise InfeasibleError(f"Screening left {len(candidates)} {what}; the strategy needs {k}.")


def _connection_of_connection(net, generator, respondent, exclude):
    """Interview one random connection of ``respondent`` and return (connection, trainee)."""
    options = []
    for connection in net.neighbors(respondent):
        onward = [pid for pid in _screened(net, net.neighbors(connection))
                  if pid != respondent and pid not in exclude]
        if onward:
            options.append((connection, onward))
    if not options:
        raise InfeasibleError(f"No connection of '{respondent}' leads to an eligible trainee.")
    connection, onward = options[int(generator.integers(len(options)))]
    return connection, onward[int(generator.integers(len(onward)))]


def run_strategy(net, strategy_id, n_initial, rng_substream, master_seed=0):
    if strategy_id not in STRATEGIES:
        raise ConfigError(f"Unknown strategy '{strategy_id}'; choose one of {', '.join(STRATEGIES)}.")
    if n_initial < 2:
        raise ConfigError(f"n_initial must be at least 2, got {n_initial}.")

    # the respondent list does not depend on the strategy, so strategies
    # with the same substream start from the same interviews
    generator = rngs.substream(master_seed, rngs.STRATEGY, n_initial, rng_substream)
    pool = _screened(net, net.person_ids)
    _require(pool, 2, 'respondents')
    respondents = _pick(generator, pool, min(n_initial, len(pool)))
    interviewed = list(respondents)
    branches = ()

    if strategy_id == 'A':
        chosen = _pick(generator, respondents, 2)
    elif strategy_id == 'B':
        chosen = _by_degree(net, respondents)[:2]
    else:
        top = _by_degree(net, respondents)[0]
        connections = _screened(net, net.neighbors(top))
        if strategy_id == 'C':
            _require(connections, 2, 'connections')
            chosen = _pick(generator, connections, 2)
        elif strategy_id == 'D':
            _require(connections, 2, 'connections')
            interviewed += net.neighbors(top)
            chosen = _by_degree(net, connections)[:2]
        elif strategy_id == 'F':
            _require(connections, 1, 'connections')
            chosen = [top] + _pick(generator, connections, 1)
        else:
            chosen = []
            for respondent in _pick(generator, respondents, 2):
                connection, trainee = _connection_of_connection(net, generator, respondent, chosen)
                interviewed.append(connection)
                chosen.append(trainee)
            branches = (1, 1)

    return StrategyTrace(strategy_id=strategy_id,
                         initial_interviews=len(respondents),
                         total_interviews=len(interviewed),
                         chosen_pair=SeedPair.of(*chosen),
                         interviewed_ids=tuple(interviewed),
                         branch_counts=branches)


def evaluate_strategies(villages, config, n_initial_grid, trials_per_cell,
                        strategies=STRATEGIES, include_calibration=True, workers=1):
    """Percent-of-optimal table under complex contagion.

    For every village the complex-optimal pair sets the benchmark rate.
    Each (strategy, n_initial) cell averages, per village, the
    horizon-period rate of the strategy's pairs over the trials and
    divides it by the benchmark; the cell reports the mean of those
    village ratios with a 95% t interval. Villages where a strategy is
    infeasible are left out of that cell and counted.
    """
    complex_config = config.with_lambda(Config.MODEL_LAMBDA['complex'])
    cells = {}
    for strategy_id in strategies:
        for n_initial in n_initial_grid:
            cells[(strategy_id, n_initial)] = {'ratios': [], 'initial': [], 'total': [], 'infeasible': 0}
    calibration = []

    for v, net in enumerate(villages):
        logger.info("strategies: village %d/%d (%s)", v + 1, len(villages), net.village_id)
        best, ranked = optimal_pair(net, complex_config, workers=workers)
        benchmark = ranked[0].mean_rate
        known = {score.pair: score.mean_rate for score in ranked}
        calibration.append(known[best] / benchmark)

        traces = {}
        for strategy_id in strategies:
            for n_initial in n_initial_grid:
                for trial in range(trials_per_cell):
                    try:
                        traces[(strategy_id, n_initial, trial)] = run_strategy(
                            net, strategy_id, n_initial, v * trials_per_cell + trial, complex_config.master_seed)
                    except InfeasibleError:
                        traces[(strategy_id, n_initial, trial)] = None

        missing = sorted({t.chosen_pair for t in traces.values() if t is not None} - set(known))
        if missing:
            known.update({s.pair: s.mean_rate for s in score_pairs(net, missing, complex_config, workers=workers)})

        for (strategy_id, n_initial), cell in cells.items():
            trials = [traces[(strategy_id, n_initial, t)] for t in range(trials_per_cell)]
            feasible = [t for t in trials if t is not None]
            if not feasible:
                cell['infeasible'] += 1
                continue
            cell['ratios'].append(np.mean([known[t.chosen_pair] for t in feasible]) / benchmark)
            cell['initial'].extend(t.initial_interviews for t in feasible)
            cell['total'].extend(t.total_interviews for t in feasible)

    rows = []
    if include_calibration and villages:
        mean, low, high = mean_interval(calibration)
        rows.append({'strategy': CALIBRATION, 'n_initial': 0, 'villages': len(calibration), 'infeasible': 0,
                     'mean_ratio': mean, 'ci_low': low, 'ci_high': high,
                     'mean_initial_interviews': 0.0, 'mean_total_interviews': 0.0})
    for (strategy_id, n_initial), cell in cells.items():
        if cell['ratios']:
            mean, low, high = mean_interval(cell['ratios'])
            initial, total = float(np.mean(cell['initial'])), float(np.mean(cell['total']))
        else:
            mean = low = high = initial = total = None
        rows.append({'strategy': strategy_id, 'n_initial': n_initial, 'villages': len(cell['ratios']),
                     'infeasible': cell['infeasible'], 'mean_ratio': mean, 'ci_low': low, 'ci_high': high,
                     'mean_initial_interviews': initial, 'mean_total_interviews': total})
    return rows
