import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from seedtarget import rng as rngs
from seedtarget.errors import ReferentialError
from seedtarget.models import DiffusionOutcome, RateSummary, ThresholdDraw

logger = logging.getLogger(__name__)

# below this many rows a process pool costs more than it saves
MIN_ROWS_PER_WORKER = 64


def draw_thresholds(net, config, substream_id):
    """One strictly positive threshold per person, in sorted person_id order."""
    generator = rngs.substream(config.master_seed, rngs.THRESHOLDS, substream_id)
    tau = rngs.truncated_normal(generator, config.lambda_mean, config.threshold_sd, net.n)
    return ThresholdDraw(net.person_ids, tau)


def _frame_thresholds(frame, config, replication, stream=()):
    generator = rngs.substream(config.master_seed, rngs.THRESHOLDS, *stream, replication)
    tau = rngs.truncated_normal(generator, config.lambda_mean, config.threshold_sd, frame.n)
    ordered = np.empty(frame.n)
    ordered[frame.canonical_index] = tau
    return ordered


def seed_state(net, seed_sets):
    """Household-informed matrix at period 0, one row per seed set."""
    frame = net.frame
    household_pos = {hh: h for h, hh in enumerate(frame.household_ids)}
    state = np.zeros((len(seed_sets), frame.n_households), dtype=bool)
    for row, seeds in enumerate(seed_sets):
        for pid in seeds:
            if pid not in net:
                raise ReferentialError(f"Unknown seed id '{pid}' in village '{net.village_id}'.", missing_id=pid)
            state[row, household_pos[net.household_of(pid)]] = True
    return state


def propagate(frame, state, tau, periods):
    """Synchronous threshold dynamics on household states.

    Returns one state matrix per period 0..periods. A row whose informed
    set did not grow in a period is left untouched afterwards: thresholds
    are fixed within a replication, so it can never grow again.
    """
    states = [state]
    active = np.ones(len(state), dtype=bool)
    for _ in range(periods):
        current = states[-1]
        rows = np.flatnonzero(active)
        if rows.size == 0:
            states.append(current)
            continue
        sub = current[rows]
        counts = sub.astype(np.float32) @ frame.weights
        informed = sub[:, frame.hh_of]
        triggered = (counts >= tau) & ~informed
        reached = np.logical_or.reduceat(triggered, frame.starts, axis=1)
        nxt = current.copy()
        nxt[rows] = sub | reached
        active[rows] = reached.any(axis=1)
        states.append(nxt)
    return states


def information_rates(frame, states):
    """(rows, periods + 1) matrix of informed fractions."""
    return np.stack([s.astype(np.float64) @ frame.sizes for s in states], axis=1) / frame.n


def replicate_states(frame, state, config, stream=()):
    """Yield ``(replication, states)`` for every threshold draw, in index order.

    ``stream`` prefixes the replication in the threshold substream ids; an
    ensemble passes the village index so villages draw independently.
    """
    for replication in range(config.effective_replications):
        tau = _frame_thresholds(frame, config, replication, stream)
        yield replication, propagate(frame, state, tau, config.periods)


def _summarise(frame, state, config):
    replications = config.effective_replications
    sums = np.zeros((len(state), config.periods + 1))
    squares = np.zeros_like(sums)
    for _, states in replicate_states(frame, state, config):
        rates = information_rates(frame, states)
        sums += rates
        squares += rates * rates
    mean = sums / replications
    if replications == 1:
        return mean, np.zeros_like(mean)
    variance = np.clip((squares - replications * mean * mean) / (replications - 1), 0.0, None)
    return mean, np.sqrt(variance / replications)


def _summarise_chunk(args):
    frame, state, config = args
    return _summarise(frame, state, config)


def summarise_states(frame, state, config, workers=1):
    """Mean information rate and Monte Carlo standard error per row and period.

    Rows are scored against the same threshold draw for each replication
    index, so a row's result does not depend on which other rows share
    the batch or on how the batch is split across workers.
    """
    rows = len(state)
    logger.info("scoring %d seed sets over %d replications", rows, config.effective_replications)
    n_chunks = min(workers, rows // MIN_ROWS_PER_WORKER)
    if n_chunks <= 1:
        return _summarise(frame, state, config)

    chunks = np.array_split(np.arange(rows), n_chunks)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(_summarise_chunk, [(frame, state[idx], config) for idx in chunks]))
    return (np.concatenate([mean for mean, _ in results]),
            np.concatenate([se for _, se in results]))


def run_once(net, seeds, thresholds, periods):
    """Single deterministic run for one threshold draw."""
    frame = net.frame
    state = seed_state(net, [set(seeds)])
    tau_by_person = thresholds.as_dict()
    tau = np.array([tau_by_person[pid] for pid in frame.person_ids])

    informed = []
    for period_state in propagate(frame, state, tau, periods):
        households = {frame.household_ids[h] for h in np.flatnonzero(period_state[0])}
        informed.append(frozenset(pid for hh in households for pid in net.household_members(hh)))
    return DiffusionOutcome(net.n, tuple(informed))


def mean_information_rate(net, seeds, config):
    mean, se = summarise_states(net.frame, seed_state(net, [set(seeds)]), config)
    return RateSummary(tuple(mean[0].tolist()), tuple(se[0].tolist()), config.effective_replications)
