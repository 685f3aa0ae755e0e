import itertools
import logging

import numpy as np

from config import Config
from seedtarget import diffusion
from seedtarget.errors import ConfigError, DataError, InfeasibleError
from seedtarget.models import PairScore, SeedPair
from seedtarget.network import geo_adjacency

logger = logging.getLogger(__name__)

MODELS = ('simple', 'complex', 'geo')


def eligible_persons(net, eligibility=None):
    return [pid for pid in net.person_ids if eligibility is None or eligibility(net.individual(pid))]


def candidate_pairs(net, eligibility=None, distinct_households=True):
    eligible = eligible_persons(net, eligibility)
    if len(eligible) < 2:
        raise InfeasibleError(
            f"Village '{net.village_id}' has {len(eligible)} eligible individual(s); a pair needs two.")
    pairs = [SeedPair(a, b) for a, b in itertools.combinations(eligible, 2)
             if not distinct_households or net.household_of(a) != net.household_of(b)]
    if not pairs:
        raise InfeasibleError(f"Village '{net.village_id}' has no eligible pair in distinct households.")
    return pairs


def score_pairs(net, pairs, config, workers=1):
    """Score seed pairs against common threshold draws; result order follows ``pairs``.

    Seeding a person informs their whole household, so pairs drawn from
    the same two households are simulated once.
    """
    frame = net.frame
    household_pos = {hh: h for h, hh in enumerate(frame.household_ids)}
    keys = []
    for pair in pairs:
        a, b = (household_pos[net.household_of(pid)] for pid in pair)
        keys.append((min(a, b), max(a, b)))

    unique = sorted(set(keys))
    row_of = {key: row for row, key in enumerate(unique)}
    state = np.zeros((len(unique), frame.n_households), dtype=bool)
    for row, (a, b) in enumerate(unique):
        state[row, a] = state[row, b] = True

    logger.info("village %s: %d pairs over %d household pairs", net.village_id, len(pairs), len(unique))
    mean, se = diffusion.summarise_states(frame, state, config, workers=workers)

    horizon = config.horizon
    scores = []
    for pair, key in zip(pairs, keys):
        row = row_of[key]
        scores.append(PairScore(pair=pair,
                                mean_rate=float(mean[row, horizon]),
                                std_error=float(se[row, horizon]),
                                per_period_rates=tuple(mean[row].tolist()),
                                per_period_std_errors=tuple(se[row].tolist())))
    return scores


def rank_scores(scores):
    return sorted(scores, key=lambda s: (-s.mean_rate, s.pair.first, s.pair.second))


def optimal_pair(net, config, eligibility=None, distinct_households=True, workers=1):
    """Best pair by mean information rate at the horizon period, with the ranked table."""
    pairs = candidate_pairs(net, eligibility, distinct_households)
    ranked = rank_scores(score_pairs(net, pairs, config, workers=workers))
    return ranked[0].pair, ranked


def model_network(net, model, radius_miles=Config.RADIUS_MILES):
    if model not in MODELS:
        raise ConfigError(f"Unknown model '{model}'; choose one of {', '.join(MODELS)}.")
    if model != 'geo':
        return net
    if not net.has_coordinates:
        raise DataError(f"Village '{net.village_id}' lacks coordinates required by the geo model.")
    return geo_adjacency(net, radius_miles, village_id=net.village_id)


def select_seeds(net, model, config, lambda_mean=None, radius_miles=Config.RADIUS_MILES,
                 eligibility=None, distinct_households=True, workers=1):
    """Optimal pair for one treatment model.

    simple runs lambda=1 and complex lambda=2 on the social network; geo
    runs lambda=2 on the proximity network. ``lambda_mean`` overrides the
    model default.
    """
    graph = model_network(net, model, radius_miles)
    model_config = config.with_lambda(lambda_mean or Config.MODEL_LAMBDA[model])
    return optimal_pair(graph, model_config, eligibility, distinct_households, workers=workers)
