import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd
from scipy import stats

from config import Config
from seedtarget import diffusion
from seedtarget import rng as rngs
from seedtarget.errors import ConfigError, DataError, ReferentialError
from seedtarget.models import SampleDesign, VillageOutcome
from seedtarget.network import centrality
from seedtarget.seeding import MODELS, candidate_pairs, select_seeds

logger = logging.getLogger(__name__)

RANDOM = 'random'
USER = 'user'
TREATMENTS = MODELS + (RANDOM, USER)


def mean_interval(values, level=0.95):
    """Mean with a two-sided t interval; degenerate samples collapse to the mean."""
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if len(values) < 2 or float(values.std(ddof=1)) == 0.0:
        return mean, mean, mean
    low, high = stats.t.interval(level, len(values) - 1, loc=mean, scale=stats.sem(values))
    return mean, float(low), float(high)


def _sample_size(design, n_households, n_seed_households):
    if n_households < design.sample_size and not design.include_all_if_smaller:
        raise DataError(f"Village has {n_households} households, fewer than the sample size "
                        f"{design.sample_size}, and include_all_if_smaller is off.")
    return max(0, design.sample_size - n_seed_households)


def _sampled_households(priority, seed_mask, k):
    """Boolean mask of the k non-seed households with the lowest priority, per row."""
    keyed = np.where(seed_mask, np.inf, priority)
    ranks = np.argsort(np.argsort(keyed, axis=1, kind='stable'), axis=1, kind='stable')
    return (ranks < k[:, None]) & ~seed_mask


def sample_outcome(outcome, net, seeds, design, rng_substream, master_seed=0, treatment_label='', period=None):
    """Observe a diffusion outcome through a household survey.

    Seed households are always surveyed and never counted; the other
    sampled households are drawn uniformly without replacement.
    """
    households = tuple(net.household_index)
    seed_households = {net.household_of(pid) for pid in seeds}
    seed_mask = np.array([[hh in seed_households for hh in households]])
    k = _sample_size(design, len(households), len(seed_households))

    priority = rngs.substream(master_seed, rngs.SAMPLING, rng_substream).random(len(households))
    sampled = _sampled_households(priority[None, :], seed_mask, np.array([k]))[0]

    period = outcome.periods if period is None else period
    informed = outcome.informed_by_period[period]
    observed = [hh for hh, keep in zip(households, sampled) if keep]
    people = [pid for hh in observed for pid in net.household_members(hh)]
    adopters = sum(1 for pid in people if pid in informed)
    return VillageOutcome(village_id=net.village_id,
                          treatment_label=treatment_label,
                          any_adoption=adopters > 0,
                          adoption_rate=adopters / len(people) if people else 0.0,
                          sampled_households=frozenset(observed) | frozenset(seed_households),
                          period=period)


def sampled_panel(net, seed_sets, config, design, village_index=None):
    """Replication means of sampled any-adoption, sampled adoption rate and full information rate.

    Each array is (len(seed_sets), periods + 1). For a replication the
    household sample is drawn once and followed across periods, the way
    a survey panel revisits the same households.
    With a ``village_index`` the threshold and sample substreams are keyed
    by village as well as replication.
    """
    frame = net.frame
    state = diffusion.seed_state(net, seed_sets)
    n_seed_households = state.sum(axis=1)
    k = np.array([_sample_size(design, frame.n_households, s) for s in n_seed_households])

    shape = (len(seed_sets), config.periods + 1)
    any_sum, rate_sum, full_sum = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    stream = () if village_index is None else (village_index,)
    for replication, states in diffusion.replicate_states(frame, state, config, stream):
        generator = rngs.substream(config.master_seed, rngs.SAMPLING, *stream, replication)
        priority = generator.random(frame.n_households)
        sampled = _sampled_households(np.broadcast_to(priority, state.shape), state, k)
        people = sampled.astype(np.float64) @ frame.sizes
        for t, period_state in enumerate(states):
            seen = period_state & sampled
            any_sum[:, t] += seen.any(axis=1)
            rate_sum[:, t] += np.divide(seen.astype(np.float64) @ frame.sizes, people,
                                        out=np.zeros(len(people)), where=people > 0)
        full_sum += diffusion.information_rates(frame, states)

    replications = config.effective_replications
    return any_sum / replications, rate_sum / replications, full_sum / replications


def random_pairs(net, count, master_seed, village_index):
    pairs = candidate_pairs(net)
    generator = rngs.substream(master_seed, rngs.RANDOM_PAIRS, village_index)
    idx = generator.choice(len(pairs), size=min(count, len(pairs)), replace=False)
    return [pairs[i] for i in sorted(idx)]


def resolve_treatments(villages, treatments, config, user_pairs=None, n_random_pairs=20,
                       radius_miles=Config.RADIUS_MILES, workers=1):
    """Seed pairs per village and treatment: {village_id: {treatment: [SeedPair, ...]}}."""
    unknown = [t for t in treatments if t not in TREATMENTS]
    if unknown:
        raise ConfigError(f"Unknown treatment(s): {', '.join(unknown)}; choose from {', '.join(TREATMENTS)}.")
    resolved = {}
    for v, net in enumerate(villages):
        pairs = {}
        for treatment in treatments:
            if treatment in MODELS:
                pairs[treatment] = [select_seeds(net, treatment, config, radius_miles=radius_miles,
                                                 workers=workers)[0]]
            elif treatment == RANDOM:
                pairs[treatment] = random_pairs(net, n_random_pairs, config.master_seed, v)
            else:
                if not user_pairs or net.village_id not in user_pairs:
                    raise ReferentialError(f"No user seed pair given for village '{net.village_id}'.",
                                           missing_id=net.village_id)
                pair = user_pairs[net.village_id]
                for pid in pair:
                    if pid not in net:
                        raise ReferentialError(f"User seed '{pid}' is not in village '{net.village_id}'.",
                                               missing_id=pid)
                pairs[treatment] = [pair]
        resolved[net.village_id] = pairs
        logger.info("resolved treatments for village %s", net.village_id)
    return resolved


def _village_panel(args):
    net, pairs, config, design, village_index = args
    labels, seed_sets = [], []
    for treatment, treatment_pairs in pairs.items():
        for pair in treatment_pairs:
            labels.append(treatment)
            seed_sets.append(set(pair))
    any_share, rate, full = sampled_panel(net, seed_sets, config, design, village_index)
    labels = np.array(labels)
    return {treatment: (any_share[labels == treatment].mean(axis=0),
                        rate[labels == treatment].mean(axis=0),
                        full[labels == treatment].mean(axis=0))
            for treatment in pairs}


def ensemble_report(villages, treatments, config, design=None, user_pairs=None, n_random_pairs=20,
                    lambdas=(1.0, 2.0), radius_miles=Config.RADIUS_MILES, workers=1):
    """Treatment comparison cells across an ensemble of villages.

    One cell per (contagion lambda, treatment, period >= 1): the mean over
    villages of the sampled any-adoption probability, the sampled
    adoption rate and the full information rate, each with a 95% t
    interval across villages.
    """
    design = design or SampleDesign()
    resolved = resolve_treatments(villages, treatments, config, user_pairs, n_random_pairs,
                                  radius_miles, workers)

    cells = []
    for lambda_mean in lambdas:
        contagion = config.with_lambda(lambda_mean)
        jobs = [(net, resolved[net.village_id], contagion, design, v) for v, net in enumerate(villages)]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                panels = list(executor.map(_village_panel, jobs))
        else:
            panels = [_village_panel(job) for job in jobs]

        for treatment in treatments:
            for period in range(1, contagion.periods + 1):
                any_share = [panel[treatment][0][period] for panel in panels]
                rate = [panel[treatment][1][period] for panel in panels]
                full = [panel[treatment][2][period] for panel in panels]
                any_mean, any_low, any_high = mean_interval(any_share)
                rate_mean, rate_low, rate_high = mean_interval(rate)
                cells.append({'lambda': lambda_mean, 'treatment': treatment, 'period': period,
                              'villages': len(panels),
                              'any_adoption_share': any_mean, 'any_ci_low': any_low, 'any_ci_high': any_high,
                              'adoption_rate': rate_mean, 'rate_ci_low': rate_low, 'rate_ci_high': rate_high,
                              'information_rate': float(np.mean(full))})

    return {
        'cells': cells,
        'pairs': {village: {t: [str(p) for p in pairs] for t, pairs in by_treatment.items()}
                  for village, by_treatment in resolved.items()},
        'seed_characteristics': seed_characteristics(villages, resolved),
        'seed_overlap': seed_overlap(resolved),
    }


def seed_characteristics(villages, resolved):
    """Mean degree, betweenness and eigenvector centrality of the seeds of each treatment."""
    rows = []
    for net in villages:
        report = centrality(net)
        for treatment, pairs in resolved[net.village_id].items():
            for pair in pairs:
                for pid in pair:
                    rows.append({'treatment': treatment, 'degree': report.degree[pid],
                                 'betweenness': report.betweenness[pid],
                                 'eigenvector': report.eigenvector[pid]})
    if not rows:
        return []
    frame = pd.DataFrame(rows)
    summary = frame.groupby('treatment', sort=True).agg(
        seeds=('degree', 'size'), degree=('degree', 'mean'),
        betweenness=('betweenness', 'mean'), eigenvector=('eigenvector', 'mean'))
    summary['seeds'] = summary['seeds'].astype(int)
    return summary.reset_index().to_dict('records')


def seed_overlap(resolved):
    """Share of the seeds of one treatment that are also seeds of another, pooled over villages."""
    treatments = sorted({t for by_treatment in resolved.values() for t in by_treatment})
    rows = []
    for row_treatment in treatments:
        for col_treatment in treatments:
            if row_treatment == col_treatment:
                continue
            shared = total = 0
            for by_treatment in resolved.values():
                if row_treatment not in by_treatment or col_treatment not in by_treatment:
                    continue
                seeds = {pid for pair in by_treatment[row_treatment] for pid in pair}
                others = {pid for pair in by_treatment[col_treatment] for pid in pair}
                shared += len(seeds & others)
                total += len(seeds)
            rows.append({'treatment': row_treatment, 'also_seed_of': col_treatment,
                         'share': shared / total if total else None})
    return rows
