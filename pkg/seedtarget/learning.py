"""Signal aggregation and the decision to seek information.

A farmer with D informed contacts, H of whom report the high profit
level, forms a posterior from a uniform prior by treating the D signals
as independent with accuracy alpha. Adoption compares that posterior to
the cost ratio r = (c - pi_lo) / (pi_hi - pi_lo).
"""
import math

from scipy import optimize, special, stats

from seedtarget.errors import DomainError
from seedtarget.models import LearningParams, SignalTally


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}.")


def _net_evidence_posterior(alpha, k):
    # alpha^k / (alpha^k + (1 - alpha)^k), evaluated in log-odds space
    return float(special.expit(k * special.logit(alpha)))


def posterior(alpha, tally):
    """Posterior probability that the profit is high."""
    _check_alpha(alpha)
    return _net_evidence_posterior(alpha, 2 * tally.high_signals - tally.informed_contacts)


def adopts(params, tally):
    return posterior(params.alpha, tally) >= params.ratio


def agreeing_signals_posterior(alpha, connections):
    """Posterior after ``connections`` unanimous high signals (0 gives the prior)."""
    _check_alpha(alpha)
    return _net_evidence_posterior(alpha, connections)


def seeks_information(params, informed_contacts):
    if informed_contacts < 0:
        raise DomainError(f"informed_contacts cannot be negative, got {informed_contacts}.")
    return agreeing_signals_posterior(params.alpha, informed_contacts) > params.ratio


def min_informed_connections(params):
    """Smallest lambda >= 1 with unanimous-signal posterior above r, or None if none exists."""
    alpha, ratio = params.alpha, params.ratio
    if alpha <= 0.5:
        # the unanimous posterior is largest at one contact
        return 1 if agreeing_signals_posterior(alpha, 1) > ratio else None

    guess = max(1, math.floor(special.logit(ratio) / special.logit(alpha)))
    while guess > 1 and agreeing_signals_posterior(alpha, guess - 1) > ratio:
        guess -= 1
    while not agreeing_signals_posterior(alpha, guess) > ratio:
        guess += 1
    return guess


def contagion_regime(params):
    needed = min_informed_connections(params)
    if needed is None:
        return 'never'
    return 'simple' if needed == 1 else 'complex'


def accuracy_cutoff(ratio, connections, xtol=1e-12):
    """Signal accuracy at which ``connections`` unanimous signals exactly reach ``ratio``."""
    if not 0.5 < ratio < 1.0:
        raise DomainError(f"ratio must lie in (0.5, 1) for a cutoff above one half, got {ratio}.")
    if connections < 1:
        raise DomainError(f"connections must be at least 1, got {connections}.")
    return optimize.bisect(lambda a: _net_evidence_posterior(a, connections) - ratio,
                           0.5, 1.0 - 1e-15, xtol=xtol)


def _signal_value(params, d):
    """Expected gross payoff of acquiring d signals and then following the adoption rule."""
    value = 0.0
    for h in range(d + 1):
        if not adopts(params, SignalTally(d, h)):
            continue
        value += 0.5 * (stats.binom.pmf(h, d, params.alpha) * (params.pi_hi - params.cost)
                        + stats.binom.pmf(h, d, 1.0 - params.alpha) * (params.pi_lo - params.cost))
    return float(value)


def value_table(params, informed_contacts):
    if informed_contacts < 0:
        raise DomainError(f"informed_contacts cannot be negative, got {informed_contacts}.")
    rows = []
    for d in range(informed_contacts + 1):
        gross = _signal_value(params, d)
        rows.append({'signals': d, 'gross_value': gross, 'net_value': gross - params.eta * d})
    return rows


def value_of_information(params, informed_contacts):
    """Optimal number of signals to acquire and the value it achieves.

    Ties go to the smallest number of signals.
    """
    best_d, best_value = 0, None
    for row in value_table(params, informed_contacts):
        if best_value is None or row['net_value'] > best_value:
            best_d, best_value = row['signals'], row['net_value']
    return best_d, best_value


def learning_report(params, informed_contacts, high_signals=None):
    if high_signals is None:
        high_signals = informed_contacts
    tally = SignalTally(informed_contacts, high_signals)
    signals, value = value_of_information(params, informed_contacts)
    return {
        'params': {'alpha': params.alpha, 'pi_hi': params.pi_hi, 'pi_lo': params.pi_lo,
                   'cost': params.cost, 'eta': params.eta, 'ratio': params.ratio},
        'informed_contacts': informed_contacts,
        'high_signals': high_signals,
        'posterior': posterior(params.alpha, tally),
        'adopts': adopts(params, tally),
        'min_informed_connections': min_informed_connections(params),
        'contagion_regime': contagion_regime(params),
        'seeks_information': seeks_information(params, informed_contacts),
        'optimal_signal_count': signals,
        'expected_value': value,
        'value_table': value_table(params, informed_contacts),
    }
