import logging
import os

import click
import pandas as pd

from seedtarget import __version__, configure_logging
from seedtarget import diffusion, evaluation, learning, network, seeding, strategies
from seedtarget.decorators import reports_errors
from seedtarget.errors import ConfigError, DataError
from seedtarget.forms import resolve_run_config
from seedtarget.models import LearningParams
from seedtarget.reports import build_report, write_csv, write_json

logger = logging.getLogger(__name__)

DEFAULT_INITIAL_GRID = '2,4,6,8'


def _split(value):
    return [item.strip() for item in value.split(',') if item.strip()]


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(item) for item in _split(value)]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'.")


def _float_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [float(item) for item in _split(value)]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{value}'.")


def run_options(fn):
    """Options every simulating command shares; values left unset fall back to the config file and env."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='key = value run file.'),
        click.option('--seed', type=int, help='Master seed.'),
        click.option('--workers', type=int, help='Process budget; never changes results.'),
        click.option('--deterministic/--stochastic', default=None, help='Zero threshold spread.'),
        click.option('--lambda-mean', type=float, help='Mean threshold; defaults per model.'),
        click.option('--threshold-sd', type=float),
        click.option('--periods', type=int),
        click.option('--replications', type=int),
        click.option('--objective-period', type=int, help='Period whose mean rate is optimised.'),
        click.option('--radius-miles', type=float, help='Geo-model linking radius.'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def village_inputs(fn):
    options = [
        click.option('--individuals', required=True, type=click.Path(dir_okay=False),
                     help='CSV: person_id,household_id,village_id[,lat,lon]'),
        click.option('--edges', required=True, type=click.Path(dir_okay=False),
                     help='CSV: village_id,person_a,person_b'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def output_options(fn):
    options = [
        click.option('--out', default='-', show_default=True, help='JSON report path; - is stdout.'),
        click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), help='Also write the main table as CSV.'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def command(name):
    """Register a group command wrapped so that package errors map to exit codes."""
    def wrapper(fn):
        return cli.command(name)(reports_errors(fn))
    return wrapper


def _emit(name, run, payload, out, csv_path=None, table=None, columns=None):
    write_json(build_report(name, run, payload), out)
    if csv_path:
        write_csv(table if table is not None else [], csv_path, columns=columns)
        logger.info("wrote %s table to %s", name, csv_path)


def _resolve(config_path, **flags):
    return resolve_run_config(config_path=config_path, **flags)


@click.group()
@click.version_option(__version__, prog_name='seedtarget')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='Stderr log level (default from SEEDTARGET_LOG_LEVEL).')
def cli(log_level):
    """Choose and evaluate seed farmers on village social networks."""
    configure_logging(log_level)


@command('select-seeds')
@village_inputs
@click.option('--village', help='Village id when the files hold several.')
@click.option('--model', type=click.Choice(seeding.MODELS), default=None)
@click.option('--top-k', type=int, help='Ranked pairs kept in the JSON report; 0 keeps all.')
@run_options
@output_options
def select_seeds(individuals, edges, village, model, top_k, config_path, out, csv_path, **flags):
    run = _resolve(config_path, model=model, top_k=top_k, **flags)
    net = network.load_village(individuals, edges, village)
    pair, ranked = seeding.select_seeds(net, run.model, run.diffusion_config(), lambda_mean=run.lambda_mean,
                                        radius_miles=run.radius_miles, workers=run.workers)
    rows = [score.as_row() for score in ranked]
    best = ranked[0]
    payload = {
        'village_id': net.village_id,
        'model': run.model,
        'lambda_mean': run.model_lambda,
        'pair': pair,
        'mean_rate': best.mean_rate,
        'std_error': best.std_error,
        'per_period_rates': best.per_period_rates,
        'pairs_scored': len(ranked),
        'ranked': rows if run.top_k == 0 else rows[:run.top_k],
    }
    _emit('select-seeds', run, payload, out, csv_path, rows)


@command('simulate')
@village_inputs
@click.option('--village', help='Village id when the files hold several.')
@click.option('--seeds', required=True, help='Comma-separated seed person ids.')
@click.option('--model', type=click.Choice(seeding.MODELS), default=None)
@run_options
@output_options
def simulate(individuals, edges, village, seeds, model, config_path, out, csv_path, **flags):
    seed_ids = _split(seeds)
    if not seed_ids:
        raise ConfigError("--seeds needs at least one person id.")
    run = _resolve(config_path, model=model, **flags)
    net = seeding.model_network(network.load_village(individuals, edges, village), run.model, run.radius_miles)
    summary = diffusion.mean_information_rate(net, seed_ids, run.diffusion_config())
    curve = [{'period': t, 'mean_rate': mean, 'std_error': se}
             for t, (mean, se) in enumerate(zip(summary.mean, summary.std_error))]
    payload = {
        'village_id': net.village_id,
        'model': run.model,
        'lambda_mean': run.model_lambda,
        'seeds': sorted(seed_ids),
        'replications': summary.replications,
        'curve': curve,
    }
    _emit('simulate', run, payload, out, csv_path, curve, columns=['period', 'mean_rate', 'std_error'])


@command('strategies')
@village_inputs
@click.option('--strategy', 'strategy_ids', default=','.join(strategies.STRATEGIES), show_default=True,
              help='Comma-separated strategy ids.')
@click.option('--initial', 'n_initial', default=DEFAULT_INITIAL_GRID, show_default=True, callback=_int_list,
              help='Comma-separated numbers of initial interviews.')
@click.option('--trials', type=click.IntRange(min=1), default=10, show_default=True)
@click.option('--calibration/--no-calibration', default=True, show_default=True,
              help='Add the row for training the optimal pair itself.')
@run_options
@output_options
def strategies_command(individuals, edges, strategy_ids, n_initial, trials, calibration, config_path, out,
                       csv_path, **flags):
    chosen = [s.upper() for s in _split(strategy_ids)]
    unknown = [s for s in chosen if s not in strategies.STRATEGIES]
    if unknown:
        raise ConfigError(f"Unknown strategy id(s): {', '.join(unknown)}.")
    run = _resolve(config_path, **flags)
    villages = list(network.load_villages(individuals, edges).values())
    rows = strategies.evaluate_strategies(villages, run.diffusion_config(), n_initial, trials, chosen,
                                          include_calibration=calibration, workers=run.workers)
    payload = {'villages': [net.village_id for net in villages], 'n_initial': n_initial,
               'trials_per_cell': trials, 'strategies': chosen, 'table': rows}
    _emit('strategies', run, payload, out, csv_path, rows)


@command('learning')
@click.option('--alpha', type=float, required=True, help='Signal accuracy.')
@click.option('--pi-hi', type=float, required=True)
@click.option('--pi-lo', type=float, required=True)
@click.option('--cost', type=float, required=True)
@click.option('--eta', type=float, default=0.0, show_default=True, help='Cost per signal.')
@click.option('--contacts', type=click.IntRange(min=0), required=True, help='Informed contacts D.')
@click.option('--high-signals', type=click.IntRange(min=0), help='High signals H (default: all of D).')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False))
@output_options
def learning_command(alpha, pi_hi, pi_lo, cost, eta, contacts, high_signals, config_path, out, csv_path):
    run = _resolve(config_path)
    params = LearningParams(alpha=alpha, pi_hi=pi_hi, pi_lo=pi_lo, cost=cost, eta=eta)
    report = learning.learning_report(params, contacts, high_signals)
    config = {**run.as_dict(),
              'learning': {'alpha': alpha, 'pi_hi': pi_hi, 'pi_lo': pi_lo, 'cost': cost, 'eta': eta,
                           'contacts': contacts, 'high_signals': high_signals}}
    _emit('learning', config, report, out, csv_path, report['value_table'])


@command('geo-adjacency')
@click.option('--individuals', required=True, type=click.Path(dir_okay=False))
@click.option('--radius-miles', type=float)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False))
@click.option('--out-dir', required=True, type=click.Path(file_okay=False),
              help='Directory for the proximity network (individuals.csv, edges.csv).')
@output_options
def geo_adjacency_command(individuals, radius_miles, config_path, out_dir, out, csv_path):
    run = _resolve(config_path, radius_miles=radius_miles)
    empty_edges = pd.DataFrame(columns=network.EDGE_COLUMNS)
    villages = network.load_villages(individuals, empty_edges)
    proximity = [network.geo_adjacency(net, run.radius_miles) for net in villages.values()]
    os.makedirs(out_dir, exist_ok=True)
    network.write_villages(proximity, os.path.join(out_dir, 'individuals.csv'), os.path.join(out_dir, 'edges.csv'))
    rows = [{'village_id': net.village_id, 'individuals': net.n, 'edges': len(net.edges)} for net in proximity]
    _emit('geo-adjacency', run, {'radius_miles': run.radius_miles, 'villages': rows}, out, csv_path, rows)


@command('centrality')
@village_inputs
@click.option('--village', help='Village id when the files hold several.')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False))
@output_options
def centrality_command(individuals, edges, village, config_path, out, csv_path):
    run = _resolve(config_path)
    net = network.load_village(individuals, edges, village)
    rows = network.centrality(net).to_frame().to_dict('records')
    _emit('centrality', run, {'village_id': net.village_id, 'centrality': rows}, out, csv_path, rows)


@command('report')
@village_inputs
@click.option('--treatments', default='simple,complex,geo,random', show_default=True,
              help='Comma-separated treatments: simple, complex, geo, random, user.')
@click.option('--user-seeds', type=click.Path(dir_okay=False), help='CSV: village_id,person_a,person_b')
@click.option('--sample-size', type=int, help='Households surveyed per village.')
@click.option('--random-pairs', type=click.IntRange(min=1), default=20, show_default=True)
@click.option('--lambdas', callback=_float_list, help='Contagion lambdas to compare (default 1,2).')
@run_options
@output_options
def report_command(individuals, edges, treatments, user_seeds, sample_size, random_pairs, lambdas, config_path,
                   out, csv_path, **flags):
    chosen = _split(treatments)
    if evaluation.USER in chosen and not user_seeds:
        raise ConfigError("The user treatment needs --user-seeds.")
    run = _resolve(config_path, sample_size=sample_size, **flags)
    if lambdas is None:
        lambdas = [run.lambda_mean] if run.lambda_mean else [1.0, 2.0]
    user_pairs = network.load_user_pairs(user_seeds) if user_seeds else None
    villages = list(network.load_villages(individuals, edges).values())
    if not villages:
        raise DataError("The individuals file holds no village.")
    result = evaluation.ensemble_report(villages, chosen, run.diffusion_config(), run.sample_design(),
                                        user_pairs=user_pairs, n_random_pairs=random_pairs, lambdas=lambdas,
                                        radius_miles=run.radius_miles, workers=run.workers)
    result.update({'treatments': chosen, 'lambdas': lambdas, 'random_pairs': random_pairs})
    _emit('report', run, result, out, csv_path, result['cells'])


@command('gen')
@click.option('--villages', 'n_villages', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--households', type=click.IntRange(min=2), default=58, show_default=True)
@click.option('--household-size', type=float, default=2.1, show_default=True, help='Mean household size.')
@click.option('--clustering', type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True)
@click.option('--seed', type=int, help='Generator seed.')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False))
@click.option('--out-dir', required=True, type=click.Path(file_okay=False),
              help='Directory for individuals.csv and edges.csv.')
@output_options
def gen(n_villages, households, household_size, clustering, seed, config_path, out_dir, out, csv_path):
    run = _resolve(config_path, seed=seed)
    ensemble = network.synth_ensemble(n_villages, households, household_size, clustering, run.seed)
    os.makedirs(out_dir, exist_ok=True)
    network.write_villages(ensemble, os.path.join(out_dir, 'individuals.csv'), os.path.join(out_dir, 'edges.csv'))
    rows = [{'village_id': net.village_id, 'households': len(net.household_index), 'individuals': net.n,
             'edges': len(net.edges)} for net in ensemble]
    payload = {'generator': {'villages': n_villages, 'households': households, 'household_size': household_size,
                             'clustering': clustering, 'seed': run.seed},
               'villages': rows}
    _emit('gen', run, payload, out, csv_path, rows)


def main(argv=None):
    return cli.main(args=argv, prog_name='seedtarget')
