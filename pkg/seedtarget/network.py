import logging
import math
import re

import networkx as nx
import numpy as np
import pandas as pd

from seedtarget import rng as rngs
from seedtarget.errors import ConfigError, DataError, ParseError, ReferentialError
from seedtarget.models import CentralityReport, Individual, SeedPair, VillageNetwork

logger = logging.getLogger(__name__)

EARTH_RADIUS_MILES = 3958.7613
MILES_PER_DEGREE = 2 * math.pi * EARTH_RADIUS_MILES / 360.0

INDIVIDUAL_COLUMNS = ['person_id', 'household_id', 'village_id']
EDGE_COLUMNS = ['village_id', 'person_a', 'person_b']


# --- INGESTION ---

def _read_table(source, required, label):
    if isinstance(source, pd.DataFrame):
        frame = source.astype(str)
    else:
        try:
            frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding='utf-8-sig',
                                skipinitialspace=True)
        except FileNotFoundError as e:
            raise DataError(f"{label} file not found: {e.filename}") from e
        except pd.errors.EmptyDataError as e:
            raise ParseError(f"{label} file is empty.", line=1) from e
        except pd.errors.ParserError as e:
            match = re.search(r'line (\d+)', str(e))
            line = int(match.group(1)) if match else None
            raise ParseError(f"{label} file: Row {line}: malformed record ({e})", line=line) from e

    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ParseError(f"{label} file is missing column(s): {', '.join(missing)}", line=1)
    return frame


def _parse_coordinate(value, name):
    value = (value or '').strip()
    if not value:
        return None
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"'{name}' value '{value}' is not a number.")


def _parse_individuals(frame):
    has_coords = 'lat' in frame.columns and 'lon' in frame.columns
    villages = {}
    errors = []
    first_line = None
    for i, row in enumerate(frame.to_dict('records')):
        line_num = i + 2
        try:
            village_id = row['village_id'].strip()
            if not village_id:
                raise ValueError("The 'village_id' column cannot be empty.")
            lat = _parse_coordinate(row.get('lat'), 'lat') if has_coords else None
            lon = _parse_coordinate(row.get('lon'), 'lon') if has_coords else None
            person = Individual(row['person_id'].strip(), row['household_id'].strip(), lat, lon)
            people = villages.setdefault(village_id, {})
            if person.person_id in people:
                raise ValueError(f"Duplicate person_id '{person.person_id}' in village '{village_id}'.")
            people[person.person_id] = person
        except (ValueError, DataError) as e:
            errors.append(f"Row {line_num}: {e}")
            first_line = first_line or line_num

    if errors:
        raise ParseError(f"Individuals file has {len(errors)} error(s). " + ' '.join(errors),
                         line=first_line, errors=errors)
    return villages


def _parse_edges(frame, villages):
    edges = {village_id: set() for village_id in villages}
    errors = []
    first_line = None
    for i, row in enumerate(frame.to_dict('records')):
        line_num = i + 2
        village_id = row['village_id'].strip()
        a, b = row['person_a'].strip(), row['person_b'].strip()
        if not village_id or not a or not b:
            errors.append(f"Row {line_num}: village_id, person_a and person_b are all required.")
            first_line = first_line or line_num
            continue
        if a == b:
            errors.append(f"Row {line_num}: self-loop on '{a}'.")
            first_line = first_line or line_num
            continue
        people = villages.get(village_id)
        if people is None:
            raise ReferentialError(f"Row {line_num}: unknown village id '{village_id}'.", missing_id=village_id)
        for pid in (a, b):
            if pid not in people:
                raise ReferentialError(
                    f"Row {line_num}: unknown person id '{pid}' in village '{village_id}'.", missing_id=pid)
        edges[village_id].add(tuple(sorted((a, b))))

    if errors:
        raise ParseError(f"Edges file has {len(errors)} error(s). " + ' '.join(errors),
                         line=first_line, errors=errors)
    return edges


def load_villages(individuals_source, edges_source):
    """Parse an individuals file and an edges file into one network per village."""
    people_frame = _read_table(individuals_source, INDIVIDUAL_COLUMNS, 'Individuals')
    edge_frame = _read_table(edges_source, EDGE_COLUMNS, 'Edges')
    villages = _parse_individuals(people_frame)
    edges = _parse_edges(edge_frame, villages)

    networks = {}
    for village_id in sorted(villages):
        networks[village_id] = VillageNetwork(village_id, villages[village_id].values(), edges[village_id])
        logger.info("loaded village %s with %d individuals and %d edges",
                    village_id, networks[village_id].n, networks[village_id].graph.number_of_edges())
    return networks


def load_village(individuals_source, edges_source, village_id=None):
    networks = load_villages(individuals_source, edges_source)
    if village_id is not None:
        if village_id not in networks:
            raise ReferentialError(f"Village '{village_id}' not found in the individuals file.",
                                   missing_id=village_id)
        return networks[village_id]
    if len(networks) != 1:
        raise DataError(f"The files hold {len(networks)} villages; name one with village_id.")
    return next(iter(networks.values()))


def load_user_pairs(source):
    """Read ``village_id,person_a,person_b`` rows into {village_id: SeedPair}."""
    frame = _read_table(source, EDGE_COLUMNS, 'User seeds')
    pairs = {}
    errors = []
    first_line = None
    for i, row in enumerate(frame.to_dict('records')):
        line_num = i + 2
        village_id, a, b = (row[c].strip() for c in EDGE_COLUMNS)
        if village_id and a and b and a != b and village_id not in pairs:
            pairs[village_id] = SeedPair.of(a, b)
            continue
        first_line = first_line or line_num
        if not village_id or not a or not b:
            errors.append(f"Row {line_num}: village_id, person_a and person_b are all required.")
        elif a == b:
            errors.append(f"Row {line_num}: a seed pair needs two distinct persons, got '{a}' twice.")
        elif village_id in pairs:
            errors.append(f"Row {line_num}: village '{village_id}' already has a seed pair.")
    if errors:
        raise ParseError(f"User seeds file has {len(errors)} error(s). " + ' '.join(errors),
                         line=first_line, errors=errors)
    return pairs


def write_villages(networks, individuals_path, edges_path):
    """Write networks back out in the ingestion schema (closure edges included)."""
    if isinstance(networks, VillageNetwork):
        networks = [networks]
    networks = list(networks)
    with_coords = all(net.has_coordinates for net in networks)

    people_rows = []
    edge_rows = []
    for net in networks:
        for person in net.individuals:
            row = {'person_id': person.person_id, 'household_id': person.household_id,
                   'village_id': net.village_id}
            if with_coords:
                row['lat'] = person.lat
                row['lon'] = person.lon
            people_rows.append(row)
        for a, b in sorted(net.edges):
            edge_rows.append({'village_id': net.village_id, 'person_a': a, 'person_b': b})

    columns = INDIVIDUAL_COLUMNS + (['lat', 'lon'] if with_coords else [])
    pd.DataFrame(people_rows, columns=columns).to_csv(
        individuals_path, index=False, float_format='%.17g', lineterminator='\n')
    pd.DataFrame(edge_rows, columns=EDGE_COLUMNS).to_csv(edges_path, index=False, lineterminator='\n')


# --- GEOGRAPHIC PROXY ---

def haversine_miles(lat1, lon1, lat2, lon2):
    lat1, lon1, lat2, lon2 = map(np.radians, (lat1, lon1, lat2, lon2))
    h = (np.sin((lat2 - lat1) / 2) ** 2
         + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2)
    return 2 * EARTH_RADIUS_MILES * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def geo_adjacency(individuals, radius_miles=0.05, village_id=None):
    """Link every two individuals within ``radius_miles`` (inclusive)."""
    if radius_miles <= 0:
        raise ConfigError(f"radius_miles must be positive, got {radius_miles}.")
    if isinstance(individuals, VillageNetwork):
        village_id = village_id or individuals.village_id
        individuals = individuals.individuals
    people = sorted(individuals, key=lambda p: p.person_id)
    for person in people:
        if person.coordinates is None:
            raise DataError(f"Individual '{person.person_id}' has no coordinates for geo adjacency.")

    lat = np.array([p.lat for p in people])
    lon = np.array([p.lon for p in people])
    distance = haversine_miles(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    rows, cols = np.nonzero(np.triu(distance <= radius_miles, k=1))
    edges = [(people[i].person_id, people[j].person_id) for i, j in zip(rows, cols)]
    return VillageNetwork(village_id or 'geo', people, edges)


# --- CENTRALITY ---

def centrality(net):
    """Degree, raw betweenness and per-component eigenvector centrality."""
    graph = net.graph
    degree = {pid: graph.degree(pid) for pid in net.person_ids}
    # undirected and unnormalized: counts over unordered pairs
    betweenness = nx.betweenness_centrality(graph, normalized=False)

    eigenvector = {}
    for component in nx.connected_components(graph):
        if len(component) == 1:
            eigenvector[next(iter(component))] = 0.0
            continue
        sub = graph.subgraph(component)
        scores = nx.eigenvector_centrality(sub, max_iter=10000, tol=1e-10 / len(component))
        eigenvector.update({pid: abs(score) for pid, score in scores.items()})

    return CentralityReport(
        degree=degree,
        betweenness={pid: float(betweenness[pid]) for pid in net.person_ids},
        eigenvector={pid: float(eigenvector[pid]) for pid in net.person_ids},
    )


def graph_distance(net, a, b):
    try:
        return nx.shortest_path_length(net.graph, a, b)
    except nx.NetworkXNoPath:
        return None


# --- SYNTHETIC VILLAGES ---

VILLAGE_CENTRE = (-13.9, 33.8)
HOUSEHOLD_SPACING_MILES = 0.03


def _household_graph(n_households, clustering_knob, rng):
    if n_households <= 4:
        return nx.complete_graph(n_households)
    k = 4 if n_households > 5 else 2
    return nx.watts_strogatz_graph(n_households, k, 1.0 - clustering_knob, seed=int(rng.integers(2 ** 31)))


def _build_village(village_id, n_households, mean_household_size, clustering_knob, rng):
    sizes = 1 + rng.poisson(mean_household_size - 1.0, n_households)
    members = []
    people = []

    radius = n_households * HOUSEHOLD_SPACING_MILES / (2 * math.pi)
    lat0, lon0 = VILLAGE_CENTRE
    lon_scale = MILES_PER_DEGREE * math.cos(math.radians(lat0))
    jitter = rng.uniform(-0.01, 0.01, size=(n_households, 2))

    counter = 0
    for h, size in enumerate(sizes):
        household_id = f'{village_id}-h{h:03d}'
        angle = 2 * math.pi * h / n_households
        hx = radius * math.cos(angle) + jitter[h, 0]
        hy = radius * math.sin(angle) + jitter[h, 1]
        ids = []
        for _ in range(size):
            dx, dy = rng.uniform(-0.002, 0.002, 2)
            person_id = f'{village_id}-p{counter:04d}'
            counter += 1
            people.append(Individual(person_id, household_id,
                                     lat=round(lat0 + (hy + dy) / MILES_PER_DEGREE, 7),
                                     lon=round(lon0 + (hx + dx) / lon_scale, 7)))
            ids.append(person_id)
        members.append(ids)

    head_share = 0.5 + 0.5 * clustering_knob

    def endpoint(h):
        if len(members[h]) == 1 or rng.random() < head_share:
            return members[h][0]
        return members[h][int(rng.integers(len(members[h])))]

    edges = set()
    # ring of household heads keeps the village in one component
    for h in range(n_households if n_households > 2 else 1):
        edges.add(tuple(sorted((members[h][0], members[(h + 1) % n_households][0]))))
    for h1, h2 in sorted(_household_graph(n_households, clustering_knob, rng).edges):
        a, b = endpoint(h1), endpoint(h2)
        edges.add(tuple(sorted((a, b))))

    return VillageNetwork(village_id, people, edges)


def _validate_synth(n_households, mean_household_size, clustering_knob):
    if n_households < 2:
        raise ConfigError(f"n_households must be at least 2, got {n_households}.")
    if mean_household_size < 1:
        raise ConfigError(f"mean_household_size must be at least 1, got {mean_household_size}.")
    if not 0.0 <= clustering_knob <= 1.0:
        raise ConfigError(f"clustering_knob must lie in [0, 1], got {clustering_knob}.")


def synth_village(n_households, mean_household_size, clustering_knob, rng_seed, village_id=None, index=0):
    """Clustered village built around a giant component.

    Households sit on a Watts-Strogatz ring whose rewiring probability is
    ``1 - clustering_knob``; inter-household links land on the household
    head with probability ``0.5 + 0.5 * clustering_knob`` so that
    household-level triangles survive at the individual level.
    """
    _validate_synth(n_households, mean_household_size, clustering_knob)
    rng = rngs.substream(rng_seed, rngs.SYNTHETIC, index)
    return _build_village(village_id or f'v{index:03d}', n_households, mean_household_size, clustering_knob, rng)


def synth_ensemble(n_villages, n_households, mean_household_size, clustering_knob, rng_seed):
    _validate_synth(n_households, mean_household_size, clustering_knob)
    if n_villages < 1:
        raise ConfigError(f"n_villages must be at least 1, got {n_villages}.")
    return [synth_village(n_households, mean_household_size, clustering_knob, rng_seed, index=k)
            for k in range(n_villages)]
