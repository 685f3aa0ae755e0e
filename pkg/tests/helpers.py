import itertools

import networkx as nx

from seedtarget.models import Individual, VillageNetwork


def make_village(edges, nodes=(), households=None, village_id='v1', coords=None):
    """Village where every person is their own household unless ``households`` says otherwise."""
    people = sorted(set(nodes) | {pid for edge in edges for pid in edge})
    households = households or {}
    coords = coords or {}
    individuals = [Individual(pid, households.get(pid, f'h-{pid}'), *coords.get(pid, (None, None)))
                   for pid in people]
    return VillageNetwork(village_id, individuals, edges)


def village_from_graph(graph, village_id='v1'):
    mapping = {node: f'n{node:02d}' for node in graph.nodes}
    relabeled = nx.relabel_nodes(graph, mapping)
    return make_village(list(relabeled.edges), nodes=list(relabeled.nodes), village_id=village_id)


def percolate(net, seeds, tau, periods):
    """Set-based threshold dynamics with household closure, one set per period."""
    def closure(informed):
        return {pid for person in informed for pid in net.household_members(net.household_of(person))}

    informed = closure(seeds)
    history = [frozenset(informed)]
    for _ in range(periods):
        newly = {pid for pid in net.person_ids if pid not in informed
                 and sum(1 for nb in net.neighbors(pid) if nb in informed) >= tau[pid]}
        informed = closure(informed | newly)
        history.append(frozenset(informed))
    return history


def brute_force_best(net, tau, periods, horizon=None):
    """Best deterministic pair by exhaustive enumeration over distinct-household pairs."""
    horizon = periods if horizon is None else horizon
    best = None
    for a, b in itertools.combinations(net.person_ids, 2):
        if net.household_of(a) == net.household_of(b):
            continue
        rate = len(percolate(net, {a, b}, tau, periods)[horizon]) / net.n
        if best is None or rate > best[1]:
            best = ((a, b), rate)
    return best


def write_village_files(directory, individuals_rows, edge_rows):
    individuals = directory / 'individuals.csv'
    edges = directory / 'edges.csv'
    individuals.write_text('person_id,household_id,village_id,lat,lon\n'
                           + ''.join(f'{row}\n' for row in individuals_rows), encoding='utf-8')
    edges.write_text('village_id,person_a,person_b\n' + ''.join(f'{row}\n' for row in edge_rows),
                     encoding='utf-8')
    return str(individuals), str(edges)


