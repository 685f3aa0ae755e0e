from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import networkx as nx
import numpy as np
import pandas as pd

from seedtarget.errors import ConfigError, DataError, DomainError, ReferentialError

# --- NETWORK MODELS ---


@dataclass(frozen=True)
class Individual:
    person_id: str
    household_id: str
    lat: Optional[float] = None
    lon: Optional[float] = None

    def __post_init__(self):
        if not self.person_id:
            raise DataError("person_id cannot be empty.")
        if not self.household_id:
            raise DataError(f"Individual '{self.person_id}' has an empty household_id.")
        if (self.lat is None) != (self.lon is None):
            raise DataError(f"Individual '{self.person_id}' has only one of lat/lon.")
        if self.lat is not None and not -90.0 <= self.lat <= 90.0:
            raise DataError(f"Latitude {self.lat} for '{self.person_id}' is outside [-90, 90].")
        if self.lon is not None and not -180.0 <= self.lon <= 180.0:
            raise DataError(f"Longitude {self.lon} for '{self.person_id}' is outside [-180, 180].")

    @property
    def coordinates(self):
        if self.lat is None:
            return None
        return (self.lat, self.lon)


class VillageNetwork:
    """Undirected village graph with household closure applied.

    Nodes are person ids; every household is a clique. The underlying
    networkx graph is frozen, so a VillageNetwork can be shared read-only
    between workers.
    """

    def __init__(self, village_id, individuals, edges=()):
        self.village_id = str(village_id)
        people = {}
        for person in individuals:
            if person.person_id in people:
                raise DataError(f"Duplicate person_id '{person.person_id}' in village '{self.village_id}'.")
            people[person.person_id] = person
        if not people:
            raise DataError(f"Village '{self.village_id}' has no individuals.")

        graph = nx.Graph()
        for pid in sorted(people):
            graph.add_node(pid, household_id=people[pid].household_id)
        for a, b in edges:
            if a == b:
                raise DataError(f"Self-loop on '{a}' in village '{self.village_id}'.")
            graph.add_edge(a, b)

        households = {}
        for pid in sorted(people):
            households.setdefault(people[pid].household_id, []).append(pid)
        for members in households.values():
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    graph.add_edge(a, b)

        unknown = sorted(set(graph.nodes) - set(people))
        if unknown:
            raise ReferentialError(f"Edges reference unknown ids: {', '.join(unknown)}", missing_id=unknown[0])

        self._people = people
        self._households = {hh: tuple(members) for hh, members in sorted(households.items())}
        self.graph = nx.freeze(graph)

    def __repr__(self):
        return f'<VillageNetwork {self.village_id} n={self.n} edges={self.graph.number_of_edges()}>'

    def __eq__(self, other):
        if not isinstance(other, VillageNetwork):
            return NotImplemented
        return (self.village_id == other.village_id
                and self._people == other._people
                and self.edges == other.edges)

    __hash__ = None

    @property
    def n(self):
        return len(self._people)

    @cached_property
    def person_ids(self):
        return tuple(sorted(self._people))

    @property
    def individuals(self):
        return tuple(self._people[pid] for pid in self.person_ids)

    def individual(self, person_id):
        return self._people[person_id]

    def __contains__(self, person_id):
        return person_id in self._people

    @cached_property
    def edges(self):
        return frozenset(tuple(sorted(edge)) for edge in self.graph.edges)

    @property
    def household_index(self):
        return dict(self._households)

    def household_of(self, person_id):
        return self._people[person_id].household_id

    def household_members(self, household_id):
        return self._households[household_id]

    def degree(self, person_id):
        return self.graph.degree(person_id)

    def neighbors(self, person_id):
        return sorted(self.graph.neighbors(person_id))

    @property
    def has_coordinates(self):
        return all(person.lat is not None for person in self._people.values())

    @cached_property
    def frame(self):
        """Array layout used by the propagation kernel."""
        return PropagationFrame.from_network(self)


@dataclass(frozen=True)
class CentralityReport:
    degree: dict
    betweenness: dict
    eigenvector: dict

    def to_frame(self):
        frame = pd.DataFrame({
            'degree': pd.Series(self.degree, dtype='int64'),
            'betweenness': pd.Series(self.betweenness, dtype='float64'),
            'eigenvector': pd.Series(self.eigenvector, dtype='float64'),
        })
        frame.index.name = 'person_id'
        return frame.sort_index().reset_index()


# --- LEARNING MODELS ---


@dataclass(frozen=True)
class LearningParams:
    alpha: float
    pi_hi: float
    pi_lo: float
    cost: float
    eta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}.")
        if not self.pi_lo < self.cost < self.pi_hi:
            raise DomainError(
                f"Need pi_lo < cost < pi_hi, got pi_lo={self.pi_lo}, cost={self.cost}, pi_hi={self.pi_hi}.")
        if self.eta < 0:
            raise DomainError(f"eta cannot be negative, got {self.eta}.")

    @property
    def ratio(self):
        """Adjusted cost over adjusted profit spread; the adoption bar."""
        return (self.cost - self.pi_lo) / (self.pi_hi - self.pi_lo)


@dataclass(frozen=True)
class SignalTally:
    informed_contacts: int
    high_signals: int

    def __post_init__(self):
        if self.informed_contacts < 0:
            raise DomainError("informed_contacts cannot be negative.")
        if not 0 <= self.high_signals <= self.informed_contacts:
            raise DomainError(
                f"high_signals must lie in [0, {self.informed_contacts}], got {self.high_signals}.")


# --- DIFFUSION MODELS ---


@dataclass(frozen=True)
class DiffusionConfig:
    lambda_mean: float
    threshold_sd: float = 0.5
    periods: int = 4
    replications: int = 2000
    master_seed: int = 0
    objective_period: Optional[int] = None

    def __post_init__(self):
        if not self.lambda_mean > 0:
            raise ConfigError(f"lambda_mean must be positive, got {self.lambda_mean}.")
        if self.threshold_sd < 0:
            raise ConfigError(f"threshold_sd cannot be negative, got {self.threshold_sd}.")
        if self.periods < 1:
            raise ConfigError(f"periods must be at least 1, got {self.periods}.")
        if self.replications < 1:
            raise ConfigError(f"replications must be at least 1, got {self.replications}.")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}.")
        if self.objective_period is not None and not 1 <= self.objective_period <= self.periods:
            raise ConfigError(f"objective_period must lie in [1, {self.periods}], got {self.objective_period}.")

    @property
    def horizon(self):
        """Period whose mean information rate is optimised."""
        return self.objective_period or self.periods

    @property
    def is_deterministic(self):
        return self.threshold_sd == 0

    @property
    def effective_replications(self):
        # Every replication is identical when thresholds are degenerate
        return 1 if self.is_deterministic else self.replications

    def with_lambda(self, lambda_mean):
        return replace(self, lambda_mean=lambda_mean)


@dataclass(frozen=True)
class ThresholdDraw:
    person_ids: tuple
    tau: np.ndarray

    def __post_init__(self):
        if len(self.person_ids) != len(self.tau):
            raise ValueError("One threshold per person is required.")
        if np.any(self.tau <= 0):
            raise ValueError("Thresholds must be strictly positive.")

    def as_dict(self):
        return dict(zip(self.person_ids, self.tau.tolist()))


@dataclass(frozen=True)
class DiffusionOutcome:
    person_count: int
    informed_by_period: tuple

    @property
    def periods(self):
        return len(self.informed_by_period) - 1

    @property
    def information_rate_by_period(self):
        return tuple(len(informed) / self.person_count for informed in self.informed_by_period)

    @property
    def final_informed(self):
        return self.informed_by_period[-1]


@dataclass(frozen=True)
class RateSummary:
    mean: tuple
    std_error: tuple
    replications: int

    @property
    def final_mean(self):
        return self.mean[-1]


class PropagationFrame:
    """Household-collapsed arrays for batched propagation.

    Individuals are ordered by (household_id, person_id) so that each
    household occupies a contiguous block starting at ``starts[h]``.
    ``weights[h, i]`` is the number of neighbours individual ``i`` has in
    household ``h`` (own-household links included), which lets the
    informed-neighbour counts of a household state ``S`` be computed as
    ``S @ weights``.
    """

    def __init__(self, person_ids, household_ids, hh_of, starts, sizes, weights, canonical_index):
        self.person_ids = person_ids
        self.household_ids = household_ids
        self.hh_of = hh_of
        self.starts = starts
        self.sizes = sizes
        self.weights = weights
        self.canonical_index = canonical_index

    @classmethod
    def from_network(cls, net):
        households = net.household_index
        household_ids = tuple(households)
        person_ids = tuple(pid for hh in household_ids for pid in households[hh])
        position = {pid: i for i, pid in enumerate(person_ids)}

        hh_of = np.repeat(np.arange(len(household_ids)), [len(households[hh]) for hh in household_ids])
        sizes = np.bincount(hh_of).astype(np.float64)
        starts = np.concatenate(([0], np.cumsum(sizes[:-1]))).astype(np.intp)

        weights = np.zeros((len(household_ids), len(person_ids)), dtype=np.float32)
        for a, b in net.graph.edges:
            ia, ib = position[a], position[b]
            weights[hh_of[ia], ib] += 1
            weights[hh_of[ib], ia] += 1

        # thresholds are drawn in sorted person_id order and permuted into frame order
        canonical_index = np.array([position[pid] for pid in net.person_ids], dtype=np.intp)
        return cls(person_ids, household_ids, hh_of, starts, sizes, weights, canonical_index)

    @property
    def n(self):
        return len(self.person_ids)

    @property
    def n_households(self):
        return len(self.household_ids)


# --- SEEDING MODELS ---


@dataclass(frozen=True, order=True)
class SeedPair:
    first: str
    second: str

    def __post_init__(self):
        if self.first == self.second:
            raise ValueError(f"A seed pair needs two distinct persons, got '{self.first}' twice.")
        if self.first > self.second:
            raise ValueError("SeedPair members must be ordered; use SeedPair.of().")

    @classmethod
    def of(cls, a, b):
        a, b = str(a), str(b)
        return cls(*sorted((a, b)))

    def __iter__(self):
        yield self.first
        yield self.second

    def __str__(self):
        return f'{self.first},{self.second}'


@dataclass(frozen=True)
class PairScore:
    pair: SeedPair
    mean_rate: float
    std_error: float
    per_period_rates: tuple
    per_period_std_errors: tuple = ()

    def as_row(self):
        row = {'person_a': self.pair.first, 'person_b': self.pair.second,
               'mean_rate': self.mean_rate, 'std_error': self.std_error}
        for t, rate in enumerate(self.per_period_rates):
            row[f'rate_t{t}'] = rate
        return row


@dataclass(frozen=True)
class StrategyTrace:
    strategy_id: str
    initial_interviews: int
    total_interviews: int
    chosen_pair: SeedPair
    interviewed_ids: tuple
    branch_counts: tuple = ()

    def __post_init__(self):
        if self.total_interviews < self.initial_interviews:
            raise ValueError("total_interviews cannot be below initial_interviews.")


# --- EVALUATION MODELS ---


@dataclass(frozen=True)
class SampleDesign:
    sample_size: int = 30
    include_all_if_smaller: bool = True

    def __post_init__(self):
        if self.sample_size < 1:
            raise ConfigError(f"sample_size must be at least 1, got {self.sample_size}.")


@dataclass(frozen=True)
class VillageOutcome:
    village_id: str
    treatment_label: str
    any_adoption: bool
    adoption_rate: float
    sampled_households: frozenset = field(default_factory=frozenset)
    period: Optional[int] = None
