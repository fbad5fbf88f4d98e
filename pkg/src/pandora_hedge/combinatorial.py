"""Combinatorial selection: constraint families, surrogate costs, and the
frugal composition of greedy rules with adaptive inspection.

A combinatorial model is an upward-closed family of feasible item sets plus a
nonnegative terminal cost.  The one-shot surrogate cost minimizes the sum of
surrogate prices plus the terminal cost over feasible sets; the frugal policy
reconstructs that optimization adaptively, inspecting items lazily while
their tentative prices sit at the reservation price.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .budget import DEFAULT_BUDGET, check_budget
from .distkit import Numeric
from .indices import SurrogateKind, surrogate_dist
from .instance import HedgeCoins, Instance, PolicyTrace, Realization, hedge_transform
from .policies import sample_coins, sample_realizations
from .sampling import SURROGATE_STREAM, sample_price_indices, uniforms


class RuleError(RuntimeError):
    """A greedy rule violated its contract (e.g. proposed a selected item)."""


@lru_cache(maxsize=1024)
def _family_members(sets: tuple[frozenset[int], ...]) -> frozenset[frozenset[int]]:
    return frozenset(sets)


@dataclass(frozen=True)
class ExplicitFamily:
    sets: tuple[frozenset[int], ...]

    def validate(self, n_items: int) -> None:
        if not self.sets:
            raise ValueError("feasible family is empty")
        universe = frozenset(range(n_items))
        members = _family_members(self.sets)
        for s in self.sets:
            if not s or not s <= universe:
                raise ValueError(f"feasible set {sorted(s)} is empty or out of range")
            for j in universe - s:
                if s | {j} not in members:
                    raise ValueError(
                        f"family is not upward closed: {sorted(s)} is feasible "
                        f"but {sorted(s | {j})} is not"
                    )

    def is_feasible(self, selected: frozenset[int], n_items: int) -> bool:
        return selected in _family_members(self.sets)


@dataclass(frozen=True)
class UniformMatroid:
    k: int

    def validate(self, n_items: int) -> None:
        if not 1 <= self.k <= n_items:
            raise ValueError(f"uniform matroid rank {self.k} out of range for {n_items} items")

    def is_feasible(self, selected: frozenset[int], n_items: int) -> bool:
        return len(selected) >= self.k


@dataclass(frozen=True)
class GraphicMatroid:
    """Items sit on the edges of a graph; feasible sets span all vertices."""

    edges: tuple[tuple[int, int], ...]

    def validate(self, n_items: int) -> None:
        if len(self.edges) != n_items:
            raise ValueError("one edge per item required")
        verts = self.vertices()
        if len(verts) < 2:
            raise ValueError("graph needs at least two vertices")
        if not self.is_feasible(frozenset(range(n_items)), n_items):
            raise ValueError("graph is not connected; no spanning set exists")

    def vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    def is_feasible(self, selected: frozenset[int], n_items: int) -> bool:
        verts = self.vertices()
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        components = len(verts)
        for n in selected:
            a, b = (find(v) for v in self.edges[n])
            if a != b:
                parent[a] = b
                components -= 1
        return components == 1


Family = Union[ExplicitFamily, UniformMatroid, GraphicMatroid]


@dataclass(frozen=True)
class ZeroTerminal:
    def cost(self, selected: frozenset[int]) -> Numeric:
        return 0

    def validate(self, n_items: int) -> None:
        pass


@dataclass(frozen=True)
class FacilityLocationTerminal:
    """Connection costs: each item location pays its distance to the nearest
    selected location."""

    distances: tuple[tuple[Numeric, ...], ...]

    def validate(self, n_items: int) -> None:
        if len(self.distances) != n_items or any(len(row) != n_items for row in self.distances):
            raise ValueError("distance matrix must be square over the item ids")
        if any(d < 0 for row in self.distances for d in row):
            raise ValueError("distances must be nonnegative")

    def cost(self, selected: frozenset[int]) -> Numeric:
        return sum(min(self.distances[n][s] for s in selected) for n in range(len(self.distances)))


Terminal = Union[ZeroTerminal, FacilityLocationTerminal]


@dataclass(frozen=True)
class CombModel:
    family: Family
    terminal: Terminal
    n_items: int

    def __post_init__(self):
        self.family.validate(self.n_items)
        self.terminal.validate(self.n_items)

    def is_feasible(self, selected: frozenset[int]) -> bool:
        return self.family.is_feasible(selected, self.n_items)

    def terminal_cost(self, selected: frozenset[int]) -> Numeric:
        return self.terminal.cost(selected)

    @classmethod
    def single_item_selection(cls, n_items: int) -> "CombModel":
        """The family of singletons with zero terminal cost."""
        sets = [frozenset(s) for r in range(1, n_items + 1) for s in itertools.combinations(range(n_items), r)]
        return cls(ExplicitFamily(tuple(sets)), ZeroTerminal(), n_items)


def surrogate_cost(model: CombModel, prices: Sequence[Numeric]) -> tuple[Numeric, frozenset[int]]:
    """One-shot optimum: minimize price sum plus terminal cost over feasible
    sets.  Ties resolve to the lexicographically smallest sorted id tuple.
    """
    if any(p < 0 for p in prices):
        raise ValueError("surrogate prices must be nonnegative")
    family = model.family
    if isinstance(family, UniformMatroid) and isinstance(model.terminal, ZeroTerminal):
        chosen = sorted(range(model.n_items), key=lambda n: (prices[n], n))[: family.k]
        return sum(prices[n] for n in chosen), frozenset(chosen)
    if isinstance(family, GraphicMatroid) and isinstance(model.terminal, ZeroTerminal):
        verts = family.vertices()
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tree = []
        value = 0
        for n in sorted(range(model.n_items), key=lambda n: (prices[n], n)):
            a, b = (find(v) for v in family.edges[n])
            if a != b:
                parent[a] = b
                tree.append(n)
                value = value + prices[n]
        return value, frozenset(tree)
    # generic desk-scale path: enumerate subsets
    if model.n_items > 22:
        raise ValueError("explicit subset enumeration is limited to 22 items")
    best = None
    best_key = None
    best_set = None
    for size in range(model.n_items + 1):
        for combo in itertools.combinations(range(model.n_items), size):
            s = frozenset(combo)
            if not model.is_feasible(s):
                continue
            value = sum(prices[n] for n in s) + model.terminal_cost(s)
            key = tuple(sorted(s))
            if best is None or value < best or (value == best and key < best_key):
                best, best_key, best_set = value, key, s
    if best is None:
        raise ValueError("model has no feasible set")
    return best, best_set


def _surrogate_dists(instance: Instance, kind: SurrogateKind):
    return [surrogate_dist(item, kind) for item in instance.items]


def expected_surrogate_cost(
    model: CombModel,
    instance: Instance,
    kind: SurrogateKind,
    budget: int = DEFAULT_BUDGET,
) -> Numeric:
    """E[Z] for the chosen surrogate kind, by product enumeration."""
    dists = _surrogate_dists(instance, kind)
    size = math.prod(len(d) for d in dists)
    check_budget(size, budget, "surrogate cost enumeration")
    total = 0
    for combo in itertools.product(*(d.atoms for d in dists)):
        prob = 1
        for _, p in combo:
            prob = prob * p
        value, _ = surrogate_cost(model, [v for v, _ in combo])
        total = total + prob * value
    return total


def expected_surrogate_cost_mc(
    model: CombModel,
    instance: Instance,
    kind: SurrogateKind,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of E[Z] with standard error."""
    if trials < 1:
        raise ValueError("need at least one trial")
    dists = _surrogate_dists(instance, kind)
    per_item = []
    for n, d in enumerate(dists):
        us = uniforms(seed, n, SURROGATE_STREAM, trials)
        idx = sample_price_indices([float(p) for p in d.probs], us)
        values = d.values
        per_item.append([values[i] for i in idx])
    vals = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        value, _ = surrogate_cost(model, [per_item[n][t] for n in range(len(dists))])
        vals[t] = float(value)
    mean_v = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean_v, stderr


class GreedyRule:
    """Plugin interface for the frugal composition.

    Given tentative prices, the currently selected and inspected sets, and the
    model, propose the next item id or return None to declare completion.
    Proposals must keep the selected set extensible to a feasible set.
    """

    def propose(
        self,
        tau: Sequence[Numeric],
        selected: frozenset[int],
        inspected: frozenset[int],
        model: CombModel,
    ) -> Optional[int]:
        raise NotImplementedError


def _proposal_key(tau, inspected, n):
    # ascending tentative price; at ties prefer already-inspected items (their
    # price is final, so selecting them never wastes an inspection), then the
    # lowest id
    return (tau[n], 0 if n in inspected else 1, n)


class UniformMatroidRule(GreedyRule):
    def propose(self, tau, selected, inspected, model):
        k = model.family.k
        if len(selected) >= k:
            return None
        candidates = [n for n in range(model.n_items) if n not in selected]
        return min(candidates, key=lambda n: _proposal_key(tau, inspected, n))


class GraphicMatroidRule(GreedyRule):
    def propose(self, tau, selected, inspected, model):
        family = model.family
        verts = family.vertices()
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        components = len(verts)
        for n in selected:
            a, b = (find(v) for v in family.edges[n])
            if a != b:
                parent[a] = b
                components -= 1
        if components == 1:
            return None
        candidates = [
            n
            for n in range(model.n_items)
            if n not in selected and find(family.edges[n][0]) != find(family.edges[n][1])
        ]
        if not candidates:
            raise RuleError("no edge can extend the selected forest")
        return min(candidates, key=lambda n: _proposal_key(tau, inspected, n))


def rule_for_model(model: CombModel) -> GreedyRule:
    if isinstance(model.family, UniformMatroid):
        return UniformMatroidRule()
    if isinstance(model.family, GraphicMatroid):
        return GraphicMatroidRule()
    raise ValueError(
        "no shipped greedy rule for this family; supply a GreedyRule plugin"
    )


def frugal_oi_policy(
    model: CombModel,
    instance: Instance,
    realization: Realization,
    rule: Optional[GreedyRule] = None,
) -> PolicyTrace:
    """Adaptive obligatory-inspection composition.

    Tentative prices start at the reservation prices; a proposed uninspected
    item is inspected (price becomes the realized price, floored at the
    reservation price), a proposed inspected item is selected.
    """
    if rule is None:
        rule = rule_for_model(model)
    inspected, selected, order, total = _run_frugal(
        model, instance, realization.prices, rule
    )
    return PolicyTrace(
        inspection_order=tuple(order),
        selected=frozenset(selected),
        selected_without_inspection=frozenset(),
        total_cost=total,
    )


def _run_frugal(model, instance, prices, rule):
    indices = instance.indices
    tau = [indices[n].u_rsv for n in range(len(instance))]
    inspected: set[int] = set()
    selected: set[int] = set()
    order: list[int] = []
    total = 0
    for _ in range(2 * len(instance) + 1):
        prop = rule.propose(tau, frozenset(selected), frozenset(inspected), model)
        if prop is None:
            if not model.is_feasible(frozenset(selected)):
                raise RuleError("rule declared completion with an infeasible set")
            total = total + model.terminal_cost(frozenset(selected))
            return inspected, selected, order, total
        if prop in selected:
            raise RuleError(f"rule proposed already-selected item {prop}")
        if prop not in inspected:
            inspected.add(prop)
            order.append(prop)
            total = total + instance.items[prop].cost
            v = prices[prop]
            tau[prop] = v if v > indices[prop].u_rsv else indices[prop].u_rsv
        else:
            selected.add(prop)
            total = total + prices[prop]
    raise RuleError("rule failed to terminate")


def combinatorial_lh_policy(
    model: CombModel,
    instance: Instance,
    realization: Realization,
    coins: HedgeCoins,
    rule: Optional[GreedyRule] = None,
) -> PolicyTrace:
    """Two-stage hedged policy: commit labels, then run the frugal
    composition on the induced obligatory-inspection instance."""
    if rule is None:
        rule = rule_for_model(model)
    transformed = hedge_transform(instance, coins)
    prices = tuple(
        realization.prices[n] if coins.labels[n] else instance.indices[n].mu
        for n in range(len(instance))
    )
    inspected, selected, order, _ = _run_frugal(model, transformed, prices, rule)
    true_order = tuple(n for n in order if coins.labels[n])
    without = frozenset(n for n in selected if not coins.labels[n])
    total = (
        sum(instance.items[n].cost for n in true_order)
        + sum(realization.prices[n] for n in selected)
        + model.terminal_cost(frozenset(selected))
    )
    return PolicyTrace(
        inspection_order=true_order,
        selected=frozenset(selected),
        selected_without_inspection=without,
        total_cost=total,
        labels=coins.labels,
    )


COMB_POLICIES = ("frugal-oi", "local-hedging")


def evaluate_comb_policy_exact(
    model: CombModel,
    instance: Instance,
    policy: str,
    rule: Optional[GreedyRule] = None,
    budget: int = DEFAULT_BUDGET,
) -> Numeric:
    """Exact expected total cost of a combinatorial policy."""
    if rule is None:
        rule = rule_for_model(model)
    if policy == "frugal-oi":
        check_budget(instance.support_product(), budget, "frugal policy evaluation")
        total = 0
        for prob, prices in _iter_rows(instance):
            cost = _run_frugal(model, instance, prices, rule)[3]
            total = total + prob * cost
        return total
    if policy == "local-hedging":
        return _comb_lh_exact(model, instance, rule, budget)
    raise ValueError(f"unknown policy {policy!r}; expected one of {COMB_POLICIES}")


def _iter_rows(instance: Instance):
    for combo in itertools.product(*(item.dist.atoms for item in instance.items)):
        prob = 1
        for _, p in combo:
            prob = prob * p
        yield prob, tuple(v for v, _ in combo)


def _comb_lh_exact(model, instance, rule, budget):
    branches = 1
    for n, item in enumerate(instance.items):
        p = instance.indices[n].p_hedge
        if p == 1:
            branches *= len(item.dist)
        elif p != 0:
            branches *= len(item.dist) + 1
    check_budget(branches, budget, "hedged policy evaluation")
    n_items = len(instance)
    varying = [n for n in range(n_items) if 0 < instance.indices[n].p_hedge < 1]
    base_labels = [instance.indices[n].p_hedge == 1 for n in range(n_items)]
    total = 0
    for combo in itertools.product((True, False), repeat=len(varying)):
        labels = list(base_labels)
        weight = 1
        for n, lab in zip(varying, combo):
            labels[n] = lab
            p = instance.indices[n].p_hedge
            weight = weight * (p if lab else 1 - p)
        coins = HedgeCoins(tuple(labels))
        transformed = hedge_transform(instance, coins)
        oi_ids = [n for n in range(n_items) if labels[n]]
        base_prices = [instance.indices[n].mu for n in range(n_items)]
        for atoms in itertools.product(*(instance.items[n].dist.atoms for n in oi_ids)):
            prob = weight
            prices = list(base_prices)
            for n, (v, p) in zip(oi_ids, atoms):
                prices[n] = v
                prob = prob * p
            # uninspected selections are charged their mean by the transform,
            # which is exactly the marginal expectation of the realized price
            cost = _run_frugal(model, transformed, prices, rule)[3]
            total = total + prob * cost
    return total


def evaluate_comb_policy_mc(
    model: CombModel,
    instance: Instance,
    policy: str,
    trials: int,
    seed: int,
    rule: Optional[GreedyRule] = None,
) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    if policy not in COMB_POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {COMB_POLICIES}")
    if rule is None:
        rule = rule_for_model(model)
    realizations = sample_realizations(instance, seed, 0, trials)
    coin_rows = sample_coins(instance, seed, 0, trials) if policy == "local-hedging" else None
    vals = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        if policy == "frugal-oi":
            trace = frugal_oi_policy(model, instance, realizations[t], rule)
        else:
            trace = combinatorial_lh_policy(model, instance, realizations[t], coin_rows[t], rule)
        vals[t] = float(trace.total_cost)
    mean_v = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean_v, stderr
