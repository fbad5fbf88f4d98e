"""Independent brute-force oracles and shared fixtures for the test suite.

Everything here recomputes quantities from first principles (product
enumeration, direct definition sums) so the library paths under test are
checked against a second route, not against themselves.
"""

from __future__ import annotations

import itertools
from fractions import Fraction as F

from pandora_hedge import DiscreteDist, HedgeCoins, Instance, Item, Realization
from pandora_hedge.policies import local_hedging_policy


def brute_min_atoms(dists):
    """Distribution of min of independent draws by full product enumeration."""
    atoms: dict = {}
    for combo in itertools.product(*(d.atoms for d in dists)):
        p = 1
        for _, q in combo:
            p = p * q
        v = min(v for v, _ in combo)
        atoms[v] = atoms.get(v, 0) + p
    return {v: p for v, p in atoms.items() if p != 0}


def direct_capped_sum(dist: DiscreteDist, r):
    return sum(p * min(v, r) for v, p in dist.atoms)


def enumerate_lh_cost(instance: Instance):
    """Expected hedged-policy cost by enumerating coins and full price
    products, charging realized prices through the actual trace path."""
    n = len(instance)
    total = 0
    for labels in itertools.product((True, False), repeat=n):
        weight = 1
        for m, lab in enumerate(labels):
            p = instance.indices[m].p_hedge
            weight = weight * (p if lab else 1 - p)
        if weight == 0:
            continue
        coins = HedgeCoins(labels)
        for combo in itertools.product(*(item.dist.atoms for item in instance.items)):
            prob = weight
            for _, q in combo:
                prob = prob * q
            trace = local_hedging_policy(instance, Realization(tuple(v for v, _ in combo)), coins)
            total = total + prob * trace.total_cost
    return total


def two_point_item(exact=True, item_id=0) -> Item:
    if exact:
        return Item(item_id, F(2), DiscreteDist(((F(0), F(1, 2)), (F(10), F(1, 2)))))
    return Item(item_id, 2.0, DiscreteDist(((0.0, 0.5), (10.0, 0.5))))


def golden_pair(exact=True) -> Instance:
    """Point mass 5 at cost 0 next to the two-point item at cost 2."""
    if exact:
        a = Item(0, F(0), DiscreteDist.point_mass(F(5)))
    else:
        a = Item(0, 0.0, DiscreteDist.point_mass(5.0))
    return Instance([a, two_point_item(exact, item_id=1)])
