"""Per-item indices and surrogate price constructions.

Each item carries an inspection cost and a price distribution.  From those we
derive the mean, the reservation and backup prices, the hedging probability
and the local approximation ratio, plus the three surrogate price pushforwards
(obligatory-inspection, nonobligatory-inspection, and the hedged mixture).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .distkit import DiscreteDist, Numeric, backup_price, mean, reservation_price

#: Hard ceiling on the local approximation ratio, plus float headroom.
ALPHA_CEILING = 4.0 / 3.0
ALPHA_TOL = 1e-12


class SurrogateKind(Enum):
    """Which surrogate price transform to apply.

    OI inflates the price up to the reservation price (inspection is
    internalized); NOI additionally caps it at the backup price; LH mixes the
    OI surrogate (with the item's hedging probability) and the mean.
    """

    OI = "oi"
    NOI = "noi"
    LH = "lh"


@dataclass(frozen=True)
class Item:
    id: int
    cost: Numeric
    dist: DiscreteDist

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"item {self.id}: inspection cost must be nonnegative")


@dataclass(frozen=True)
class ItemIndices:
    mu: Numeric
    u_rsv: Numeric
    u_bkp: Numeric
    p_hedge: Numeric
    alpha_local: Numeric
    never_inspect: bool


def compute_indices(item: Item) -> ItemIndices:
    """Derive all per-item indices.

    Not cached: a float item and an exact-rational item can compare equal, so
    value-keyed caching would leak float results into exact paths.  Instances
    cache their items' indices eagerly instead.

    When the reservation price is at least the backup price (equivalently,
    at least the mean), inspection is never worthwhile: hedging probability 0
    and ratio 1.  This also covers the mean-zero degenerate item without
    dividing by the mean.  Otherwise the hedging probability equalizes the
    two loss branches of the ratio and the ratio lands in [1, 4/3].
    """
    mu = mean(item.dist)
    u_rsv = reservation_price(item.dist, item.cost)
    u_bkp = backup_price(item.dist, item.cost)
    never = u_rsv >= u_bkp
    if never or u_rsv >= mu:
        return ItemIndices(mu, u_rsv, u_bkp, 0, 1, never)
    denom = (mu - u_rsv) + item.cost * u_rsv / mu
    p = max((mu - u_rsv) / denom, 0)
    alpha = max((mu - u_rsv + item.cost) / denom, 1)
    if alpha > ALPHA_CEILING + ALPHA_TOL:
        raise AssertionError(f"local ratio {alpha} exceeds 4/3")
    return ItemIndices(mu, u_rsv, u_bkp, p, alpha, False)


def alpha_of_p(item: Item, p: Numeric) -> Numeric:
    """Local approximation ratio achieved by an arbitrary hedging probability.

    Only defined when inspection is potentially worthwhile (reservation price
    strictly below backup price).
    """
    if not 0 <= p <= 1:
        raise ValueError("hedging probability must lie in [0, 1]")
    idx = compute_indices(item)
    if idx.u_rsv >= idx.u_bkp:
        raise ValueError("ratio curve undefined: reservation price >= backup price")
    if idx.u_rsv == 0 and p < 1:
        raise ValueError("ratio diverges: zero reservation price with p < 1")
    lose_inspection = 0 if p == 1 else (1 - p) * (idx.mu - idx.u_rsv) / idx.u_rsv
    lose_commitment = p * item.cost / idx.mu
    return 1 + max(lose_inspection, lose_commitment)


def surrogate_value(
    item: Item,
    kind: SurrogateKind,
    v: Numeric,
    coin: Optional[bool] = None,
) -> Numeric:
    """Realized surrogate price for one draw.

    ``coin`` is the hedge label (True = obligatory-inspection) and is required
    exactly for the LH kind.
    """
    idx = compute_indices(item)
    if kind is SurrogateKind.OI:
        return max(v, idx.u_rsv)
    if kind is SurrogateKind.NOI:
        if idx.u_rsv >= idx.u_bkp:
            return idx.mu
        return min(max(v, idx.u_rsv), idx.u_bkp)
    if coin is None:
        raise ValueError("LH surrogate needs the hedge coin")
    return max(v, idx.u_rsv) if coin else idx.mu


def surrogate_dist(item: Item, kind: SurrogateKind) -> DiscreteDist:
    """Exact pushforward distribution of the surrogate price."""
    idx = compute_indices(item)
    if kind is SurrogateKind.OI:
        return DiscreteDist.from_pairs(
            (max(v, idx.u_rsv), p) for v, p in item.dist.atoms
        )
    if kind is SurrogateKind.NOI:
        if idx.u_rsv >= idx.u_bkp:
            return DiscreteDist.point_mass(idx.mu)
        return DiscreteDist.from_pairs(
            (min(max(v, idx.u_rsv), idx.u_bkp), p) for v, p in item.dist.atoms
        )
    p_hedge = idx.p_hedge
    if p_hedge == 0:
        return DiscreteDist.point_mass(idx.mu)
    oi = surrogate_dist(item, SurrogateKind.OI)
    if p_hedge == 1:
        return oi
    pairs = [(v, p * p_hedge) for v, p in oi.atoms]
    pairs.append((idx.mu, 1 - p_hedge))
    return DiscreteDist.from_pairs(pairs)


def capped_expectation(item: Item, kind: SurrogateKind, r: Numeric) -> Numeric:
    """E[min{W, r}] for the item's surrogate price W."""
    d = surrogate_dist(item, kind)
    return sum(p * min(v, r) for v, p in d.atoms)


def make_worst_case_item(
    u_rsv: Numeric, mu: Numeric, c: Numeric, item_id: int = 0
) -> Item:
    """Two-point item realizing a requested (reservation price, mean, cost).

    The price is 0 with probability c/u_rsv and u_rsv*mu/(u_rsv - c) with the
    remaining probability; as c approaches u_rsv the local ratio approaches
    its 4/3 ceiling.
    """
    if u_rsv <= 0:
        raise ValueError("reservation price must be positive")
    if mu < u_rsv:
        raise ValueError("mean must be at least the reservation price")
    if not 0 < c < u_rsv:
        raise ValueError("cost must lie strictly between 0 and the reservation price")
    p_low = c / u_rsv
    high = u_rsv * mu / (u_rsv - c)
    dist = DiscreteDist(((0, p_low), (high, 1 - p_low)))
    return Item(id=item_id, cost=c, dist=dist)
