"""Instance containers and policy execution records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .distkit import DiscreteDist, Numeric
from .indices import Item, ItemIndices, compute_indices


class Instance:
    """A list of items with eagerly cached per-item indices.

    Item ids must be exactly 0..N-1 in order.  All fields are immutable after
    construction, so instances are safe to share across threads.
    """

    def __init__(self, items: Sequence[Item], indices: Optional[Sequence[ItemIndices]] = None):
        items = tuple(items)
        if not items:
            raise ValueError("instance needs at least one item")
        for pos, item in enumerate(items):
            if item.id != pos:
                raise ValueError(f"item ids must be 0..N-1 in order; got {item.id} at {pos}")
        self.items = items
        if indices is None:
            indices = tuple(compute_indices(item) for item in items)
        else:
            indices = tuple(indices)
            if len(indices) != len(items):
                raise ValueError("one indices record per item required")
        self.indices = indices
        # inspection order used by the reservation-price policy: ascending
        # reservation price, ties by item id
        self.order_by_reservation = tuple(
            sorted(range(len(items)), key=lambda n: (self.indices[n].u_rsv, n))
        )

    def __len__(self) -> int:
        return len(self.items)

    @property
    def max_alpha(self) -> Numeric:
        return max(ix.alpha_local for ix in self.indices)

    def support_product(self) -> int:
        prod = 1
        for item in self.items:
            prod *= len(item.dist)
        return prod


@dataclass(frozen=True)
class Realization:
    """One complete draw of hidden prices, keyed by item id."""

    prices: tuple[Numeric, ...]

    @classmethod
    def from_mapping(cls, instance: Instance, prices: Mapping[int, Numeric]) -> "Realization":
        if set(prices) != set(range(len(instance))):
            raise ValueError("realization must cover every item id exactly once")
        row = tuple(prices[n] for n in range(len(instance)))
        for n, v in enumerate(row):
            if v not in instance.items[n].dist.values:
                raise ValueError(f"price {v} not in the support of item {n}")
        return cls(row)


@dataclass(frozen=True)
class HedgeCoins:
    """Hedge labels per item id; True marks an obligatory-inspection item."""

    labels: tuple[bool, ...]

    @classmethod
    def from_mapping(cls, instance: Instance, labels: Mapping[int, bool]) -> "HedgeCoins":
        if set(labels) != set(range(len(instance))):
            raise ValueError("coins must cover every item id exactly once")
        return cls(tuple(bool(labels[n]) for n in range(len(instance))))

    @classmethod
    def all_obligatory(cls, instance: Instance) -> "HedgeCoins":
        return cls((True,) * len(instance))


@dataclass(frozen=True)
class PolicyTrace:
    """Record of one policy execution.

    total_cost charges inspection costs for inspected items, the realized
    price of every selected item (even when selected without inspection), and
    the terminal cost when a combinatorial model is in play.
    """

    inspection_order: tuple[int, ...]
    selected: frozenset[int]
    selected_without_inspection: frozenset[int]
    total_cost: Numeric
    labels: Optional[tuple[bool, ...]] = None

    def __post_init__(self):
        if not self.selected_without_inspection <= self.selected:
            raise ValueError("selected_without_inspection must be a subset of selected")


def hedge_transform(instance: Instance, coins: HedgeCoins) -> Instance:
    """Obligatory-inspection instance induced by a vector of hedge labels.

    A non-inspection item becomes a free-to-inspect item whose price is
    deterministically its mean; the expected cost of any policy on the
    transformed instance matches the original accounting.
    """
    items = []
    for n, item in enumerate(instance.items):
        if coins.labels[n]:
            items.append(item)
        else:
            items.append(Item(id=n, cost=0, dist=DiscreteDist.point_mass(instance.indices[n].mu)))
    return Instance(items)
