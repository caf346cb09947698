"""Conditional support sets of price increments and tree reachability.

The support of the next increment at a node, jointly under the whole
prior family or under a single prior, is the finite set of increment
vectors charged with positive weight. On a finite lattice these sets are
their own closure, so set equality is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .model import MarketModel, Node, ProductPrior, mixed_kernel, node_key

Point = Tuple[Fraction, ...]


@dataclass(frozen=True)
class SupportSet:
    """Charged increment vectors at a node, with the outcomes behind each."""

    node: Node
    points: Tuple[Point, ...]  # sorted lexicographically
    point_outcomes: Dict[Point, Tuple[str, ...]]


def _build_support(model: MarketModel, node: Node, charged: Sequence[str]) -> SupportSet:
    by_point: Dict[Point, List[str]] = {}
    for o in charged:
        p = model.delta_s(node, o)
        by_point.setdefault(p, []).append(o)
    points = tuple(sorted(by_point))
    return SupportSet(node, points, {p: tuple(os) for p, os in by_point.items()})


def support_qs(model: MarketModel, node: Node) -> SupportSet:
    """Joint support: outcomes charged by at least one generator at the node."""
    charged = [
        o for o in model.lattice.outcomes_after(node)
        if any(g.get(o, 0) > 0 for g in model.generators_at(node))
    ]
    return _build_support(model, node, charged)


def support_generator(model: MarketModel, node: Node, gen_index: int) -> SupportSet:
    """Support of a single generator kernel at the node."""
    g = model.generators_at(node)[gen_index]
    charged = [o for o in model.lattice.outcomes_after(node) if g.get(o, 0) > 0]
    return _build_support(model, node, charged)


def support_prior(model: MarketModel, prior: ProductPrior, node: Node) -> SupportSet:
    """Support of the increment under the prior's mixed kernel at the node."""
    kernel = mixed_kernel(model, prior, node)
    charged = [o for o in model.lattice.outcomes_after(node) if kernel[o] > 0]
    return _build_support(model, node, charged)


def reachable(model: MarketModel) -> Set[Node]:
    """Nodes with positive mass under some prior of the family.

    A child is reachable iff its parent is and some generator at the
    parent charges the connecting outcome. Prefix-closed; contains the root.
    """
    tree: Set[Node] = {()}
    frontier: List[Node] = [()]
    while frontier:
        node = frontier.pop()
        if len(node) >= model.lattice.horizon:
            continue
        gens = model.generators_at(node)
        for o in model.lattice.outcomes_after(node):
            if any(g.get(o, 0) > 0 for g in gens):
                child = node + (o,)
                tree.add(child)
                frontier.append(child)
    return tree


def prior_tree(model: MarketModel, prior: ProductPrior) -> Set[Node]:
    """Nodes with positive probability under a single product prior."""
    tree: Set[Node] = {()}
    frontier: List[Node] = [()]
    while frontier:
        node = frontier.pop()
        if len(node) >= model.lattice.horizon:
            continue
        kernel = mixed_kernel(model, prior, node)
        for o in model.lattice.outcomes_after(node):
            if kernel[o] > 0:
                child = node + (o,)
                tree.add(child)
                frontier.append(child)
    return tree


def supports_match(
    model: MarketModel,
    family_a: Optional[Sequence[ProductPrior]],
    family_b: Optional[Sequence[ProductPrior]],
) -> Tuple[bool, Optional[Node]]:
    """Compare nodewise supports of two families on the common reachable tree.

    ``None`` stands for the full quasi-sure family. A family's support at
    a node is the union of its members' supports. Returns the verdict and
    the first differing node (breadth-first order) on failure.
    """

    def union_points(family, node):
        if family is None:
            return set(support_qs(model, node).points)
        pts: Set[Point] = set()
        for prior in family:
            pts.update(support_prior(model, prior, node).points)
        return pts

    tree = reachable(model)
    for node in model.lattice.non_terminal_nodes():
        if node not in tree:
            continue
        if union_points(family_a, node) != union_points(family_b, node):
            return False, node
    return True, None


def supports_to_json(model: MarketModel) -> Dict[str, List[List[str]]]:
    """Node-key -> sorted increment points, as rational strings."""
    tree = reachable(model)
    out = {}
    for node in model.lattice.non_terminal_nodes():
        if node in tree:
            sup = support_qs(model, node)
            out[node_key(node)] = [[str(x) for x in p] for p in sup.points]
    return out
