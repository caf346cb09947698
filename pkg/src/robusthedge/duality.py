"""Martingale-measure side of the pricing problem.

A martingale measure is encoded by its leaf weights; the nodewise
conditional-martingale property is imposed in aggregated form: for every
reachable non-terminal node and every asset, the leaves below the node
carry zero total next-step increment. Support inside the reachable tree
encodes absolute continuity with respect to some member of the family,
because the full mixture of all generators dominates every such measure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import lp
from .errors import InfeasiblePolytope, NoPointError
from .model import Claim, MarketModel, Node, ProductPrior, node_key
from .supports import prior_tree, reachable, support_qs


@dataclass(frozen=True)
class MartingaleMeasure:
    leaf_weights: Dict[Node, Fraction]

    def expectation(self, claim: Claim) -> Fraction:
        return sum(
            (w * claim.payoff[leaf] for leaf, w in self.leaf_weights.items()),
            Fraction(0))


def _polytope_rows(model: MarketModel, leaves: List[Node], tree) -> List[Tuple]:
    """Equality rows of the martingale polytope over the given leaves."""
    index = {leaf: i for i, leaf in enumerate(leaves)}
    rows = [(tuple(Fraction(1) for _ in leaves), "=", Fraction(1))]
    for node in model.lattice.non_terminal_nodes():
        if node not in tree:
            continue
        t = len(node)
        for i in range(model.prices.assets):
            coeffs = [Fraction(0)] * len(leaves)
            for leaf in leaves:
                if leaf[:t] != node:
                    continue
                coeffs[index[leaf]] = model.delta_s(node, leaf[t])[i]
            rows.append((tuple(coeffs), "=", Fraction(0)))
    return rows


def _measure_from(leaves: List[Node], weights: Sequence[Fraction]) -> MartingaleMeasure:
    return MartingaleMeasure({leaf: w for leaf, w in zip(leaves, weights)})


def _solve_sup(model: MarketModel, claim: Claim, tree) -> Tuple[Fraction, MartingaleMeasure]:
    leaves = [l for l in model.lattice.leaves() if l in tree]
    rows = _polytope_rows(model, leaves, tree)
    objective = tuple(claim.payoff[leaf] for leaf in leaves)
    problem = lp.LinearProgram.build(
        "max", objective, rows, bounds=[(Fraction(0), None)] * len(leaves))
    out = lp.solve(problem)
    if out.status != lp.OPTIMAL:
        raise InfeasiblePolytope(None)
    return out.value, _measure_from(leaves, out.primal)


def _strict_one_step_kernel(model: MarketModel, node: Node) -> Dict[str, Fraction]:
    """Probability weights over the charged outcomes at a node, all strictly
    positive, giving every asset a zero conditional increment. Exists
    exactly when the node admits no one-step arbitrage."""
    support = support_qs(model, node)
    outcomes = sorted(
        {o for outs in support.point_outcomes.values() for o in outs})
    k = len(outcomes)
    one = Fraction(1)
    rows: List[Tuple[Tuple[Fraction, ...], Fraction]] = []
    ones = tuple(one for _ in outcomes)
    rows.append((ones, one))
    rows.append((tuple(-one for _ in outcomes), -one))
    for i in range(model.prices.assets):
        coeffs = tuple(model.delta_s(node, o)[i] for o in outcomes)
        rows.append((coeffs, Fraction(0)))
        rows.append((tuple(-c for c in coeffs), Fraction(0)))
    strict_start = len(rows)
    for j in range(k):
        rows.append((tuple(one if i == j else Fraction(0) for i in range(k)),
                     Fraction(0)))
    point = lp.strictly_feasible_point(
        rows, strict=range(strict_start, strict_start + k))
    if point is None:
        raise NoPointError("no full-support martingale measure exists")
    return dict(zip(outcomes, point))


def full_support_martingale(model: MarketModel) -> MartingaleMeasure:
    """A martingale measure charging every reachable leaf, composed from a
    strictly positive zero-increment one-step kernel at every reachable
    node."""
    tree = reachable(model)
    kernels = {
        node: _strict_one_step_kernel(model, node)
        for node in model.lattice.non_terminal_nodes() if node in tree
    }
    weights: Dict[Node, Fraction] = {}
    for leaf in model.lattice.leaves():
        if leaf not in tree:
            continue
        w = Fraction(1)
        for t in range(len(leaf)):
            w *= kernels[leaf[:t]][leaf[t]]
        weights[leaf] = w
    return MartingaleMeasure(weights)


def dual_sup(model: MarketModel, claim: Claim) -> Tuple[Fraction, MartingaleMeasure]:
    """Maximal expected payoff over martingale measures carried by the
    reachable tree. Raises when no full-support member exists, which on a
    finite lattice is exactly failure of quasi-sure no-arbitrage."""
    tree = reachable(model)
    try:
        full_support_martingale(model)
    except NoPointError:
        raise InfeasiblePolytope(None)
    return _solve_sup(model, claim, tree)


def dual_sup_prior(model: MarketModel, prior: ProductPrior,
                   claim: Claim) -> Tuple[Fraction, MartingaleMeasure]:
    """Mono-prior dual: maximize over martingale measures supported on the
    prior's tree."""
    return _solve_sup(model, claim, prior_tree(model, prior))


def perturb(m: MartingaleMeasure, m_hat: MartingaleMeasure,
            n: int) -> MartingaleMeasure:
    """Convex combination (1 - 1/n) m + (1/n) m_hat, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = 1 - Fraction(1, n)
    b = Fraction(1, n)
    keys = set(m.leaf_weights) | set(m_hat.leaf_weights)
    return MartingaleMeasure({
        k: a * m.leaf_weights.get(k, Fraction(0))
        + b * m_hat.leaf_weights.get(k, Fraction(0))
        for k in keys
    })


@dataclass(frozen=True)
class PerturbationEvidence:
    """Certifies sup over equivalent martingale measures without computing
    a maximizer: the gap to the perturbed measures decays exactly like c/n."""

    value: Fraction
    maximizer: MartingaleMeasure
    full_support: MartingaleMeasure
    constant: Fraction  # value - E_{full support}(claim), nonnegative
    gaps: Dict[int, Fraction]  # n -> value - E_{perturbed n}(claim)

    @property
    def law_holds(self) -> bool:
        return self.constant >= 0 and all(
            gap == self.constant / n for n, gap in self.gaps.items())


def dual_sup_equivalent(model: MarketModel, claim: Claim,
                        ns: Sequence[int]) -> PerturbationEvidence:
    try:
        m_hat = full_support_martingale(model)
    except NoPointError:
        raise InfeasiblePolytope(None)
    value, maximizer = _solve_sup(model, claim, reachable(model))
    constant = value - m_hat.expectation(claim)
    gaps = {}
    for n in ns:
        m_n = perturb(maximizer, m_hat, n)
        gaps[n] = value - m_n.expectation(claim)
    return PerturbationEvidence(value, maximizer, m_hat, constant, gaps)


def check_martingale(model: MarketModel, measure: MartingaleMeasure) -> bool:
    """Independent exact recheck of the martingale-measure invariants."""
    tree = reachable(model)
    weights = measure.leaf_weights
    if any(w < 0 for w in weights.values()):
        return False
    if sum(weights.values()) != 1:
        return False
    for leaf, w in weights.items():
        if w > 0 and leaf not in tree:
            return False
    for node in model.lattice.non_terminal_nodes():
        for i in range(model.prices.assets):
            total = Fraction(0)
            for leaf, w in weights.items():
                if leaf[:len(node)] == node:
                    total += w * model.delta_s(node, leaf[len(node)])[i]
            if total != 0:
                return False
    return True
