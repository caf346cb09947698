"""Super-replication prices by backward recursion on the lattice.

Each step solves the exact one-period hedging LP
``min x  s.t.  x + h . y_j >= v_j`` over the charged increments of the
node. The recursion runs only on nodes with positive mass under the
relevant family or prior; values elsewhere are deliberately undefined.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import lp
from .arbitrage import FamilySpec, global_na_qs, na_prior, sna_family
from .errors import NoArbitrageViolation, UnboundedBelow
from .model import (Claim, HedgingStrategy, MarketModel, Node, ProductPrior,
                    full_mixture_prior, mixed_kernel)
from .supports import Point, SupportSet, prior_tree, reachable, support_prior, support_qs

QUASI_SURE = "quasi_sure"
MONO_PRIOR = "mono_prior"
LOWER = "lower"


@dataclass(frozen=True)
class PriceReport:
    price: Fraction
    strategy: HedgingStrategy
    node_values: Dict[Node, Fraction]
    semantics: str  # quasi_sure | mono_prior | lower


def one_step_superhedge(
    support: SupportSet, continuation: Dict[Point, Fraction]
) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """Cheapest one-period super-hedge of a continuation over a support set."""
    points = support.points
    if not points:
        raise ValueError("support set is empty")
    d = len(points[0])
    rows = [
        ((Fraction(1),) + y, ">=", continuation[y]) for y in points
    ]
    problem = lp.LinearProgram.build(
        "min", (Fraction(1),) + (Fraction(0),) * d, rows)
    out = lp.solve(problem)
    if out.status == lp.UNBOUNDED:
        raise UnboundedBelow(f"hedging LP unbounded at node {support.node}")
    assert out.status == lp.OPTIMAL  # feasible: x large enough always works
    return out.value, out.primal[1:]


def _recurse(model: MarketModel, claim: Claim, tree, support_of) -> PriceReport:
    """Shared backward recursion over a positive-mass tree."""
    values: Dict[Node, Fraction] = {}
    positions: Dict[Node, Tuple[Fraction, ...]] = {}
    horizon = model.lattice.horizon
    nodes = [n for n in model.lattice.nodes() if n in tree]
    for node in sorted(nodes, key=len, reverse=True):
        if len(node) == horizon:
            values[node] = claim.payoff[node]
            continue
        support = support_of(node)
        continuation: Dict[Point, Fraction] = {}
        for point in support.points:
            # several outcomes may share an increment; hedge against the worst
            continuation[point] = max(
                values[node + (o,)] for o in support.point_outcomes[point]
            )
        try:
            value, h = one_step_superhedge(support, continuation)
        except UnboundedBelow:
            raise NoArbitrageViolation(node)
        values[node] = value
        positions[node] = h
    strategy = HedgingStrategy(values[()], positions)
    return PriceReport(values[()], strategy, values, "")


def price_quasi_sure(model: MarketModel, claim: Claim) -> PriceReport:
    """Quasi-sure super-replication price over the full prior family."""
    verdict = global_na_qs(model)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)
    report = _recurse(model, claim, reachable(model),
                      lambda node: support_qs(model, node))
    return PriceReport(report.price, report.strategy, report.node_values, QUASI_SURE)


def price_mono(model: MarketModel, prior: ProductPrior, claim: Claim) -> PriceReport:
    """Mono-prior super-replication price on the prior's support tree."""
    verdict = na_prior(model, prior)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)
    report = _recurse(model, claim, prior_tree(model, prior),
                      lambda node: support_prior(model, prior, node))
    return PriceReport(report.price, report.strategy, report.node_values, MONO_PRIOR)


def price_lower(
    model: MarketModel, family: FamilySpec, claim: Claim,
    cap: Optional[int] = None,
) -> Tuple[Fraction, ProductPrior]:
    """Prior-by-prior price: the largest mono-prior price over the family.

    The mono-prior price is monotone in the support pattern (enlarging a
    node's charged set only adds hedging constraints), so over the full
    hull the maximum is attained by the mixture charging every generator.
    Explicit pattern families are maximized by enumeration.
    """
    verdict = sna_family(model, family, cap=cap)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)
    if isinstance(family, str):
        best_prior = full_mixture_prior(model)
        return price_mono(model, best_prior, claim).price, best_prior
    best: Optional[Tuple[Fraction, ProductPrior]] = None
    for prior in family:
        value = price_mono(model, prior, claim).price
        if best is None or value > best[0]:
            best = (value, prior)
    if best is None:
        raise ValueError("family is empty")
    return best


def check_super_replication(
    model: MarketModel, claim: Claim, report: PriceReport,
    prior: Optional[ProductPrior] = None,
) -> bool:
    """Exact leaf-by-leaf domination check of a price report's strategy."""
    tree = reachable(model) if prior is None else prior_tree(model, prior)
    for leaf in model.lattice.leaves():
        if leaf not in tree:
            continue
        if report.strategy.terminal_wealth(model, leaf) < claim.payoff[leaf]:
            return False
    return True
