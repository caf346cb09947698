"""No-arbitrage certification, local and global.

The local test at a node asks whether a direction h exists with
h . y >= 0 on every charged increment y and h . y0 >= 1 for some charged
y0; such an h is a one-step arbitrage and is returned as the
certificate. Global verdicts aggregate the local test over the relevant
tree: local no-arbitrage at every positive-mass node is equivalent to
global no-arbitrage on a finite lattice.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from . import lp
from .errors import ExplosionGuard
from .model import (MarketModel, Node, ProductPrior, enumeration_cap,
                    full_mixture_prior, pure_selections)
from .supports import (Point, SupportSet, prior_tree, reachable,
                       support_generator, support_prior, support_qs)


@dataclass(frozen=True)
class NaVerdict:
    holds: bool
    node: Optional[Node] = None  # failing node, when holds is False
    certificate: Optional[Tuple[Fraction, ...]] = None  # arbitrage direction h
    strict_point: Optional[Point] = None  # charged point with h . y > 0

    @staticmethod
    def ok() -> "NaVerdict":
        return NaVerdict(True)


def local_na(support: SupportSet) -> NaVerdict:
    """One-step no-arbitrage on a support set, with exact certificate.

    Solves one LP feasibility problem per candidate strict point: find h
    with h . y >= 0 for all charged y and h . y0 >= 1.
    """
    points = support.points
    if not points:
        raise ValueError("support set is empty")
    d = len(points[0])
    base = [(y, ">=", Fraction(0)) for y in points]
    for y0 in points:
        if all(c == 0 for c in y0):
            continue  # h . 0 >= 1 is impossible
        problem = lp.LinearProgram.build(
            "min", [Fraction(0)] * d, base + [(y0, ">=", Fraction(1))])
        out = lp.solve(problem)
        if out.status == lp.OPTIMAL:
            return NaVerdict(False, support.node, out.primal, y0)
    return NaVerdict.ok()


def global_na_qs(model: MarketModel) -> NaVerdict:
    """Quasi-sure no-arbitrage: local test at every reachable node."""
    tree = reachable(model)
    for node in model.lattice.non_terminal_nodes():
        if node not in tree:
            continue
        verdict = local_na(support_qs(model, node))
        if not verdict.holds:
            return verdict
    return NaVerdict.ok()


def na_prior(model: MarketModel, prior: ProductPrior) -> NaVerdict:
    """Classical no-arbitrage under a single product prior."""
    tree = prior_tree(model, prior)
    for node in model.lattice.non_terminal_nodes():
        if node not in tree:
            continue
        verdict = local_na(support_prior(model, prior, node))
        if not verdict.holds:
            return verdict
    return NaVerdict.ok()


FamilySpec = Union[str, Sequence[ProductPrior]]


def sna_family(model: MarketModel, family: FamilySpec = "all",
               cap: Optional[int] = None) -> NaVerdict:
    """No-arbitrage under every prior of the family.

    For the default family (the full convex hull, i.e. all support
    patterns) the quantifier collapses: an arbitrage certificate for a
    union of generator supports restricts to a certificate for one of the
    generators, so it suffices to test each generator alone at each
    reachable node. Explicit prior lists are checked one by one.
    """
    if isinstance(family, str):
        if family != "all":
            raise ValueError(f"unknown family spec {family!r}")
        tree = reachable(model)
        for node in model.lattice.non_terminal_nodes():
            if node not in tree:
                continue
            for i in range(len(model.generators_at(node))):
                verdict = local_na(support_generator(model, node, i))
                if not verdict.holds:
                    return verdict
        return NaVerdict.ok()
    cap = enumeration_cap(cap)
    if len(family) > cap:
        raise ExplosionGuard(len(family), cap)
    for prior in family:
        verdict = na_prior(model, prior)
        if not verdict.holds:
            return verdict
    return NaVerdict.ok()


def q_star(model: MarketModel, cap: Optional[int] = None) -> List[ProductPrior]:
    """Members of the family (pure selections plus the full mixture)
    under which classical no-arbitrage holds."""
    candidates = pure_selections(model, cap=cap) + [full_mixture_prior(model)]
    return [p for p in candidates if na_prior(model, p).holds]


def verify_certificate(support: SupportSet, verdict: NaVerdict) -> bool:
    """Recheck a failure certificate exactly against the support set."""
    if verdict.holds or verdict.certificate is None:
        return False
    h = verdict.certificate
    prods = [sum((a * b for a, b in zip(h, y)), Fraction(0)) for y in support.points]
    return all(p >= 0 for p in prods) and any(p > 0 for p in prods)
