"""Constructive priors: the support-completing kernel mixture, the mixed
family built from it, the extreme prior attaining the robust price, and
the no-arbitrage repair mixture.

The support-completing kernel at a node enumerates the charged increment
points in lexicographic order, picks for each the first generator
charging it, and mixes the picks with geometrically decaying weights
(renormalized over the finite enumeration). Its support therefore equals
the joint support of the whole generator set at that node.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import lp
from .arbitrage import FamilySpec, global_na_qs, sna_family
from .errors import ExplosionGuard, LambdaOutOfRange, NoArbitrageViolation
from .model import (Claim, Kernel, MarketModel, Node, ProductPrior,
                    enumeration_cap, full_mixture_prior, mixed_kernel, node_key)
from .pricing import price_lower, price_mono
from .supports import support_qs

# global-pattern enumeration beyond this is pointless: the attained
# maximizer alone already realizes the extreme prior's contract
PHAT_ENUM_LIMIT = 64


def _mix_kernels(weighted: Sequence[Tuple[Fraction, Kernel]]) -> Kernel:
    out: Kernel = {}
    for w, kernel in weighted:
        for o, p in kernel.items():
            out[o] = out.get(o, Fraction(0)) + w * p
    return out


def _ptilde_mixture(model: MarketModel, node: Node) -> Tuple[Fraction, ...]:
    """Generator mixture weights of the support-completing kernel at a node."""
    gens = model.generators_at(node)
    support = support_qs(model, node)
    m = len(support.points)
    weights = [Fraction(0)] * len(gens)
    for n, point in enumerate(support.points, start=1):
        outcomes = set(support.point_outcomes[point])
        pick = next(
            i for i, g in enumerate(gens)
            if any(g.get(o, 0) > 0 for o in outcomes)
        )
        # 2^-n renormalized over the finite enumeration of support points
        weights[pick] += Fraction(2 ** (m - n), 2 ** m - 1)
    return tuple(weights)


def build_ptilde_kernel(model: MarketModel, node: Node) -> Kernel:
    """The node's support-completing kernel; its increment support equals
    the joint support of all generators at the node."""
    gens = model.generators_at(node)
    return _mix_kernels(list(zip(_ptilde_mixture(model, node), gens)))


def build_ptilde_measure(model: MarketModel) -> ProductPrior:
    """Product of the support-completing kernels over all nodes."""
    node_mixtures = {
        node: _ptilde_mixture(model, node)
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return ProductPrior(_ptilde_mixture(model, ()), node_mixtures)


@dataclass(frozen=True)
class AugmentedKernelSet:
    """A node's generators mixed with its support-completing kernel."""

    node: Node
    base: Tuple[Kernel, ...]
    ptilde: Kernel
    lam: Fraction
    mixed_generators: Tuple[Kernel, ...]


def augment_kernel_set(model: MarketModel, node: Node,
                       lam: Fraction) -> AugmentedKernelSet:
    if not 0 < lam <= 1:
        raise LambdaOutOfRange(f"lambda must be in (0, 1], got {lam}")
    base = model.generators_at(node)
    ptilde = build_ptilde_kernel(model, node)
    mixed = tuple(
        _mix_kernels([(lam, ptilde), (1 - lam, g)]) for g in base
    )
    return AugmentedKernelSet(node, base, ptilde, Fraction(lam), mixed)


def build_ptilde_family(model: MarketModel, lam: Fraction) -> MarketModel:
    """Market whose generators are the lambda-mixed kernels at every node.

    Every member kernel then charges the full joint support, so supports
    and prices of the new market do not depend on lambda in (0, 1].
    """
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise LambdaOutOfRange(f"lambda must be in (0, 1], got {lam}")
    root = augment_kernel_set(model, (), lam).mixed_generators
    kernel_sets = {
        node: augment_kernel_set(model, node, lam).mixed_generators
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return MarketModel(model.lattice, model.prices, root, kernel_sets)


def family_member(model: MarketModel, lam: Fraction,
                  generator_mixtures: Dict[Node, Tuple[Fraction, ...]]) -> ProductPrior:
    """A member of the mixed family as a prior over the original generators:
    lambda * ptilde + (1 - lambda) * (given generator mixture) at each node."""
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise LambdaOutOfRange(f"lambda must be in (0, 1], got {lam}")

    def mix(node: Node) -> Tuple[Fraction, ...]:
        pt = _ptilde_mixture(model, node)
        q = generator_mixtures[node]
        return tuple(lam * a + (1 - lam) * b for a, b in zip(pt, q))

    node_mixtures = {
        node: mix(node)
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return ProductPrior(mix(()), node_mixtures)


def _pattern_representative(model: MarketModel,
                            pattern: Dict[Node, Tuple[int, ...]]) -> ProductPrior:
    """Uniform mixture over the chosen generator subset at each node."""

    def weights(node: Node) -> Tuple[Fraction, ...]:
        chosen = pattern[node]
        n = len(model.generators_at(node))
        return tuple(
            Fraction(1, len(chosen)) if i in chosen else Fraction(0)
            for i in range(n)
        )

    node_mixtures = {
        node: weights(node)
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return ProductPrior(weights(()), node_mixtures)


def enumerate_patterns(model: MarketModel,
                       limit: int) -> Optional[List[Dict[Node, Tuple[int, ...]]]]:
    """All support patterns (nonempty generator subsets per node), or None
    when their number exceeds the limit."""
    nodes = list(model.lattice.non_terminal_nodes())
    subsets_per_node = []
    count = 1
    for node in nodes:
        g = len(model.generators_at(node))
        subsets = [
            tuple(i for i in range(g) if mask >> i & 1)
            for mask in range(1, 2 ** g)
        ]
        subsets.sort()
        subsets_per_node.append(subsets)
        count *= len(subsets)
        if count > limit:
            return None
    return [dict(zip(nodes, combo)) for combo in product(*subsets_per_node)]


def build_phat(model: MarketModel, family: FamilySpec, claim: Claim,
               cap: Optional[int] = None) -> ProductPrior:
    """The extreme prior: a geometric nodewise mixture of pattern
    representatives ordered by descending mono-prior price.

    Includes the attained maximizer with the largest weight, so its
    mono-prior price equals the robust price and no-arbitrage holds.
    When the pattern space is too large to enumerate, the maximizer alone
    is used (the maximum is attained, so the mixture is then a singleton).
    """
    verdict = sna_family(model, family, cap=cap)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)

    if isinstance(family, str):
        patterns = enumerate_patterns(model, min(enumeration_cap(cap), PHAT_ENUM_LIMIT))
        if patterns is None:
            representatives = [price_lower(model, family, claim, cap=cap)[1]]
        else:
            scored = []
            for pattern in patterns:
                rep = _pattern_representative(model, pattern)
                price = price_mono(model, rep, claim).price
                encoding = tuple(pattern[n] for n in model.lattice.non_terminal_nodes())
                scored.append((price, encoding, rep))
            scored.sort(key=lambda item: (-item[0], item[1]))
            representatives = [rep for _, _, rep in scored]
    else:
        scored = [
            (price_mono(model, prior, claim).price, i, prior)
            for i, prior in enumerate(family)
        ]
        scored.sort(key=lambda item: (-item[0], item[1]))
        representatives = [prior for _, _, prior in scored]

    k = len(representatives)
    mix_weights = [Fraction(2 ** (k - n), 2 ** k - 1) for n in range(1, k + 1)]

    def combine(values: List[Tuple[Fraction, ...]]) -> Tuple[Fraction, ...]:
        width = len(values[0])
        return tuple(
            sum((w * v[j] for w, v in zip(mix_weights, values)), Fraction(0))
            for j in range(width)
        )

    root = combine([p.root_mixture for p in representatives])
    node_mixtures = {
        node: combine([p.node_mixtures[node] for p in representatives])
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return ProductPrior(root, node_mixtures)


def na_repair_mixture(model: MarketModel, prior: ProductPrior) -> ProductPrior:
    """Half-and-half nodewise mixture of a given prior with the
    support-completing product measure. Dominates the given prior,
    restores no-arbitrage, and has the family's full supports."""
    verdict = global_na_qs(model)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)
    ptilde = build_ptilde_measure(model)
    half = Fraction(1, 2)

    def mix(a: Tuple[Fraction, ...], b: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
        return tuple(half * x + half * y for x, y in zip(a, b))

    node_mixtures = {
        node: mix(prior.node_mixtures[node], ptilde.node_mixtures[node])
        for node in ptilde.node_mixtures
    }
    return ProductPrior(mix(prior.root_mixture, ptilde.root_mixture), node_mixtures)


@dataclass(frozen=True)
class KernelPrior:
    """A disintegrated measure given by raw one-step kernels per node
    (root included under the empty path), not tied to the generators."""

    kernels: Dict[Node, Kernel]


def hull_membership(
    model: MarketModel, prior: Union[ProductPrior, KernelPrior]
) -> Tuple[bool, Dict[str, bool]]:
    """Is each induced one-step kernel a convex combination of the node's
    generators? Checked by exact LP feasibility at every node."""
    per_node: Dict[str, bool] = {}
    overall = True
    for node in model.lattice.non_terminal_nodes():
        if isinstance(prior, KernelPrior):
            kernel = prior.kernels[node]
        else:
            kernel = mixed_kernel(model, prior, node)
        gens = model.generators_at(node)
        outcomes = model.lattice.outcomes_after(node)
        rows = [
            (tuple(g.get(o, Fraction(0)) for g in gens), "=",
             kernel.get(o, Fraction(0)))
            for o in outcomes
        ]
        rows.append((tuple(Fraction(1) for _ in gens), "=", Fraction(1)))
        problem = lp.LinearProgram.build(
            "min", [Fraction(0)] * len(gens), rows,
            bounds=[(Fraction(0), None)] * len(gens))
        member = lp.solve(problem).status == lp.OPTIMAL
        per_node[node_key(node)] = member
        overall = overall and member
    return overall, per_node
