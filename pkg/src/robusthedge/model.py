"""Finite scenario-lattice market model with exact rational data.

A market is a product lattice of outcome alphabets, an adapted price
process, and at every non-terminal node a finite list of generator
kernels whose convex hull is the set of admissible one-step priors.
All numbers are ``fractions.Fraction``; nothing in the core is ever
rounded.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import ExplosionGuard, ParseError, ShapeMismatch, ValidationError

# A node is the path of outcome labels leading to it; the root is ().
Node = Tuple[str, ...]
# A kernel assigns a weight to every outcome of the next period.
Kernel = Dict[str, Fraction]

DEFAULT_CAP = 1_000_000

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def enumeration_cap(cap: Optional[int] = None) -> int:
    """Effective enumeration cap: explicit arg, else ROBUSTHEDGE_CAP, else default."""
    if cap is not None:
        return cap
    env = os.environ.get("ROBUSTHEDGE_CAP")
    return int(env) if env else DEFAULT_CAP


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" with optional leading sign; q must be positive."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise ParseError(f"not a rational string: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in rational string: {text!r}")


def format_rational(x: Fraction) -> str:
    """Render a Fraction as a gcd-reduced "p/q" or "p" string."""
    return str(x)


def node_key(node: Node) -> str:
    """Outcome labels joined by "/"; the root is the empty string."""
    return "/".join(node)


def key_node(key: str) -> Node:
    return tuple(key.split("/")) if key else ()


@dataclass(frozen=True)
class ScenarioLattice:
    """Product lattice Omega_1 x ... x Omega_T of finite outcome alphabets."""

    horizon: int
    periods: Tuple[Tuple[str, ...], ...]

    def nodes(self) -> Iterator[Node]:
        """All nodes, root first, in breadth-first lexicographic order."""
        level: List[Node] = [()]
        yield ()
        for t in range(self.horizon):
            level = [n + (o,) for n in level for o in self.periods[t]]
            yield from level

    def non_terminal_nodes(self) -> Iterator[Node]:
        for n in self.nodes():
            if len(n) < self.horizon:
                yield n

    def leaves(self) -> Iterator[Node]:
        for combo in product(*self.periods):
            yield tuple(combo)

    def outcomes_after(self, node: Node) -> Tuple[str, ...]:
        return self.periods[len(node)]


@dataclass(frozen=True)
class PriceProcess:
    """Adapted discounted price vectors, one per lattice node."""

    assets: int
    values: Dict[Node, Tuple[Fraction, ...]]


@dataclass(frozen=True)
class MarketModel:
    lattice: ScenarioLattice
    prices: PriceProcess
    root_generators: Tuple[Kernel, ...]
    kernel_sets: Dict[Node, Tuple[Kernel, ...]]

    def generators_at(self, node: Node) -> Tuple[Kernel, ...]:
        """Generator kernels of the one-step prior set at a non-terminal node."""
        if len(node) >= self.lattice.horizon:
            raise ValueError(f"terminal node has no kernel set: {node_key(node)!r}")
        if not node:
            return self.root_generators
        return self.kernel_sets[node]

    def price(self, node: Node) -> Tuple[Fraction, ...]:
        return self.prices.values[node]

    def delta_s(self, node: Node, outcome: str) -> Tuple[Fraction, ...]:
        """One-step price increment along the edge node -> node + (outcome,)."""
        here = self.prices.values[node]
        there = self.prices.values[node + (outcome,)]
        return tuple(b - a for a, b in zip(here, there))


@dataclass(frozen=True)
class Claim:
    """Discounted payoff, defined on every terminal node."""

    payoff: Dict[Node, Fraction]


@dataclass(frozen=True)
class HedgingStrategy:
    """Initial capital plus one holding vector per non-terminal node."""

    initial_capital: Fraction
    positions: Dict[Node, Tuple[Fraction, ...]]

    def terminal_wealth(self, model: MarketModel, leaf: Node) -> Fraction:
        wealth = self.initial_capital
        for t in range(len(leaf)):
            node, outcome = leaf[:t], leaf[t]
            h = self.positions.get(node)
            if h is None:
                continue
            ds = model.delta_s(node, outcome)
            wealth += sum(a * b for a, b in zip(h, ds))
        return wealth


@dataclass(frozen=True)
class ProductPrior:
    """A disintegrated prior: mixture weights over generators at every node."""

    root_mixture: Tuple[Fraction, ...]
    node_mixtures: Dict[Node, Tuple[Fraction, ...]]

    def mixture_at(self, node: Node) -> Tuple[Fraction, ...]:
        return self.root_mixture if not node else self.node_mixtures[node]


def _check_mixture(weights: Sequence[Fraction], n_gens: int, where: str) -> None:
    if len(weights) != n_gens:
        raise ShapeMismatch(f"{where}: {len(weights)} weights for {n_gens} generators")
    if any(w < 0 for w in weights):
        raise ShapeMismatch(f"{where}: negative mixture weight")
    if sum(weights) != 1:
        raise ShapeMismatch(f"{where}: mixture weights sum to {sum(weights)}, not 1")


def check_prior_shape(model: MarketModel, prior: ProductPrior) -> None:
    _check_mixture(prior.root_mixture, len(model.root_generators), "root")
    for node in model.lattice.non_terminal_nodes():
        if node == ():
            continue
        if node not in prior.node_mixtures:
            raise ShapeMismatch(f"missing node mixture at {node_key(node)!r}")
        _check_mixture(prior.node_mixtures[node], len(model.generators_at(node)),
                       node_key(node))


def mixed_kernel(model: MarketModel, prior: ProductPrior, node: Node) -> Kernel:
    """The induced one-step kernel of the prior at a non-terminal node."""
    gens = model.generators_at(node)
    weights = prior.mixture_at(node)
    out: Kernel = {}
    for o in model.lattice.outcomes_after(node):
        out[o] = sum((w * g.get(o, Fraction(0)) for w, g in zip(weights, gens)),
                     Fraction(0))
    return out


def prior_measure(model: MarketModel, prior: ProductPrior) -> Dict[Node, Fraction]:
    """Leaf weights of the product measure induced by the prior.

    The weight of a leaf is the product of the mixed kernel weights along
    its path; weights are nonnegative and sum exactly to 1.
    """
    check_prior_shape(model, prior)
    masses: Dict[Node, Fraction] = {(): Fraction(1)}
    for node in model.lattice.non_terminal_nodes():
        kernel = mixed_kernel(model, prior, node)
        for o in model.lattice.outcomes_after(node):
            masses[node + (o,)] = masses[node] * kernel[o]
    return {leaf: masses[leaf] for leaf in model.lattice.leaves()}


def full_mixture_prior(model: MarketModel) -> ProductPrior:
    """The uniform mixture of all generators at the root and at every node."""

    def uniform(n: int) -> Tuple[Fraction, ...]:
        return tuple(Fraction(1, n) for _ in range(n))

    node_mixtures = {
        node: uniform(len(model.generators_at(node)))
        for node in model.lattice.non_terminal_nodes() if node != ()
    }
    return ProductPrior(uniform(len(model.root_generators)), node_mixtures)


def selection_count(model: MarketModel) -> int:
    count = len(model.root_generators)
    for node in model.lattice.non_terminal_nodes():
        if node != ():
            count *= len(model.generators_at(node))
    return count


def pure_selections(model: MarketModel, cap: Optional[int] = None) -> List[ProductPrior]:
    """All priors choosing exactly one generator at the root and at each node."""
    cap = enumeration_cap(cap)
    count = selection_count(model)
    if count > cap:
        raise ExplosionGuard(count, cap)

    inner = [n for n in model.lattice.non_terminal_nodes() if n != ()]

    def one_hot(i: int, n: int) -> Tuple[Fraction, ...]:
        return tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))

    selections = []
    sizes = [len(model.root_generators)] + [len(model.generators_at(n)) for n in inner]
    for combo in product(*(range(s) for s in sizes)):
        root_mix = one_hot(combo[0], sizes[0])
        node_mixtures = {
            node: one_hot(combo[k + 1], sizes[k + 1]) for k, node in enumerate(inner)
        }
        selections.append(ProductPrior(root_mix, node_mixtures))
    return selections


# ---------------------------------------------------------------------------
# market file ingestion / emission
# ---------------------------------------------------------------------------

def _parse_weight_map(raw, outcomes: Sequence[str], path: str) -> Kernel:
    if not isinstance(raw, dict):
        raise ValidationError(path, "kernel must be a map outcome -> rational string")
    kernel: Kernel = {}
    for o, val in raw.items():
        if o not in outcomes:
            raise ValidationError(f"{path}/{o}", "unknown outcome label")
        try:
            w = parse_rational(val)
        except ParseError as exc:
            raise ValidationError(f"{path}/{o}", str(exc))
        if w < 0:
            raise ValidationError(f"{path}/{o}", "negative kernel weight")
        kernel[o] = w
    for o in outcomes:
        kernel.setdefault(o, Fraction(0))
    total = sum(kernel.values())
    if total != 1:
        raise ValidationError(path, f"kernel weights sum to {total}, not 1")
    return kernel


def read_market(data: bytes) -> Tuple[MarketModel, Optional[Claim]]:
    """Parse and validate a UTF-8 JSON market file.

    Returns the model and the claim when the file carries one.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed market file: {exc}")
    if not isinstance(doc, dict):
        raise ParseError("market file must be a JSON object")

    horizon = doc.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise ValidationError("horizon", "must be an integer >= 1")
    assets = doc.get("assets")
    if not isinstance(assets, int) or assets < 1:
        raise ValidationError("assets", "must be an integer >= 1")

    periods_raw = doc.get("periods")
    if not isinstance(periods_raw, list) or len(periods_raw) != horizon:
        raise ValidationError("periods", f"must list exactly {horizon} periods")
    periods = []
    for t, p in enumerate(periods_raw):
        outcomes = p.get("outcomes") if isinstance(p, dict) else None
        if not isinstance(outcomes, list) or not outcomes:
            raise ValidationError(f"periods/{t}", "outcomes must be a nonempty list")
        if len(set(outcomes)) != len(outcomes):
            raise ValidationError(f"periods/{t}", "outcome labels must be distinct")
        periods.append(tuple(str(o) for o in outcomes))
    lattice = ScenarioLattice(horizon, tuple(periods))

    prices_raw = doc.get("prices")
    if not isinstance(prices_raw, dict):
        raise ValidationError("prices", "must be a map node-key -> price vector")
    values: Dict[Node, Tuple[Fraction, ...]] = {}
    for node in lattice.nodes():
        key = node_key(node)
        if key not in prices_raw:
            raise ValidationError(f"prices/{key}", "missing node price")
        vec = prices_raw[key]
        if not isinstance(vec, list) or len(vec) != assets:
            raise ValidationError(f"prices/{key}", f"price vector must have {assets} entries")
        try:
            values[node] = tuple(parse_rational(v) for v in vec)
        except ParseError as exc:
            raise ValidationError(f"prices/{key}", str(exc))
    prices = PriceProcess(assets, values)

    gens_raw = doc.get("root_generators")
    if not isinstance(gens_raw, list) or not gens_raw:
        raise ValidationError("root_generators", "must be a nonempty list of kernels")
    root_generators = tuple(
        _parse_weight_map(g, periods[0], f"root_generators/{i}")
        for i, g in enumerate(gens_raw)
    )

    kernels_raw = doc.get("kernels", {})
    if not isinstance(kernels_raw, dict):
        raise ValidationError("kernels", "must be a map node-key -> list of kernels")
    kernel_sets: Dict[Node, Tuple[Kernel, ...]] = {}
    for node in lattice.non_terminal_nodes():
        if node == ():
            continue
        key = node_key(node)
        if key not in kernels_raw:
            raise ValidationError(f"kernels/{key}", "missing kernel set")
        raw_list = kernels_raw[key]
        if not isinstance(raw_list, list) or not raw_list:
            raise ValidationError(f"kernels/{key}", "kernel set must be a nonempty list")
        kernel_sets[node] = tuple(
            _parse_weight_map(k, periods[len(node)], f"kernels/{key}/{i}")
            for i, k in enumerate(raw_list)
        )

    claim = None
    if "claim" in doc:
        claim_raw = doc["claim"]
        if not isinstance(claim_raw, dict):
            raise ValidationError("claim", "must be a map leaf-key -> rational string")
        payoff: Dict[Node, Fraction] = {}
        for leaf in lattice.leaves():
            key = node_key(leaf)
            if key not in claim_raw:
                raise ValidationError(f"claim/{key}", "missing leaf payoff")
            try:
                payoff[leaf] = parse_rational(claim_raw[key])
            except ParseError as exc:
                raise ValidationError(f"claim/{key}", str(exc))
        claim = Claim(payoff)

    return MarketModel(lattice, prices, root_generators, kernel_sets), claim


def load_market(data: bytes) -> MarketModel:
    """Parse a market file, discarding the claim if present."""
    return read_market(data)[0]


def market_to_dict(model: MarketModel, claim: Optional[Claim] = None) -> dict:
    """Serialize back to the market-file schema (rationals gcd-reduced)."""
    doc = {
        "horizon": model.lattice.horizon,
        "assets": model.prices.assets,
        "periods": [{"outcomes": list(p)} for p in model.lattice.periods],
        "prices": {
            node_key(n): [format_rational(x) for x in v]
            for n, v in sorted(model.prices.values.items())
        },
        "root_generators": [
            {o: format_rational(w) for o, w in g.items()} for g in model.root_generators
        ],
        "kernels": {
            node_key(n): [{o: format_rational(w) for o, w in g.items()} for g in gens]
            for n, gens in sorted(model.kernel_sets.items())
        },
    }
    if claim is not None:
        doc["claim"] = {
            node_key(leaf): format_rational(claim.payoff[leaf])
            for leaf in model.lattice.leaves()
        }
    return doc


def dump_market(model: MarketModel, claim: Optional[Claim] = None) -> bytes:
    return json.dumps(market_to_dict(model, claim), indent=2).encode("utf-8")


def prior_to_dict(prior: ProductPrior) -> dict:
    return {
        "root_mixture": [format_rational(w) for w in prior.root_mixture],
        "node_mixtures": {
            node_key(n): [format_rational(w) for w in ws]
            for n, ws in sorted(prior.node_mixtures.items())
        },
    }


def prior_from_dict(doc: dict) -> ProductPrior:
    try:
        root = tuple(parse_rational(w) for w in doc["root_mixture"])
        nodes = {
            key_node(k): tuple(parse_rational(w) for w in ws)
            for k, ws in doc.get("node_mixtures", {}).items()
        }
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed prior document: {exc}")
    return ProductPrior(root, nodes)
