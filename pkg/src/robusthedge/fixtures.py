"""Canonical test markets.

FIX-A is the minimal binomial market; FIX-B(N) is the one-period market
with a single down outcome and N up outcomes accumulating towards 1 from
above, one generator per up outcome; FIX-C is a one-period arbitrage
market; FIX-D is a seeded two-period binary market. FIX-B's robust price
N/(2N+1) increases strictly towards 1/2 without ever attaining it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import BadParameter
from .model import (Claim, Kernel, MarketModel, Node, PriceProcess,
                    ScenarioLattice)

FIXTURE_NAMES = ("FIX-A", "FIX-B", "FIX-C", "FIX-D")


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    param: Optional[int] = None  # FIX-B: truncation level N; FIX-D: seed


def _one_period(outcomes, s0, s1, generators, payoff) -> Tuple[MarketModel, Claim]:
    lattice = ScenarioLattice(1, (tuple(outcomes),))
    values: Dict[Node, Tuple[Fraction, ...]] = {(): (Fraction(s0),)}
    for o in outcomes:
        values[(o,)] = (Fraction(s1[o]),)
    model = MarketModel(lattice, PriceProcess(1, values), tuple(generators), {})
    return model, Claim({(o,): Fraction(payoff[o]) for o in outcomes})


def make_fix_a() -> Tuple[MarketModel, Claim]:
    half = Fraction(1, 2)
    return _one_period(
        ["u", "d"], 1, {"u": 2, "d": 0},
        [{"u": half, "d": half}],
        {"u": 1, "d": 0})


def make_fix_b(n_max: int) -> Tuple[MarketModel, Claim]:
    if n_max < 1:
        raise BadParameter(f"FIX-B needs N >= 1, got {n_max}")
    half = Fraction(1, 2)
    down = "-1"
    ups = [str(1 + Fraction(1, n)) for n in range(1, n_max + 1)]
    outcomes = [down] + ups
    s1 = {down: Fraction(-1)}
    s1.update({u: Fraction(u) for u in ups})
    generators: List[Kernel] = [
        {down: half, u: half} for u in ups
    ]
    payoff = {o: Fraction(1) if s1[o] >= 1 else Fraction(0) for o in outcomes}
    return _one_period(outcomes, 0, s1, generators, payoff)


def make_fix_c() -> Tuple[MarketModel, Claim]:
    half = Fraction(1, 2)
    return _one_period(
        ["z", "o"], 0, {"z": 0, "o": 1},
        [{"z": half, "o": half}],
        {"z": 0, "o": 1})


def make_fix_d(seed: int = 7) -> Tuple[MarketModel, Claim]:
    """Two periods, binary outcomes, two generator kernels per node.

    Child prices straddle the node price so every one-step support has a
    positive and a negative increment; with binary outcomes this is the
    only way for no-arbitrage to hold under every single generator, so
    the generators differ in weights rather than supports.
    """
    rng = random.Random(seed)
    lattice = ScenarioLattice(2, (("u", "d"), ("u", "d")))
    offsets = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    probs = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2),
             Fraction(2, 3), Fraction(3, 4)]

    values: Dict[Node, Tuple[Fraction, ...]] = {(): (Fraction(4),)}
    for node in [(), ("u",), ("d",)]:
        s = values[node][0]
        values[node + ("u",)] = (s + rng.choice(offsets),)
        values[node + ("d",)] = (s - rng.choice(offsets),)

    def two_kernels() -> Tuple[Kernel, Kernel]:
        a, b = rng.sample(probs, 2)
        return ({"u": a, "d": 1 - a}, {"u": b, "d": 1 - b})

    root_generators = two_kernels()
    kernel_sets = {("u",): two_kernels(), ("d",): two_kernels()}
    model = MarketModel(lattice, PriceProcess(1, values), root_generators,
                        kernel_sets)
    # call spread on the terminal price
    strike = values[()][0]
    payoff = {
        leaf: max(values[leaf][0] - strike, Fraction(0))
        for leaf in lattice.leaves()
    }
    return model, Claim(payoff)


def make_fixture(spec: FixtureSpec) -> Tuple[MarketModel, Claim]:
    if spec.name == "FIX-A":
        return make_fix_a()
    if spec.name == "FIX-B":
        if spec.param is None:
            raise BadParameter("FIX-B requires the truncation level N")
        return make_fix_b(spec.param)
    if spec.name == "FIX-C":
        return make_fix_c()
    if spec.name == "FIX-D":
        return make_fix_d(7 if spec.param is None else spec.param)
    raise BadParameter(f"unknown fixture {spec.name!r}")


@dataclass(frozen=True)
class TruncationRow:
    level: int
    price_robust: Fraction
    price_sup_mono: Fraction
    price_dual: Fraction


def truncation_report(levels) -> List[TruncationRow]:
    """Robust price, best mono-prior price, and dual value of FIX-B(N)
    for each truncation level: all equal N/(2N+1), approaching but never
    attaining the untruncated value 1/2."""
    from .duality import dual_sup
    from .model import pure_selections
    from .pricing import price_mono, price_quasi_sure

    rows = []
    for n in levels:
        model, claim = make_fix_b(n)
        robust = price_quasi_sure(model, claim).price
        sup_mono = max(
            price_mono(model, p, claim).price for p in pure_selections(model))
        dual_value = dual_sup(model, claim)[0]
        rows.append(TruncationRow(n, robust, sup_mono, dual_value))
    return rows
