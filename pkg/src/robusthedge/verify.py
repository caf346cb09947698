"""End-to-end verifier of the price-equality chain on a given market.

Every link is computed by its own code path (primal recursions on two
markets, mono-prior pricing of constructed priors, the martingale LP)
and compared with exact rational equality. A failing link therefore
certifies a defect, never a tolerance artifact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .arbitrage import global_na_qs, na_prior, sna_family
from .constructions import (build_phat, build_ptilde_family,
                            build_ptilde_measure, family_member,
                            na_repair_mixture)
from .duality import check_martingale, dual_sup_equivalent
from .errors import NoArbitrageViolation
from .model import (Claim, Kernel, MarketModel, Node, PriceProcess,
                    ProductPrior, ScenarioLattice, full_mixture_prior,
                    node_key, prior_measure, selection_count)
from .pricing import price_lower, price_mono, price_quasi_sure
from .supports import reachable, support_prior, support_qs

SAMPLE_SELECTIONS = 8
SAMPLE_FAMILY_MEMBERS = 6


@dataclass(frozen=True)
class ChainRecord:
    name: str
    left: str
    right: str
    passed: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class ChainReport:
    records: Tuple[ChainRecord, ...]
    passed: bool
    common_value: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "common_value": self.common_value,
            "records": [
                {"name": r.name, "left": r.left, "right": r.right,
                 "passed": r.passed, "witness": r.witness}
                for r in self.records
            ],
        }

    @staticmethod
    def from_dict(doc: dict) -> "ChainReport":
        return ChainReport(
            tuple(ChainRecord(r["name"], r["left"], r["right"], r["passed"],
                              r.get("witness"))
                  for r in doc["records"]),
            doc["passed"], doc.get("common_value"))


def _record(name, left, right, witness=None) -> ChainRecord:
    ok = left == right
    return ChainRecord(name, str(left), str(right), ok,
                       None if ok else witness)


def _sample_selection(model: MarketModel, rng: random.Random) -> ProductPrior:
    """Decode a uniformly drawn index into a pure generator selection."""
    nodes = list(model.lattice.non_terminal_nodes())
    sizes = [len(model.generators_at(n)) for n in nodes]

    def one_hot(i, n):
        return tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))

    picks = [rng.randrange(s) for s in sizes]
    root = one_hot(picks[0], sizes[0])
    node_mixtures = {
        n: one_hot(picks[k], sizes[k]) for k, n in enumerate(nodes) if n != ()
    }
    return ProductPrior(root, node_mixtures)


def verify_chain(model: MarketModel, claim: Claim,
                 lam: Fraction = Fraction(1, 2),
                 sample_seed: int = 0) -> ChainReport:
    """Run every price equality and structural check on one market."""
    verdict = global_na_qs(model)
    if not verdict.holds:
        raise NoArbitrageViolation(verdict.node, verdict.certificate)
    rng = random.Random(sample_seed)
    records: List[ChainRecord] = []

    v_qs = price_quasi_sure(model, claim).price
    fam_model = build_ptilde_family(model, lam)
    v_fam = price_quasi_sure(fam_model, claim).price
    records.append(_record("robust_price == mixed_family_price", v_qs, v_fam))

    v_fam_lower, _ = price_lower(fam_model, "all", claim)
    records.append(_record("mixed_family_price == mixed_family_lower_price",
                           v_fam, v_fam_lower))

    # the prior-by-prior supremum over the original family is attained by
    # the mixture charging every generator, which inherits no-arbitrage
    # from the quasi-sure condition even when single generators fail it
    v_lower = price_mono(model, full_mixture_prior(model), claim).price
    records.append(_record("lower_price == robust_price", v_lower, v_qs))

    # sup over no-arbitrage members of the family, sampled pure selections
    # plus the attained maximizer
    sup_mono = v_lower
    witness = None
    for _ in range(min(SAMPLE_SELECTIONS, selection_count(model))):
        prior = _sample_selection(model, rng)
        if not na_prior(model, prior).holds:
            continue
        value = price_mono(model, prior, claim).price
        if value > sup_mono:
            sup_mono, witness = value, "sampled selection exceeds the maximizer"
    records.append(_record("sup_mono_price == robust_price", sup_mono, v_qs,
                           witness))

    # the extreme prior is built over the mixed family, where classical
    # no-arbitrage holds generator by generator
    phat = build_phat(fam_model, "all", claim)
    v_phat = price_mono(fam_model, phat, claim).price
    records.append(_record("extreme_prior_price == robust_price", v_phat, v_qs))
    phat_na = na_prior(fam_model, phat).holds
    records.append(ChainRecord("extreme_prior_no_arbitrage", "holds",
                               "holds" if phat_na else "fails", phat_na))

    evidence = dual_sup_equivalent(model, claim, [1, 10, 100])
    records.append(_record("dual_value == robust_price", evidence.value, v_qs))
    measure_ok = check_martingale(model, evidence.maximizer)
    records.append(ChainRecord(
        "dual_measure_is_martingale", "valid",
        "valid" if measure_ok else "invalid", measure_ok))
    records.append(ChainRecord(
        "equivalent_class_gap_law", "c/n decay", "c/n decay",
        evidence.law_holds, None if evidence.law_holds else "gap law violated"))

    # structural checks on the constructed family
    ptilde = build_ptilde_measure(model)
    tree = reachable(model)
    supports_ok = all(
        support_prior(model, ptilde, n).points == support_qs(model, n).points
        for n in model.lattice.non_terminal_nodes() if n in tree
    )
    records.append(ChainRecord("support_completion_matches", "match",
                               "match" if supports_ok else "mismatch",
                               supports_ok))

    fam_supports_ok = all(
        support_qs(fam_model, n).points == support_qs(model, n).points
        for n in model.lattice.non_terminal_nodes() if n in tree
    )
    records.append(ChainRecord("mixed_family_same_polar_structure", "match",
                               "match" if fam_supports_ok else "mismatch",
                               fam_supports_ok))

    sna_ok = sna_family(fam_model, "all").holds
    records.append(ChainRecord("mixed_family_classical_no_arbitrage", "holds",
                               "holds" if sna_ok else "fails", sna_ok))

    member_ok = True
    for _ in range(SAMPLE_FAMILY_MEMBERS):
        lam_s = Fraction(rng.randint(1, 16), 16)
        mixtures = {}
        for n in model.lattice.non_terminal_nodes():
            g = len(model.generators_at(n))
            raw = [rng.randint(0, 3) for _ in range(g)]
            if sum(raw) == 0:
                raw[rng.randrange(g)] = 1
            total = sum(raw)
            mixtures[n] = tuple(Fraction(w, total) for w in raw)
        member = family_member(model, lam_s, mixtures)
        member_ok = member_ok and na_prior(model, member).holds and all(
            support_prior(model, member, n).points == support_qs(model, n).points
            for n in model.lattice.non_terminal_nodes() if n in tree
        )
    records.append(ChainRecord("mixed_family_members_full_support", "ok",
                               "ok" if member_ok else "violated", member_ok))

    domination_ok = True
    for _ in range(min(4, selection_count(model))):
        q = _sample_selection(model, rng)
        repaired = na_repair_mixture(model, q)
        q_mass = prior_measure(model, q)
        r_mass = prior_measure(model, repaired)
        domination_ok = domination_ok and na_prior(model, repaired).holds and all(
            r_mass[leaf] > 0 for leaf, w in q_mass.items() if w > 0
        )
    records.append(ChainRecord("repair_mixture_dominates", "ok",
                               "ok" if domination_ok else "violated",
                               domination_ok))

    passed = all(r.passed for r in records)
    return ChainReport(tuple(records), passed, str(v_qs))


# ---------------------------------------------------------------------------
# random instance generation
# ---------------------------------------------------------------------------

_LABELS = ("o1", "o2", "o3", "o4")
_DENOMS = (1, 2, 4, 8, 16)


def random_market(rng: random.Random, max_horizon: int = 3, max_outcomes: int = 4,
                  max_assets: int = 2, max_generators: int = 3,
                  inject_arbitrage: bool = False) -> Tuple[MarketModel, Claim]:
    """A random small-denominator market, biased towards no-arbitrage by
    making the first asset's increments straddle zero at every node."""
    horizon = rng.randint(1, max_horizon)
    assets = rng.randint(1, max_assets)
    periods = tuple(
        tuple(_LABELS[:rng.randint(2, max_outcomes)]) for _ in range(horizon))
    lattice = ScenarioLattice(horizon, periods)

    def rand_fraction(lo: int, hi: int) -> Fraction:
        return Fraction(rng.randint(lo, hi), rng.choice(_DENOMS))

    values: Dict[Node, Tuple[Fraction, ...]] = {
        (): tuple(rand_fraction(-4, 8) for _ in range(assets))
    }
    for node in lattice.non_terminal_nodes():
        outcomes = lattice.outcomes_after(node)
        here = values[node]
        steps = {
            o: [rand_fraction(-4, 4) for _ in range(assets)] for o in outcomes
        }
        if not any(s[0] > 0 for s in steps.values()):
            steps[outcomes[0]][0] = Fraction(1, rng.choice(_DENOMS))
        if not any(s[0] < 0 for s in steps.values()):
            steps[outcomes[-1]][0] = Fraction(-1, rng.choice(_DENOMS))
        for o in outcomes:
            values[node + (o,)] = tuple(a + b for a, b in zip(here, steps[o]))

    if inject_arbitrage:
        # all first-asset increments nonnegative at the root, one positive
        here = values[()]
        for k, o in enumerate(lattice.outcomes_after(())):
            bump = Fraction(rng.randint(1 if k == 0 else 0, 3),
                            rng.choice(_DENOMS))
            old = values[(o,)]
            values[(o,)] = (here[0] + bump,) + old[1:]
            diff = values[(o,)][0] - old[0]
            # shift the whole subtree so later increments are unchanged
            for node in list(values):
                if len(node) > 1 and node[0] == o:
                    values[node] = (values[node][0] + diff,) + values[node][1:]

    def random_kernel(outcomes) -> Kernel:
        raw = [rng.randint(0, 4) for _ in outcomes]
        if sum(raw) == 0:
            raw[rng.randrange(len(outcomes))] = 1
        total = sum(raw)
        return {o: Fraction(w, total) for o, w in zip(outcomes, raw)}

    root_generators = tuple(
        random_kernel(periods[0]) for _ in range(rng.randint(1, max_generators)))
    kernel_sets = {}
    for node in lattice.non_terminal_nodes():
        if node == ():
            continue
        kernel_sets[node] = tuple(
            random_kernel(lattice.outcomes_after(node))
            for _ in range(rng.randint(1, max_generators)))

    model = MarketModel(lattice, PriceProcess(assets, values), root_generators,
                        kernel_sets)
    claim = Claim({
        leaf: rand_fraction(-8, 8) for leaf in lattice.leaves()
    })
    return model, claim


@dataclass(frozen=True)
class RandomSummary:
    requested: int
    verified: int
    passed: int
    rejected_arbitrage: int
    failures: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "requested": self.requested,
            "verified": self.verified,
            "passed": self.passed,
            "rejected_arbitrage": self.rejected_arbitrage,
            "failures": list(self.failures),
        }


def verify_random(count: int, seed: int, max_horizon: int = 3,
                  max_outcomes: int = 4, max_assets: int = 2,
                  max_generators: int = 3) -> RandomSummary:
    """Verify the chain on `count` random no-arbitrage markets.

    Markets failing quasi-sure no-arbitrage are rejected and counted.
    Deterministic for a fixed seed.
    """
    rng = random.Random(seed)
    verified = passed = rejected = 0
    failures: List[str] = []
    while verified < count:
        model, claim = random_market(rng, max_horizon, max_outcomes,
                                     max_assets, max_generators)
        if not global_na_qs(model).holds:
            rejected += 1
            continue
        report = verify_chain(model, claim, sample_seed=seed + verified)
        verified += 1
        if report.passed:
            passed += 1
        else:
            first = next(r for r in report.records if not r.passed)
            failures.append(
                f"instance {verified}: {first.name}: {first.left} != {first.right}")
    return RandomSummary(count, verified, passed, rejected, tuple(failures))
