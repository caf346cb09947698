"""Acceptance gate: the eight release criteria, checked exactly.

Every equality below is exact rational comparison; runtime budgets are
asserted where the criterion states one. Each test is one criterion.
"""
import random
import time
from fractions import Fraction

from robusthedge.arbitrage import global_na_qs, local_na, na_prior
from robusthedge.constructions import (build_phat, build_ptilde_family,
                                       build_ptilde_measure, family_member,
                                       hull_membership)
from robusthedge.duality import dual_sup, dual_sup_equivalent
from robusthedge.fixtures import make_fix_a, make_fix_b, make_fix_d
from robusthedge.model import pure_selections
from robusthedge.pricing import price_lower, price_mono, price_quasi_sure
from robusthedge.supports import reachable, support_prior, support_qs
from robusthedge.verify import random_market, verify_chain, verify_random
from conftest import tiny_instances
from oracles import oracle_dual_value, oracle_lower_value, oracle_na

F = Fraction


def test_criterion_1_truncation_closed_form():
    """Truncated one-period family: every single-prior price is n/(2n+1),
    and the robust, prior-by-prior, and dual prices all equal N/(2N+1),
    strictly increasing in N and strictly below 1/2. Under 1 second."""
    start = time.monotonic()
    robust_values = []
    for n_max in (1, 2, 5, 20):
        model, claim = make_fix_b(n_max)
        monos = [price_mono(model, p, claim).price
                 for p in pure_selections(model)]
        assert sorted(monos) == [F(n, 2 * n + 1) for n in range(1, n_max + 1)]
        robust = price_quasi_sure(model, claim).price
        lower, _ = price_lower(model, "all", claim)
        dual_value, _ = dual_sup(model, claim)
        assert robust == lower == dual_value == F(n_max, 2 * n_max + 1)
        robust_values.append(robust)
    assert robust_values == sorted(set(robust_values))
    assert all(v < F(1, 2) for v in robust_values)
    assert time.monotonic() - start < 1.0


def test_criterion_2_binomial():
    """Binomial market: every price equals 1/2 and the martingale
    polytope is the single point (1/2, 1/2)."""
    model, claim = make_fix_a()
    prior = pure_selections(model)[0]
    assert price_quasi_sure(model, claim).price == F(1, 2)
    assert price_mono(model, prior, claim).price == F(1, 2)
    assert price_lower(model, "all", claim)[0] == F(1, 2)
    value, measure = dual_sup(model, claim)
    assert value == F(1, 2)
    assert measure.leaf_weights == {("u",): F(1, 2), ("d",): F(1, 2)}
    from oracles import polytope_vertices

    vertices = polytope_vertices(model, reachable(model))
    assert vertices == [{("u",): F(1, 2), ("d",): F(1, 2)}]


def test_criterion_3_chain_on_200_random_markets():
    """Every equality of the price chain holds exactly on 200 seeded
    random no-arbitrage markets (T <= 3, up to 4 outcomes, 2 assets,
    3 generators per node). Under 60 seconds."""
    start = time.monotonic()
    summary = verify_random(200, seed=42, max_horizon=3, max_outcomes=4,
                            max_assets=2, max_generators=3)
    elapsed = time.monotonic() - start
    assert summary.verified == 200
    assert summary.passed == 200, summary.failures
    assert elapsed < 60.0, f"chain suite took {elapsed:.1f}s"


def _criterion_3_markets(count=200, seed=42):
    """The same market stream criterion 3 verifies (same seed and bounds)."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        model, claim = random_market(rng, 3, 4, 2, 3)
        if global_na_qs(model).holds:
            produced += 1
            yield model, claim


def test_criterion_4_zero_duality_gap_and_gap_law():
    """Primal price equals the dual maximum exactly, and the gap to the
    perturbed measures decays exactly like c/n, on every instance of
    criteria 1-3."""
    instances = [make_fix_a()] + [make_fix_b(n) for n in (1, 2, 5, 20)]
    instances += list(_criterion_3_markets())
    for model, claim in instances:
        evidence = dual_sup_equivalent(model, claim, [1, 10, 100])
        assert evidence.value == price_quasi_sure(model, claim).price
        assert evidence.constant >= 0
        assert evidence.gaps == {n: evidence.constant / n
                                 for n in (1, 10, 100)}


def test_criterion_5_support_completion_equivalence():
    """Family no-arbitrage holds iff the support-completing product
    measure has matching supports and passes local no-arbitrage on the
    reachable tree; the failing node sets coincide exactly. Checked on
    50 random markets, at least 10 with injected arbitrage."""
    rng = random.Random(77)
    with_arbitrage = 0
    for k in range(50):
        inject = k % 3 == 0
        model, _ = random_market(rng, inject_arbitrage=inject)
        ptilde = build_ptilde_measure(model)
        tree = reachable(model)
        nodes = [n for n in model.lattice.non_terminal_nodes() if n in tree]
        supports_ok = all(
            support_prior(model, ptilde, n).points
            == support_qs(model, n).points for n in nodes)
        assert supports_ok  # support completion never depends on NA
        fail_joint = {n for n in nodes
                      if not local_na(support_qs(model, n)).holds}
        fail_ptilde = {n for n in nodes
                       if not local_na(support_prior(model, ptilde, n)).holds}
        assert fail_joint == fail_ptilde
        holds = global_na_qs(model).holds
        assert holds == (supports_ok and not fail_ptilde)
        if not holds:
            with_arbitrage += 1
    assert with_arbitrage >= 10


def test_criterion_6_family_members_full_support_and_na():
    """20 random members of the mixed family per market: each has the
    family's exact supports at every reachable node and no arbitrage."""
    rng = random.Random(88)
    checked = 0
    while checked < 8:
        model, _ = random_market(rng)
        if not global_na_qs(model).holds:
            continue
        checked += 1
        tree = reachable(model)
        nodes = [n for n in model.lattice.non_terminal_nodes() if n in tree]
        for _ in range(20):
            lam = F(rng.randint(1, 16), 16)
            mixtures = {}
            for n in model.lattice.non_terminal_nodes():
                g = len(model.generators_at(n))
                pick = rng.randrange(g)
                mixtures[n] = tuple(F(1) if i == pick else F(0)
                                    for i in range(g))
            member = family_member(model, lam, mixtures)
            assert na_prior(model, member).holds
            for n in nodes:
                assert support_prior(model, member, n).points \
                    == support_qs(model, n).points


def test_criterion_7_hull_membership():
    """The support-completing measure and the extreme prior are convex
    combinations of the generators at every node, on every no-arbitrage
    test instance."""
    instances = [make_fix_a(), make_fix_b(2), make_fix_b(5), make_fix_d()]
    instances += tiny_instances(6, seed=99)
    for model, claim in instances:
        ok, per_node = hull_membership(model, build_ptilde_measure(model))
        assert ok, per_node
        fam = build_ptilde_family(model, F(1, 2))
        ok, per_node = hull_membership(fam, build_phat(fam, "all", claim))
        assert ok, per_node


def test_criterion_8_oracle_equivalence():
    """Engine prices match the independent brute-force oracle (exhaustive
    support patterns + exact polytope vertex enumeration) on the seeded
    two-period fixture and 20 tiny random markets."""
    instances = [make_fix_d()] + tiny_instances(20, seed=123)
    for model, claim in instances:
        assert oracle_na(model)
        robust = price_quasi_sure(model, claim).price
        assert robust == oracle_dual_value(model, claim)
        assert dual_sup(model, claim)[0] == oracle_dual_value(model, claim)
        assert price_lower(model, "all", claim)[0] \
            == oracle_lower_value(model, claim)
        from robusthedge.supports import prior_tree

        for prior in pure_selections(model)[:4]:
            if not na_prior(model, prior).holds:
                continue
            tree = prior_tree(model, prior)
            assert price_mono(model, prior, claim).price \
                == oracle_dual_value(model, claim, tree)
