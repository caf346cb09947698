"""Exact rational super-replication pricing on finite scenario lattices.

The package computes, with no floating point anywhere in the core:

- quasi-sure (family-robust) and single-prior super-replication prices
  by backward recursion over exact one-period hedging LPs;
- no-arbitrage verdicts with explicit arbitrage-direction certificates;
- the dual price as a maximum over the martingale-measure polytope,
  together with perturbation evidence certifying the supremum over the
  equivalent-measure class;
- constructive priors (support-completing kernels, mixed families, the
  extreme prior attaining the robust price, no-arbitrage repairs);
- an end-to-end verifier checking every price equality by exact
  rational comparison, on fixtures and on seeded random markets.
"""
from .arbitrage import (NaVerdict, global_na_qs, local_na, na_prior, q_star,
                        sna_family, verify_certificate)
from .constructions import (AugmentedKernelSet, KernelPrior,
                            augment_kernel_set, build_phat,
                            build_ptilde_family, build_ptilde_kernel,
                            build_ptilde_measure, family_member,
                            hull_membership, na_repair_mixture)
from .duality import (MartingaleMeasure, PerturbationEvidence,
                      check_martingale, dual_sup, dual_sup_equivalent,
                      dual_sup_prior, full_support_martingale, perturb)
from .errors import (BadParameter, CapacityError, ExplosionGuard,
                     InfeasiblePolytope, LambdaOutOfRange,
                     NoArbitrageViolation, NoPointError, ParseError,
                     RobustHedgeError, ShapeMismatch, UnboundedBelow,
                     ValidationError)
from .fixtures import (FIXTURE_NAMES, FixtureSpec, make_fixture,
                       truncation_report)
from .model import (Claim, HedgingStrategy, Kernel, MarketModel, Node,
                    PriceProcess, ProductPrior, ScenarioLattice, dump_market,
                    format_rational, full_mixture_prior, load_market,
                    market_to_dict, node_key, parse_rational, prior_from_dict,
                    prior_measure, prior_to_dict, pure_selections,
                    read_market)
from .pricing import (PriceReport, check_super_replication, price_lower,
                      price_mono, price_quasi_sure)
from .supports import (SupportSet, reachable, support_prior, support_qs,
                       supports_match, supports_to_json)
from .verify import (ChainReport, RandomSummary, random_market, verify_chain,
                     verify_random)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
