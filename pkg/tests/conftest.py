import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from robusthedge.fixtures import (make_fix_a, make_fix_b, make_fix_c,
                                  make_fix_d)
from robusthedge.verify import random_market


@pytest.fixture
def fix_a():
    return make_fix_a()


@pytest.fixture
def fix_b2():
    return make_fix_b(2)


@pytest.fixture
def fix_c():
    return make_fix_c()


@pytest.fixture
def fix_d():
    return make_fix_d()


def tiny_instances(count: int, seed: int):
    """Small markets with at most 9 leaves (T <= 2, up to 3 outcomes per
    period) where no-arbitrage holds under every single generator, so all
    pricing modes are defined; suitable for exhaustive oracle enumeration."""
    from robusthedge.arbitrage import sna_family

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        model, claim = random_market(rng, max_horizon=2, max_outcomes=3,
                                     max_assets=2, max_generators=2)
        if sna_family(model, "all").holds:
            out.append((model, claim))
    return out
