"""Test suites shared by the unit tests and the acceptance run."""
from functools import lru_cache

from gen import random_model
from scjl2.explore import ExploreLimits, build_lts, bundle_of


@lru_cache(maxsize=None)
def small_random_suite(n_needed=200, max_states=200):
    """The first ``n_needed`` generated models whose LTS has at most ``max_states`` states."""
    found = []
    seed = 0
    while len(found) < n_needed:
        d = random_model(seed, depth=6, rich=True)
        lts = build_lts(bundle_of(d), ExploreLimits(max_states=max_states + 1))
        if not lts.truncated:
            found.append((seed, d, lts))
        seed += 1
    return tuple(found)
