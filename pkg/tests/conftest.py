import random
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from tame_elim.starnum import StarNum, normalize

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6))
nonzero = fractions.filter(lambda q: q != 0)
star_numbers = st.dictionaries(st.integers(-3, 2), nonzero, max_size=4).map(
    lambda d: normalize(StarNum(d))
)
seeds = st.integers(0, 2**32 - 1)


def rng_of(seed: int) -> random.Random:
    return random.Random(seed)
