import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from multistage import AllSubsets, MultistageInstance, StageInstance, zero_profit
from multistage.harness import RandomInstanceSpec, generate_instance

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def zeros(n: int, T: int, bonus="hamming", evolution="ge") -> MultistageInstance:
    st_ = StageInstance(AllSubsets(n), zero_profit(n))
    return MultistageInstance(n, T, bonus, [st_] * T, evolution)


@pytest.fixture
def zeros_n2_T3():
    return zeros(2, 3)


def random_specs(evolution=None, bonus=None, n=(1, 4), T=(1, 4), family=None, profit=None):
    """Strategy over random instance recipes."""
    return st.builds(
        RandomInstanceSpec,
        evolution=st.sampled_from(["ssfs", "ge"]) if evolution is None else st.just(evolution),
        bonus=st.sampled_from(["hamming", "intersection"]) if bonus is None else st.just(bonus),
        n=st.integers(*n), T=st.integers(*T),
        family=st.sampled_from(["mixed", "closed", "explicit", "all"]) if family is None else st.just(family),
        profit=st.sampled_from(["linear", "table", "submodular"]) if profit is None else st.just(profit),
        seed=st.integers(0, 10 ** 6))


def instances(**kw):
    return random_specs(**kw).map(generate_instance)


rationals = st.fractions(min_value=0, max_value=5, max_denominator=16)
