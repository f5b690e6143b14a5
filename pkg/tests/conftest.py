from hypothesis import HealthCheck, settings, strategies as st

from pmsched.instgen import GenParams, generate

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def instances(draw, min_n=1, max_n=6, max_m=3):
    params = GenParams(
        n=draw(st.integers(min_n, max_n)),
        m=draw(st.integers(1, max_m)),
        seed=draw(st.integers(0, 10**6)),
        edge_density=draw(st.sampled_from([0.0, 0.2, 0.5])),
        setup_range=draw(st.sampled_from([(0, 0), (1, 10), (20, 40)])),
    )
    return generate(params)
