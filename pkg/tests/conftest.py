import numpy as np
import pytest
from hypothesis import strategies as st

from ondemand_agents.experiments import EXAMPLES
from ondemand_agents.model import ModelParams


@pytest.fixture
def ex1():
    return EXAMPLES["example1"]


def random_params(rng: np.random.Generator, lo=0.05, hi=5.0, alpha_hi=0.95) -> ModelParams:
    """Rates log-uniform in [lo, hi], alpha uniform in (0, alpha_hi)."""
    rate = lambda: float(np.exp(rng.uniform(np.log(lo), np.log(hi))))  # noqa: E731
    alpha = float(rng.uniform(0.0, alpha_hi))
    while alpha == 0.0:
        alpha = float(rng.uniform(0.0, alpha_hi))
    return ModelParams(lam=rate(), alpha=alpha, beta=rate(), mu=rate(),
                       gamma=rate(), epsilon=rate(), r=1000.0)


log_rate = st.floats(min_value=np.log(0.05), max_value=np.log(5.0)).map(np.exp).map(float)

params_strategy = st.builds(
    ModelParams,
    lam=log_rate,
    alpha=st.floats(min_value=1e-3, max_value=0.95),
    beta=log_rate,
    mu=log_rate,
    gamma=log_rate,
    epsilon=log_rate,
    r=st.sampled_from([1.0, 100.0, 1000.0]),
)


#: one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
