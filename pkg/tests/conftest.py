import pytest

from taskbits.estimator import analyze_run
from taskbits.sim import DriverParams, study_conditions, run_condition


@pytest.fixture(scope="session")
def default_ensemble():
    """The default study: 15 synthetic participants over the 12-condition
    grid, master seed 0.  Built once per test session; several tests and
    one acceptance check share it."""
    runs = []
    conds = study_conditions()
    for part in range(15):
        for ci, cond in enumerate(conds):
            seed = part * 10007 + ci
            runs.append(run_condition(cond, DriverParams(seed=seed), seed))
    return runs


@pytest.fixture(scope="session")
def default_report(default_ensemble):
    return analyze_run(default_ensemble)
