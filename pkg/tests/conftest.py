import os
import sys

from hypothesis import HealthCheck, settings

settings.register_profile(
    "ctxlab",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ctxlab"))



def pytest_terminal_summary(terminalreporter):
    """Echo the one-line-per-criterion acceptance results."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
