import random

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_from(seed: int) -> random.Random:
    return random.Random(seed)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def acceptance_line(number: int, ok: bool, label: str, detail: str = "") -> str:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {label}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
