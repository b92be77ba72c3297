import math

import pytest

from prime_entropy import sieve_primes


def trial_division_is_prime(k: int) -> bool:
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % d == 0:
            return False
        d += 1
    return True


def trial_division_primes(limit: int) -> list[int]:
    """Independent oracle: every k <= limit tested by trial division."""
    return [k for k in range(2, limit + 1) if trial_division_is_prime(k)]


def p_adic(value: int, p: int) -> int:
    k = 0
    while value % p == 0:
        value //= p
        k += 1
    return k


@pytest.fixture(scope="session")
def small_table():
    return sieve_primes(20_000)


@pytest.fixture(scope="session")
def million_table():
    return sieve_primes(10 ** 6)


@pytest.fixture(scope="session")
def oracle_primes_1e5():
    return trial_division_primes(10 ** 5)


@pytest.fixture
def fsum_c():
    def c(n, primes):
        return math.fsum(math.log(p) / p for p in primes if p <= n)
    return c



_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    doc = getattr(item.function, "__doc__", None) or ""
    report.criterion = doc.strip().splitlines()[0] if doc.strip() else ""


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _acceptance.append((report.nodeid.split("::")[-1], getattr(report, "criterion", ""), report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, text, passed in _acceptance:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {text}")
