import itertools
from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def enumerate_paths(p, ell, n):
    """Joint law of (S_n, M_n) by summing over all 2^n hit/miss sequences."""
    p = Fraction(p)
    q = 1 - p
    law = defaultdict(Fraction)
    for hits in itertools.product((True, False), repeat=n):
        s = m = 0
        weight = Fraction(1)
        for i, hit in enumerate(hits, start=1):
            weight *= p if hit else q
            if (i - 1) % (2 * ell) < ell:
                s += hit
            elif not hit:
                s = max(s - 1, 0)
            m = max(m, s)
        law[s, m] += weight
    return dict(law)


@pytest.fixture(scope="session")
def path_oracle():
    return enumerate_paths


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
