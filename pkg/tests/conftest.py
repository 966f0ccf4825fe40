from fractions import Fraction

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20071226)


def ginibre_matrix(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(rng, d, rank=None):
    g = ginibre_matrix(rng, d, rank or d)
    a = g @ g.conj().T
    return a / np.trace(a).real


def exact_rank(a):
    """Rank by Gaussian elimination over the complex rationals (no rounding)."""
    rows = [[(Fraction(z.real), Fraction(z.imag)) for z in row] for row in np.asarray(a)]

    def mul(x, y):
        return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    def sub(x, y):
        return (x[0] - y[0], x[1] - y[1])

    def inv(x):
        d = x[0] * x[0] + x[1] * x[1]
        return (x[0] / d, -x[1] / d)

    zero = (Fraction(0), Fraction(0))
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != zero), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p_inv = inv(rows[rank][col])
        for i in range(rank + 1, len(rows)):
            f = mul(rows[i][col], p_inv)
            rows[i] = [sub(x, mul(f, y)) for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
