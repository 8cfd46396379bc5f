from __future__ import annotations

import numpy as np
import pytest

from evolsym.operator import PolyMatrixOperator
from evolsym.poly import Poly

_ACCEPTANCE_LINES: list[str] = []


def random_poly(rng: np.random.Generator, n: int, max_deg: int = 2, nterms: int = 3) -> Poly:
    terms = []
    for _ in range(nterms):
        alpha = [0] * n
        for _ in range(int(rng.integers(0, max_deg + 1))):
            alpha[int(rng.integers(0, n))] += 1
        terms.append((alpha, complex(rng.standard_normal(), rng.standard_normal())))
    return Poly(n, terms)


def random_operator(rng: np.random.Generator, m: int, n: int, max_deg: int = 2, nterms: int = 3) -> PolyMatrixOperator:
    rows = tuple(tuple(random_poly(rng, n, max_deg, nterms) for _ in range(m)) for _ in range(m))
    return PolyMatrixOperator(m, n, rows)


def eval_at(op: PolyMatrixOperator, zeta) -> np.ndarray:
    """Evaluate G(zeta) at an arbitrary complex point by direct term summation."""
    zeta = np.asarray(zeta, dtype=complex)
    out = np.zeros((op.m, op.m), dtype=complex)
    for i, row in enumerate(op.entries):
        for j, p in enumerate(row):
            for alpha, c in p.terms:
                out[i, j] += c * np.prod([z**a for z, a in zip(zeta, alpha)])
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_record():
    def record(number: int, name: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} -- {detail}")
        print(_ACCEPTANCE_LINES[-1])

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
