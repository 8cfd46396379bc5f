"""Constant-coefficient matrix differential operators and their symbols.

An operator ``G(d_1, ..., d_n)`` is an ``m x m`` matrix whose entries are
polynomials in the partial derivatives.  Its Fourier symbol is obtained by
the substitution ``d_j -> i xi_j`` (forward transform with kernel
``exp(-i x.xi)``), so a term ``c d^alpha`` contributes
``c * prod_j (i xi_j)^alpha_j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateLeadingCoefficient,
    DimensionMismatch,
    OperatorFormatError,
    SizeLimitError,
)
from .poly import DROP_TOL, Poly

__all__ = [
    "PolyMatrixOperator",
    "CompanionFamily",
    "parse_operator",
    "parse_companion",
    "load_document",
    "serialize",
    "symbol_at",
    "char_poly_in_lambda",
    "total_degree",
    "reduced_order",
    "companion_symbol",
    "MAX_EXACT_SIZE",
]

MAX_EXACT_SIZE = 8


def _check_xi(xi, n) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi.reshape(1)
    if xi.shape[-1] != n:
        raise DimensionMismatch(f"frequency has {xi.shape[-1]} components, operator has n={n}")
    return xi


def _eval_at_ixi(p: Poly, xi: np.ndarray) -> np.ndarray:
    return p.evaluate(1j * xi)


@dataclass(frozen=True, eq=True)
class PolyMatrixOperator:
    """``m x m`` matrix of polynomials in ``n`` partial derivatives."""

    m: int
    n: int
    entries: tuple[tuple[Poly, ...], ...]

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if len(self.entries) != self.m or any(len(row) != self.m for row in self.entries):
            raise ValueError(f"entries must be {self.m}x{self.m}")
        for row in self.entries:
            for p in row:
                if not isinstance(p, Poly) or p.nvars != self.n:
                    raise ValueError(f"every entry must be a Poly in {self.n} variables")

    @classmethod
    def from_entries(cls, n: int, entries) -> PolyMatrixOperator:
        """Build from a nested list whose items are Poly, scalars or term lists."""
        rows = []
        for row in entries:
            out = []
            for e in row:
                if isinstance(e, Poly):
                    out.append(e)
                elif isinstance(e, (int, float, complex)):
                    out.append(Poly.constant(n, e))
                else:
                    out.append(Poly(n, e))
            rows.append(tuple(out))
        return cls(len(rows), n, tuple(rows))

    @classmethod
    def identity(cls, m: int, n: int, c: complex = 1.0) -> PolyMatrixOperator:
        return cls.from_entries(n, [[c if i == j else 0 for j in range(m)] for i in range(m)])

    @cached_property
    def order(self) -> int:
        """Maximum ``|alpha|`` over all terms (0 for the zero operator)."""
        return max((p.degree for row in self.entries for p in row), default=0)

    def __add__(self, other: PolyMatrixOperator) -> PolyMatrixOperator:
        self._check_compatible(other)
        return PolyMatrixOperator(
            self.m,
            self.n,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __matmul__(self, other: PolyMatrixOperator) -> PolyMatrixOperator:
        """Operator composition (matrix product of polynomial matrices)."""
        self._check_compatible(other)
        m = self.m
        rows = []
        for i in range(m):
            row = []
            for k in range(m):
                acc = Poly.zero(self.n)
                for j in range(m):
                    acc = acc + self.entries[i][j] * other.entries[j][k]
                row.append(acc)
            rows.append(tuple(row))
        return PolyMatrixOperator(m, self.n, tuple(rows))

    def scale(self, c: complex) -> PolyMatrixOperator:
        return PolyMatrixOperator(self.m, self.n, tuple(tuple(p * c for p in row) for row in self.entries))

    def permute_axes(self, perm) -> PolyMatrixOperator:
        return PolyMatrixOperator(self.m, self.n, tuple(tuple(p.permute(perm) for p in row) for row in self.entries))

    def _check_compatible(self, other):
        if not isinstance(other, PolyMatrixOperator):
            raise TypeError("expected a PolyMatrixOperator")
        if (self.m, self.n) != (other.m, other.n):
            raise DimensionMismatch(f"operators of shape (m={self.m}, n={self.n}) and (m={other.m}, n={other.n})")

    def symbols(self, xis) -> np.ndarray:
        """Symbols ``G(i xi)`` for frequencies of shape ``(..., n)``; returns ``(..., m, m)``."""
        xis = _check_xi(xis, self.n)
        out = np.empty(xis.shape[:-1] + (self.m, self.m), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                out[..., i, j] = _eval_at_ixi(p, xis)
        return out

    def to_document(self) -> dict:
        entries = []
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                if p.is_zero():
                    continue
                terms = [
                    {"coeff": [float(c.real), float(c.imag)], "alpha": list(alpha)}
                    for alpha, c in p.terms
                ]
                entries.append({"row": i, "col": j, "terms": terms})
        return {"m": self.m, "n": self.n, "entries": entries}

    def __repr__(self):
        return f"PolyMatrixOperator(m={self.m}, n={self.n}, order={self.order})"


@dataclass(frozen=True, eq=True)
class CompanionFamily:
    """Scalar equation ``sum_k Q_k(d) d_t^k u = 0`` reduced to a first-order system.

    Only the symbol is available: ``symbols`` returns the companion matrix of
    ``lambda^m + sum_k Q_k(i xi)/Q_m(i xi) lambda^k`` at each frequency.
    """

    n: int
    Q: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.Q) < 2:
            raise ValueError("need at least Q_0 and Q_1")
        if any(q.nvars != self.n for q in self.Q):
            raise ValueError(f"every Q_k must be a Poly in {self.n} variables")
        if self.Q[-1].is_zero():
            raise ValueError("leading coefficient Q_m is identically zero")

    @property
    def m(self) -> int:
        return len(self.Q) - 1

    @cached_property
    def order(self) -> int:
        return max(q.degree for q in self.Q)

    def symbols(self, xis) -> np.ndarray:
        xis = _check_xi(xis, self.n)
        return _companion_batch(self.Q, xis)

    def to_document(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "Q": [
                {"terms": [{"coeff": [float(c.real), float(c.imag)], "alpha": list(a)} for a, c in q.terms]}
                for q in self.Q
            ],
        }

    def __repr__(self):
        return f"CompanionFamily(m={self.m}, n={self.n}, order={self.order})"


# ---------------------------------------------------------------------------
# document parsing


def _parse_terms(raw_terms, n, where) -> Poly:
    if not isinstance(raw_terms, list):
        raise OperatorFormatError(f"{where}: 'terms' must be a list")
    seen = set()
    terms = []
    for t in raw_terms:
        if not isinstance(t, dict) or "coeff" not in t or "alpha" not in t:
            raise OperatorFormatError(f"{where}: each term needs 'coeff' and 'alpha'")
        coeff, alpha = t["coeff"], t["alpha"]
        if (
            not isinstance(coeff, list)
            or len(coeff) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in coeff)
        ):
            raise OperatorFormatError(f"{where}: coeff must be [re, im]")
        if not all(np.isfinite(coeff)):
            raise OperatorFormatError(f"{where}: non-finite coefficient {coeff}")
        if not isinstance(alpha, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in alpha):
            raise OperatorFormatError(f"{where}: alpha must be a list of integers")
        if len(alpha) != n:
            raise OperatorFormatError(f"{where}: alpha {alpha} has length {len(alpha)}, expected n={n}")
        if any(a < 0 for a in alpha):
            raise OperatorFormatError(f"{where}: negative exponent in alpha {alpha}")
        key = tuple(alpha)
        if key in seen:
            raise OperatorFormatError(f"{where}: duplicate alpha {alpha}")
        seen.add(key)
        terms.append((key, complex(coeff[0], coeff[1])))
    return Poly(n, terms)


def _load(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    if isinstance(text, str):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise OperatorFormatError(f"invalid JSON: {exc}") from exc
    if isinstance(text, dict):
        return text
    raise OperatorFormatError("expected a JSON document")


def _dims(doc):
    m, n = doc.get("m"), doc.get("n")
    for name, v in (("m", m), ("n", n)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise OperatorFormatError(f"'{name}' must be a positive integer")
    return m, n


def parse_operator(text) -> PolyMatrixOperator:
    """Parse an operator-description document (JSON text or already-decoded dict).

    Absent entries are zero; zero-coefficient terms are dropped.
    """
    doc = _load(text)
    if not isinstance(doc, dict):
        raise OperatorFormatError("document must be a JSON object")
    m, n = _dims(doc)
    raw_entries = doc.get("entries", [])
    if not isinstance(raw_entries, list):
        raise OperatorFormatError("'entries' must be a list")
    grid = [[Poly.zero(n) for _ in range(m)] for _ in range(m)]
    seen = set()
    for e in raw_entries:
        if not isinstance(e, dict):
            raise OperatorFormatError("each entry must be an object")
        i, j = e.get("row"), e.get("col")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            raise OperatorFormatError("entry row/col must be integers")
        if not (0 <= i < m and 0 <= j < m):
            raise OperatorFormatError(f"entry ({i}, {j}) outside a {m}x{m} matrix")
        if (i, j) in seen:
            raise OperatorFormatError(f"entry ({i}, {j}) given twice")
        seen.add((i, j))
        grid[i][j] = _parse_terms(e.get("terms", []), n, f"entry ({i}, {j})")
    return PolyMatrixOperator(m, n, tuple(tuple(row) for row in grid))


def parse_companion(text) -> CompanionFamily:
    """Parse a scalar higher-order document ``{"m", "n", "Q": [{"terms": ...}, ...]}``."""
    doc = _load(text)
    m, n = _dims(doc)
    raw_q = doc.get("Q")
    if not isinstance(raw_q, list) or len(raw_q) != m + 1:
        raise OperatorFormatError(f"'Q' must list m+1 = {m + 1} polynomials")
    Q = tuple(_parse_terms(q.get("terms", []) if isinstance(q, dict) else None, n, f"Q_{k}") for k, q in enumerate(raw_q))
    try:
        return CompanionFamily(n, Q)
    except ValueError as exc:
        raise OperatorFormatError(str(exc)) from exc


def load_document(text) -> PolyMatrixOperator | CompanionFamily:
    """Parse either document kind, dispatching on the presence of ``"Q"``."""
    doc = _load(text)
    if isinstance(doc, dict) and "Q" in doc:
        return parse_companion(doc)
    return parse_operator(doc)


def serialize(op: PolyMatrixOperator | CompanionFamily) -> str:
    """Canonical JSON text (graded lexicographic term order, sorted keys)."""
    return json.dumps(op.to_document(), sort_keys=True)


# ---------------------------------------------------------------------------
# symbols


def symbol_at(G: PolyMatrixOperator | CompanionFamily, xi) -> np.ndarray:
    """Symbol ``A(xi) = G(i xi_1, ..., i xi_n)`` as a complex ``m x m`` array."""
    xi = _check_xi(xi, G.n)
    if xi.ndim != 1:
        raise DimensionMismatch("symbol_at takes a single frequency; use G.symbols for batches")
    return G.symbols(xi)


def char_poly_in_lambda(G: PolyMatrixOperator) -> list[Poly]:
    """Coefficients of ``P(lambda, zeta) = det(lambda I - G(zeta))`` in powers of lambda.

    Returns ``[Q_0, ..., Q_{m-1}, Q_m]`` with ``Q_m = 1``; each ``Q_k`` is a
    polynomial in ``zeta_1, ..., zeta_n``.  The determinant is expanded
    symbolically (Laplace expansion with memoised minors), and the relative
    drop threshold is applied once to the final coefficients.
    """
    if isinstance(G, CompanionFamily):
        return _monic_q(G)
    m, n = G.m, G.n
    if m > MAX_EXACT_SIZE:
        raise SizeLimitError(f"exact characteristic polynomial supports m <= {MAX_EXACT_SIZE}, got {m}")
    lam = Poly.variable(n + 1, 0)

    def lift(p: Poly) -> Poly:
        return Poly(n + 1, [((0,) + a, c) for a, c in p.terms])

    M = [[(lam if i == j else Poly.zero(n + 1)) - lift(G.entries[i][j]) for j in range(m)] for i in range(m)]

    memo: dict[int, Poly] = {}

    def minor(row: int, cols: int) -> Poly:
        # determinant of rows row..m-1 restricted to the column bitmask `cols`
        if row == m:
            return Poly.constant(n + 1, 1)
        if cols in memo:
            return memo[cols]
        acc = Poly.zero(n + 1)
        sign = 1
        for j in range(m):
            if not cols >> j & 1:
                continue
            entry = M[row][j]
            if not entry.is_zero():
                sub = minor(row + 1, cols & ~(1 << j))
                if not sub.is_zero():
                    acc = acc + entry * sub * sign
            sign = -sign
        memo[cols] = acc
        return acc

    P = minor(0, (1 << m) - 1).chop(DROP_TOL)
    Q = P.split(0)
    Q = Q + [Poly.zero(n)] * (m + 1 - len(Q))
    Q[m] = Poly.constant(n, 1)
    return Q


def _monic_q(F: CompanionFamily) -> list[Poly]:
    lead = F.Q[-1]
    if not lead.is_constant():
        raise ValueError("monic characteristic coefficients need a constant leading coefficient Q_m")
    c = lead.coeff((0,) * F.n)
    return [q * (1 / c) for q in F.Q[:-1]] + [Poly.constant(F.n, 1)]


def total_degree(Q: list[Poly]) -> int:
    """Degree of ``P(lambda, zeta) = sum_k Q_k(zeta) lambda^k`` in all ``1+n`` variables."""
    m = len(Q) - 1
    return max([m] + [k + q.degree for k, q in enumerate(Q[:-1]) if not q.is_zero()])


def reduced_order(Q: list[Poly]) -> Fraction:
    """``max_k deg Q_k / (m - k)`` over the non-leading coefficients of a monic ``P``."""
    m = len(Q) - 1
    return max(
        (Fraction(q.degree, m - k) for k, q in enumerate(Q[:-1]) if not q.is_zero()),
        default=Fraction(0),
    )


def _companion_batch(Q, xis: np.ndarray) -> np.ndarray:
    m = len(Q) - 1
    vals = [_eval_at_ixi(q, xis) for q in Q]
    lead = vals[-1]
    scale = sum(abs(c) * np.linalg.norm(xis, axis=-1) ** sum(a) for a, c in Q[-1].terms)
    bad = np.ravel(np.abs(lead) <= 1e-14 * scale)
    if bad.any():
        k = int(np.argmax(bad))
        raise DegenerateLeadingCoefficient(xis.reshape(-1, xis.shape[-1])[k], complex(np.ravel(lead)[k]))
    out = np.zeros(xis.shape[:-1] + (m, m), dtype=complex)
    for i in range(m - 1):
        out[..., i, i + 1] = 1.0
    for k in range(m):
        out[..., m - 1, k] = -vals[k] / lead
    return out


def companion_symbol(Q: list[Poly], xi) -> np.ndarray:
    """Companion matrix with last row ``-Q_k(i xi)/Q_m(i xi)`` and ones on the superdiagonal.

    Raises
    ------
    DegenerateLeadingCoefficient
        If ``Q_m(i xi)`` vanishes.
    """
    Q = list(Q)
    if len(Q) < 2:
        raise ValueError("need at least Q_0 and Q_1")
    xi = _check_xi(xi, Q[0].nvars)
    return _companion_batch(Q, xi)
