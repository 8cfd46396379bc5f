"""Sparse multivariate polynomials with complex coefficients.

A polynomial in ``nvars`` variables is stored as a mapping from exponent
tuples (multi-indices) to complex coefficients.  Zero coefficients are never
stored, so the representation is canonical and two polynomials compare equal
iff they have the same terms.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping

import numpy as np

__all__ = ["Poly", "term_order", "DROP_TOL"]

# relative drop threshold used by Poly.chop
DROP_TOL = 1e-13


def term_order(alpha: tuple[int, ...]) -> tuple:
    """Sort key for graded lexicographic order (lower total degree first)."""
    return (sum(alpha), tuple(-a for a in alpha))


class Poly:
    """Immutable polynomial in ``nvars`` complex variables.

    Parameters
    ----------
    nvars : int
        Number of variables.
    terms : mapping or iterable of (alpha, coeff), optional
        Terms to add up.  Repeated multi-indices are summed; terms that end
        up with a zero coefficient are dropped.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = int(nvars)
        acc: dict[tuple[int, ...], complex] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for alpha, coeff in items:
                alpha = tuple(int(a) for a in alpha)
                if len(alpha) != self.nvars:
                    raise ValueError(f"multi-index {alpha} has length {len(alpha)}, expected {self.nvars}")
                if any(a < 0 for a in alpha):
                    raise ValueError(f"negative exponent in multi-index {alpha}")
                acc[alpha] = acc.get(alpha, 0j) + complex(coeff)
        self._terms = {a: c for a, c in acc.items() if c != 0}
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> Poly:
        # terms already canonical (no zeros, correct lengths)
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: complex) -> Poly:
        return cls(nvars, [((0,) * nvars, c)])

    @classmethod
    def variable(cls, nvars: int, j: int) -> Poly:
        alpha = [0] * nvars
        alpha[j] = 1
        return cls(nvars, [(alpha, 1)])

    # inspection

    @property
    def terms(self) -> list[tuple[tuple[int, ...], complex]]:
        """Terms as ``(alpha, coeff)`` pairs in graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda item: term_order(item[0]))

    def coeff(self, alpha) -> complex:
        return self._terms.get(tuple(alpha), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(a) == 0 for a in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0."""
        return max((sum(a) for a in self._terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __len__(self):
        return len(self._terms)

    # arithmetic

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different numbers of variables")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Poly.constant(self.nvars, complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for a, c in other._terms.items():
            s = out.get(a, 0j) + c
            if s == 0:
                out.pop(a, None)
            else:
                out[a] = s
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            c = complex(other)
            if c == 0:
                return Poly.zero(self.nvars)
            return Poly._raw(self.nvars, {a: v * c for a, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], complex] = {}
        for a1, c1 in self._terms.items():
            for a2, c2 in other._terms.items():
                a = tuple(x + y for x, y in zip(a1, a2))
                out[a] = out.get(a, 0j) + c1 * c2
        return Poly._raw(self.nvars, {a: c for a, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return f"Poly({self.nvars}, 0)"
        parts = []
        for alpha, c in self.terms:
            mono = "*".join(f"z{j}^{a}" if a > 1 else f"z{j}" for j, a in enumerate(alpha) if a)
            parts.append(f"({c:g})" + (f"*{mono}" if mono else ""))
        return f"Poly({self.nvars}, " + " + ".join(parts) + ")"

    # transformations

    def chop(self, rel: float = DROP_TOL) -> Poly:
        """Drop terms with ``|coeff| <= rel * max|coeff|``."""
        cutoff = rel * self.max_abs_coeff()
        return Poly._raw(self.nvars, {a: c for a, c in self._terms.items() if abs(c) > cutoff})

    def permute(self, perm) -> Poly:
        """Relabel variables: variable ``j`` of the result is variable ``perm[j]`` of ``self``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.nvars)):
            raise ValueError("perm must be a permutation of range(nvars)")
        return Poly._raw(self.nvars, {tuple(a[p] for p in perm): c for a, c in self._terms.items()})

    def split(self, var: int = 0) -> list[Poly]:
        """Coefficients of ``self`` as a polynomial in variable ``var``.

        Returns ``[c_0, c_1, ..., c_d]`` with each ``c_k`` a polynomial in the
        remaining ``nvars - 1`` variables, so that
        ``self = sum_k c_k * z_var**k``.
        """
        d = max((a[var] for a in self._terms), default=0)
        buckets: list[dict] = [{} for _ in range(d + 1)]
        for a, c in self._terms.items():
            buckets[a[var]][a[:var] + a[var + 1:]] = c
        return [Poly._raw(self.nvars - 1, b) for b in buckets]

    # evaluation

    def __call__(self, *point) -> complex:
        if len(point) == 1 and np.ndim(point[0]) == 1:
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = 0j
        for a, c in self._terms.items():
            total += c * math.prod(z**e for z, e in zip(point, a) if e)
        return total

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at many points; ``points`` has shape ``(..., nvars)``."""
        points = np.asarray(points, dtype=complex)
        if points.shape[-1:] != (self.nvars,):
            raise ValueError(f"points must have trailing dimension {self.nvars}")
        out = np.zeros(points.shape[:-1], dtype=complex)
        for a, c in self._terms.items():
            term = np.full(points.shape[:-1], c, dtype=complex)
            for j, e in enumerate(a):
                if e:
                    term = term * points[..., j] ** e
            out += term
        return out
