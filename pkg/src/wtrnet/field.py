"""Exact arithmetic over prime fields GF(q).

Scalars are wrapped in :class:`FieldElement`; matrices are plain integer
numpy arrays reduced modulo ``q`` and manipulated with the helpers at the
bottom of the module (rank, row reduction, left solves).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class ModulusMismatch(ValueError):
    """Operands live in different fields."""


class DivisionByZero(ZeroDivisionError):
    """Inversion of the zero element."""


class NotPrime(ValueError):
    """Field modulus is not a prime number."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_modulus(q: int) -> int:
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or not is_prime(int(q)):
        raise NotPrime(f"field modulus must be a prime >= 2, got {q!r}")
    return int(q)


@dataclass(frozen=True)
class FieldElement:
    value: int
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"GF({self.modulus}) vs GF({other.modulus})")
            return other
        if isinstance(other, (int, np.integer)):
            return FieldElement(int(other), self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value - other.value, self.modulus)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.modulus})")
        return FieldElement(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"GF{self.modulus}({self.value})"


def field_arithmetic(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Apply ``op`` (add, sub, mul, inv) to field elements.

    ``b`` is ignored for ``inv``.
    """
    if op == "inv":
        return a.inverse()
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"GF({a.modulus}) vs GF({b.modulus})")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown field operation {op!r}")


# -- matrices ---------------------------------------------------------------


def as_matrix(rows, q: int, width: int | None = None) -> np.ndarray:
    """Return ``rows`` as a 2-D int64 array reduced mod ``q``."""
    m = np.asarray(rows, dtype=np.int64)
    if m.size == 0:
        return np.zeros((0, width if width is not None else 0), dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return np.mod(m, q)


def row_reduce(m, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(q).

    Returns the reduced matrix and the list of pivot columns.
    """
    r = as_matrix(m, q).copy()
    rows, cols = r.shape
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        if pr == rows:
            break
        nz = np.nonzero(r[pr:, c])[0]
        if nz.size == 0:
            continue
        p = pr + int(nz[0])
        if p != pr:
            r[[pr, p]] = r[[p, pr]]
        inv = pow(int(r[pr, c]), -1, q)
        r[pr] = (r[pr] * inv) % q
        others = np.nonzero(r[:, c])[0]
        for o in others:
            if o != pr:
                r[o] = (r[o] - r[o, c] * r[pr]) % q
        pivots.append(c)
        pr += 1
    return r, pivots


def rank(m, q: int) -> int:
    m = as_matrix(m, q)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    return len(row_reduce(m, q)[1])


def solve_left(a, b, q: int) -> np.ndarray | None:
    """Find ``x`` with ``x @ a == b`` (mod q), or ``None`` if inconsistent.

    ``a`` has shape (n, d) and ``b`` shape (k, d); the result has shape (k, n).
    """
    a = as_matrix(a, q)
    b = as_matrix(b, q, width=a.shape[1])
    n = a.shape[0]
    if n == 0:
        return np.zeros((b.shape[0], 0), dtype=np.int64) if not b.any() else None
    # Solve a.T @ x.T = b.T column by column via one augmented reduction.
    aug = np.concatenate([a.T, b.T], axis=1)
    red, pivots = row_reduce(aug, q)
    if any(p >= n for p in pivots):
        return None
    x = np.zeros((b.shape[0], n), dtype=np.int64)
    for i, p in enumerate(pivots):
        x[:, p] = red[i, n:]
    return x % q
