"""Matrices over the integral group ring of Z^d.

A group-ring element is a finitely supported integer Laurent polynomial in
``d`` commuting variables ``t_1, ..., t_d``; the monomial ``t^s`` stands for the
translation ``phi(g) -> phi(g + s)`` acting on functions on Z^d.  Coefficients
are Python ints, so products never overflow.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Iterator

import numpy as np

Shift = tuple[int, ...]


class LaurentPoly:
    """Immutable integer Laurent polynomial in ``rank`` variables."""

    __slots__ = ("_terms", "rank")

    def __init__(self, terms: Mapping[Shift, int] | Iterable[tuple[Shift, int]], rank: int):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Shift, int] = {}
        for shift, coef in items:
            shift = tuple(int(x) for x in shift)
            if len(shift) != rank:
                raise ValueError(f"shift {shift} does not have length {rank}")
            acc[shift] = acc.get(shift, 0) + int(coef)
        self._terms = {s: c for s, c in sorted(acc.items()) if c != 0}
        self.rank = rank

    @classmethod
    def constant(cls, value: int, rank: int) -> LaurentPoly:
        return cls({(0,) * rank: value}, rank)

    @classmethod
    def monomial(cls, shift: Shift, rank: int, coef: int = 1) -> LaurentPoly:
        return cls({tuple(shift): coef}, rank)

    @property
    def terms(self) -> dict[Shift, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Shift, int]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, shift: Shift) -> int:
        return self._terms.get(tuple(shift), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.rank, 0)

    def abs_sum(self) -> int:
        return sum(abs(c) for c in self._terms.values())

    def abs(self) -> LaurentPoly:
        """Same support with every coefficient replaced by its absolute value."""
        return LaurentPoly({s: abs(c) for s, c in self._terms.items()}, self.rank)

    def _check(self, other: LaurentPoly) -> None:
        if other.rank != self.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        self._check(other)
        return LaurentPoly(list(self._terms.items()) + list(other._terms.items()), self.rank)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({s: -c for s, c in self._terms.items()}, self.rank)

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly | int) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly({s: c * other for s, c in self._terms.items()}, self.rank)
        self._check(other)
        acc: dict[Shift, int] = {}
        for s, a in self._terms.items():
            for u, b in other._terms.items():
                key = tuple(x + y for x, y in zip(s, u))
                acc[key] = acc.get(key, 0) + a * b
        return LaurentPoly(acc, self.rank)

    __rmul__ = __mul__

    def star(self) -> LaurentPoly:
        """Involution t^s -> t^-s (the Hilbert adjoint of a translation)."""
        return LaurentPoly({tuple(-x for x in s): c for s, c in self._terms.items()}, self.rank)

    def evaluate(self, theta) -> complex:
        theta = np.asarray(theta, dtype=float).reshape(self.rank)
        return complex(
            sum(c * np.exp(2j * np.pi * np.dot(s, theta)) for s, c in self._terms.items())
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.rank == other.rank and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.rank, tuple(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for s, c in self._terms.items():
            mono = "*".join(
                f"t{i + 1}" if e == 1 else f"t{i + 1}^{e}" for i, e in enumerate(s) if e != 0
            )
            if self.rank == 1:
                mono = mono.replace("t1", "t")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


class LaurentMatrix:
    """Sparse ``rows x cols`` matrix with LaurentPoly entries of a common rank."""

    __slots__ = ("rows", "cols", "rank", "_entries")

    def __init__(self, rows: int, cols: int, rank: int,
                 entries: Mapping[tuple[int, int], LaurentPoly] | None = None):
        self.rows = rows
        self.cols = cols
        self.rank = rank
        clean: dict[tuple[int, int], LaurentPoly] = {}
        for (i, j), p in sorted((entries or {}).items()):
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
            if p.rank != rank:
                raise ValueError(f"entry ({i}, {j}) has rank {p.rank}, expected {rank}")
            if p:
                clean[(i, j)] = p
        self._entries = clean

    @classmethod
    def identity(cls, n: int, rank: int) -> LaurentMatrix:
        one = LaurentPoly.constant(1, rank)
        return cls(n, n, rank, {(i, i): one for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int, rank: int) -> LaurentMatrix:
        return cls(rows, cols, rank)

    @classmethod
    def from_integers(cls, array, rank: int) -> LaurentMatrix:
        array = np.asarray(array, dtype=object)
        rows, cols = array.shape
        return cls(rows, cols, rank, {
            (i, j): LaurentPoly.constant(int(array[i, j]), rank)
            for i in range(rows) for j in range(cols) if array[i, j] != 0
        })

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> dict[tuple[int, int], LaurentPoly]:
        return dict(self._entries)

    def items(self):
        return iter(self._entries.items())

    def __getitem__(self, key: tuple[int, int]) -> LaurentPoly:
        return self._entries.get(key, LaurentPoly({}, self.rank))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.rank == other.rank
                and self._entries == other._entries)

    def __hash__(self) -> int:
        return hash((self.shape, self.rank, tuple(self._entries.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j}): {p!r}" for (i, j), p in self._entries.items())
        return f"LaurentMatrix({self.rows}x{self.cols}, d={self.rank}, {{{body}}})"

    def __add__(self, other: LaurentMatrix) -> LaurentMatrix:
        if self.shape != other.shape or self.rank != other.rank:
            raise ValueError(f"cannot add {self.shape} and {other.shape}")
        out = dict(self._entries)
        for key, p in other._entries.items():
            out[key] = out[key] + p if key in out else p
        return LaurentMatrix(self.rows, self.cols, self.rank, out)

    def __matmul__(self, other: LaurentMatrix) -> LaurentMatrix:
        return multiply(self, other)

    def is_zero(self) -> bool:
        return not self._entries

    def support_shifts(self) -> set[Shift]:
        return {s for p in self._entries.values() for s, _ in p.items()}

    def max_shift_span(self) -> int:
        """Largest spread max(s_k) - min(s_k) over coordinates k of the support."""
        shifts = self.support_shifts()
        if not shifts:
            return 0
        arr = np.array(sorted(shifts))
        return int((arr.max(axis=0) - arr.min(axis=0)).max())


def multiply(a: LaurentMatrix, b: LaurentMatrix) -> LaurentMatrix:
    """Exact group-ring matrix product."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")
    by_row: dict[int, list[tuple[int, LaurentPoly]]] = {}
    for (k, j), p in b.items():
        by_row.setdefault(k, []).append((j, p))
    acc: dict[tuple[int, int], dict[Shift, int]] = {}
    for (i, k), p in a.items():
        for j, q in by_row.get(k, ()):
            slot = acc.setdefault((i, j), {})
            for s, x in p.items():
                for u, y in q.items():
                    key = tuple(v + w for v, w in zip(s, u))
                    slot[key] = slot.get(key, 0) + x * y
    return LaurentMatrix(a.rows, b.cols, a.rank,
                         {key: LaurentPoly(t, a.rank) for key, t in acc.items()})


def adjoint(a: LaurentMatrix) -> LaurentMatrix:
    """Transpose with every entry's shifts negated."""
    return LaurentMatrix(a.cols, a.rows, a.rank, {(j, i): p.star() for (i, j), p in a.items()})


def _terms(a: LaurentMatrix):
    rows, cols, shifts, coefs = [], [], [], []
    for (i, j), p in a.items():
        for s, c in p.items():
            rows.append(i)
            cols.append(j)
            shifts.append(s)
            coefs.append(c)
    shifts = np.array(shifts, dtype=float).reshape(len(coefs), a.rank)
    return np.array(rows, dtype=int), np.array(cols, dtype=int), shifts, np.array(coefs, dtype=float)


def evaluate(a: LaurentMatrix, theta) -> np.ndarray:
    """Substitute t_k -> exp(2 pi i theta_k); returns a complex ``rows x cols`` array."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (a.rank,):
        raise ValueError(f"theta must have {a.rank} coordinates, got shape {theta.shape}")
    return evaluate_many(a, theta[None, :])[0]


def evaluate_many(a: LaurentMatrix, thetas) -> np.ndarray:
    """Vectorised :func:`evaluate` over an ``(G, d)`` array of torus points."""
    thetas = np.asarray(thetas, dtype=float).reshape(-1, a.rank)
    out = np.zeros((thetas.shape[0], a.rows, a.cols), dtype=complex)
    if a.is_zero():
        return out
    rows, cols, shifts, coefs = _terms(a)
    phases = np.exp(2j * np.pi * (thetas @ shifts.T)) * coefs  # (G, T)
    for t in range(len(coefs)):
        out[:, rows[t], cols[t]] += phases[:, t]
    return out


def power(a: LaurentMatrix, k: int) -> LaurentMatrix:
    if a.rows != a.cols:
        raise ValueError("power needs a square matrix")
    if k < 0:
        raise ValueError("k must be nonnegative")
    result = LaurentMatrix.identity(a.rows, a.rank)
    base = a
    while k:
        if k & 1:
            result = multiply(result, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return result


def vn_trace(a: LaurentMatrix) -> int:
    """Sum of the constant terms of the diagonal entries."""
    if a.rows != a.cols:
        raise ValueError("trace needs a square matrix")
    return sum(a[i, i].constant_term() for i in range(a.rows))


def vn_trace_power(delta: LaurentMatrix, k: int) -> int:
    """Exact von Neumann trace of ``delta**k``."""
    return vn_trace(power(delta, k))
