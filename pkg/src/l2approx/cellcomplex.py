"""Finite cell complexes with a free Z^d deck action, and their group-ring Laplacians.

A document lists the cells of the quotient X together with, for each cell of
positive dimension, its faces as ``[face id, shift, incidence]`` triples.  A face
entry ``(f, s, k)`` on cell ``c`` means that the lift ``(c, g)`` has the face
``(f, g + s)`` with incidence number ``k``.  The coboundary ``d_j`` is the
group-ring matrix with rows indexed by (j+1)-cells, columns by j-cells and
entry ``sum k * t^s``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

from .laurent import LaurentMatrix, LaurentPoly, Shift, adjoint, multiply


class ComplexError(ValueError):
    """Base class for rejected periodic-complex documents."""


class ParseError(ComplexError):
    pass


class DanglingFaceError(ComplexError):
    pass


class ChainComplexError(ComplexError):
    def __init__(self, cell: str, face: str, composite: LaurentPoly):
        self.cell = cell
        self.face = face
        self.composite = composite
        super().__init__(
            f"boundary of boundary of cell {cell!r} is nonzero at face {face!r}: {composite!r}"
        )


@dataclass(frozen=True)
class Face:
    face: str
    shift: Shift
    coef: int


@dataclass(frozen=True, eq=False)
class PeriodicComplex:
    d: int
    cells: tuple[tuple[str, ...], ...]  # cells[j] = ids of j-cells, document order
    boundary: Mapping[str, tuple[Face, ...]]
    name: str = ""
    warnings: tuple[str, ...] = field(default=())

    @property
    def top_dim(self) -> int:
        return len(self.cells) - 1

    def dims(self) -> list[int]:
        return [len(c) for c in self.cells]

    def count(self, j: int) -> int:
        return len(self.cells[j]) if 0 <= j < len(self.cells) else 0

    @cached_property
    def dim_of(self) -> dict[str, int]:
        return {cid: j for j, ids in enumerate(self.cells) for cid in ids}

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {cid: i for ids in self.cells for i, cid in enumerate(ids)}

    @cached_property
    def cofaces(self) -> dict[str, tuple[tuple[str, Shift], ...]]:
        """For each cell f, the pairs ``(c, -s)``: lift ``(f, h)`` is a face of ``(c, h - s)``."""
        out: dict[str, list[tuple[str, Shift]]] = {cid: [] for cid in self.dim_of}
        for c, faces in self.boundary.items():
            for fc in faces:
                entry = (c, tuple(-x for x in fc.shift))
                if entry not in out[fc.face]:
                    out[fc.face].append(entry)
        return {k: tuple(v) for k, v in out.items()}

    def to_document(self) -> dict[str, Any]:
        return {
            "deck_rank": self.d,
            "cells": [{"id": cid, "dim": j} for j, ids in enumerate(self.cells) for cid in ids],
            "boundary": {
                c: [[f.face, list(f.shift), f.coef] for f in faces]
                for c, faces in self.boundary.items() if faces
            },
        }


def _fail(msg: str) -> None:
    raise ParseError(msg)


def load(description: Mapping[str, Any], name: str = "") -> PeriodicComplex:
    """Validate a parsed document and build the complex.

    Raises ParseError on malformed input, DanglingFaceError on bad face
    references and ChainComplexError if the boundary does not square to zero.
    """
    if not isinstance(description, Mapping):
        _fail("document must be a JSON object")
    d = description.get("deck_rank")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        _fail(f"deck_rank must be an integer >= 1, got {d!r}")
    raw_cells = description.get("cells")
    if not isinstance(raw_cells, list) or not raw_cells:
        _fail("cells must be a nonempty array")
    dims: dict[str, int] = {}
    order: list[str] = []
    for entry in raw_cells:
        if not isinstance(entry, Mapping) or set(entry) - {"id", "dim"}:
            _fail(f"cell entry must be {{id, dim}}, got {entry!r}")
        cid, dim = entry.get("id"), entry.get("dim")
        if not isinstance(cid, str) or not cid:
            _fail(f"cell id must be a nonempty string, got {cid!r}")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
            _fail(f"cell {cid!r}: dim must be a nonnegative integer, got {dim!r}")
        if cid in dims:
            _fail(f"duplicate cell id {cid!r}")
        dims[cid] = dim
        order.append(cid)
    top = max(dims.values())
    cells = tuple(tuple(c for c in order if dims[c] == j) for j in range(top + 1))

    raw_boundary = description.get("boundary", {})
    if not isinstance(raw_boundary, Mapping):
        _fail("boundary must be an object")
    warnings: list[str] = []
    boundary: dict[str, tuple[Face, ...]] = {}
    for cid in order:
        entries = raw_boundary.get(cid, [])
        if not isinstance(entries, list):
            _fail(f"boundary of {cid!r} must be an array")
        if dims[cid] == 0 and entries:
            _fail(f"0-cell {cid!r} must have an empty boundary")
        faces = []
        for e in entries:
            if (not isinstance(e, list) or len(e) != 3 or not isinstance(e[1], list)
                    or not isinstance(e[2], int) or isinstance(e[2], bool)):
                _fail(f"boundary entry of {cid!r} must be [face id, shift array, integer], got {e!r}")
            fid, shift, coef = e
            if len(shift) != d or not all(isinstance(x, int) and not isinstance(x, bool) for x in shift):
                _fail(f"boundary entry of {cid!r}: shift {shift!r} must be {d} integers")
            if fid not in dims:
                raise DanglingFaceError(f"cell {cid!r} references unknown face {fid!r}")
            if dims[fid] != dims[cid] - 1:
                raise DanglingFaceError(
                    f"cell {cid!r} (dim {dims[cid]}) lists face {fid!r} of dim {dims[fid]}"
                )
            faces.append(Face(fid, tuple(shift), coef))
        boundary[cid] = tuple(faces)
        if dims[cid] == 1 and faces and sum(f.coef for f in faces) != 0:
            warnings.append(f"1-cell {cid!r}: boundary coefficients do not sum to zero")
    for cid in raw_boundary:
        if cid not in dims:
            raise DanglingFaceError(f"boundary given for unknown cell {cid!r}")

    cx = PeriodicComplex(d=d, cells=cells, boundary=boundary, name=name, warnings=tuple(warnings))
    check_chain_complex(cx)
    return cx


def loads(text: str, name: str = "") -> PeriodicComplex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return load(doc, name=name)


def load_file(path: str | Path) -> PeriodicComplex:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), name=path.stem)


def check_chain_complex(cx: PeriodicComplex) -> None:
    for j in range(cx.top_dim - 1):
        comp = multiply(coboundary(cx, j + 1), coboundary(cx, j))
        for (r, c), p in comp.items():
            raise ChainComplexError(cx.cells[j + 2][r], cx.cells[j][c], p)


def coboundary(cx: PeriodicComplex, j: int) -> LaurentMatrix:
    """Group-ring matrix of d_j : C^j -> C^{j+1}; empty of the right shape out of range."""
    rows, cols = cx.count(j + 1), cx.count(j)
    entries: dict[tuple[int, int], LaurentPoly] = {}
    if rows and cols:
        for r, cid in enumerate(cx.cells[j + 1]):
            acc: dict[int, list[tuple[Shift, int]]] = {}
            for fc in cx.boundary[cid]:
                acc.setdefault(cx.index_of[fc.face], []).append((fc.shift, fc.coef))
            for c, terms in acc.items():
                entries[(r, c)] = LaurentPoly(terms, cx.d)
    return LaurentMatrix(rows, cols, cx.d, entries)


def boundary_matrix(cx: PeriodicComplex, j: int) -> LaurentMatrix:
    """Boundary in degree j (rows (j-1)-cells); the adjoint of d_{j-1}."""
    return adjoint(coboundary(cx, j - 1))


def _abs_matrix(a: LaurentMatrix) -> LaurentMatrix:
    return LaurentMatrix(a.rows, a.cols, a.rank, {k: p.abs() for k, p in a.items()})


@dataclass(frozen=True, eq=False)
class LaplacianFamily:
    """Per-degree coboundaries, Laplacians and locality constants.

    ``K2[j]`` bounds the operator norm of Delta_j and of every finite
    truncation; it is the row-sum norm of the Laplacian built from entrywise
    absolute values of the coboundaries, so no cancellation is assumed.
    ``K2_rowsum[j]`` is the row-sum norm of Delta_j itself and
    ``C[j] * b[j]`` the local-finiteness form of the same bound.
    """

    d: tuple[LaurentMatrix, ...]
    delta: tuple[LaurentMatrix, ...]
    C: tuple[int, ...]
    b: tuple[int, ...]
    K2: tuple[int, ...]
    K2_rowsum: tuple[int, ...]

    @property
    def K(self) -> tuple[float, ...]:
        return tuple(k ** 0.5 for k in self.K2)

    def local_bound(self, j: int) -> int:
        return self.C[j] * self.b[j]


def _row_abs_sums(a: LaurentMatrix) -> list[int]:
    sums = [0] * a.rows
    for (i, _), p in a.items():
        sums[i] += p.abs_sum()
    return sums


def _neighbour_count(cx: PeriodicComplex, j: int, cid: str) -> int:
    """Number of j-cells at simplicial distance <= 1 from the lift (cid, 0)."""
    zero = (0,) * cx.d
    seen = {(cid, zero)}
    for fc in cx.boundary[cid]:
        for c2, neg in cx.cofaces[fc.face]:
            seen.add((c2, tuple(a + b for a, b in zip(fc.shift, neg))))
    for up, neg in cx.cofaces[cid]:
        for fc in cx.boundary[up]:
            seen.add((fc.face, tuple(a + b for a, b in zip(neg, fc.shift))))
    return len(seen)


def laplacians(cx: PeriodicComplex) -> LaplacianFamily:
    n = cx.top_dim
    ds = tuple(coboundary(cx, j) for j in range(-1, n + 1))  # ds[j + 1] = d_j
    deltas, C, b, K2, K2r = [], [], [], [], []
    for j in range(n + 1):
        down, up = ds[j], ds[j + 1]
        delta = multiply(down, adjoint(down)) + multiply(adjoint(up), up)
        deltas.append(delta)
        C.append(max((abs(c) for _, p in delta.items() for _, c in p.items()), default=0))
        b.append(max((_neighbour_count(cx, j, cid) for cid in cx.cells[j]), default=0))
        adown, aup = _abs_matrix(down), _abs_matrix(up)
        loose = multiply(adown, adjoint(adown)) + multiply(adjoint(aup), aup)
        K2.append(max([1] + _row_abs_sums(loose)))
        K2r.append(max([0] + _row_abs_sums(delta)))
    return LaplacianFamily(
        d=ds[1:], delta=tuple(deltas), C=tuple(C), b=tuple(b), K2=tuple(K2), K2_rowsum=tuple(K2r)
    )
