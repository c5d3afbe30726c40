"""Box exhaustions of Z^d and the finite subcomplexes they cut out of the cover."""
from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .cellcomplex import PeriodicComplex

Lift = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class FolnerBox:
    m: int
    d: int

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError(f"box needs m >= 1 and d >= 1, got m={self.m}, d={self.d}")

    @property
    def N(self) -> int:
        return self.m ** self.d

    def elements(self):
        return itertools.product(range(self.m), repeat=self.d)

    def __contains__(self, g) -> bool:
        return len(g) == self.d and all(0 <= x < self.m for x in g)


def _add(a, b):
    return tuple(map(operator.add, a, b))


@dataclass(eq=False)
class FinitePiece:
    """The subcomplex Y_m: cells per dimension in a fixed enumeration order."""

    complex: PeriodicComplex
    box: FolnerBox
    cells: tuple[tuple[Lift, ...], ...]
    boundary: frozenset[Lift]
    touching: frozenset[tuple[int, ...]]  # translates whose closure meets the boundary
    _collar_dist: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.box.N

    @property
    def m(self) -> int:
        return self.box.m

    def count(self, j: int) -> int:
        return len(self.cells[j]) if 0 <= j < len(self.cells) else 0

    def index(self, j: int) -> dict[Lift, int]:
        return {c: i for i, c in enumerate(self.cells[j])}

    def interior(self, j: int) -> tuple[Lift, ...]:
        if not 0 <= j < len(self.cells):
            return ()
        return tuple(c for c in self.cells[j] if c not in self.boundary)

    def boundary_cells(self, j: int) -> tuple[Lift, ...]:
        if not 0 <= j < len(self.cells):
            return ()
        return tuple(c for c in self.cells[j] if c in self.boundary)

    def all_cells(self) -> set[Lift]:
        return {c for layer in self.cells for c in layer}


def _faces(cx: PeriodicComplex, cell: Lift):
    cid, g = cell
    for fc in cx.boundary[cid]:
        yield (fc.face, _add(g, fc.shift))


def _cofaces(cx: PeriodicComplex, cell: Lift):
    cid, h = cell
    for up, neg in cx.cofaces[cid]:
        yield (up, _add(h, neg))


def close_under_faces(cx: PeriodicComplex, seeds) -> set[Lift]:
    out = set(seeds)
    stack = list(out)
    while stack:
        for f in _faces(cx, stack.pop()):
            if f not in out:
                out.add(f)
                stack.append(f)
    return out


def build_piece(cx: PeriodicComplex, box: FolnerBox) -> FinitePiece:
    if box.d != cx.d:
        raise ValueError(f"box rank {box.d} does not match deck rank {cx.d}")
    base = [cid for layer in cx.cells for cid in layer]
    shifts = list(box.elements())
    cells = close_under_faces(cx, ((cid, g) for g in shifts for cid in base))
    up = cx.cofaces
    seeds = [c for c in cells
             if any((u, _add(c[1], neg)) not in cells for u, neg in up[c[0]])]
    boundary = close_under_faces(cx, seeds)

    order = {cid: i for i, cid in enumerate(base)}
    layers = tuple(
        tuple(sorted((c for c in cells if cx.dim_of[c[0]] == j), key=lambda c: (c[1], order[c[0]])))
        for j in range(cx.top_dim + 1)
    )
    closure0 = close_under_faces(cx, ((cid, (0,) * cx.d) for cid in base))
    touching = frozenset(
        g for g in shifts if any((cid, _add(g, s)) in boundary for cid, s in closure0)
    )
    return FinitePiece(cx, box, layers, frozenset(boundary), touching)


def _collar_distances(piece: FinitePiece) -> np.ndarray:
    if piece._collar_dist is None:
        shape = (piece.m,) * piece.box.d
        if not piece.touching:
            piece._collar_dist = np.full(shape, np.iinfo(np.int64).max)
        else:
            mask = np.ones(shape, dtype=bool)
            for g in piece.touching:
                mask[g] = False
            piece._collar_dist = ndimage.distance_transform_cdt(mask, metric="taxicab")
    return piece._collar_dist


def collar_count(piece: FinitePiece, delta: int) -> int:
    """Translates in the box within word-metric distance ``delta`` of a boundary translate."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return int((_collar_distances(piece) <= delta).sum())


def regularity_report(cx: PeriodicComplex, m_values, delta_values) -> list[dict]:
    if not m_values or not delta_values:
        raise ValueError("m_values and delta_values must be nonempty")
    rows = []
    for m in m_values:
        piece = build_piece(cx, FolnerBox(m, cx.d))
        for delta in delta_values:
            n_dot = collar_count(piece, delta)
            rows.append({"m": m, "delta": delta, "N_m": piece.N, "Ndot": n_dot,
                         "ratio": n_dot / piece.N})
    return rows


def j_neighbours(cx: PeriodicComplex, cell: Lift) -> set[Lift]:
    """Cells of the same dimension one step away: sharing a face or a coface."""
    out = set()
    for f in _faces(cx, cell):
        out.update(_cofaces(cx, f))
    for u in _cofaces(cx, cell):
        out.update(_faces(cx, u))
    out.discard(cell)
    return out


def deep_cells(piece: FinitePiece, j: int, k: int) -> list[int]:
    """Indices of j-cells whose radius-k neighbourhood in Y avoids the boundary and the outside."""
    cx = piece.complex
    inner = set(piece.interior(j))
    out = []
    for i, cell in enumerate(piece.cells[j]):
        if cell not in inner:
            continue
        frontier, seen, ok = {cell}, {cell}, True
        for _ in range(k):
            nxt = set()
            for c in frontier:
                for nb in j_neighbours(cx, c):
                    if nb not in seen:
                        if nb not in inner:
                            ok = False
                            break
                        seen.add(nb)
                        nxt.add(nb)
                if not ok:
                    break
            if not ok:
                break
            frontier = nxt
        if ok:
            out.append(i)
    return out
