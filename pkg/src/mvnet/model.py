"""Algebraic state-space models of k-valued networks.

A compiled network is a transition matrix acting on combined state indices:
``x(t+1) = M x(t)`` for autonomous networks, ``x(t+1) = L u(t) x(t)`` with the
input block leftmost for controlled ones.  This module holds the model
container, block splitting, simulation, state-feedback closure, attractor
analysis and the attractor normal form, plus the JSON model document.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .dnotation import format_matrix, parse_matrix
from .stp import (
    DeltaVector,
    DenseMatrix,
    DimensionError,
    LogicalMatrix,
    conjugate,
    khatri_rao_fold,
    perm_inverse,
)

__all__ = [
    "AssrModel",
    "overall_matrix",
    "split_blocks",
    "step",
    "simulate",
    "closed_loop",
    "AttractorSummary",
    "attractors",
    "NormalFormBlock",
    "NormalFormResult",
    "topological_normal_form",
    "nilpotent_block",
    "cycle_block",
    "model_to_doc",
    "model_from_doc",
    "save_model",
    "load_model",
]


def overall_matrix(node_matrices: Sequence[LogicalMatrix]) -> LogicalMatrix:
    """Columnwise Kronecker fold of the per-node structure matrices."""
    return khatri_rao_fold(list(node_matrices))


@dataclass(frozen=True)
class AssrModel:
    """A compiled (control) network.

    ``overall`` has k^n rows and k^(n+m) columns; for m = 0 it is the square
    transition matrix itself.  ``bearing`` optionally records the value
    algebra the network was compiled over (needed by cascade and
    perpendicularity commands); it is treated as opaque here.
    """

    k: int
    n: int
    m: int
    node_matrices: tuple[LogicalMatrix, ...]
    overall: LogicalMatrix
    input_names: tuple[str, ...] = ()
    state_names: tuple[str, ...] = ()
    bearing: Any = None

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.n < 1:
            raise ValueError("need at least one state node")
        if self.m < 0:
            raise ValueError("input count cannot be negative")
        if len(self.node_matrices) != self.n:
            raise ValueError("node matrix count must equal the state count")
        width = self.k ** (self.n + self.m)
        for i, mat in enumerate(self.node_matrices, start=1):
            if mat.rows != self.k or mat.ncols != width:
                raise DimensionError(f"node matrix {i} has shape {mat.rows}x{mat.ncols}")
        if self.overall.rows != self.k**self.n or self.overall.ncols != width:
            raise DimensionError("overall matrix shape inconsistent with (k, n, m)")

    @classmethod
    def from_nodes(
        cls,
        k: int,
        n: int,
        m: int,
        node_matrices: Sequence[LogicalMatrix],
        input_names: Sequence[str] = (),
        state_names: Sequence[str] = (),
        bearing: Any = None,
    ) -> "AssrModel":
        mats = tuple(node_matrices)
        return cls(
            k,
            n,
            m,
            mats,
            overall_matrix(mats),
            tuple(input_names),
            tuple(state_names),
            bearing,
        )

    @property
    def state_count(self) -> int:
        return self.k**self.n

    def blocks(self) -> list[LogicalMatrix]:
        return split_blocks(self.overall, self.m, self.k)

    def transition(self) -> LogicalMatrix:
        """The square transition matrix; only defined for m = 0."""
        if self.m != 0:
            raise ValueError("controlled model has no single transition matrix")
        return self.overall


def split_blocks(overall: LogicalMatrix, m: int, k: int) -> list[LogicalMatrix]:
    """Split an overall matrix into its k^m square input blocks.

    Block i is the matrix obtained by fixing the combined input at index i,
    that is, columns (i-1)*k^n + 1 .. i*k^n.
    """
    count = k**m
    if overall.ncols % count != 0:
        raise DimensionError("column count is not divisible by the block count")
    width = overall.ncols // count
    return [
        LogicalMatrix(overall.rows, overall.cols[i * width : (i + 1) * width])
        for i in range(count)
    ]


def step(m: LogicalMatrix, x: DeltaVector) -> DeltaVector:
    if m.ncols != x.dim:
        raise DimensionError("state dimension does not match the matrix")
    return DeltaVector(m.rows, m.cols[x.index - 1])


def simulate(m: LogicalMatrix, x0: DeltaVector, steps: int) -> tuple[int, ...]:
    """Iterate the transition map; returns indices with the start at slot 0."""
    if not m.is_square():
        raise DimensionError("simulation needs a square transition matrix")
    if m.ncols != x0.dim:
        raise DimensionError("state dimension does not match the matrix")
    if steps < 0:
        raise ValueError("steps cannot be negative")
    out = [x0.index]
    cur = x0.index
    for _ in range(steps):
        cur = m.cols[cur - 1]
        out.append(cur)
    return tuple(out)


def closed_loop(overall: LogicalMatrix, feedback: LogicalMatrix) -> LogicalMatrix:
    """Apply a state feedback u = F x to a controlled overall matrix.

    F maps states to input indices; column j of the result is column
    N*(F_j - 1) + j of the overall matrix, N the state count.  This equals
    the matrix product overall * F * PR_N on dense embeddings.
    """
    n_states = feedback.ncols
    if overall.rows != n_states:
        raise DimensionError("feedback column count must equal the state count")
    if overall.ncols != feedback.rows * n_states:
        raise DimensionError("overall width must be input count times state count")
    return LogicalMatrix(
        overall.rows,
        (
            overall.cols[n_states * (feedback.cols[j] - 1) + j]
            for j in range(n_states)
        ),
    )


@dataclass(frozen=True)
class AttractorSummary:
    """Cycles and basins of the functional graph j -> M[j].

    ``cycles`` are ordered by their smallest state, each rotated to start at
    that state and following the transition direction.  ``basin`` maps every
    state to the smallest state of its attractor; ``distance`` to the number
    of steps needed to reach the attractor (0 on it).
    """

    cycles: tuple[tuple[int, ...], ...]
    basin: dict[int, int]
    distance: dict[int, int]

    def cycle_of(self, rep: int) -> tuple[int, ...]:
        for cyc in self.cycles:
            if cyc[0] == rep:
                return cyc
        raise KeyError(rep)


def attractors(m: LogicalMatrix) -> AttractorSummary:
    if not m.is_square():
        raise DimensionError("attractor analysis needs a square matrix")
    n = m.rows
    succ = m.cols
    color = [0] * (n + 1)  # 0 new, 1 on current path, 2 finished
    on_cycle = [False] * (n + 1)
    for start in range(1, n + 1):
        if color[start] != 0:
            continue
        path = []
        v = start
        while color[v] == 0:
            color[v] = 1
            path.append(v)
            v = succ[v - 1]
        if color[v] == 1:
            # closed a fresh cycle inside the current path
            for u in path[path.index(v) :]:
                on_cycle[u] = True
        for u in path:
            color[u] = 2

    seen = [False] * (n + 1)
    cycles = []
    for v in range(1, n + 1):
        if not on_cycle[v] or seen[v]:
            continue
        members = []
        u = v
        while not seen[u]:
            seen[u] = True
            members.append(u)
            u = succ[u - 1]
        smallest = min(members)
        at = members.index(smallest)
        cycles.append(tuple(members[at:] + members[:at]))
    cycles.sort(key=lambda c: c[0])

    preds: list[list[int]] = [[] for _ in range(n + 1)]
    for v in range(1, n + 1):
        preds[succ[v - 1]].append(v)

    basin: dict[int, int] = {}
    distance: dict[int, int] = {}
    queue: deque[int] = deque()
    for cyc in cycles:
        rep = cyc[0]
        for v in cyc:
            basin[v] = rep
            distance[v] = 0
            queue.append(v)
    while queue:
        v = queue.popleft()
        for p in preds[v]:
            if p in basin:
                continue
            basin[p] = basin[v]
            distance[p] = distance[v] + 1
            queue.append(p)
    return AttractorSummary(tuple(cycles), basin, distance)


@dataclass(frozen=True)
class NormalFormBlock:
    """One basin block of the normal form, located by its 1-based offset."""

    start: int
    cycle_length: int
    transient_count: int
    nilpotency_index: int

    @property
    def size(self) -> int:
        return self.cycle_length + self.transient_count


@dataclass(frozen=True)
class NormalFormResult:
    permutation: LogicalMatrix
    transformed: LogicalMatrix
    blocks: tuple[NormalFormBlock, ...]
    summary: AttractorSummary = field(repr=False)


def topological_normal_form(m: LogicalMatrix) -> NormalFormResult:
    """Relabel states so the transition matrix is block diagonal by basin.

    Ordering rule: basins sorted by their smallest attractor state; inside a
    basin the cycle comes first, rotated to start at its smallest state and
    following the transition direction, then the transients by increasing
    distance to the attractor, ties broken by state index.  Each cycle block
    is then the canonical cyclic matrix and each transient block is strictly
    triangular, hence nilpotent.  The structure is verified before returning.
    """
    summary = attractors(m)
    order: list[int] = []
    blocks: list[NormalFormBlock] = []
    for cyc in summary.cycles:
        rep = cyc[0]
        transients = sorted(
            (v for v, b in summary.basin.items() if b == rep and summary.distance[v] > 0),
            key=lambda v: (summary.distance[v], v),
        )
        start = len(order) + 1
        order.extend(cyc)
        order.extend(transients)
        s_j = max((summary.distance[v] for v in transients), default=0)
        blocks.append(NormalFormBlock(start, len(cyc), len(transients), s_j))

    t = LogicalMatrix(m.rows, order)
    m_tilde = conjugate(m, t)
    result = NormalFormResult(t, m_tilde, tuple(blocks), summary)
    _verify_normal_form(result)
    return result


def _verify_normal_form(result: NormalFormResult) -> None:
    t, m_tilde = result.permutation, result.transformed
    if not t.is_permutation():
        raise AssertionError("normal form produced a non-permutation")
    if perm_inverse(t).cols != tuple(
        sorted(range(1, t.rows + 1), key=lambda q: t.cols[q - 1])
    ):
        raise AssertionError("permutation inverse inconsistent")
    for block in result.blocks:
        lo, cut, hi = block.start, block.start + block.cycle_length, block.start + block.size
        for q in range(lo, hi):
            image = m_tilde.cols[q - 1]
            if not lo <= image < hi:
                raise AssertionError("block is not closed under the transition")
            if q < cut:
                expected = q + 1 if q + 1 < cut else lo
                if image != expected:
                    raise AssertionError("cycle part is not in canonical rotation")
            elif image >= q:
                raise AssertionError("transient part is not strictly triangular")
        if block.transient_count > 0:
            nil = nilpotent_block(result, block)
            if not nil.matpow(block.nilpotency_index).is_zero():
                raise AssertionError("transient block is not nilpotent at the stated index")
            if block.nilpotency_index > 1 and nil.matpow(block.nilpotency_index - 1).is_zero():
                raise AssertionError("stated nilpotency index is not minimal")


def nilpotent_block(result: NormalFormResult, block: NormalFormBlock) -> DenseMatrix:
    """Extract the transient-to-transient 0/1 block N_j as a dense matrix."""
    t = block.transient_count
    if t == 0:
        raise ValueError("block has no transient part")
    base = block.start + block.cycle_length
    entries = [0] * (t * t)
    for q in range(t):
        image = result.transformed.cols[base + q - 1]
        if image >= base:
            entries[(image - base) * t + q] = 1
    return DenseMatrix(t, t, entries)


def cycle_block(result: NormalFormResult, block: NormalFormBlock) -> LogicalMatrix:
    """The cyclic part C_j in local coordinates."""
    length = block.cycle_length
    return LogicalMatrix(length, [*range(2, length + 1), 1] if length > 1 else [1])


def model_to_doc(model: AssrModel) -> dict:
    doc: dict[str, Any] = {
        "k": model.k,
        "n": model.n,
        "m": model.m,
        "inputs": list(model.input_names),
        "states": list(model.state_names),
        "node_matrices": [format_matrix(mat) for mat in model.node_matrices],
        "overall": format_matrix(model.overall),
    }
    if model.bearing is not None:
        from .bearing import bearing_to_doc

        doc["bearing"] = bearing_to_doc(model.bearing)
    return doc


def model_from_doc(doc: dict) -> AssrModel:
    bearing = None
    if doc.get("bearing") is not None:
        from .bearing import bearing_from_doc

        bearing = bearing_from_doc(doc["bearing"], int(doc["k"]))
    return AssrModel(
        k=int(doc["k"]),
        n=int(doc["n"]),
        m=int(doc["m"]),
        node_matrices=tuple(parse_matrix(s) for s in doc["node_matrices"]),
        overall=parse_matrix(doc["overall"]),
        input_names=tuple(doc.get("inputs", ())),
        state_names=tuple(doc.get("states", ())),
        bearing=bearing,
    )


def save_model(model: AssrModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_doc(model), handle, indent=2)
        handle.write("\n")


def load_model(path: str) -> AssrModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_doc(json.load(handle))
