"""Simulated distributed layer: block layouts, worker pool, deterministic reduce.

Workers are a thread pool of size p operating on disjoint block buffers;
"communication" is an in-process handoff whose volume is modeled by
cost_report.  Partial results are combined by a binary tree with fixed child
ordering, so outputs are bitwise reproducible for a fixed (seed, p).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .sketch import SketchOperator, apply_block_local, next_pow2


@dataclass(frozen=True)
class RowBlocks:
    p: int


@dataclass(frozen=True)
class Grid:
    p: int


@dataclass
class DistMatrix:
    """A matrix split into blocks with zero-padding up to power-of-two block sizes.

    layout "rows": p blocks of block_rows x n_cols.
    layout "grid": p x p blocks of block_rows x block_cols.
    gather() strips the padding and returns the original matrix.
    """

    layout: str
    p: int
    blocks: list
    shape: tuple  # global, unpadded
    block_rows: int
    block_cols: int  # equals global column count for "rows" layout

    def gather(self) -> np.ndarray:
        m, n = self.shape
        if self.layout == "rows":
            full = np.vstack(self.blocks)
            return full[:m, :n].copy()
        rows = [np.hstack(row) for row in self.blocks]
        return np.vstack(rows)[:m, :n].copy()


def distribute(M: np.ndarray, layout) -> DistMatrix:
    """Deep-copy M into the requested layout; gather(distribute(M)) == M exactly."""
    M = np.asarray(M, dtype=np.float64)
    m, n = M.shape
    if isinstance(layout, RowBlocks):
        p = layout.p
        r = next_pow2(-(-m // p))
        padded = np.zeros((p * r, n))
        padded[:m] = M
        blocks = [padded[i * r:(i + 1) * r].copy() for i in range(p)]
        return DistMatrix("rows", p, blocks, (m, n), r, n)
    if isinstance(layout, Grid):
        p = layout.p
        rm = next_pow2(-(-m // p))
        rn = next_pow2(-(-n // p))
        padded = np.zeros((p * rm, p * rn))
        padded[:m, :n] = M
        blocks = [[padded[i * rm:(i + 1) * rm, j * rn:(j + 1) * rn].copy()
                   for j in range(p)] for i in range(p)]
        return DistMatrix("grid", p, blocks, (m, n), rm, rn)
    raise ValueError(f"unsupported layout {layout!r}")


def tree_reduce(parts: list) -> np.ndarray:
    """Sum a list of arrays pairwise in a fixed binary tree (index order)."""
    parts = list(parts)
    while len(parts) > 1:
        nxt = []
        for i in range(0, len(parts) - 1, 2):
            nxt.append(parts[i] + parts[i + 1])
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def sketch_rowwise(op: SketchOperator, V: DistMatrix) -> np.ndarray:
    """Omega @ V for a row-partitioned V: local products, then tree sum-reduce."""
    if V.layout != "rows":
        raise ValueError("sketch_rowwise needs a RowBlocks layout")
    if op.p != V.p:
        raise ValueError(f"operator has p={op.p}, matrix has p={V.p}")
    if op.n != V.shape[0] or op.r != V.block_rows:
        raise ValueError(f"operator geometry (n={op.n}, r={op.r}) does not match "
                         f"matrix (rows={V.shape[0]}, block_rows={V.block_rows})")
    if op.p == 1:
        return apply_block_local(op, 0, V.blocks[0])
    with ThreadPoolExecutor(max_workers=op.p) as pool:
        parts = list(pool.map(lambda i: apply_block_local(op, i, V.blocks[i]),
                              range(op.p)))
    return tree_reduce(parts)


def sketch_grid_right(A: DistMatrix, op: SketchOperator) -> DistMatrix:
    """Y = A @ Omega.T for a grid-partitioned A, returned row-partitioned.

    Block (i, j) contributes A^(i,j) @ Omega^(j).T, computed by applying the
    operator block to the transposed local block; each grid column's
    contributions are tree-reduced to its column master.  Gathered, Y equals
    the dense A @ Omega.T.
    """
    if A.layout != "grid":
        raise ValueError("sketch_grid_right needs a Grid layout")
    if op.p != A.p:
        raise ValueError(f"operator has p={op.p}, grid has p={A.p}")
    if op.n != A.shape[1] or op.r != A.block_cols:
        raise ValueError(f"operator geometry (n={op.n}, r={op.r}) does not match "
                         f"grid columns (n={A.shape[1]}, block_cols={A.block_cols})")

    def row_result(i: int) -> np.ndarray:
        parts = [apply_block_local(op, j, A.blocks[i][j].T).T for j in range(op.p)]
        return tree_reduce(parts)

    if op.p == 1:
        blocks = [row_result(0)]
    else:
        with ThreadPoolExecutor(max_workers=op.p) as pool:
            blocks = list(pool.map(row_result, range(op.p)))
    return DistMatrix("rows", op.p, blocks, (A.shape[0], op.l), A.block_rows, op.l)


def cost_report(op: SketchOperator, d: int) -> dict:
    """Model counts per worker for sketching a d-column matrix.

    Structured kinds pay r d log2 r local flops, unstructured ones r d l;
    both pay the d l log2 p reduce term.  Memory is the operator word count
    a worker must hold.
    """
    logp = math.log2(op.p) if op.p > 1 else 0.0
    reduce_flops = d * op.l * logp
    if op.kind in ("srht", "bsrht"):
        local = op.r * d * math.log2(op.r) if op.r > 1 else op.r * d
        memory = 2 * op.r + 2 * op.l  # sign vectors, sample indices, panel slack
    else:
        local = op.r * d * op.l
        memory = op.r * op.l
    return {
        "kind": op.kind,
        "n": op.n,
        "d": d,
        "l": op.l,
        "p": op.p,
        "flops_per_worker": local + reduce_flops,
        "words_reduced": d * op.l * logp,
        "messages": math.ceil(logp),
        "operator_words_per_worker": memory,
    }
