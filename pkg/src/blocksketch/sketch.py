"""Sketching operators: Gaussian, Rademacher, SRHT and block SRHT.

An operator is fully determined by (kind, l, n, p, seed).  The SRHT family
is applied matrix-free (signs -> FWHT -> row sampling -> scaling); Gaussian
and Rademacher operators are materialized blockwise from per-block seeded
streams, so the distributed and monolithic application paths draw identical
random entries.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .hadamard import fwht_columns

KINDS = ("gaussian", "rademacher", "srht", "bsrht")

# default column-panel width for block-local application
COLUMN_PANEL = 20

# stream tags for child-seed derivation
_TAG_SAMPLING = 0
_TAG_BLOCK_SIGNS = 1
_TAG_LEFT_SIGNS = 2
_TAG_DENSE = 3


def next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def child_rng(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Independent stream for (master seed, stream tag, block index).

    Counter-based derivation: blocks regenerate their randomness locally,
    nothing needs to be transmitted.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(tag, index)))


@dataclass(frozen=True)
class SketchOperator:
    """An l x n sketching operator, immutable and reproducible from its seed.

    For the SRHT family the ambient dimension is zero-padded to p * r with
    r the next power of two of ceil(n / p); padded columns multiply zero
    rows of the input.  Gaussian/Rademacher operators reuse the same block
    geometry so that all kinds share one distributed code path.
    """

    kind: str
    l: int
    n: int
    p: int
    seed: int
    with_replacement: bool = True
    r: int = field(init=False)
    sample_indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sketch kind {self.kind!r}")
        if self.l < 1 or self.n < 1 or self.p < 1:
            raise ValueError("l, n and p must be positive")
        if self.kind == "srht" and self.p != 1:
            raise ValueError("srht is monolithic; use kind='bsrht' for p > 1")
        object.__setattr__(self, "r", next_pow2(-(-self.n // self.p)))
        if self.kind in ("srht", "bsrht"):
            if self.kind == "bsrht" and not self.with_replacement:
                raise ValueError("block SRHT always samples with replacement")
            if self.l > self.n_padded:
                raise ValueError(
                    f"SRHT-family needs l <= padded n ({self.n_padded}), got l={self.l}")
            rng = child_rng(self.seed, _TAG_SAMPLING)
            if self.with_replacement:
                idx = rng.integers(0, self.r, size=self.l)
            else:
                idx = rng.permutation(self.r)[: self.l]
            object.__setattr__(self, "sample_indices", idx)
        else:
            object.__setattr__(self, "sample_indices", np.empty(0, dtype=np.int64))

    @property
    def n_padded(self) -> int:
        return self.p * self.r

    @property
    def scale(self) -> float:
        return math.sqrt(self.r / self.l)

    # per-block randomness, regenerated on demand from child seeds
    def block_signs(self, i: int) -> np.ndarray:
        """Diagonal of D^(i): r Rademacher signs."""
        rng = child_rng(self.seed, _TAG_BLOCK_SIGNS, i)
        return rng.integers(0, 2, size=self.r).astype(np.float64) * 2.0 - 1.0

    def left_signs(self, i: int) -> np.ndarray:
        """Diagonal of the extra left sign flip of block i: l Rademacher signs."""
        rng = child_rng(self.seed, _TAG_LEFT_SIGNS, i)
        return rng.integers(0, 2, size=self.l).astype(np.float64) * 2.0 - 1.0

    def dense_block(self, i: int) -> np.ndarray:
        """Materialized l x r block for Gaussian/Rademacher kinds."""
        rng = child_rng(self.seed, _TAG_DENSE, i)
        if self.kind == "gaussian":
            return rng.standard_normal((self.l, self.r)) / math.sqrt(self.l)
        if self.kind == "rademacher":
            signs = rng.integers(0, 2, size=(self.l, self.r)).astype(np.float64) * 2.0 - 1.0
            return signs / math.sqrt(self.l)
        raise ValueError("dense_block is only defined for unstructured kinds")

    def iter_dense_block_panels(self, i: int, panel_rows: int = 64):
        """Yield (row offset, panel) pieces of dense_block(i) without holding it whole.

        Draws rows in the same stream order as dense_block, so the values agree.
        """
        rng = child_rng(self.seed, _TAG_DENSE, i)
        inv = 1.0 / math.sqrt(self.l)
        for start in range(0, self.l, panel_rows):
            rows = min(panel_rows, self.l - start)
            if self.kind == "gaussian":
                panel = rng.standard_normal((rows, self.r)) * inv
            else:
                panel = (rng.integers(0, 2, size=(rows, self.r)).astype(np.float64) * 2.0 - 1.0) * inv
            yield start, panel

    def descriptor(self) -> str:
        """Plain-text record sufficient to regenerate the operator bit-exactly."""
        return (f"kind={self.kind} l={self.l} n={self.n} p={self.p} "
                f"seed={self.seed} with_replacement={int(self.with_replacement)}")

    @staticmethod
    def from_descriptor(text: str) -> "SketchOperator":
        fields = dict(item.split("=", 1) for item in text.split())
        return SketchOperator(
            kind=fields["kind"],
            l=int(fields["l"]),
            n=int(fields["n"]),
            p=int(fields["p"]),
            seed=int(fields["seed"]),
            with_replacement=bool(int(fields.get("with_replacement", "1"))),
        )


def make_operator(kind: str, l: int, n: int, p: int = 1, seed: int = 0,
                  with_replacement: bool | None = None) -> SketchOperator:
    """Build a sketching operator. SRHT defaults to sampling without replacement."""
    if with_replacement is None:
        with_replacement = kind != "srht"
    return SketchOperator(kind=kind, l=l, n=n, p=p, seed=seed,
                          with_replacement=with_replacement)


def _pad_rows(M: np.ndarray, rows: int) -> np.ndarray:
    if M.shape[0] == rows:
        return M
    out = np.zeros((rows,) + M.shape[1:], dtype=np.float64)
    out[: M.shape[0]] = M
    return out


def _srht_block_apply(op: SketchOperator, i: int, Vi: np.ndarray,
                      with_left_signs: bool, panel: int) -> np.ndarray:
    """sqrt(r/l) * [D~] R H D^(i) Vi, processed in column panels."""
    d = Vi.shape[1]
    out = np.empty((op.l, d))
    signs = op.block_signs(i)
    left = op.left_signs(i) if with_left_signs else None
    for c0 in range(0, d, panel):
        c1 = min(c0 + panel, d)
        W = Vi[:, c0:c1] * signs[:, None]
        fwht_columns(W)
        S = W[op.sample_indices, :] * op.scale
        if left is not None:
            S *= left[:, None]
        out[:, c0:c1] = S
    return out


def apply_block_local(op: SketchOperator, i: int, Vi: np.ndarray,
                      panel: int = COLUMN_PANEL) -> np.ndarray:
    """Local contribution of block i: an l x d matrix, Omega^(i) Vi.

    Vi must carry the padded block row count r.  Cost for the SRHT family is
    O(r d log r + l d); no other block is touched.
    """
    if not 0 <= i < op.p:
        raise IndexError(f"block index {i} out of range for p={op.p}")
    if Vi.ndim != 2 or Vi.shape[0] != op.r:
        raise ValueError(f"block {i} must have {op.r} rows, got {Vi.shape}")
    if op.kind == "bsrht":
        return _srht_block_apply(op, i, Vi, with_left_signs=True, panel=panel)
    if op.kind == "srht":
        return _srht_block_apply(op, i, Vi, with_left_signs=False, panel=panel)
    # unstructured kinds: panel the generated rows to bound working memory
    out = np.empty((op.l, Vi.shape[1]))
    for start, block_panel in op.iter_dense_block_panels(i):
        out[start:start + block_panel.shape[0]] = block_panel @ Vi
    return out


def apply_dense(op: SketchOperator, M: np.ndarray) -> np.ndarray:
    """Monolithic product Omega @ M for an n x d input (reference path).

    SRHT-family products never form Omega; they pad, sign-flip, transform,
    sample and scale blockwise, then sum the block contributions.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        return apply_dense(op, M[:, None])[:, 0]
    if M.shape[0] != op.n:
        raise ValueError(f"expected {op.n} rows, got {M.shape[0]}")
    Mp = _pad_rows(M, op.n_padded)
    acc = apply_block_local(op, 0, Mp[: op.r])
    for i in range(1, op.p):
        acc += apply_block_local(op, i, Mp[i * op.r: (i + 1) * op.r])
    return acc


def assemble_dense(op: SketchOperator) -> np.ndarray:
    """Dense l x n Omega, column by column.  Diagnostic use at small n only."""
    cols = [apply_dense(op, np.eye(op.n)[:, [j]])[:, 0] for j in range(op.n)]
    return np.stack(cols, axis=1)


def min_rows_theorem1(eps: float, delta: float, d: int, n: int) -> int:
    """Smallest l making a block SRHT an (eps, delta, d) subspace embedding.

    Natural logarithm throughout; the caller must separately enforce l <= n.
    """
    _check_bound_args(eps, delta, d, n)
    bound = 3.7 * eps ** -2 * (math.sqrt(d) + 4.0 * math.sqrt(math.log(n / delta) + 6.3)) ** 2 \
        * math.log(5.0 * d / delta)
    return math.ceil(bound)


def min_rows_srht(eps: float, delta: float, d: int, n: int) -> int:
    """Smallest l for the standard SRHT embedding guarantee (natural log)."""
    _check_bound_args(eps, delta, d, n)
    bound = 3.0 * eps ** -2 * (math.sqrt(d) + math.sqrt(8.0 * math.log(6.0 * n / delta))) ** 2 \
        * math.log(3.0 * d / delta)
    return math.ceil(bound)


def _check_bound_args(eps: float, delta: float, d: int, n: int) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
