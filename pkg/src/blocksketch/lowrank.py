"""Randomized low-rank approximation: RSVD (two passes), Nystrom and
single-view RSVD (one pass), plus exact error measurement for diagnostics.

All three algorithms reduce every SVD to a small (at most l x l) problem;
no large dense SVD is ever taken on the input matrix itself.
"""

import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import TruncatedSVD, cholesky_psd, pinv_apply, truncated_svd, tsqr
from .partition import DistMatrix, sketch_grid_right
from .sketch import SketchOperator, apply_dense

_MAGIC = b"BSKF"
_KIND_SVD, _KIND_PSD = 1, 2


@dataclass
class LowRankSVD:
    """Rank-k factorization U diag(S) V.T with orthonormal U, V."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def dense(self) -> np.ndarray:
        return (self.U * self.S) @ self.V.T


@dataclass
class LowRankPSD:
    """Symmetric PSD factorization U diag(evals) U.T (evals = squared sigmas)."""

    U: np.ndarray
    evals: np.ndarray

    @property
    def rank(self) -> int:
        return self.evals.shape[0]

    def dense(self) -> np.ndarray:
        return (self.U * self.evals) @ self.U.T


def _right_sketch(A, op: SketchOperator) -> np.ndarray:
    """Y = A @ Omega.T for a dense or grid-distributed A."""
    if isinstance(A, DistMatrix):
        return sketch_grid_right(A, op).gather()
    return apply_dense(op, np.ascontiguousarray(A.T)).T


def _densify(A) -> np.ndarray:
    return A.gather() if isinstance(A, DistMatrix) else np.asarray(A, dtype=np.float64)


def rsvd(A, op: SketchOperator, k: int, qr_panels: int = 4) -> LowRankSVD:
    """Randomized SVD; two passes over A (range sketch, then Q.T @ A)."""
    m, n = A.shape
    if not 0 < k <= op.l:
        raise ValueError(f"need 0 < k <= l, got k={k}, l={op.l}")
    if op.n != n:
        raise ValueError("operator width does not match the matrix")
    if op.l > m:
        raise ValueError("sketch size exceeds the row count")
    Y = _right_sketch(A, op)                    # m x l
    Q = tsqr(Y, qr_panels).Q
    Z = Q.T @ _densify(A)                       # l x n, second pass
    pr = tsqr(Z.T, qr_panels)
    small = truncated_svd(pr.R.T, k)            # l x l problem
    return LowRankSVD(U=Q @ small.U, S=small.S, V=pr.Q @ small.V)


def nystrom(A, op: SketchOperator, k: int, stable_basis: bool = False,
            qr_panels: int = 4) -> LowRankPSD:
    """Rank-k Nystrom approximation of a symmetric PSD matrix; one pass over A.

    Equivalent to the closed form (Omega A).T (Omega A Omega.T)^+ (Omega A)
    truncated to rank k.  With stable_basis=True the eigenvector block is
    rebuilt from the orthogonal factor of Z instead of Y, trading flops for
    stability.
    """
    n, n2 = A.shape
    if n != n2:
        raise ValueError("Nystrom needs a square matrix")
    if not 0 < k <= op.l:
        raise ValueError(f"need 0 < k <= l, got k={k}, l={op.l}")
    Ad = None
    if isinstance(A, DistMatrix):
        Y = sketch_grid_right(A, op).gather()
    else:
        Ad = np.asarray(A, dtype=np.float64)
        if np.linalg.norm(Ad - Ad.T, "fro") > 1e-10 * max(np.linalg.norm(Ad, "fro"), 1e-300):
            raise ValueError("Nystrom needs a symmetric input")
        Y = apply_dense(op, Ad).T               # A Omega.T = (Omega A).T for symmetric A
    B = apply_dense(op, Y)                      # Omega A Omega.T, no extra pass over A
    factor = cholesky_psd(B)
    Z = factor.solve_right(Y)                   # n x rank(B)
    qr = tsqr(Z, qr_panels)
    kk = min(k, qr.R.shape[0])
    small = truncated_svd(qr.R, kk)
    # guard the division: drop directions with negligible singular values
    cutoff = np.finfo(np.float64).eps * max(small.S[0], np.finfo(np.float64).tiny)
    keep = small.S > cutoff
    if not np.all(keep):
        warnings.warn(f"Nystrom rank reduced from {kk} to {int(keep.sum())} "
                      "(vanishing singular values)", RuntimeWarning)
        small = TruncatedSVD(small.U[:, keep], small.S[keep], small.V[:, keep])
    if stable_basis:
        U = qr.Q @ small.U
    else:
        U = (Z @ small.V) / small.S
    return LowRankPSD(U=U, evals=small.S ** 2)


def nystrom_closed_form(A: np.ndarray, op: SketchOperator, k: int) -> np.ndarray:
    """Dense oracle (Omega A).T (Omega A Omega.T)^+ (Omega A), truncated to rank k.

    Small n only; used to validate the factored algorithm.
    """
    A = np.asarray(A, dtype=np.float64)
    OA = apply_dense(op, A)
    core = np.linalg.pinv(apply_dense(op, OA.T), rcond=1e-12, hermitian=True)
    full = OA.T @ core @ OA
    full = 0.5 * (full + full.T)
    w, U = np.linalg.eigh(full)
    order = np.argsort(w)[::-1][:k]
    return (U[:, order] * w[order]) @ U[:, order].T


def single_view(A, op_omega: SketchOperator, op_gamma: SketchOperator,
                op_phi: SketchOperator, op_psi: SketchOperator, k: int,
                qr_panels: int = 4, return_bases: bool = False):
    """One-pass approximation of a general matrix from four sketches.

    Range sketches (l rows) give bases Q, P; core sketches (s >= l rows)
    estimate the residual norm.  The core matrix is recovered with two
    least-squares solves.
    """
    m, n = A.shape
    if op_phi.l < op_omega.l or op_psi.l < op_gamma.l:
        raise ValueError("core sketches need at least as many rows as range sketches")
    if not 0 < k <= min(op_omega.l, op_gamma.l):
        raise ValueError(f"k={k} out of range")
    Ad = _densify(A)
    # one pass: all three sketches depend on A only
    Y = apply_dense(op_omega, Ad.T).T           # m x l
    X = apply_dense(op_gamma, Ad).T             # n x l
    Z = apply_dense(op_phi, apply_dense(op_psi, Ad.T).T)   # s x s
    Q = tsqr(Y, qr_panels).Q
    P = tsqr(X, qr_panels).Q
    phi_q = apply_dense(op_phi, Q)
    psi_p = apply_dense(op_psi, P)
    core = pinv_apply(phi_q, Z)                 # (Phi Q)^+ Z
    core = pinv_apply(psi_p, core.T).T          # ... ((Psi P).T)^+
    small = truncated_svd(core, k)
    out = LowRankSVD(U=Q @ small.U, S=small.S, V=P @ small.V)
    if return_bases:
        return out, Q, P
    return out


NORM_KINDS = ("spectral", "trace", "fro")


def error_norm(A, B, norm: str = "fro", size_guard: int = 10_000) -> float:
    """Exact norm of A - B for diagnostics (dense SVD for spectral/trace).

    B may be a LowRankSVD/LowRankPSD factorization or a dense array.
    """
    if norm not in NORM_KINDS:
        raise ValueError(f"norm must be one of {NORM_KINDS}")
    Ad = _densify(A)
    if max(Ad.shape) > size_guard:
        raise ValueError(f"matrix too large for exact error measurement ({Ad.shape})")
    Bd = B.dense() if hasattr(B, "dense") else np.asarray(B, dtype=np.float64)
    E = Ad - Bd
    if norm == "fro":
        return float(np.linalg.norm(E, "fro"))
    s = np.linalg.svd(E, compute_uv=False)
    return float(s[0]) if norm == "spectral" else float(np.sum(s))


def psd_trace_error(A, B: LowRankPSD) -> float:
    """Trace-norm error for a PSD input and its Nystrom approximation.

    Both A - [[A]]^(Nyst) and the truncation remainder are PSD, so the trace
    norm of the residual is just the trace difference; this avoids a dense
    SVD at large n.
    """
    Ad = _densify(A)
    return float(np.trace(Ad) - np.sum(B.evals))


def save_factorization(path, fact) -> None:
    """Binary container: header (magic, kind, shapes), then column-major
    float64 little-endian factor payloads."""
    with open(path, "wb") as fh:
        if isinstance(fact, LowRankSVD):
            fh.write(_MAGIC)
            fh.write(struct.pack("<BQQQ", _KIND_SVD, fact.U.shape[0],
                                 fact.V.shape[0], fact.rank))
            for arr in (fact.U, fact.S, fact.V):
                fh.write(np.asarray(arr, dtype="<f8", order="F").tobytes(order="F"))
        elif isinstance(fact, LowRankPSD):
            fh.write(_MAGIC)
            fh.write(struct.pack("<BQQQ", _KIND_PSD, fact.U.shape[0],
                                 fact.U.shape[0], fact.rank))
            for arr in (fact.U, fact.evals):
                fh.write(np.asarray(arr, dtype="<f8", order="F").tobytes(order="F"))
        else:
            raise TypeError(f"cannot serialize {type(fact).__name__}")


def load_factorization(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a factorization container")
        kind, m, n, k = struct.unpack("<BQQQ", fh.read(25))

        def block(rows, cols):
            buf = fh.read(rows * cols * 8)
            return np.frombuffer(buf, dtype="<f8").reshape((rows, cols), order="F").copy()

        if kind == _KIND_SVD:
            U = block(m, k)
            S = block(k, 1)[:, 0]
            V = block(n, k)
            return LowRankSVD(U, S, V)
        if kind == _KIND_PSD:
            U = block(m, k)
            evals = block(k, 1)[:, 0]
            return LowRankPSD(U, evals)
        raise ValueError(f"unknown container kind {kind}")
