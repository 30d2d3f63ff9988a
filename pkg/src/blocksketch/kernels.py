"""Dense building blocks: tree TSQR, truncated SVD, PSD Cholesky with
SVD-square-root fallback, right triangular solve, pseudoinverse apply."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular


@dataclass
class QRFactors:
    Q: np.ndarray  # m x l, orthonormal columns
    R: np.ndarray  # l x l, upper triangular


def tsqr(Y: np.ndarray, p: int = 1) -> QRFactors:
    """Tall-skinny QR: p panel factorizations combined in a binary tree.

    The combine order is a pure function of p, so results are reproducible.
    """
    Y = np.asarray(Y, dtype=np.float64)
    m, l = Y.shape
    if m < l:
        raise ValueError(f"tsqr needs m >= l, got {Y.shape}")
    p = max(1, min(p, m // l))  # every panel must keep at least l rows
    if p == 1:
        Q, R = np.linalg.qr(Y)
        return QRFactors(Q, R)

    bounds = np.linspace(0, m, p + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=p) as pool:
        leaves = list(pool.map(lambda i: np.linalg.qr(Y[bounds[i]:bounds[i + 1]]),
                               range(p)))

    nodes = [[Q] for Q, _ in leaves]  # per-leaf chain of combine factors
    rs = [R for _, R in leaves]
    groups = [[i] for i in range(p)]
    while len(rs) > 1:
        next_rs, next_groups = [], []
        for i in range(0, len(rs) - 1, 2):
            Qc, R = np.linalg.qr(np.vstack((rs[i], rs[i + 1])))
            for leaf in groups[i]:
                nodes[leaf].append(Qc[:l])
            for leaf in groups[i + 1]:
                nodes[leaf].append(Qc[l:])
            next_rs.append(R)
            next_groups.append(groups[i] + groups[i + 1])
        if len(rs) % 2:
            next_rs.append(rs[-1])
            next_groups.append(groups[-1])
            for leaf in groups[-1]:
                nodes[leaf].append(np.eye(l))
        rs, groups = next_rs, next_groups

    Q = np.empty((m, l))
    for i in range(p):
        piece = nodes[i][0]
        for F in nodes[i][1:]:
            piece = piece @ F
        Q[bounds[i]:bounds[i + 1]] = piece
    return QRFactors(Q, rs[0])


@dataclass
class TruncatedSVD:
    U: np.ndarray
    S: np.ndarray  # nonincreasing, nonnegative
    V: np.ndarray

    def dense(self) -> np.ndarray:
        return (self.U * self.S) @ self.V.T


def truncated_svd(M: np.ndarray, k: int) -> TruncatedSVD:
    """Best rank-k factors of a small dense matrix.

    Sign convention: the largest-magnitude entry of each left vector is made
    positive; singular-value ties keep column order from the full SVD.
    """
    M = np.asarray(M, dtype=np.float64)
    if not 0 < k <= min(M.shape):
        raise ValueError(f"k={k} out of range for shape {M.shape}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    U, s, V = U[:, :k], s[:k], Vt[:k].T
    for j in range(k):
        i = np.argmax(np.abs(U[:, j]))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
            V[:, j] = -V[:, j]
    return TruncatedSVD(U, s, V)


@dataclass
class PsdFactor:
    """Square-root factor of a symmetric PSD matrix S, with CT C = S.

    On the Cholesky path C is upper triangular and solve_right does backward
    substitution.  On the rank-deficient path C is kept in SVD form
    diag(sqrt(w)) @ U.T and solve_right applies the pseudoinverse.
    """

    C: np.ndarray
    is_cholesky: bool
    basis: np.ndarray | None = None   # U columns spanning range(S), fallback only
    roots: np.ndarray | None = None   # sqrt of the retained eigenvalues

    def solve_right(self, B: np.ndarray) -> np.ndarray:
        """X = B C^-1 (Cholesky) or B C^+ (fallback)."""
        if self.is_cholesky:
            return tri_solve(self.C, B)
        return (B @ self.basis) / self.roots


def cholesky_psd(S: np.ndarray, shift: bool = False) -> PsdFactor:
    """Factor a symmetric PSD matrix, falling back to an SVD square root.

    Pivots must exceed n * eps * max|diag| for the Cholesky path.  With
    shift=True, trace(S) * eps is added to the diagonal first to restore
    definiteness instead of falling back.
    """
    S = np.asarray(S, dtype=np.float64)
    nrm = np.linalg.norm(S, "fro")
    if nrm > 0 and np.linalg.norm(S - S.T, "fro") > 1e-10 * nrm:
        raise ValueError("matrix is not symmetric within tolerance")
    S = 0.5 * (S + S.T)
    n = S.shape[0]
    eps = np.finfo(np.float64).eps
    if shift:
        S = S + np.trace(S) * eps * np.eye(n)
    tol = n * eps * max(np.abs(np.diag(S)).max(), eps)
    try:
        L = np.linalg.cholesky(S)
        if np.min(np.diag(L)) ** 2 > tol:
            return PsdFactor(C=L.T, is_cholesky=True)
    except np.linalg.LinAlgError:
        pass
    # rank-deficient: square root in SVD form, used through its pseudoinverse
    w, U = np.linalg.eigh(S)
    keep = w > tol
    roots = np.sqrt(w[keep])
    C = roots[:, None] * U[:, keep].T
    return PsdFactor(C=C, is_cholesky=False, basis=U[:, keep], roots=roots)


def tri_solve(C: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve X C = B for upper triangular C by backward substitution."""
    if np.min(np.abs(np.diag(C))) == 0.0:
        raise np.linalg.LinAlgError("triangular factor is singular")
    return solve_triangular(C, B.T, lower=False, trans="T").T


def pinv_apply(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of M X = B.

    Full-column-rank inputs go through QR (the unique solution); anything
    rank-deficient falls back to the SVD-based solver.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape[0] >= M.shape[1] and M.shape[1] > 0:
        Q, R = np.linalg.qr(M)
        diag = np.abs(np.diag(R))
        if diag.min() > M.shape[1] * np.finfo(np.float64).eps * max(diag.max(), 1e-300):
            return solve_triangular(R, Q.T @ B, lower=False)
    X, *_ = np.linalg.lstsq(M, B, rcond=None)
    return X
