"""Test-matrix construction: RBF kernels from tabular data and synthetic PSD
matrices with a prescribed spectrum."""

import numpy as np

from .partition import distribute


def load_csv(path):
    """Numeric comma-separated table; a non-numeric first row is treated as a header."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")

    def parse(line, lineno):
        cells = line.split(",")
        try:
            return [float(c) for c in cells]
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric cell") from None

    start = 0
    try:
        [float(c) for c in lines[0].split(",")]
    except ValueError:
        start = 1
    if start == len(lines):
        raise ValueError(f"{path}: no data rows")
    rows = [parse(ln, i + 1) for i, ln in enumerate(lines[start:], start=start)]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    X = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{path}: non-finite entries")
    return X


def rbf_kernel(X: np.ndarray, sigma: float, layout=None):
    """A_ij = exp(-||x_i - x_j||^2 / sigma^2); symmetric with unit diagonal.

    Computed once and mirrored; pass a Grid layout to get the kernel already
    sharded for the distributed sketch path.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    A = np.exp(-d2 / sigma ** 2)
    A = np.triu(A, 1)
    A = A + A.T
    np.fill_diagonal(A, 1.0)
    if layout is not None:
        return distribute(A, layout)
    return A


def synthetic_psd(n: int, spectrum, seed: int = 0):
    """A = Q diag(spectrum) Q.T with a random orthogonal Q.

    Returns (A, spectrum) so error oracles can use the exact singular values.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape != (n,):
        raise ValueError(f"spectrum must have length {n}")
    if np.any(spectrum < 0) or np.any(np.diff(spectrum) > 0):
        raise ValueError("spectrum must be nonincreasing and nonnegative")
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = (Q * spectrum) @ Q.T
    A = 0.5 * (A + A.T)
    return A, spectrum.copy()


def clustered_features(n: int, dim: int = 64, clusters: int = 10, seed: int = 0,
                       noise: float = 0.15) -> np.ndarray:
    """Synthetic digit-like feature rows: points around random centers in [0, 1]^dim.

    Stands in for an image-dataset subset when building RBF kernel test
    matrices; no downloading involved.
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, 1.0, size=(clusters, dim))
    labels = rng.integers(0, clusters, size=n)
    X = centers[labels] + noise * rng.standard_normal((n, dim))
    return np.clip(X, 0.0, 1.0)


def save_matrix(path, A: np.ndarray) -> None:
    """Matrix cache: shape header plus little-endian float64, column-major."""
    A = np.asarray(A, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(np.array(A.shape, dtype="<u8").tobytes())
        fh.write(np.asarray(A, dtype="<f8", order="F").tobytes(order="F"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        m, n = np.frombuffer(fh.read(16), dtype="<u8")
        buf = fh.read(int(m) * int(n) * 8)
    return np.frombuffer(buf, dtype="<f8").reshape((int(m), int(n)), order="F").copy()
