"""In-place normalized fast Walsh-Hadamard transform.

The transform H is the symmetric orthogonal Hadamard matrix rescaled by
1/sqrt(r).  Butterfly stages run unscaled; a single final multiply by
1/sqrt(r) keeps roundoff and flop count down.
"""

import numpy as np


def _check_pow2(r: int) -> None:
    if r < 1 or (r & (r - 1)) != 0:
        raise ValueError(f"transform length must be a power of two, got {r}")


def fwht_inplace(x: np.ndarray) -> np.ndarray:
    """Normalized Walsh-Hadamard transform of a vector, in place.

    O(r log r) iterative butterfly.  Returns the same buffer.
    """
    r = x.shape[0]
    _check_pow2(r)
    h = 1
    while h < r:
        y = x.reshape(-1, 2 * h)
        a = y[:, :h].copy()
        b = y[:, h:]
        y[:, :h] = a + b
        y[:, h:] = a - b
        h *= 2
    x *= 1.0 / np.sqrt(r)
    return x


def fwht_columns(M: np.ndarray) -> np.ndarray:
    """Apply the normalized transform to every column of an r x d matrix, in place."""
    r = M.shape[0]
    _check_pow2(r)
    h = 1
    while h < r:
        y = M.reshape(-1, 2 * h, M.shape[1])
        a = y[:, :h, :].copy()
        b = y[:, h:, :]
        y[:, :h, :] = a + b
        y[:, h:, :] = a - b
        h *= 2
    M *= 1.0 / np.sqrt(r)
    return M


def dense_hadamard(r: int) -> np.ndarray:
    """Explicit normalized Hadamard matrix, for oracles and small sizes only."""
    _check_pow2(r)
    H = np.array([[1.0]])
    while H.shape[0] < r:
        H = np.block([[H, H], [H, -H]])
    return H / np.sqrt(r)
