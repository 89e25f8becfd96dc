"""Single-mode operator matrices in the harmonic-oscillator (Fock) basis.

With ``phi = phi_zpf (a + a^dag)`` and ``x = lambda * phi_zpf``, the matrices of
``cos(lambda phi)`` and ``sin(lambda phi)`` have closed forms in terms of
associated Laguerre polynomials ``L_k^(l-k)(x^2)``. Entries are real; the
cosine matrix vanishes for ``k + l`` odd and the sine matrix for ``k + l`` even.

The sine matrix uses the sign ``(-1)**((l - k + 1) // 2)`` for ``k <= l``. That
is the negative of ``<k|sin(x (a + a^dag))|l>`` as obtained from the ladder
algebra, i.e. :func:`sin_matrix` equals ``-sin(x phi_hat / phi_zpf)``. The two
conventions are related by the parity operator ``(-1)**n`` and give identical
spectra; :func:`cos_matrix` ``+ 1j *`` :func:`sin_matrix` is the unitary
``exp(-i x (a + a^dag))``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "laguerre",
    "laguerre_table",
    "cos_matrix",
    "sin_matrix",
    "cos_sin_matrices",
    "phase_matrix",
    "charge_matrix",
    "number_diagonal",
]


def laguerre(k: int, a: int, x: float) -> float:
    """Associated Laguerre polynomial ``L_k^a(x)`` by upward recurrence.

    ``(j+1) L_{j+1} = (2j + 1 + a - x) L_j - (j + a) L_{j-1}``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    prev, cur = 0.0, 1.0
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 + a - x) * cur - (j + a) * prev) / (j + 1)
    return cur


def laguerre_table(kmax: int, amax: int, x: float) -> np.ndarray:
    """``T[k, a] = L_k^a(x)`` for ``0 <= k <= kmax``, ``0 <= a <= amax``."""
    a = np.arange(amax + 1, dtype=float)
    T = np.empty((kmax + 1, amax + 1))
    T[0] = 1.0
    prev = np.zeros_like(a)
    for j in range(kmax):
        T[j + 1] = ((2 * j + 1 + a - x) * T[j] - (j + a) * prev) / (j + 1)
        prev = T[j]
    return T


def cos_sin_matrices(x: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the ``dim x dim`` matrices of ``cos(x(a+a^dag))`` and the sine (see module note)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    x = float(x)
    x2 = x * x
    L = laguerre_table(dim - 1, dim - 1, x2)
    damp = math.exp(-x2 / 2)
    C = np.zeros((dim, dim))
    S = np.zeros((dim, dim))
    for k in range(dim):
        pref = damp  # sqrt(k!/l!) x^(l-k) e^{-x^2/2}, built as a running product
        for l in range(k, dim):
            if l > k:
                pref *= x / math.sqrt(l)
            d = l - k
            val = pref * L[k, d]
            if d % 2 == 0:
                C[k, l] = C[l, k] = val if (d // 2) % 2 == 0 else -val
            else:
                S[k, l] = S[l, k] = val if ((d + 1) // 2) % 2 == 0 else -val
    return C, S


def cos_matrix(x: float, dim: int) -> np.ndarray:
    return cos_sin_matrices(x, dim)[0]


def sin_matrix(x: float, dim: int) -> np.ndarray:
    return cos_sin_matrices(x, dim)[1]


def phase_matrix(phi_zpf: float, dim: int) -> np.ndarray:
    """Tridiagonal matrix of ``phi_zpf (a + a^dag)``."""
    off = phi_zpf * np.sqrt(np.arange(1, dim, dtype=float))
    return np.diag(off, 1) + np.diag(off, -1)


def charge_matrix(phi_zpf: float, dim: int) -> np.ndarray:
    """Matrix of the conjugate charge ``n = i (a^dag - a) / (2 phi_zpf)``, so ``[phi, n] = i``."""
    off = np.sqrt(np.arange(1, dim, dtype=float)) / (2 * phi_zpf)
    return 1j * (np.diag(off, -1) - np.diag(off, 1))


def number_diagonal(dim: int) -> np.ndarray:
    return np.arange(dim, dtype=float)
