"""Shared oracles for the test suite.

The determinant oracle deliberately avoids numpy.linalg so that closed-form
determinant expansions in the package are checked against an independent
computation, not against the same LAPACK call they might wrap.
"""

import numpy as np


def laplace_det(m) -> complex:
    """Determinant by recursive cofactor expansion along the first row."""
    m = np.asarray(m)
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    total = 0.0 + 0.0j
    for col in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), col, axis=1)
        total += (-1.0) ** col * complex(m[0, col]) * laplace_det(minor)
    return total


def random_coherency_cell(rng: np.random.Generator, p: int) -> np.ndarray:
    """Random Hermitian unit-diagonal PSD matrix with off-diagonals inside the unit disc.

    Normalizing a complex Gram matrix A A^H by its diagonal gives exactly this
    structure; 2p columns in A keep the matrix comfortably full rank.
    """
    a = rng.normal(size=(p, 2 * p)) + 1j * rng.normal(size=(p, 2 * p))
    gram = a @ a.conj().T
    d = np.sqrt(np.real(np.diag(gram)))
    cell = gram / np.outer(d, d)
    cell = 0.5 * (cell + cell.conj().T)
    np.fill_diagonal(cell, 1.0)
    return cell
