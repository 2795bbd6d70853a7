"""
Truncated SVD of SPPMI matrices and orthogonal Procrustes alignment of snapshots.
"""

import logging
from typing import Tuple, Union

import numpy as np
from scipy import linalg, sparse
from sklearn.utils.extmath import randomized_svd, svd_flip

from .cooccurrence import SppmiMatrix
from .snapshot import EmbeddingSnapshot, ModelTag

logger = logging.getLogger(__name__)

ALLOWED_EXPONENTS = (0.0, 0.5, 1.0)


def svd_factors(
    matrix: Union[np.ndarray, sparse.spmatrix],
    D: int,
    exact_max_size: int = 500,
    n_oversamples: int = 10,
    n_iter: int = 4,
    random_state: int = 0,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Top-D singular triples, singular values descending.

    Matrices with at most ``exact_max_size`` rows use a dense exact SVD; larger
    ones use randomized subspace iteration. Each left singular vector is signed
    so its largest-magnitude entry is positive.

    Returns:
        (U of shape (V, D), s of shape (D,), Vt of shape (D, V))

    Raises:
        ValueError: If D is outside [1, V] or the matrix is all-zero
    """
    n_rows = matrix.shape[0]
    if not 1 <= D <= min(matrix.shape):
        raise ValueError(f"Dimension D={D} must lie in [1, {min(matrix.shape)}]")

    is_zero = matrix.nnz == 0 if sparse.issparse(matrix) else not np.any(matrix)
    if is_zero:
        raise ValueError("Cannot factorize an all-zero matrix")

    if n_rows <= exact_max_size:
        dense = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix, dtype=np.float64)
        U, s, Vt = linalg.svd(dense, full_matrices=False)
        U, s, Vt = U[:, :D], s[:D], Vt[:D]
    else:
        U, s, Vt = randomized_svd(
            matrix,
            n_components=D,
            n_oversamples=n_oversamples,
            n_iter=n_iter,
            random_state=random_state,
        )
    U, Vt = svd_flip(U, Vt, u_based_decision=True)
    return U, s, Vt


def truncated_svd(
    sppmi_matrix: SppmiMatrix,
    D: int,
    time_index: int = 0,
    exponent: float = 0.5,
    exact_max_size: int = 500,
    n_oversamples: int = 10,
    n_iter: int = 4,
    random_state: int = 0,
) -> EmbeddingSnapshot:
    """
    Factorize an SPPMI matrix into word vectors W = U_D * S_D ** exponent.

    Args:
        sppmi_matrix: Matrix to factorize
        D: Embedding dimension, 1 <= D <= V
        time_index: Slice the snapshot belongs to
        exponent: Singular value weighting, one of 0, 0.5, 1

    Returns:
        Unaligned svd snapshot carrying its singular values
    """
    if exponent not in ALLOWED_EXPONENTS:
        raise ValueError(f"exponent must be one of {ALLOWED_EXPONENTS}, got {exponent}")
    U, s, _ = svd_factors(
        sppmi_matrix.matrix, D,
        exact_max_size=exact_max_size,
        n_oversamples=n_oversamples,
        n_iter=n_iter,
        random_state=random_state,
    )
    return EmbeddingSnapshot(
        matrix=U * np.power(s, exponent),
        time_index=time_index,
        model_tag=ModelTag.SVD,
        singular_values=s,
    )


def procrustes_rotation(current: np.ndarray, previous: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Orthogonal Omega minimizing ||current @ Omega - previous||_F.

    Returns:
        (Omega, degenerate) where degenerate means the cross-covariance was zero
        and the identity was returned
    """
    if current.shape != previous.shape:
        raise ValueError(f"Shape mismatch: {current.shape} vs {previous.shape}")
    D = current.shape[1]
    if not np.any(current.T @ previous):
        return np.eye(D), True
    omega, _ = linalg.orthogonal_procrustes(current, previous)
    return omega, False


def procrustes_align(current: EmbeddingSnapshot, previous: EmbeddingSnapshot) -> EmbeddingSnapshot:
    """
    Rotate ``current`` onto ``previous``.

    Raises:
        ValueError: If the snapshots do not have the same shape
    """
    omega, degenerate = procrustes_rotation(current.matrix, previous.matrix)
    if degenerate:
        logger.warning(
            "Zero cross-covariance aligning slice %d onto %d; using identity",
            current.time_index, previous.time_index,
        )
    return EmbeddingSnapshot(
        matrix=current.matrix @ omega,
        time_index=current.time_index,
        model_tag=current.model_tag,
        aligned=True,
        alignment_degenerate=degenerate,
        singular_values=current.singular_values,
    )
