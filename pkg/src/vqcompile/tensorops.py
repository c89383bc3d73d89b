"""Dense complex tensor arithmetic and matrix decompositions.

Every other module builds on the three kernels here: pairwise tensor
contraction, rank-revealing truncated SVD, and the Hermitian matrix
exponential. Tensors are plain ``numpy.ndarray`` objects in double-precision
complex with C-order (row-major) linearization; that layout is the canonical
one used by the checkpoint serializers.

All functions are pure: inputs are never mutated, so concurrent callers need
no locking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import DecompositionError, NonHermitianError, ShapeError

ComplexArray = NDArray[np.complex128]

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_PAULI_BY_LABEL = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

# The fixed generator order for two-qubit gate parameterizations: all pairs
# (a, b) over I, X, Y, Z in row-major order with the identity pair removed.
TWO_QUBIT_GENERATOR_LABELS: tuple[str, ...] = tuple(
    a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II"
)


def pauli(label: str) -> ComplexArray:
    """Return the single-qubit Pauli matrix for ``label`` in {I, X, Y, Z}."""
    try:
        return _PAULI_BY_LABEL[label]
    except KeyError:
        msg = f"unknown Pauli label {label!r}"
        raise ShapeError(msg) from None


def pauli_string(labels: str) -> ComplexArray:
    """Kronecker product of single-qubit Paulis, leftmost label most significant."""
    out = np.array([[1.0 + 0.0j]])
    for ch in labels:
        out = np.kron(out, pauli(ch))
    return out


def two_qubit_generators() -> ComplexArray:
    """The 15 non-identity two-qubit Pauli generators, stacked (15, 4, 4).

    Order follows :data:`TWO_QUBIT_GENERATOR_LABELS`; the first qubit of the
    pair is the most significant index.
    """
    return np.stack([pauli_string(lbl) for lbl in TWO_QUBIT_GENERATOR_LABELS])


def contract(a: ComplexArray, b: ComplexArray, axes: tuple) -> ComplexArray:
    """Contract paired axes of two tensors.

    Args:
        a: First tensor.
        b: Second tensor.
        axes: Pair ``(axes_a, axes_b)`` of equal-length sequences (or two
            ints) naming the axes to sum over.

    Returns:
        Tensor whose extents are the unpaired extents of ``a`` followed by
        those of ``b``, in their original order.

    Raises:
        ShapeError: If an axis index is out of range or paired extents differ.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    axes_a, axes_b = axes
    if np.isscalar(axes_a):
        axes_a = (int(axes_a),)
    if np.isscalar(axes_b):
        axes_b = (int(axes_b),)
    axes_a = tuple(int(x) for x in axes_a)
    axes_b = tuple(int(x) for x in axes_b)
    if len(axes_a) != len(axes_b):
        msg = f"axis lists have different lengths: {axes_a} vs {axes_b}"
        raise ShapeError(msg)
    for ax, tensor, name in ((axes_a, a, "a"), (axes_b, b, "b")):
        for x in ax:
            if not -tensor.ndim <= x < tensor.ndim:
                msg = f"axis {x} out of range for rank-{tensor.ndim} tensor {name}"
                raise ShapeError(msg)
    for xa, xb in zip(axes_a, axes_b):
        if a.shape[xa] != b.shape[xb]:
            msg = (
                f"paired extents differ: a.shape[{xa}]={a.shape[xa]} vs "
                f"b.shape[{xb}]={b.shape[xb]}"
            )
            raise ShapeError(msg)
    return np.tensordot(a, b, axes=(axes_a, axes_b))


@dataclass(frozen=True)
class TruncatedSVD:
    """Result of a truncated singular value decomposition.

    Attributes:
        left: Column isometry, shape (rows, rank).
        singular_values: Kept singular values, non-negative and descending.
        right: Row isometry, shape (rank, cols).
        discarded_weight: Sum of squared dropped singular values. The
            Frobenius reconstruction error equals ``sqrt(discarded_weight)``.
    """

    left: ComplexArray
    singular_values: NDArray[np.float64]
    right: ComplexArray
    discarded_weight: float

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    def reconstruct(self) -> ComplexArray:
        return (self.left * self.singular_values) @ self.right


def svd_truncated(
    m: ComplexArray,
    max_rank: int | None = None,
    cutoff: float = 0.0,
) -> TruncatedSVD:
    """SVD of a matrix with dual-criterion rank truncation.

    The kept rank is ``min(max_rank, k)`` where ``k`` counts singular values
    whose squared value exceeds ``cutoff`` relative to the total squared
    weight. At least one singular value is always kept, so degenerate inputs
    never produce a rank-zero factorization.

    Args:
        m: Rank-2 tensor to decompose.
        max_rank: Hard cap on the kept rank; ``None`` means no cap.
        cutoff: Relative squared-weight threshold, >= 0.

    Raises:
        ShapeError: If ``m`` is not rank-2 or the knobs are out of range.
        DecompositionError: If the underlying LAPACK drivers fail to converge.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        msg = f"svd_truncated expects a rank-2 tensor, got rank {m.ndim}"
        raise ShapeError(msg)
    if max_rank is not None and max_rank < 1:
        msg = f"max_rank must be >= 1, got {max_rank}"
        raise ShapeError(msg)
    if cutoff < 0:
        msg = f"cutoff must be >= 0, got {cutoff}"
        raise ShapeError(msg)

    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails on ill-conditioned inputs; gesvd is slower
        # but more robust.
        try:
            u, s, vh = scipy.linalg.svd(
                m, full_matrices=False, lapack_driver="gesvd"
            )
        except scipy.linalg.LinAlgError as exc:
            msg = "singular value decomposition did not converge"
            raise DecompositionError(msg) from exc

    weights = s**2
    total = float(weights.sum())
    if total > 0.0:
        keep = int(np.count_nonzero(weights > cutoff * total))
    else:
        keep = 0
    keep = max(keep, 1)
    if max_rank is not None:
        keep = min(keep, max_rank)
    discarded = float(weights[keep:].sum())
    return TruncatedSVD(
        left=u[:, :keep],
        singular_values=s[:keep],
        right=vh[:keep, :],
        discarded_weight=discarded,
    )


def hermitian_exponential(h: ComplexArray, scale: float) -> ComplexArray:
    """Compute ``exp(1j * scale * h)`` for Hermitian ``h`` via eigendecomposition.

    Args:
        h: Hermitian matrix (checked to absolute tolerance 1e-10).
        scale: Real multiplier in the exponent.

    Returns:
        A unitary matrix (to 1e-10 by construction).

    Raises:
        NonHermitianError: If ``h`` deviates from its adjoint beyond 1e-10.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        msg = f"expected a square matrix, got shape {h.shape}"
        raise ShapeError(msg)
    deviation = float(np.max(np.abs(h - h.conj().T)))
    if deviation > 1e-10:
        msg = f"matrix is not Hermitian (max deviation {deviation:.3e})"
        raise NonHermitianError(msg)
    eigvals, eigvecs = np.linalg.eigh(h)
    phases = np.exp(1j * float(scale) * eigvals)
    return (eigvecs * phases) @ eigvecs.conj().T


def is_unitary(m: ComplexArray, tol: float = 1e-10) -> bool:
    """Check ``m @ m.conj().T == I`` to absolute tolerance ``tol``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    gram = m @ m.conj().T
    return bool(np.max(np.abs(gram - np.eye(m.shape[0]))) <= tol)
