"""Dense kernels for the small symmetric matrices used everywhere else.

Shape operators, normal-space Gram matrices and chart frames all live in
dimension <= ~10, so everything here is a plain dense computation on top
of numpy. Values are frozen after construction and every function is
pure, which keeps the randomized property suites trivially parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymmetricMatrix",
    "OrthogonalFrame",
    "frob_norm_sq",
    "commutator",
    "gram_schmidt",
    "jacobi_eigen",
]

FRAME_TOL = 1e-12

# Residual-norm cutoff below which gram_schmidt declares near linear
# dependence; for normalized inputs this matches a Gram-determinant
# threshold of about 1e-10.
_DEPENDENCE_TOL = 1e-5

_JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymmetricMatrix:
    """Square symmetric matrix; the upper triangle is the source of truth.

    The strict lower triangle of the input is ignored and replaced by the
    mirrored upper triangle, so ``data[i, j] == data[j, i]`` holds exactly
    by construction. The backing array is read-only.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        sym = np.triu(arr) + np.triu(arr, 1).T
        sym.flags.writeable = False
        object.__setattr__(self, "data", sym)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.data, dtype=dtype)
        return np.asarray(self.data, dtype=dtype)


@dataclass(frozen=True)
class OrthogonalFrame:
    """Rows are pairwise orthogonal unit vectors in ambient coordinates."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.vectors, dtype=float)
        if arr.ndim != 2:
            raise ValueError("frame must be a 2-d array, one vector per row")
        k, dim = arr.shape
        if k > dim:
            raise ValueError(f"{k} vectors cannot be orthonormal in dimension {dim}")
        gram = arr @ arr.T
        if np.max(np.abs(gram - np.eye(k))) > FRAME_TOL:
            raise ValueError("frame vectors are not orthonormal")
        arr.flags.writeable = False
        object.__setattr__(self, "vectors", arr)

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]


def frob_norm_sq(a: SymmetricMatrix) -> float:
    """N(A) = trace(A A^t), the squared Frobenius norm."""
    return float(np.sum(a.data * a.data))


def commutator(a: SymmetricMatrix, b: SymmetricMatrix) -> np.ndarray:
    """AB - BA. The result is antisymmetric, returned as a plain array."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a.data @ b.data - b.data @ a.data


def gram_schmidt(vectors) -> OrthogonalFrame:
    """Orthonormalize a sequence of ambient vectors, preserving order.

    The first output vector is ``vectors[0]`` normalized. Raises
    ``ValueError`` naming the first vector whose component orthogonal to
    the span of its predecessors is too small to normalize reliably.
    """
    vs = np.asarray(vectors, dtype=float)
    if vs.ndim != 2 or vs.shape[0] < 1:
        raise ValueError("expected a nonempty 2-d array of row vectors")
    if vs.shape[0] > vs.shape[1]:
        raise ValueError("more vectors than ambient dimensions")
    out = np.zeros_like(vs)
    for i, v in enumerate(vs):
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            raise ValueError(f"vector {i} is zero")
        w = v / norm0
        # Two projection passes: classical Gram-Schmidt plus one
        # re-orthogonalization sweep for numerical safety.
        for _ in range(2):
            w = w - out[:i].T @ (out[:i] @ w)
        res = np.linalg.norm(w)
        if res <= _DEPENDENCE_TOL:
            raise ValueError(
                f"vector {i} is numerically dependent on its predecessors "
                f"(residual norm {res:.3e})"
            )
        out[i] = w / res
    return OrthogonalFrame(out)


def jacobi_eigen(a: SymmetricMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition by cyclic Jacobi rotations.

    Sweeps run row-cyclic over the strict upper triangle until the
    off-diagonal Frobenius norm falls below 1e-14 * (1 + N(A)), with a
    hard cap of 100 sweeps. Returns ``(eigenvalues, Q)`` with eigenvalues
    sorted descending (ties keep ascending original pivot order) and the
    columns of Q the matching eigenvectors.
    """
    A = np.array(a.data)
    n = a.dim
    Q = np.eye(n)
    threshold = 1e-14 * (1.0 + float(np.sum(A * A)))

    def off_norm(mat: np.ndarray) -> float:
        stripped = mat - np.diag(np.diag(mat))
        return float(np.sqrt(np.sum(stripped * stripped)))

    converged = False
    for _ in range(_JACOBI_MAX_SWEEPS):
        if off_norm(A) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e100:
                    # Asymptotic tangent; keeps theta*theta from overflowing.
                    t = 0.5 / theta
                elif theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                qp, qq = Q[:, p].copy(), Q[:, q].copy()
                Q[:, p] = c * qp - s * qq
                Q[:, q] = s * qp + c * qq
    if not converged and off_norm(A) > threshold:
        raise RuntimeError(
            f"Jacobi iteration did not converge in {_JACOBI_MAX_SWEEPS} sweeps"
        )
    lam = np.diag(A).copy()
    order = np.lexsort((np.arange(n), -lam))
    return lam[order], Q[:, order].copy()
