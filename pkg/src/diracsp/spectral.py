"""Eigenstructure of the assembled operator from boundary-map SVDs.

The nonzero spectrum comes in +/-sigma pairs built from the singular
triplets of the two boundary blocks; the kernel (harmonic space) is
assembled from the three per-Laplacian null spaces. All eigenvector
columns are sign-canonicalized so repeated runs give identical bases.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .complexes import SimplicialComplex, simplex_labels
from .errors import NumericalError
from .operators import DiracOperator, SimplicialSignal

__all__ = [
    "SpectralBasis",
    "SignalDecomposition",
    "compute_basis",
    "decompose_signal",
    "betti_numbers",
    "planted_eigenvector",
    "write_spectrum_csv",
]

DEFAULT_RANK_TOL = 1e-10

_SQRT2 = np.sqrt(2.0)


def _numerical_rank(sigma: np.ndarray, rank_tol: float) -> int:
    """Count singular values above rank_tol relative to the largest one."""
    if sigma.size == 0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma[0]))


def _canonicalize_pair(U: np.ndarray, V: np.ndarray) -> None:
    """Flip (u, v) column pairs in place so each V column's largest-magnitude
    entry is positive; argmax picks the lowest index on ties."""
    for j in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] *= -1.0
            U[:, j] *= -1.0


def _canonicalize_columns(M: np.ndarray) -> np.ndarray:
    for j in range(M.shape[1]):
        k = int(np.argmax(np.abs(M[:, j])))
        if M[k, j] < 0:
            M[:, j] *= -1.0
    return M


@dataclass(frozen=True)
class SpectralBasis:
    """Complete orthonormal eigenbasis of the operator, split by family.

    `svd1` and `svd2` hold the reduced (rank-truncated) SVDs of the two
    boundary blocks as (U, sigma, V) with V in column convention. The
    phi* matrices stack unit-norm eigenvectors column-wise in the full
    N+E+T layout; `eigenvalues` lists the eigenvalue of every column of
    the concatenation [phi1_aligned | phi1_anti | phi2_aligned |
    phi2_anti | phi_harm]. D1_dim and D2_dim are the image dimensions
    of the two operator parts (twice the respective boundary ranks).
    """

    svd1: tuple[np.ndarray, np.ndarray, np.ndarray]
    svd2: tuple[np.ndarray, np.ndarray, np.ndarray]
    phi1_aligned: np.ndarray
    phi1_anti: np.ndarray
    phi2_aligned: np.ndarray
    phi2_anti: np.ndarray
    phi_harm: np.ndarray
    eigenvalues: np.ndarray
    D1_dim: int
    D2_dim: int
    block_dims: tuple[int, int, int] = field(default=(0, 0, 0))

    @property
    def phi1(self) -> np.ndarray:
        """Orthonormal basis of im(D1): aligned then anti-aligned columns."""
        return np.hstack([self.phi1_aligned, self.phi1_anti])

    @property
    def phi2(self) -> np.ndarray:
        return np.hstack([self.phi2_aligned, self.phi2_anti])

    @property
    def phi(self) -> np.ndarray:
        """All eigenvector columns, in the order `eigenvalues` refers to."""
        return np.hstack([self.phi1_aligned, self.phi1_anti,
                          self.phi2_aligned, self.phi2_anti, self.phi_harm])

    @property
    def harmonic_dim(self) -> int:
        return self.phi_harm.shape[1]

    def family_labels(self) -> list[tuple[str, str]]:
        """(family, alignment) per column of `phi`: d1/d2/harm x aligned/anti/harm."""
        r1 = self.D1_dim // 2
        r2 = self.D2_dim // 2
        return ([("d1", "aligned")] * r1 + [("d1", "anti")] * r1
                + [("d2", "aligned")] * r2 + [("d2", "anti")] * r2
                + [("harm", "harm")] * self.harmonic_dim)


def compute_basis(op: DiracOperator, rank_tol: float = DEFAULT_RANK_TOL) -> SpectralBasis:
    """Dense SVD-based eigendecomposition of the operator.

    Singular triplets with sigma <= rank_tol * sigma_max are discarded as
    rank-deficient. Nonzero eigenpairs are assembled from the triplets of
    the boundary blocks ([u; v; 0]/sqrt(2) with eigenvalue +sigma,
    [u; -v; 0]/sqrt(2) with -sigma, and the edge-triangle analogues);
    the harmonic basis comes from the kernels of the three Laplacians,
    padded with zeros to the full layout.
    """
    if not rank_tol > 0:
        raise ValueError("rank_tol must be positive")
    n, e, t = op.block_dims
    B1 = op.B1.toarray()
    B2 = op.B2.toarray()
    try:
        U1f, sig1, V1tf = np.linalg.svd(B1, full_matrices=True)
        U2f, sig2, V2tf = np.linalg.svd(B2, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD of a boundary block failed: {exc}") from None

    r1 = _numerical_rank(sig1, rank_tol)
    r2 = _numerical_rank(sig2, rank_tol)
    U1, s1, V1 = U1f[:, :r1].copy(), sig1[:r1].copy(), V1tf[:r1].T.copy()
    U2, s2, V2 = U2f[:, :r2].copy(), sig2[:r2].copy(), V2tf[:r2].T.copy()
    _canonicalize_pair(U1, V1)
    _canonicalize_pair(U2, V2)

    z_t1 = np.zeros((t, r1))
    phi1_aligned = np.vstack([U1, V1, z_t1]) / _SQRT2
    phi1_anti = np.vstack([U1, -V1, z_t1]) / _SQRT2
    z_n2 = np.zeros((n, r2))
    phi2_aligned = np.vstack([z_n2, U2, V2]) / _SQRT2
    phi2_anti = np.vstack([z_n2, U2, -V2]) / _SQRT2

    # Kernels: ker L0 = left null space of B1, ker L2 = right null space of
    # B2, ker L1 = null space of the stacked [B1; B2^T] (edge vectors killed
    # by both maps). Each is padded with zeros into the full layout.
    h0 = _canonicalize_columns(U1f[:, r1:].copy())
    h2 = _canonicalize_columns(V2tf[r2:].T.copy())
    if e:
        K = np.vstack([B1, B2.T])
        try:
            Vkt = np.linalg.svd(K, full_matrices=True)[2]
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD of the stacked boundary failed: {exc}") from None
        h1 = _canonicalize_columns(Vkt[r1 + r2:].T.copy())
    else:
        h1 = np.zeros((0, 0))
    parts = []
    if h0.shape[1]:
        parts.append(np.vstack([h0, np.zeros((e + t, h0.shape[1]))]))
    if h1.shape[1]:
        parts.append(np.vstack([np.zeros((n, h1.shape[1])), h1, np.zeros((t, h1.shape[1]))]))
    if h2.shape[1]:
        parts.append(np.vstack([np.zeros((n + e, h2.shape[1])), h2]))
    total = n + e + t
    phi_harm = np.hstack(parts) if parts else np.zeros((total, 0))

    eigenvalues = np.concatenate([s1, -s1, s2, -s2, np.zeros(phi_harm.shape[1])])
    if eigenvalues.size != total:
        raise NumericalError(
            f"basis is not complete: {eigenvalues.size} columns for dimension {total} "
            "(rank_tol likely misclassified a singular value)")
    return SpectralBasis(
        svd1=(U1, s1, V1), svd2=(U2, s2, V2),
        phi1_aligned=phi1_aligned, phi1_anti=phi1_anti,
        phi2_aligned=phi2_aligned, phi2_anti=phi2_anti,
        phi_harm=phi_harm, eigenvalues=eigenvalues,
        D1_dim=2 * r1, D2_dim=2 * r2, block_dims=(n, e, t))


@dataclass(frozen=True)
class SignalDecomposition:
    """Orthogonal split of a signal into the images of the two operator
    parts and the harmonic kernel. The three components sum to the input."""

    s1: SimplicialSignal
    s2: SimplicialSignal
    s_harm: SimplicialSignal

    def reconstruct(self) -> np.ndarray:
        return self.s1.to_vector() + self.s2.to_vector() + self.s_harm.to_vector()


def decompose_signal(basis: SpectralBasis, s: SimplicialSignal | np.ndarray) -> SignalDecomposition:
    """Project a signal onto im(D1), im(D2) and ker(D)."""
    x = s.to_vector() if isinstance(s, SimplicialSignal) else np.asarray(s, dtype=float).ravel()
    total = sum(basis.block_dims)
    if x.size != total:
        raise ValueError(f"signal length {x.size} does not match basis dimension {total}")
    dims = basis.block_dims
    parts = []
    for block in (basis.phi1, basis.phi2, basis.phi_harm):
        parts.append(SimplicialSignal.from_vector(block @ (block.T @ x), dims))
    return SignalDecomposition(*parts)


def betti_numbers(basis: SpectralBasis, complex: SimplicialComplex) -> tuple[int, int, int]:
    """(b0, b1, b2) from the boundary ranks: b0 = N - rank(B1),
    b1 = E - rank(B1) - rank(B2), b2 = T - rank(B2)."""
    if basis.block_dims != complex.block_dims:
        raise ValueError("basis was not computed on this complex")
    n, e, t = complex.block_dims
    r1 = basis.D1_dim // 2
    r2 = basis.D2_dim // 2
    return (n - r1, e - r1 - r2, t - r2)


def planted_eigenvector(basis: SpectralBasis, variant: int) -> SimplicialSignal:
    """The unit anti-aligned eigenvector with the most negative eigenvalue.

    Singular values are sorted in decreasing order, so column 0 of the
    anti-aligned block realizes the largest magnitude; that column is also
    the lowest-index tie-break when the extreme is degenerate.
    """
    if variant not in (1, 2):
        raise ValueError(f"variant must be 1 or 2, got {variant}")
    block = basis.phi1_anti if variant == 1 else basis.phi2_anti
    if block.shape[1] == 0:
        raise ValueError(f"variant {variant} has an empty anti-aligned subspace")
    return SimplicialSignal.from_vector(block[:, 0], basis.block_dims)


def write_spectrum_csv(basis: SpectralBasis, complex: SimplicialComplex,
                       path: str | Path) -> int:
    """Write all eigenpairs, sorted ascending by eigenvalue (stable), as CSV
    with columns family, alignment, eigenvalue, then one column per simplex.
    Returns the number of rows written."""
    if basis.block_dims != complex.block_dims:
        raise ValueError("basis was not computed on this complex")
    phi = basis.phi
    eig = basis.eigenvalues
    if not (np.isfinite(phi).all() and np.isfinite(eig).all()):
        raise NumericalError("non-finite values in spectral basis")
    labels = basis.family_labels()
    order = np.argsort(eig, kind="stable")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["family", "alignment", "eigenvalue"] + simplex_labels(complex))
        for j in order:
            family, alignment = labels[j]
            row = [family, alignment, "%.12g" % eig[j]]
            row += ["%.12g" % v for v in phi[:, j]]
            writer.writerow(row)
    return len(order)
