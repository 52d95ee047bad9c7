"""Dirac operator and Hodge Laplacians of a weighted 2-complex.

The operator acts on stacked signals [nodes; edges; triangles] of length
N + E + T. All blocks are derived from the two weighted boundary matrices;
a normalization mode fixes the overall scaling of each.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .complexes import SimplicialComplex, WeightingScheme, boundary_matrix, weighted_boundary
from .errors import NumericalError

__all__ = [
    "DiracOperator",
    "SimplicialSignal",
    "assemble_dirac",
    "dirac_split",
    "hodge_laplacians",
    "apply_dirac",
]

NORMALIZATIONS = ("spectral", "none")


def _top_singular_value(B: sp.spmatrix) -> float:
    """Largest singular value via dense SVD.

    Boundary blocks stay small at the scales this package targets, and
    the dense route is deterministic (no iterative solver with a random
    start), which the reproducibility contract relies on.
    """
    if min(B.shape) == 0:
        return 0.0
    try:
        return float(np.linalg.svd(B.toarray(), compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD for normalization failed: {exc}") from None


@dataclass(frozen=True)
class SimplicialSignal:
    """A signal on a complex, split into its node/edge/triangle blocks."""

    nodes: np.ndarray
    edges: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        for name in ("nodes", "edges", "triangles"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @classmethod
    def from_vector(cls, x: np.ndarray, dims: tuple[int, int, int]) -> "SimplicialSignal":
        x = np.asarray(x, dtype=float).ravel()
        n, e, t = dims
        if x.size != n + e + t:
            raise ValueError(f"vector length {x.size} does not match blocks {dims}")
        return cls(x[:n], x[n:n + e], x[n + e:])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.nodes, self.edges, self.triangles])


class DiracOperator:
    """The assembled operator together with its complex and scaling record.

    `B1` and `B2` are the weighted, normalization-scaled boundary matrices;
    every derived matrix (D, its split parts, the Laplacians) is built from
    them on demand and cached.
    """

    def __init__(self, complex: SimplicialComplex, weights: WeightingScheme,
                 B1: sp.csc_matrix, B2: sp.csc_matrix,
                 normalization: str, scale1: float, scale2: float):
        self.complex = complex
        self.weights = weights
        self.B1 = B1
        self.B2 = B2
        self.normalization = normalization
        self.scale1 = scale1
        self.scale2 = scale2

    @property
    def block_dims(self) -> tuple[int, int, int]:
        return self.complex.block_dims

    @property
    def total_dim(self) -> int:
        return self.complex.total_dim

    @cached_property
    def D1(self) -> sp.csr_matrix:
        """Node-edge part: off-diagonal blocks B1 and B1^T."""
        n, e, t = self.block_dims
        rows = [
            [sp.csr_matrix((n, n)), self.B1, sp.csr_matrix((n, t))],
            [self.B1.T, sp.csr_matrix((e, e)), sp.csr_matrix((e, t))],
            [sp.csr_matrix((t, n)), sp.csr_matrix((t, e)), sp.csr_matrix((t, t))],
        ]
        return sp.bmat(rows, format="csr")

    @cached_property
    def D2(self) -> sp.csr_matrix:
        """Edge-triangle part: off-diagonal blocks B2 and B2^T."""
        n, e, t = self.block_dims
        rows = [
            [sp.csr_matrix((n, n)), sp.csr_matrix((n, e)), sp.csr_matrix((n, t))],
            [sp.csr_matrix((e, n)), sp.csr_matrix((e, e)), self.B2],
            [sp.csr_matrix((t, n)), self.B2.T, sp.csr_matrix((t, t))],
        ]
        return sp.bmat(rows, format="csr")

    @cached_property
    def D(self) -> sp.csr_matrix:
        return (self.D1 + self.D2).tocsr()

    @cached_property
    def L0(self) -> sp.csr_matrix:
        return (self.B1 @ self.B1.T).tocsr()

    @cached_property
    def L1(self) -> sp.csr_matrix:
        return (self.B1.T @ self.B1 + self.B2 @ self.B2.T).tocsr()

    @cached_property
    def L2(self) -> sp.csr_matrix:
        return (self.B2.T @ self.B2).tocsr()

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Block-diagonal stack diag(L0, L1, L2); equals D @ D."""
        return sp.block_diag([self.L0, self.L1, self.L2], format="csr")

    def dense(self) -> np.ndarray:
        return self.D.toarray()

    def __repr__(self) -> str:
        return (f"DiracOperator(dims={self.block_dims}, normalization={self.normalization!r}, "
                f"scale1={self.scale1:.6g}, scale2={self.scale2:.6g})")


def assemble_dirac(complex: SimplicialComplex,
                   weights: WeightingScheme | None = None,
                   normalization: str = "spectral") -> DiracOperator:
    """Assemble the operator for a complex.

    Parameters
    ----------
    complex : SimplicialComplex
    weights : WeightingScheme, optional
        Defaults to unit weights (the unweighted operator).
    normalization : {"spectral", "none"}
        "spectral" divides each weighted boundary matrix by its largest
        singular value so the assembled operator has spectrum in [-1, 1];
        "none" leaves the weighted matrices as-is. The applied scales are
        recorded on the result as `scale1`/`scale2` (1.0 when no scaling
        happened).
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    if weights is None:
        weights = WeightingScheme.unit(complex)
    weights.check_dims(complex)

    B1 = weighted_boundary(boundary_matrix(complex, 1), weights.g0, weights.g1)
    B2 = weighted_boundary(boundary_matrix(complex, 2), weights.g1, weights.g2)

    scale1 = scale2 = 1.0
    if normalization == "spectral":
        s1 = _top_singular_value(B1)
        s2 = _top_singular_value(B2)
        if s1 > 0:
            scale1 = s1
            B1 = (B1 / s1).tocsc()
        if s2 > 0:
            scale2 = s2
            B2 = (B2 / s2).tocsc()

    for name, B in (("B1", B1), ("B2", B2)):
        if B.nnz and not np.isfinite(B.data).all():
            raise NumericalError(f"non-finite entries in weighted boundary {name}")
    return DiracOperator(complex, weights, B1, B2, normalization, scale1, scale2)


def dirac_split(op: DiracOperator) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """The two parts (D1, D2) of the operator; they sum to D and their
    products vanish in both orders."""
    return op.D1, op.D2


def hodge_laplacians(op: DiracOperator) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """(L0, L1, L2); their block-diagonal stack equals D @ D."""
    return op.L0, op.L1, op.L2


def apply_dirac(op: DiracOperator, signal: SimplicialSignal | np.ndarray) -> SimplicialSignal:
    """Apply the operator to a signal, returning a signal in block form."""
    if isinstance(signal, SimplicialSignal):
        x = signal.to_vector()
    else:
        x = np.asarray(signal, dtype=float).ravel()
    if x.size != op.total_dim:
        raise ValueError(f"signal length {x.size} does not match operator dim {op.total_dim}")
    return SimplicialSignal.from_vector(op.D @ x, op.block_dims)
