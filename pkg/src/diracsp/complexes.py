"""2-dimensional simplicial complexes: construction, boundary matrices,
weightings, growth-model generation, and the text file format.

Simplices are plain tuples of vertex ids in strictly increasing order
(the canonical orientation). Edges and triangles are kept sorted
lexicographically; their rank in that order defines matrix row/column
indices and the block layout of simplicial signals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import FormatError

__all__ = [
    "SimplicialComplex",
    "WeightingScheme",
    "NgfConfig",
    "build_complex",
    "boundary_matrix",
    "weighted_boundary",
    "ngf_generate",
    "triangulated_grid",
    "load_complex",
    "dump_complex",
    "simplex_labels",
]


def _check_simplex(simplex: tuple[int, ...]) -> tuple[int, ...]:
    if not 1 <= len(simplex) <= 3:
        raise ValueError(f"simplex {simplex} has {len(simplex)} vertices; only dimensions 0-2 supported")
    if any(v < 0 for v in simplex):
        raise ValueError(f"simplex {simplex} has a negative vertex id")
    if any(simplex[i] >= simplex[i + 1] for i in range(len(simplex) - 1)):
        if len(set(simplex)) < len(simplex):
            raise ValueError(f"simplex {simplex} repeats a vertex")
        raise ValueError(f"simplex {simplex} is not in increasing vertex order")
    return simplex


class SimplicialComplex:
    """An abstract simplicial complex of dimension at most 2.

    Vertices are the dense ids 0..N-1. Edges and triangles are strictly
    increasing vertex tuples stored in lexicographic order; that order is
    the index order used by all matrices and signals built on the complex.

    Instances are immutable after construction; prefer :func:`build_complex`
    or :func:`load_complex` over calling the constructor directly.
    """

    def __init__(self, num_vertices: int, edges: list[tuple[int, int]],
                 triangles: list[tuple[int, int, int]]):
        self.num_vertices = num_vertices
        self.edges = [tuple(e) for e in edges]
        self.triangles = [tuple(t) for t in triangles]
        self._validate()
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.triangle_index = {t: i for i, t in enumerate(self.triangles)}

    def _validate(self) -> None:
        edges, triangles = self.edges, self.triangles
        if edges != sorted(set(edges)) or triangles != sorted(set(triangles)):
            raise ValueError("edges/triangles must be lexicographically sorted and unique")
        for e in edges:
            _check_simplex(e)
            if e[1] >= self.num_vertices:
                raise ValueError(f"edge {e} references vertex >= N={self.num_vertices}")
        edge_set = set(edges)
        for t in triangles:
            _check_simplex(t)
            for f in triangle_faces(t):
                if f not in edge_set:
                    raise ValueError(f"triangle {t} is missing face {f}: complex not downward closed")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def block_dims(self) -> tuple[int, int, int]:
        """(N, E, T), the signal block sizes."""
        return (self.num_vertices, self.num_edges, self.num_triangles)

    @property
    def total_dim(self) -> int:
        return self.num_vertices + self.num_edges + self.num_triangles

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (self.num_vertices == other.num_vertices
                and self.edges == other.edges
                and self.triangles == other.triangles)

    def __repr__(self) -> str:
        return f"SimplicialComplex(N={self.num_vertices}, E={self.num_edges}, T={self.num_triangles})"


def triangle_faces(t: tuple[int, int, int]) -> list[tuple[int, int]]:
    """The three edges of a triangle, each in increasing vertex order."""
    a, b, c = t
    return [(a, b), (a, c), (b, c)]


def simplex_labels(complex: SimplicialComplex) -> list[str]:
    """Column labels in signal order: v{i}, e{u}-{v}, t{u}-{v}-{w}."""
    labels = [f"v{i}" for i in range(complex.num_vertices)]
    labels += [f"e{u}-{v}" for u, v in complex.edges]
    labels += [f"t{u}-{v}-{w}" for u, v, w in complex.triangles]
    return labels


def build_complex(simplices) -> SimplicialComplex:
    """Build the downward closure of a collection of simplices.

    Parameters
    ----------
    simplices : iterable of vertex tuples
        Each tuple has 1 to 3 distinct non-negative vertex ids in strictly
        increasing order. Duplicates (including faces produced by the
        closure) are silently merged.

    Vertex ids are renumbered, order preserving, onto the dense range
    0..N-1; inputs that are already dense are unchanged.
    """
    raw = [_check_simplex(tuple(s)) for s in simplices]
    verts = sorted({v for s in raw for v in s})
    relabel = {v: i for i, v in enumerate(verts)}
    edges: set[tuple[int, int]] = set()
    triangles: set[tuple[int, int, int]] = set()
    for s in raw:
        s = tuple(relabel[v] for v in s)
        if len(s) == 3:
            triangles.add(s)
            edges.update(triangle_faces(s))
        elif len(s) == 2:
            edges.add(s)
    return SimplicialComplex(len(verts), sorted(edges), sorted(triangles))


def boundary_matrix(complex: SimplicialComplex, k: int) -> sp.csc_matrix:
    """Signed incidence matrix B_k of the complex.

    B1 is N x E, B2 is E x T. With simplices in increasing vertex order,
    the face omitting the i-th vertex carries sign (-1)^i, which makes
    B1 @ B2 = 0 exactly.
    """
    if k == 1:
        rows, cols, vals = [], [], []
        for j, (u, v) in enumerate(complex.edges):
            rows += [u, v]
            cols += [j, j]
            vals += [-1.0, 1.0]
        shape = (complex.num_vertices, complex.num_edges)
    elif k == 2:
        rows, cols, vals = [], [], []
        for j, t in enumerate(complex.triangles):
            for i, f in enumerate(triangle_faces(t)[::-1]):
                # faces in omitted-vertex order: (b,c), (a,c), (a,b)
                rows.append(complex.edge_index[f])
                cols.append(j)
                vals.append(1.0 if i % 2 == 0 else -1.0)
        shape = (complex.num_edges, complex.num_triangles)
    else:
        raise ValueError(f"k must be 1 or 2, got {k}")
    return sp.csc_matrix((vals, (rows, cols)), shape=shape)


@dataclass(frozen=True)
class WeightingScheme:
    """Strictly positive diagonal weights for vertices, edges and triangles.

    All ones reproduces the unweighted setting.
    """

    g0: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        for name, g in (("g0", self.g0), ("g1", self.g1), ("g2", self.g2)):
            arr = np.asarray(g, dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a 1-d weight vector")
            if arr.size and arr.min() <= 0:
                raise ValueError(f"{name} contains a non-positive weight")
            object.__setattr__(self, name, arr)

    @classmethod
    def unit(cls, complex: SimplicialComplex) -> "WeightingScheme":
        n, e, t = complex.block_dims
        return cls(np.ones(n), np.ones(e), np.ones(t))

    def check_dims(self, complex: SimplicialComplex) -> None:
        if (len(self.g0), len(self.g1), len(self.g2)) != complex.block_dims:
            raise ValueError(
                f"weight lengths {(len(self.g0), len(self.g1), len(self.g2))} "
                f"do not match complex dims {complex.block_dims}")


def weighted_boundary(B: sp.spmatrix, face_weights: np.ndarray,
                      simplex_weights: np.ndarray) -> sp.csc_matrix:
    """diag(face_weights)^(1/2) @ B @ diag(simplex_weights)^(-1/2).

    `face_weights` weight the rows (the (k-1)-simplices), `simplex_weights`
    the columns. Unit weights return B unchanged.
    """
    face_weights = np.asarray(face_weights, dtype=float)
    simplex_weights = np.asarray(simplex_weights, dtype=float)
    if (face_weights.size and face_weights.min() <= 0) or \
            (simplex_weights.size and simplex_weights.min() <= 0):
        raise ValueError("weights must be strictly positive")
    if face_weights.shape != (B.shape[0],) or simplex_weights.shape != (B.shape[1],):
        raise ValueError("weight lengths do not match boundary matrix shape")
    left = sp.diags(np.sqrt(face_weights))
    right = sp.diags(1.0 / np.sqrt(simplex_weights))
    return (left @ B @ right).tocsc()


@dataclass(frozen=True)
class NgfConfig:
    """Parameters of the growing-complex generator.

    Only flavor -1 at zero inverse temperature is supported: growth
    attaches new triangles uniformly at random on edges that have exactly
    one incident triangle, so every edge ends up in at most two triangles.
    """

    target_triangles: int
    seed: int
    flavor: int = -1
    beta: float = 0.0

    def __post_init__(self):
        if self.flavor != -1 or self.beta != 0.0:
            raise ValueError("only flavor=-1 with beta=0.0 is supported")
        if self.target_triangles < 1:
            raise ValueError("target_triangles must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def triangulated_grid(nx: int, ny: int) -> SimplicialComplex:
    """Regular triangulation of an nx-by-ny grid of unit squares.

    Vertices sit on the (nx+1) x (ny+1) lattice, numbered row-major;
    each square is split along its down-right diagonal into two filled
    triangles.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid must have at least one cell per side")
    def vid(i: int, j: int) -> int:
        return j * (nx + 1) + i
    triangles = []
    for j in range(ny):
        for i in range(nx):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i, j + 1), vid(i + 1, j + 1)
            triangles.append(tuple(sorted((a, b, d))))
            triangles.append(tuple(sorted((a, c, d))))
    return build_complex(triangles)


def ngf_generate(config: NgfConfig) -> SimplicialComplex:
    """Grow a simplicial complex from a single filled triangle.

    Each step picks, uniformly at random, an edge incident to exactly one
    triangle and glues a new triangle (and one new vertex) onto it, until
    `target_triangles` is reached. Deterministic for a fixed seed: a
    complex with T triangles has N = T + 2 vertices and E = 2T + 1 edges.
    """
    rng = np.random.default_rng(config.seed)
    triangles: list[tuple[int, int, int]] = [(0, 1, 2)]
    edge_order: list[tuple[int, int]] = [(0, 1), (0, 2), (1, 2)]
    tri_count = {e: 1 for e in edge_order}
    num_vertices = 3
    while len(triangles) < config.target_triangles:
        candidates = [e for e in edge_order if tri_count[e] == 1]
        u, v = candidates[rng.integers(len(candidates))]
        w = num_vertices
        num_vertices += 1
        tri_count[(u, v)] += 1
        triangles.append((u, v, w))
        for e in ((u, w), (v, w)):
            tri_count[e] = 1
            edge_order.append(e)
    return build_complex(triangles)


# -- text file format ---------------------------------------------------------
#
# One simplex per line: space-separated vertex ids in strictly increasing
# order; lines starting with '#' are comments. Loading applies downward
# closure; dumping writes only maximal simplices plus isolated vertices.

def load_complex(path: str | Path) -> SimplicialComplex:
    """Parse a complex file; raises FormatError naming the offending line."""
    simplices = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                ids = tuple(int(tok) for tok in line.split())
            except ValueError:
                raise FormatError(f"non-integer vertex id in {line!r}", lineno) from None
            try:
                _check_simplex(ids)
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            simplices.append(ids)
    if not simplices:
        raise FormatError("file contains no simplices")
    return build_complex(simplices)


def dump_complex(complex: SimplicialComplex, path: str | Path) -> None:
    """Write maximal simplices (plus isolated vertices), one per line."""
    covered_edges = {f for t in complex.triangles for f in triangle_faces(t)}
    free_edges = [e for e in complex.edges if e not in covered_edges]
    in_edge = {v for e in complex.edges for v in e}
    isolated = [v for v in range(complex.num_vertices) if v not in in_edge]
    with open(path, "w", encoding="utf-8") as fh:
        for t in complex.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")
        for u, v in free_edges:
            fh.write(f"{u} {v}\n")
        for v in isolated:
            fh.write(f"{v}\n")
