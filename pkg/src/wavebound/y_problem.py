"""Finite-dimensional Y-problem solver.

A Y-problem lives on a space K with two orthogonal splittings
K = E + J = V + H (J = E-perp, H = V-perp) and an operator L mapping H
into H.  Given e1 in V, one seeks e2, j2 in H and j1 in V with

    e1 + e2 in E,    j1 + j2 in J,    j2 = L e2,

and the response operator Y* on V is defined through j1 = -Y* e1.  The
orthogonality of the splittings forces the power identity
<e1, Y* e1> = <e2, L e2> (sesquilinear inner products, conjugate-linear in
the first slot), which is the energy balance of an impedance network and
the discrete counterpart of the link between extinction and Im Y*.

Two concrete builders are provided: complex-impedance electrical networks
(E = potential drops, J = node-conserving currents, V = source edges,
L = edge admittances) and the discrete periodic dielectric cell matching
the spectral grid solver, through which the polarizability formula

    alpha/|Omega| = (e1-e0) - (e1-e0) (Y + e1)^{-1} (e1-e0)

is reproduced exactly at matched resolution.  In the periodic cell V holds
the mean-free phase indicators (chi - p) v, and the operator entering the
formula is the dilation Y = (Y* + p e0) / (1 - p); the infinite-space form
is recovered as the fill fraction p -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "YProblemInstance",
    "YStar",
    "YSolution",
    "NetworkSpec",
    "NonUniqueSolutionError",
    "solve_y",
    "extract_y_star",
    "power_identity_residual",
    "network_to_instance",
    "network_from_json",
    "grid_cell_instance",
    "polarizability_from_y",
    "discrete_polarizability",
]

_ORTHO_TOL = 1e-12
_COND_LIMIT = 1e12


class NonUniqueSolutionError(RuntimeError):
    """The defining linear system is singular or numerically ill-conditioned."""


@dataclass(frozen=True)
class YProblemInstance:
    """Orthonormal bases of E and V plus the ambient operator L (maps H to H)."""

    basis_e: np.ndarray
    basis_v: np.ndarray
    operator_l: np.ndarray

    def __post_init__(self):
        qe = np.atleast_2d(np.asarray(self.basis_e, dtype=complex))
        qv = np.atleast_2d(np.asarray(self.basis_v, dtype=complex))
        ll = np.asarray(self.operator_l, dtype=complex)
        object.__setattr__(self, "basis_e", qe)
        object.__setattr__(self, "basis_v", qv)
        object.__setattr__(self, "operator_l", ll)
        n = qe.shape[0]
        if qv.shape[0] != n or ll.shape != (n, n):
            raise ValueError("basis_e, basis_v, operator_l must share the ambient dimension")
        for name, q in (("basis_e", qe), ("basis_v", qv)):
            gram = q.conj().T @ q
            if np.max(np.abs(gram - np.eye(q.shape[1]))) > _ORTHO_TOL:
                raise ValueError(f"{name} columns are not orthonormal to {_ORTHO_TOL}")
        # L must not leak from H = V-perp into V
        scale = max(1.0, float(np.linalg.norm(ll)))
        pi_h = np.eye(n) - qv @ qv.conj().T
        leak = np.linalg.norm(qv.conj().T @ ll @ pi_h)
        if leak > 1e-10 * scale:
            raise ValueError(f"operator_l does not preserve H (leak {leak:.2e})")

    @property
    def ambient_dim(self) -> int:
        return self.basis_e.shape[0]

    def basis_h(self) -> np.ndarray:
        """Orthonormal basis of H = V-perp (computed on demand)."""
        return _complement(self.basis_v)

    def basis_j(self) -> np.ndarray:
        """Orthonormal basis of J = E-perp."""
        return _complement(self.basis_e)


@dataclass(frozen=True)
class YStar:
    """Response matrix in the basis_v coordinates: j1 = -Y* e1."""

    matrix: np.ndarray


@dataclass(frozen=True)
class YSolution:
    e1: np.ndarray
    e2: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    residual_e: float  # distance of e1+e2 from E
    residual_j: float  # size of the E-component of j1+j2


def _complement(q: np.ndarray) -> np.ndarray:
    n, k = q.shape
    proj = np.eye(n) - q @ q.conj().T
    u, s, _ = np.linalg.svd(proj)
    return u[:, : n - k] if k < n else np.zeros((n, 0), dtype=complex)


def _assemble(instance: YProblemInstance):
    qe, qv, ll = instance.basis_e, instance.basis_v, instance.operator_l
    qh = instance.basis_h()
    qj = instance.basis_j()
    nh, nv = qh.shape[1], qv.shape[1]
    top = np.hstack([qj.conj().T @ qh, np.zeros((qj.shape[1], nv), dtype=complex)])
    bot = np.hstack([qe.conj().T @ ll @ qh, qe.conj().T @ qv])
    mat = np.vstack([top, bot])
    if mat.shape[0] != mat.shape[1]:
        raise NonUniqueSolutionError(
            f"system is not square ({mat.shape}); dim E + dim H != ambient + dim V"
        )
    return mat, qh, qj, nh


def solve_y(instance: YProblemInstance, e1) -> YSolution:
    """Solve the Y-problem for one excitation e1 in V (ambient coordinates)."""
    e1 = np.asarray(e1, dtype=complex).ravel()
    qv = instance.basis_v
    if np.linalg.norm(e1 - qv @ (qv.conj().T @ e1)) > 1e-10 * max(np.linalg.norm(e1), 1e-300):
        raise ValueError("e1 must lie in V")
    mat, qh, qj, nh = _assemble(instance)
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise NonUniqueSolutionError(
            f"Y-problem system condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}; "
            "the solution is not uniquely determined"
        )
    rhs = np.concatenate([-qj.conj().T @ e1, np.zeros(instance.basis_e.shape[1], dtype=complex)])
    sol = np.linalg.solve(mat, rhs)
    e2 = qh @ sol[:nh]
    j1 = qv @ sol[nh:]
    j2 = instance.operator_l @ e2
    qe = instance.basis_e
    etot = e1 + e2
    res_e = float(np.linalg.norm(etot - qe @ (qe.conj().T @ etot)))
    res_j = float(np.linalg.norm(qe.conj().T @ (j1 + j2)))
    return YSolution(e1, e2, j1, j2, res_e, res_j)


def extract_y_star(instance: YProblemInstance) -> YStar:
    """Response matrix column by column: column k is -j1 for e1 = k-th V basis vector."""
    qv = instance.basis_v
    nv = qv.shape[1]
    out = np.empty((nv, nv), dtype=complex)
    for k in range(nv):
        sol = solve_y(instance, qv[:, k])
        out[:, k] = -(qv.conj().T @ sol.j1)
    return YStar(out)


def power_identity_residual(instance: YProblemInstance, e1) -> float:
    """|<e1, Y* e1> - <e2, L e2>| for the solved instance (must vanish).

    The first form is the power delivered by the sources, the second the
    power consumed in H; their equality is forced by the orthogonality of
    the two splittings.
    """
    sol = solve_y(instance, e1)
    source_side = np.vdot(sol.e1, -sol.j1)
    load_side = np.vdot(sol.e2, sol.j2)
    return float(abs(source_side - load_side))


# ---------------------------------------------------------------------------
# Electrical networks with complex impedances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkSpec:
    """Signed node-by-edge incidence plus the impedance/source edge split."""

    incidence_matrix: np.ndarray            # (nodes, edges) entries in {0, +1, -1}
    impedance_edges: tuple                  # ((edge_index, complex_impedance), ...)
    source_edges: tuple                     # (edge_index, ...)

    def __post_init__(self):
        m = np.asarray(self.incidence_matrix, dtype=float)
        object.__setattr__(self, "incidence_matrix", m)
        object.__setattr__(self, "impedance_edges", tuple(
            (int(e), complex(z)) for e, z in self.impedance_edges))
        object.__setattr__(self, "source_edges", tuple(int(e) for e in self.source_edges))
        nodes, edges = m.shape
        for j in range(edges):
            col = m[:, j]
            if not (np.sum(col == 1) == 1 and np.sum(col == -1) == 1
                    and np.sum(col == 0) == nodes - 2):
                raise ValueError(f"edge {j} must connect exactly two nodes with +1/-1")
        imp = {e for e, _ in self.impedance_edges}
        src = set(self.source_edges)
        if imp & src:
            raise ValueError("an edge cannot be both impedance and source")
        if imp | src != set(range(edges)):
            raise ValueError("every edge must be exactly one of impedance or source")
        if not src:
            raise ValueError("need at least one source edge")
        if any(z == 0 for _, z in self.impedance_edges):
            raise ValueError("impedances must be nonzero")
        if not _connected(m):
            raise ValueError("network graph must be connected")

    @property
    def n_edges(self) -> int:
        return self.incidence_matrix.shape[1]


def _connected(incidence: np.ndarray) -> bool:
    nodes, edges = incidence.shape
    adj = [[] for _ in range(nodes)]
    for j in range(edges):
        endpoints = np.nonzero(incidence[:, j])[0]
        if len(endpoints) == 2:
            a, b = endpoints
            adj[a].append(b)
            adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == nodes


def network_to_instance(spec: NetworkSpec) -> YProblemInstance:
    """Embed a network as a Y-problem on its edge space.

    E is the column space of the transposed incidence matrix (potential
    drops), J its orthogonal complement (currents conserving node flux),
    V the coordinate subspace of the source edges and L the diagonal of
    edge admittances 1/z on the impedance edges.  With this (admittance)
    convention Y* of a single impedance z closing one source is 1/z,
    series pairs give 1/(z1+z2), and parallel pairs give 1/z1 + 1/z2.
    """
    m = spec.incidence_matrix
    edges = spec.n_edges
    # orthonormal basis for the span of M^T columns (potential drops)
    q, s, _ = np.linalg.svd(m.T.astype(complex), full_matrices=False)
    rank = int(np.sum(s > 1e-12 * s[0]))
    qe = q[:, :rank]
    qv = np.zeros((edges, len(spec.source_edges)), dtype=complex)
    for k, e in enumerate(spec.source_edges):
        qv[e, k] = 1.0
    ll = np.zeros((edges, edges), dtype=complex)
    for e, z in spec.impedance_edges:
        ll[e, e] = 1.0 / z
    return YProblemInstance(qe, qv, ll)


def network_from_json(obj: dict) -> NetworkSpec:
    """Build a NetworkSpec from {nodes: int, edges: [{u, v, kind, impedance?}]}."""
    nodes = int(obj["nodes"])
    edges = obj["edges"]
    m = np.zeros((nodes, len(edges)), dtype=float)
    impedance = []
    sources = []
    for j, edge in enumerate(edges):
        u, v = int(edge["u"]), int(edge["v"])
        m[u, j] = 1.0
        m[v, j] = -1.0
        kind = edge["kind"]
        if kind == "impedance":
            zval = edge["impedance"]
            z = complex(zval[0], zval[1]) if isinstance(zval, (list, tuple)) else complex(zval)
            impedance.append((j, z))
        elif kind == "source":
            sources.append(j)
        else:
            raise ValueError(f"edge {j}: kind must be 'impedance' or 'source'")
    return NetworkSpec(m, tuple(impedance), tuple(sources))


# ---------------------------------------------------------------------------
# Discrete periodic dielectric cell (matches quasistatic_grid's projections)
# ---------------------------------------------------------------------------

def grid_cell_instance(mask: np.ndarray, eps1: complex, eps0: complex = 1.0,
                       max_ambient: int = 4096) -> YProblemInstance:
    """Dense Y-problem for the periodic cell at the grid's own resolution.

    Ambient space: complex vector fields on the n^d grid.  E spans the
    mean-zero spectral gradients (one direction per nonzero frequency,
    identical to the grid solver's projection symbol), V the mean-free
    indicator fields (chi - p) v, and L is the compression of pointwise
    multiplication by eps(x) onto H.  Dense bases only: intended for the
    small resolutions where the grid solver can be cross-checked exactly.
    """
    m = np.asarray(mask, dtype=bool)
    dim = m.ndim
    n = m.shape[0]
    if any(s != n for s in m.shape):
        raise ValueError("mask must be square/cubic")
    npts = n**dim
    ambient = dim * npts
    if ambient > max_ambient:
        raise ValueError(f"dense instance would have dimension {ambient} > {max_ambient}")

    chi = m.astype(float).ravel()
    p = chi.mean()
    if p in (0.0, 1.0):
        raise ValueError("mask must contain both phases")

    freqs = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    grids = np.meshgrid(*([np.arange(n)] * dim), indexing="ij")
    cols = []
    for idx in np.ndindex(*([n] * dim)):
        kvec = np.array([freqs[i] for i in idx], dtype=float)
        # skip the mean and, matching the grid solver, every unpaired
        # Nyquist mode of the even grid
        if not kvec.any() or np.any(np.abs(kvec) == n // 2):
            continue
        ghat = kvec / np.linalg.norm(kvec)
        phase = np.zeros(m.shape, dtype=float)
        for g, kcomp in zip(grids, kvec):
            phase = phase + g * kcomp
        wave = np.exp(2j * np.pi * phase / n).ravel() / n ** (dim / 2.0)
        cols.append(np.concatenate([ghat[i] * wave for i in range(dim)]))
    qe = np.array(cols).T

    v0 = (chi - p) / np.linalg.norm(chi - p)
    qv = np.zeros((ambient, dim), dtype=complex)
    for i in range(dim):
        qv[i * npts : (i + 1) * npts, i] = v0

    eps_diag = np.tile(eps0 + (complex(eps1) - eps0) * chi, dim)
    pi_h = np.eye(ambient) - qv @ qv.conj().T
    ll = pi_h @ (eps_diag[:, None] * pi_h)
    return YProblemInstance(qe, qv, ll)


def polarizability_from_y(ystar: np.ndarray, eps1: complex, eps0: complex,
                          fill_fraction: float) -> np.ndarray:
    """alpha/|Omega| from a cell Y-tensor matrix at the given fill fraction.

    Applies the periodic dilation Y = (Y* + p eps0)/(1 - p), then
    (eps1-eps0) - (eps1-eps0)(Y + eps1)^{-1}(eps1-eps0); the dilation
    disappears as p -> 0, recovering the isolated-inclusion form.
    """
    ystar = np.asarray(ystar, dtype=complex)
    d = ystar.shape[0]
    de = complex(eps1) - complex(eps0)
    if de == 0:
        return np.zeros((d, d), dtype=complex)
    y = (ystar + fill_fraction * complex(eps0) * np.eye(d)) / (1.0 - fill_fraction)
    try:
        inv = np.linalg.inv(y + complex(eps1) * np.eye(d))
    except np.linalg.LinAlgError as exc:
        raise NonUniqueSolutionError(f"(Y + eps1) singular: {exc}") from exc
    return de * np.eye(d) - de * inv * de


def discrete_polarizability(instance: YProblemInstance, eps1: complex, eps0: complex,
                            inclusion_projection: np.ndarray) -> np.ndarray:
    """alpha/|Omega| from the cell instance's Y-tensor.

    ``inclusion_projection`` is the indicator mask defining V; its mean is
    the fill fraction entering the periodic dilation.  The result equals
    the spectral grid solver's matrix at the same resolution to solver
    precision.
    """
    mask = np.asarray(inclusion_projection, dtype=bool)
    p = float(mask.mean())
    if complex(eps1) == complex(eps0):
        d = instance.basis_v.shape[1]
        return np.zeros((d, d), dtype=complex)
    ystar = extract_y_star(instance).matrix
    return polarizability_from_y(ystar, eps1, eps0, p)
