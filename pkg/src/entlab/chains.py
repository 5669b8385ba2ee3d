"""Spin-chain Hamiltonians, exact diagonalization, and area-law experiments.

Hamiltonians are term lists: each term is a coefficient times a product of
single-site operators, which assembles equally well into a dense matrix (for
oracles) or a sparse one (for Lanczos at larger N).  The builders cover the
anisotropic XY chain in a transverse field, the spin-1 AKLT chain, the
Majumdar-Ghosh chain (Pauli convention), and the cluster-state Hamiltonian.

Entropy scans slice a pure state into blocks {1..n} and fit S against a
logarithmic abscissa.  For periodic critical chains the fit abscissa is the
conformal chord ``log2[(N/pi) sin(pi n / N)]``, which removes the finite-size
saturation near n = N/2; at fixed n it reduces to ``log2 n`` as N grows.

Thermal-state checks: quantum mutual information across a cut is compared
against the boundary-energy bound ``beta tr[H_b (rho_A x rho_B - rho)]`` and
its looser nearest-neighbor form ``2 beta |h| |dA|`` (all in nats, matching
the free-energy argument behind the bound); classical Gibbs rings are
checked against ``|dA| log2 d`` and the boundary-reduction identity
``I(A:B) = I(dA:dB)`` implied by the Markov property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .linalg import PAULI_X, PAULI_Y, PAULI_Z, lanczos_lowest
from .states import (
    DensityMatrix,
    PureState,
    entropy_from_probabilities,
    partial_trace,
    partial_trace_pure,
    von_neumann_entropy,
)

DENSE_DIM_LIMIT = 4096


class ResourceLimitError(RuntimeError):
    """Requested lattice exceeds the configured diagonalization budget."""


def spin1_matrices() -> dict[str, np.ndarray]:
    """Spin-1 operators in the S^z basis ordered (+1, 0, -1), hbar = 1."""
    sp = math.sqrt(2) * np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    sm = sp.conj().T
    return {
        "x": (sp + sm) / 2,
        "y": (sp - sm) / 2j,
        "z": np.diag([1.0, 0.0, -1.0]).astype(complex),
        "+": sp,
        "-": sm,
    }


@dataclass
class SpinHamiltonian:
    """Sum of products of single-site operators on a chain."""

    nsites: int
    local_dim: int
    terms: list  # (coeff, ((site, matrix), ...)) with sites strictly increasing
    boundary: str = "periodic"

    def add(self, coeff: float, factors) -> None:
        factors = tuple(sorted(((int(s) % self.nsites, np.asarray(m, dtype=complex))
                                for s, m in factors), key=lambda f: f[0]))
        sites = [s for s, _ in factors]
        if len(set(sites)) != len(sites):
            raise ValueError("repeated site in a term; multiply the matrices first")
        self.terms.append((complex(coeff), factors))

    def _chain(self, factors, kron_fn, identity):
        mats = {s: m for s, m in factors}
        out = None
        for s in range(self.nsites):
            m = mats.get(s, identity)
            out = m if out is None else kron_fn(out, m)
        return out

    def dense(self) -> np.ndarray:
        dim = self.local_dim ** self.nsites
        out = np.zeros((dim, dim), dtype=complex)
        ident = np.eye(self.local_dim, dtype=complex)
        for coeff, factors in self.terms:
            out += coeff * self._chain(factors, np.kron, ident)
        if np.abs(out.imag).max() <= 1e-14 * max(np.abs(out.real).max(), 1.0):
            return np.ascontiguousarray(out.real)
        return out

    def sparse(self) -> scipy.sparse.csr_matrix:
        dim = self.local_dim ** self.nsites
        ident = scipy.sparse.identity(self.local_dim, dtype=complex, format="coo")
        out = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
        for coeff, factors in self.terms:
            sparse_factors = [(s, scipy.sparse.coo_matrix(m)) for s, m in factors]
            chain = self._chain(sparse_factors,
                                lambda a, b: scipy.sparse.kron(a, b, format="coo"),
                                ident)
            out = out + coeff * chain.tocsr()
        imag_max = np.abs(out.imag.tocoo().data).max() if out.imag.nnz else 0.0
        if imag_max <= 1e-14:
            out = out.real
        return out.tocsr()

    def classify_terms(self, cut: int):
        """Split terms into (inside A, crossing, inside B) for A = sites [0, cut)."""
        inside_a, crossing, inside_b = [], [], []
        for term in self.terms:
            sites = {s for s, _ in term[1]}
            in_a = any(s < cut for s in sites)
            in_b = any(s >= cut for s in sites)
            if in_a and in_b:
                crossing.append(term)
            elif in_a:
                inside_a.append(term)
            else:
                inside_b.append(term)
        return inside_a, crossing, inside_b

    def subset(self, terms) -> "SpinHamiltonian":
        return SpinHamiltonian(self.nsites, self.local_dim, list(terms), self.boundary)


def _bonds(n: int, bc: str, reach: int = 1):
    last = n if bc == "periodic" else n - reach
    return [(i, (i + reach) % n) for i in range(last)]


def build_xy(gamma: float, h: float, n: int, bc: str = "periodic") -> SpinHamiltonian:
    """Anisotropic XY chain in a transverse field.

    H = -(1/2) sum [ (1+gamma)/2 XX + (1-gamma)/2 YY ] - (h/2) sum Z.
    gamma = 1 is the transverse-field Ising chain, gamma = 0 the XX chain.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("anisotropy must lie in [0, 1]")
    ham = SpinHamiltonian(n, 2, [], bc)
    for i, j in _bonds(n, bc):
        ham.add(-0.5 * (1 + gamma) / 2, [(i, PAULI_X), (j, PAULI_X)])
        ham.add(-0.5 * (1 - gamma) / 2, [(i, PAULI_Y), (j, PAULI_Y)])
    for i in range(n):
        ham.add(-h / 2, [(i, PAULI_Z)])
    return ham


def build_aklt(n: int, bc: str = "periodic") -> SpinHamiltonian:
    """Spin-1 chain H = sum_i S_i.S_{i+1} + (1/3)(S_i.S_{i+1})^2."""
    s = spin1_matrices()
    axes = [s["x"], s["y"], s["z"]]
    ham = SpinHamiltonian(n, 3, [], bc)
    for i, j in _bonds(n, bc):
        for a in axes:
            ham.add(1.0, [(i, a), (j, a)])
        for a in axes:
            for b in axes:
                ham.add(1.0 / 3.0, [(i, a @ b), (j, a @ b)])
    return ham


def build_mg(n: int, bc: str = "periodic") -> SpinHamiltonian:
    """Majumdar-Ghosh chain H = sum_i 2 s_i.s_{i+1} + s_i.s_{i+2}, Pauli matrices."""
    if bc == "periodic" and n < 4 or bc == "open" and n < 3:
        raise ValueError("chain too short for next-nearest-neighbor terms")
    ham = SpinHamiltonian(n, 2, [], bc)
    paulis = [PAULI_X, PAULI_Y, PAULI_Z]
    for reach, coeff in ((1, 2.0), (2, 1.0)):
        for i, j in _bonds(n, bc, reach):
            for a in paulis:
                ham.add(coeff, [(i, a), (j, a)])
    return ham


def build_cluster(sign: int, n: int, bc: str = "periodic") -> SpinHamiltonian:
    """Cluster Hamiltonian sign * sum_i Z_{i-1} X_i Z_{i+1}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n < 3:
        raise ValueError("need at least 3 sites")
    ham = SpinHamiltonian(n, 2, [], bc)
    rng = range(n) if bc == "periodic" else range(1, n - 1)
    for i in rng:
        ham.add(float(sign), [((i - 1) % n, PAULI_Z), (i, PAULI_X), ((i + 1) % n, PAULI_Z)])
    return ham


def ground_state(ham: SpinHamiltonian, k: int = 1, method: str = "auto",
                 seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Lowest-k eigenpairs; dense below DENSE_DIM_LIMIT, Lanczos above.

    Returns (energies ascending, eigenvector columns) with verified residuals.
    """
    dim = ham.local_dim ** ham.nsites
    if method == "auto":
        method = "dense" if dim <= DENSE_DIM_LIMIT else "lanczos"
    if method == "dense":
        if dim > 2 ** 14:
            raise ResourceLimitError(f"dense diagonalization at dim {dim}")
        mat = ham.dense()
        w, v = np.linalg.eigh(mat)
        w, v = w[:k], v[:, :k]
        op = mat
    elif method == "lanczos":
        if dim > 2 ** 20:
            raise ResourceLimitError(f"sparse diagonalization at dim {dim}")
        op = ham.sparse()
        w, v = lanczos_lowest(op, k=k, seed=seed, return_vectors=True)
    else:
        raise ValueError("method must be auto, dense, or lanczos")
    scale = max(1.0, float(np.abs(w).max()))
    for i in range(k):
        resid = np.linalg.norm(op @ v[:, i] - w[i] * v[:, i])
        if resid > 1e-8 * scale:
            raise RuntimeError(f"eigenpair residual {resid:.2e} too large")
    return w, v


@dataclass(frozen=True)
class EntropyScan:
    """Block entropies with a least-squares logarithmic fit."""

    block_sizes: tuple
    entropies_bits: tuple
    slope: float
    intercept: float
    residual: float
    abscissa: str = "log2n"


def _fit_scan(sizes, entropies, abscissa: str, nsites: int) -> EntropyScan:
    sizes = tuple(int(x) for x in sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("block sizes must be strictly increasing")
    if abscissa == "log2n":
        xs = np.log2(np.asarray(sizes, dtype=float))
    elif abscissa == "chord":
        xs = np.log2((nsites / math.pi) * np.sin(math.pi * np.asarray(sizes) / nsites))
    else:
        raise ValueError("abscissa must be 'log2n' or 'chord'")
    ys = np.asarray(entropies, dtype=float)
    design = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ys, rcond=None)
    residual = float(np.sqrt(np.mean((design @ [slope, intercept] - ys) ** 2)))
    return EntropyScan(sizes, tuple(float(y) for y in ys), float(slope),
                       float(intercept), residual, abscissa)


def block_entropy_scan(psi: PureState, block_sizes, abscissa: str = "log2n") -> EntropyScan:
    """Entropies of blocks {1..n} of a pure chain state, with a log fit."""
    n = len(psi.dims)
    entropies = []
    for b in block_sizes:
        if not 1 <= b < n:
            raise ValueError("block sizes must satisfy 1 <= n < N")
        entropies.append(von_neumann_entropy(partial_trace_pure(psi, int(b), "A")))
    return _fit_scan(block_sizes, entropies, abscissa, n)


def free_fermion_entropy_scan(gamma: float, h: float, n: int, block_sizes,
                              bc: str = "periodic",
                              abscissa: str = "chord") -> EntropyScan:
    """Block-entropy scan of the XY ground state via the fermion covariance."""
    from .freefermion import xy_entropy_free_fermion

    entropies = xy_entropy_free_fermion(gamma, h, n, list(block_sizes), bc)
    return _fit_scan(block_sizes, entropies, abscissa, n)


def thermal_state(ham: SpinHamiltonian, beta: float) -> DensityMatrix:
    """Gibbs state exp(-beta H)/Z by dense eigendecomposition."""
    dim = ham.local_dim ** ham.nsites
    if dim > 2 * DENSE_DIM_LIMIT:
        raise ResourceLimitError(f"thermal state at dim {dim}")
    w, v = np.linalg.eigh(ham.dense())
    boltz = np.exp(-beta * (w - w.min()))
    boltz /= boltz.sum()
    rho = (v * boltz) @ v.conj().T
    return DensityMatrix((ham.local_dim,) * ham.nsites, rho)


def free_energy(ham: SpinHamiltonian, rho: DensityMatrix, beta: float) -> float:
    """F = tr(H rho) - S(rho)/beta, entropy in nats."""
    energy = float(np.trace(ham.dense() @ rho.matrix).real)
    return energy - von_neumann_entropy(rho, base="e") / beta


def mutual_info_area_check(ham: SpinHamiltonian, beta: float, cut: int):
    """Thermal mutual information against its boundary bounds (all nats).

    Returns (I, boundary-energy bound, nearest-neighbor bound) for the
    bipartition A = sites [0, cut).  Raises if any term has empty support.
    """
    rho = thermal_state(ham, beta)
    n = ham.nsites
    rho_a = partial_trace(rho, range(cut))
    rho_b = partial_trace(rho, range(cut, n))
    info = (von_neumann_entropy(rho_a, "e") + von_neumann_entropy(rho_b, "e")
            - von_neumann_entropy(rho, "e"))
    _, crossing, _ = ham.classify_terms(cut)
    h_boundary = ham.subset(crossing).dense()
    product = np.kron(rho_a.matrix, rho_b.matrix)
    boundary_bound = beta * float(np.trace(h_boundary @ (product - rho.matrix)).real)
    # loose form: 2 beta |h| per boundary site, |h| the largest crossing-term norm
    norms = []
    boundary_sites = set()
    for coeff, factors in crossing:
        block = np.array([[1.0 + 0j]])
        for _, m in factors:
            block = np.kron(block, m)
        norms.append(abs(coeff) * float(np.linalg.norm(block, 2)))
        boundary_sites.update(s for s, _ in factors if s < cut)
    simple_bound = 2.0 * beta * max(norms, default=0.0) * len(boundary_sites)
    return float(info), boundary_bound, simple_bound


# ---------------------------------------------------------------------------
# classical Gibbs rings
# ---------------------------------------------------------------------------

def _ring_probabilities(coupling, beta: float, n: int, values) -> np.ndarray:
    d = len(values)
    codes = np.arange(d ** n)
    digits = (codes[:, None] // d ** np.arange(n)[None, :]) % d
    table = np.array([[coupling(a, b) for b in values] for a in values], dtype=float)
    energy = np.zeros(len(codes))
    for i in range(n):
        energy += table[digits[:, i], digits[:, (i + 1) % n]]
    weights = np.exp(-beta * (energy - energy.min()))
    return weights / weights.sum(), digits


def _marginal_entropy_bits(p: np.ndarray, digits: np.ndarray, sites, d: int) -> float:
    sites = sorted(sites)
    key = np.zeros(len(p), dtype=np.int64)
    for rank, s in enumerate(sites):
        key += digits[:, s] * d ** rank
    marg = np.bincount(key, weights=p, minlength=d ** len(sites))
    return entropy_from_probabilities(marg, 2)


def classical_gibbs_mutual_info(coupling, beta: float, n: int, cut: int,
                                values=(1.0, -1.0)):
    """Shannon mutual information of a classical Gibbs ring across a cut.

    Returns (I bits, area bound |dA| log2 d, boundary identity violation)
    where the last entry is |I(A:B) - I(dA:dB)|, which the nearest-neighbor
    Markov property forces to vanish.
    """
    if n > 20:
        raise ResourceLimitError("classical enumeration beyond 20 sites")
    d = len(values)
    p, digits = _ring_probabilities(coupling, beta, n, values)
    a = list(range(cut))
    b = list(range(cut, n))
    info = (_marginal_entropy_bits(p, digits, a, d)
            + _marginal_entropy_bits(p, digits, b, d)
            - _marginal_entropy_bits(p, digits, range(n), d))
    boundary_a = [0, cut - 1] if cut > 1 else [0]
    boundary_b = [cut, n - 1] if cut < n - 1 else [cut]
    info_boundary = (_marginal_entropy_bits(p, digits, boundary_a, d)
                     + _marginal_entropy_bits(p, digits, boundary_b, d)
                     - _marginal_entropy_bits(p, digits, set(boundary_a) | set(boundary_b), d))
    bound = len(boundary_a) * math.log2(d)
    return float(info), float(bound), abs(float(info) - float(info_boundary))


def markov_violation(coupling, beta: float, n: int, site_c1: int, site_c2: int,
                     values=(1.0, -1.0)) -> float:
    """Max violation of p(A,B,C) = p(A,C) p(B,C) / p(C) on a Gibbs ring.

    C = {site_c1, site_c2} separates the ring into two arcs A and B.
    """
    d = len(values)
    p, digits = _ring_probabilities(coupling, beta, n, values)
    c = sorted({site_c1 % n, site_c2 % n})
    if len(c) != 2:
        raise ValueError("need two distinct separator sites")
    arc_a = [s for s in range(c[0] + 1, c[1])]
    arc_b = [s for s in list(range(c[1] + 1, n)) + list(range(0, c[0]))]

    def keys_and_marginal(sites):
        sites = sorted(sites)
        key = np.zeros(len(p), dtype=np.int64)
        for rank, s in enumerate(sites):
            key += digits[:, s] * d ** rank
        return key, np.bincount(key, weights=p, minlength=d ** len(sites))

    key_ac, p_ac = keys_and_marginal(arc_a + c)
    key_bc, p_bc = keys_and_marginal(arc_b + c)
    key_c, p_c = keys_and_marginal(c)
    pc = p_c[key_c]
    valid = pc > 0
    rhs = np.zeros_like(p)
    rhs[valid] = p_ac[key_ac][valid] * p_bc[key_bc][valid] / pc[valid]
    return float(np.abs(p - rhs)[valid].max())
