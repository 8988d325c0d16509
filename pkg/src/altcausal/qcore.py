"""Dense complex operators, density matrices, and channels.

Everything downstream (process matrices, the photon clock, link
simulations) is built on the three value types defined here.  Operators
carry an explicit tensor factorisation in ``dims`` so that partial
traces and subsystem bookkeeping stay unambiguous.  All values are
immutable after construction: the wrapped arrays are marked read-only
and every operation returns a fresh object.

Choi convention used throughout: for a channel ``E`` with input
dimension ``d_in``,

    choi = sum_ij |i><j|_in (x) E(|i><j|)_out

so trace preservation reads ``Tr_out(choi) = I_in``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "ComplexOperator",
    "DensityMatrix",
    "Channel",
    "tensor",
    "partial_trace",
    "dagger",
    "apply_channel",
    "von_neumann_entropy",
    "fidelity",
    "spectral_norm",
    "identity",
    "ket",
    "projector",
    "random_unitary",
    "random_density_matrix",
    "random_channel",
    "PAULI_I",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]

DEFAULT_TOL = 1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _as_complex_matrix(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
    return m


def _freeze(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class ComplexOperator:
    """A square complex matrix together with its tensor factorisation.

    Parameters
    ----------
    entries : array_like
        Square complex matrix of side ``prod(dims)``.
    dims : sequence of int
        Dimension of each tensor factor, every entry >= 2.
    """

    entries: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, entries, dims: Sequence[int]):
        m = _as_complex_matrix(entries)
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must all be >= 2, got {dims}")
        if math.prod(dims) != m.shape[0]:
            raise ValueError(
                f"dims {dims} imply side {math.prod(dims)}, matrix has side {m.shape[0]}"
            )
        object.__setattr__(self, "entries", _freeze(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def subsystem_count(self) -> int:
        return len(self.dims)

    def hermiticity_deviation(self) -> float:
        return spectral_norm(self.entries - self.entries.conj().T)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(_symmetrized(self.entries))[0])


class DensityMatrix(ComplexOperator):
    """A ComplexOperator refined to a valid quantum state.

    Construction checks hermiticity, unit trace, and positivity, each
    within ``tol``.
    """

    def __init__(self, entries, dims: Sequence[int], tol: float = DEFAULT_TOL):
        super().__init__(entries, dims)
        dev = self.hermiticity_deviation()
        if dev > tol:
            raise ValueError(f"density matrix is not Hermitian: deviation {dev:.3e}")
        tr = self.entries.trace()
        if abs(tr - 1.0) > tol:
            raise ValueError(f"density matrix trace {tr:.6f} differs from 1")
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")

    @classmethod
    def from_state_vector(cls, vec, dims: Sequence[int]) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("state vector must be nonzero")
        v = v / norm
        return cls(np.outer(v, v.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        d = math.prod(dims)
        return cls(np.eye(d, dtype=complex) / d, dims)


@dataclass(frozen=True)
class Channel:
    """A CPTP map in Choi form.

    ``choi`` lives on the two factors (in, out); complete positivity is
    checked as positivity of the Choi matrix and trace preservation as
    ``Tr_out(choi) = I_in``, both within ``tol``.
    """

    choi: ComplexOperator
    in_dim: int
    out_dim: int

    def __init__(self, choi: ComplexOperator, in_dim: int, out_dim: int,
                 tol: float = DEFAULT_TOL):
        if not isinstance(choi, ComplexOperator):
            choi = ComplexOperator(choi, (in_dim, out_dim))
        if choi.dims != (in_dim, out_dim):
            raise ValueError(f"choi dims {choi.dims} do not match ({in_dim}, {out_dim})")
        lo = choi.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"channel is not completely positive: min eigenvalue {lo:.3e}")
        reduced = partial_trace(choi, keep=[0]).entries
        dev = spectral_norm(reduced - np.eye(in_dim))
        if dev > tol:
            raise ValueError(f"channel is not trace preserving: deviation {dev:.3e}")
        object.__setattr__(self, "choi", choi)
        object.__setattr__(self, "in_dim", int(in_dim))
        object.__setattr__(self, "out_dim", int(out_dim))

    @classmethod
    def from_kraus(cls, kraus: Iterable[np.ndarray], tol: float = DEFAULT_TOL) -> "Channel":
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        if not ops:
            raise ValueError("at least one Kraus operator is required")
        out_dim, in_dim = ops[0].shape
        choi = np.zeros((in_dim * out_dim, in_dim * out_dim), dtype=complex)
        for i in range(in_dim):
            for j in range(in_dim):
                unit = np.zeros((in_dim, in_dim), dtype=complex)
                unit[i, j] = 1.0
                block = sum(k @ unit @ k.conj().T for k in ops)
                eij = np.zeros((in_dim, in_dim), dtype=complex)
                eij[i, j] = 1.0
                choi += np.kron(eij, block)
        return cls(ComplexOperator(choi, (in_dim, out_dim)), in_dim, out_dim, tol=tol)

    @classmethod
    def from_unitary(cls, u: np.ndarray, tol: float = DEFAULT_TOL) -> "Channel":
        u = np.asarray(u, dtype=complex)
        dev = spectral_norm(u.conj().T @ u - np.eye(u.shape[0]))
        if dev > tol:
            raise ValueError(f"matrix is not unitary: deviation {dev:.3e}")
        return cls.from_kraus([u], tol=tol)

    @classmethod
    def identity(cls, dim: int = 2) -> "Channel":
        return cls.from_kraus([np.eye(dim, dtype=complex)])

    @classmethod
    def depolarizing(cls, p: float, dim: int = 2) -> "Channel":
        """Mix the input with the maximally mixed state: (1-p) rho + p I/d."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"depolarizing strength must lie in [0, 1], got {p}")
        ident = cls.identity(dim).choi.entries
        # Choi of rho -> Tr(rho) I/d is I_in (x) I_out / d.
        mix = np.eye(dim * dim, dtype=complex) / dim
        return cls(ComplexOperator((1 - p) * ident + p * mix, (dim, dim)), dim, dim)

    @classmethod
    def bit_flip(cls, p: float) -> "Channel":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"flip probability must lie in [0, 1], got {p}")
        return cls.from_kraus([math.sqrt(1 - p) * PAULI_I, math.sqrt(p) * PAULI_X])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _symmetrized(m: np.ndarray) -> np.ndarray:
    # Eigendecompositions are always taken on the symmetrized matrix so
    # that float-level asymmetry cannot leak into eigenvalues.
    return (m + m.conj().T) / 2


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value; the norm used for every deviation report."""
    if not np.any(m):
        return 0.0
    return float(np.linalg.norm(m, ord=2))


def tensor(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Kronecker product; dims concatenate."""
    return ComplexOperator(np.kron(a.entries, b.entries), a.dims + b.dims)


def partial_trace(m: ComplexOperator, keep: Sequence[int]) -> ComplexOperator:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    m : ComplexOperator
    keep : sequence of int
        Indices into ``m.dims`` to retain.  Order of the retained
        factors follows their original order in ``m.dims``.

    Returns
    -------
    ComplexOperator on the retained factors.  Total trace is preserved.
    """
    n = m.subsystem_count
    keep_sorted = sorted(set(int(i) for i in keep))
    if keep_sorted and (keep_sorted[0] < 0 or keep_sorted[-1] >= n):
        raise ValueError(f"keep indices {keep_sorted} out of range for {n} subsystems")
    if not keep_sorted:
        raise ValueError("must keep at least one subsystem")
    if len(keep_sorted) == n:
        return ComplexOperator(m.entries, m.dims)

    dims = list(m.dims)
    t = m.entries.reshape(*dims, *dims)
    for idx in sorted(set(range(n)) - set(keep_sorted), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + len(dims))
        dims.pop(idx)
    side = math.prod(dims)
    return ComplexOperator(t.reshape(side, side), dims)


def dagger(m: ComplexOperator) -> ComplexOperator:
    """Conjugate transpose, dims unchanged."""
    return ComplexOperator(m.entries.conj().T, m.dims)


def apply_channel(c: Channel, rho: DensityMatrix, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Send ``rho`` through ``c`` and return the output state.

    Uses the Choi contraction
        E(rho)[a, b] = sum_ij rho[i, j] choi[(i, a), (j, b)].
    """
    if rho.dim != c.in_dim:
        raise ValueError(f"state dimension {rho.dim} does not match channel input {c.in_dim}")
    choi_t = c.choi.entries.reshape(c.in_dim, c.out_dim, c.in_dim, c.out_dim)
    out = np.einsum("ij,iajb->ab", rho.entries, choi_t)
    return DensityMatrix(out, (c.out_dim,), tol=tol)


def von_neumann_entropy(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> float:
    """Entropy -sum(lam log2 lam) in bits, with 0 log 0 = 0."""
    lam = np.linalg.eigvalsh(_symmetrized(rho.entries))
    if lam[0] < -tol:
        raise ValueError(f"state has negative eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam.real, 0.0, None)
    lam = lam[lam > 0]
    # the +0.0 turns the -0.0 of exactly pure states into +0.0
    return float(-(lam * np.log2(lam)).sum()) + 0.0


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(_symmetrized(m))
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1]."""
    if rho.dim != sigma.dim:
        raise ValueError("states must have equal dimension")
    root = _psd_sqrt(rho.entries)
    inner = _psd_sqrt(root @ sigma.entries @ root)
    val = float(np.real(inner.trace())) ** 2
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# constructors and random instances
# ---------------------------------------------------------------------------

def identity(dims: Sequence[int]) -> ComplexOperator:
    d = math.prod(dims)
    return ComplexOperator(np.eye(d, dtype=complex), dims)


def ket(index: int, dim: int = 2) -> np.ndarray:
    """Computational basis column vector |index> in the given dimension."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec: np.ndarray, dims: Sequence[int] | None = None) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if dims is None:
        dims = (v.size,)
    return DensityMatrix.from_state_vector(v, dims)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    phase = np.diag(r).copy()
    phase /= np.abs(phase)
    return q * phase


def random_density_matrix(dim: int, rng: np.random.Generator,
                          rank: int | None = None) -> DensityMatrix:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace(), (dim,))


def random_channel(in_dim: int, out_dim: int, rng: np.random.Generator,
                   kraus_rank: int | None = None) -> Channel:
    """Random CPTP map from a Haar-random Stinespring isometry."""
    rank = in_dim if kraus_rank is None else kraus_rank
    big = random_unitary(out_dim * rank, rng)
    # Isometry = first in_dim columns; Kraus blocks are its row groups.
    iso = big[:, :in_dim]
    kraus = [iso[e * out_dim:(e + 1) * out_dim, :] for e in range(rank)]
    return Channel.from_kraus(kraus)
