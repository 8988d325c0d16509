"""Bouncing-photon clock, tick ledger, and reversibility probes.

A causal box holds a photon whose direction qubit is flipped by each
mirror bounce.  Every traversal appends a signed tick to the tick
ledger; ticks are reversible bookkeeping until a decoherence event
freezes them.  Classical elapsed time is read off the ledger by summing
the magnitudes of maximal runs that end in a decohered tick, so a fully
coherent history shows no elapsed time no matter how long it is.

Also here: the reversible-composition operator R(t) built from a
forward and a reverse exponential family, the recurrence cascade over a
chain of exchange partners, and the absorber-reflection identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .qcore import (
    DEFAULT_TOL,
    ComplexOperator,
    DensityMatrix,
    PAULI_X,
    fidelity,
    ket,
    projector,
)

__all__ = [
    "TickRecord",
    "TickLedger",
    "CausalBox",
    "BreakOutcome",
    "BoundaryConditions",
    "RcpOperator",
    "RcpInvariantReport",
    "CascadeReport",
    "bounce",
    "classical_time",
    "bare_classical_time",
    "check_nondiscernability",
    "break_symmetry",
    "rcp_apply",
    "rcp_invariant",
    "cascade",
    "wf_echo",
]

# Step interval of the cascade hopping unitary: a two-site chain
# completes one full round trip in exactly two steps at this value.
CASCADE_STEP = math.pi / 2

MAX_CASCADE_SITES = 12


class TickRecord(NamedTuple):
    value: int          # +1 forward traversal, -1 reversed
    decohered: bool     # True once the tick has leaked to an environment


@dataclass
class TickLedger:
    """Ordered record of signed traversal ticks."""

    increments: list[TickRecord] = field(default_factory=list)

    def append(self, value: int, decohered: bool) -> None:
        if value not in (-1, 1):
            raise ValueError(f"increment value must be +1 or -1, got {value}")
        self.increments.append(TickRecord(int(value), bool(decohered)))

    @property
    def traversal_count(self) -> int:
        return len(self.increments)

    @property
    def signed_sum(self) -> int:
        return sum(inc.value for inc in self.increments)

    @property
    def decohered_count(self) -> int:
        return sum(1 for inc in self.increments if inc.decohered)


def classical_time(ledger: TickLedger) -> int:
    """Elapsed classical time read from the ledger.

    The ledger is partitioned into maximal runs each ending at a
    decohered increment; the result is the sum of |run total| over those
    closed runs.  Ticks after the last decoherence event are still
    reversible and contribute nothing, which keeps the reading
    non-negative and non-decreasing as closed runs are appended.
    """
    total = 0
    run = 0
    for inc in ledger.increments:
        run += inc.value
        if inc.decohered:
            total += abs(run)
            run = 0
    return total


def bare_classical_time(ledger: TickLedger) -> int:
    """|sum of all ticks|, ignoring decoherence; kept for comparison.

    Unlike ``classical_time`` this is not monotone under appends.
    """
    return abs(ledger.signed_sum)


class BreakOutcome(Enum):
    """How the photon's reversible diamond resolves at a boundary."""

    FORWARD_DIAMOND = "forward_diamond"
    REVERSED_DIAMOND = "reversed_diamond"
    SIMULTANEOUS_EMISSION = "simultaneous_emission"
    SIMULTANEOUS_ABSORPTION = "simultaneous_absorption"


_OUTCOME_ORDER = (
    BreakOutcome.FORWARD_DIAMOND,
    BreakOutcome.REVERSED_DIAMOND,
    BreakOutcome.SIMULTANEOUS_EMISSION,
    BreakOutcome.SIMULTANEOUS_ABSORPTION,
)


@dataclass(frozen=True)
class BoundaryConditions:
    """Outcome weights supplied by the environment at a symmetry break."""

    forward: float
    reversed: float
    simultaneous_emission: float
    simultaneous_absorption: float

    def __post_init__(self):
        w = self.weights()
        if any(x < 0 for x in w):
            raise ValueError(f"outcome weights must be non-negative, got {w}")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"outcome weights must sum to 1, got sum {sum(w)}")

    def weights(self) -> tuple[float, float, float, float]:
        return (self.forward, self.reversed,
                self.simultaneous_emission, self.simultaneous_absorption)


@dataclass
class CausalBox:
    """Two mirrors, one photon, and the ledger of its traversals.

    The photon state's first factor is the direction qubit (|0> means
    the A-to-B leg); further factors (e.g. polarization) ride along
    untouched.  Evolution is sequential and deterministic for a given
    ``rng_seed``; randomness is drawn from a per-event stream keyed by
    (seed, event index) so any prefix can be replayed independently.
    """

    photon: DensityMatrix | None = None
    mirror_reflectivity: tuple[float, float] = (1.0, 1.0)
    decoherence_per_bounce: float = 0.0
    ledger: TickLedger = field(default_factory=TickLedger)
    rng_seed: int = 0
    initial_direction: int = 1
    _event_count: int = 0

    def __post_init__(self):
        if self.photon is None:
            self.photon = projector(ket(0))
        if self.photon.dims[0] != 2:
            raise ValueError("the photon's first factor must be the direction qubit")
        if isinstance(self.mirror_reflectivity, (int, float)):
            r = float(self.mirror_reflectivity)
            self.mirror_reflectivity = (r, r)
        for r in self.mirror_reflectivity:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"mirror reflectivity must lie in [0, 1], got {r}")
        if not 0.0 <= self.decoherence_per_bounce <= 1.0:
            raise ValueError(
                f"decoherence per bounce must lie in [0, 1], got {self.decoherence_per_bounce}")
        if self.initial_direction not in (-1, 1):
            raise ValueError(f"initial direction must be +1 or -1, got {self.initial_direction}")

    @property
    def current_direction(self) -> int:
        """Sign of the leg the photon is on: +1 for A to B, -1 back."""
        flips = self.ledger.traversal_count
        return self.initial_direction * (1 if flips % 2 == 0 else -1)

    def _event_rng(self) -> np.random.Generator:
        rng = np.random.default_rng((self.rng_seed, self._event_count))
        self._event_count += 1
        return rng


def _flip_direction(photon: DensityMatrix) -> DensityMatrix:
    d_rest = photon.dim // 2
    x_full = np.kron(PAULI_X, np.eye(d_rest, dtype=complex))
    return DensityMatrix(x_full @ photon.entries @ x_full.conj().T, photon.dims)


def _depolarize(photon: DensityMatrix, p: float) -> DensityMatrix:
    if p == 0.0:
        return photon
    mix = np.eye(photon.dim, dtype=complex) / photon.dim
    return DensityMatrix((1 - p) * photon.entries + p * mix, photon.dims)


def bounce(box: CausalBox) -> CausalBox:
    """One mirror reflection.

    Appends the signed traversal tick (sign of the leg just completed),
    samples the decohered flag with probability ``decoherence_per_bounce``,
    flips the direction qubit, and passes the photon through a
    depolarizing channel of the same strength.  Mutates ``box`` and
    returns it.
    """
    rng = box._event_rng()
    decohered = bool(rng.random() < box.decoherence_per_bounce)
    box.ledger.append(box.current_direction, decohered)
    box.photon = _depolarize(_flip_direction(box.photon), box.decoherence_per_bounce)
    return box


def check_nondiscernability(box: CausalBox, k_cycles: int) -> bool:
    """True iff every completed round trip restores the photon exactly.

    Requires a closed box: zero decoherence and unit reflectivity,
    otherwise the premise is broken and a ValueError is raised.  The
    check simulates 2 * k_cycles bounces on a copy and compares the
    state to the initial one (fidelity within 1e-10) after every cycle.
    """
    if box.decoherence_per_bounce != 0.0:
        raise ValueError("retroactive check requires zero decoherence")
    if any(r != 1.0 for r in box.mirror_reflectivity):
        raise ValueError("retroactive check requires unit mirror reflectivity")
    if k_cycles < 1:
        raise ValueError(f"k_cycles must be >= 1, got {k_cycles}")

    probe = CausalBox(
        photon=box.photon,
        mirror_reflectivity=box.mirror_reflectivity,
        decoherence_per_bounce=0.0,
        rng_seed=box.rng_seed,
        initial_direction=box.initial_direction,
    )
    initial = box.photon
    for _ in range(k_cycles):
        bounce(probe)
        bounce(probe)
        if abs(fidelity(probe.photon, initial) - 1.0) > 1e-10:
            return False
    return True


def break_symmetry(box: CausalBox, boundary: BoundaryConditions) -> BreakOutcome:
    """Resolve the reversible history against external boundary weights.

    Samples one of the four outcomes (seeded through the box's event
    stream) and appends the matching decohered record: a +1 tick for a
    forward resolution, a -1 tick for a reversed one, and a net-zero
    pair (+1 coherent, -1 decohered) for the two simultaneous cases,
    which closes the open run without adding elapsed time of its own.
    """
    rng = box._event_rng()
    idx = int(rng.choice(len(_OUTCOME_ORDER), p=boundary.weights()))
    outcome = _OUTCOME_ORDER[idx]
    if outcome is BreakOutcome.FORWARD_DIAMOND:
        box.ledger.append(+1, True)
    elif outcome is BreakOutcome.REVERSED_DIAMOND:
        box.ledger.append(-1, True)
    else:
        box.ledger.append(+1, False)
        box.ledger.append(-1, True)
    return outcome


# ---------------------------------------------------------------------------
# reversible-composition operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RcpOperator:
    """Forward/reverse exponential families and a symmetry-breaking knob.

    ``t_plus`` and ``t_minus`` are the Hermitian generators of the two
    families; ``epsilon`` adds the non-Hermitian damping ``-i eps G`` to
    the reverse generator, with ``damping`` a positive semidefinite G
    (identity when omitted).
    """

    t_plus: ComplexOperator
    t_minus: ComplexOperator
    epsilon: float = 0.0
    damping: ComplexOperator | None = None

    def __post_init__(self):
        if self.t_plus.dim != self.t_minus.dim:
            raise ValueError("generators must act on the same dimension")
        for gen in (self.t_plus, self.t_minus):
            dev = gen.hermiticity_deviation()
            if dev > DEFAULT_TOL:
                raise ValueError(f"generator is not Hermitian: deviation {dev:.3e}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.damping is not None:
            if self.damping.dim != self.t_plus.dim:
                raise ValueError("damping operator dimension mismatch")
            if self.damping.min_eigenvalue() < -DEFAULT_TOL:
                raise ValueError("damping operator must be positive semidefinite")

    @property
    def dim(self) -> int:
        return self.t_plus.dim

    def _damping_matrix(self) -> np.ndarray:
        if self.damping is None:
            return np.eye(self.dim, dtype=complex)
        return self.damping.entries


def _rcp_matrix(op: RcpOperator, t: float) -> np.ndarray:
    """R(t) = T_plus(t) + dagger(T_minus(-t)) with damped reverse family.

    The families are T_plus(s) = exp(-i s H_plus) / 2 and
    T_minus(s) = exp(-i s H_minus - eps |s| G) / 2; damping attenuates
    both temporal directions so R(0) is the identity and the norm decays
    for t > 0 whenever eps > 0.
    """
    h_plus = op.t_plus.entries
    h_minus = op.t_minus.entries
    g = op._damping_matrix()
    fwd = expm(-1j * t * h_plus) / 2
    rev = expm(1j * t * h_minus - op.epsilon * abs(t) * g) / 2
    return fwd + rev.conj().T


def rcp_apply(op: RcpOperator, t: float, psi: np.ndarray) -> np.ndarray:
    """Apply R(t) to a state vector."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.size != op.dim:
        raise ValueError(f"state dimension {v.size} does not match operator {op.dim}")
    return _rcp_matrix(op, float(t)) @ v


@dataclass(frozen=True)
class RcpInvariantReport:
    """Trajectory of <psi| R(t)^dag R(t) |psi> over the sample grid."""

    ts: tuple[float, ...]
    values: tuple[float, ...]
    constant: bool
    drift: float
    tol: float


def rcp_invariant(op: RcpOperator, psi: np.ndarray, ts: Sequence[float],
                  tol: float = 1e-10) -> RcpInvariantReport:
    """Evaluate the norm invariant along ``ts``.

    ``drift`` is max - min of the series; ``constant`` holds iff the
    drift stays below ``tol``, which happens exactly when the reverse
    family is the dagger dual of the forward one and epsilon is zero.
    """
    if len(ts) == 0:
        raise ValueError("need at least one sample time")
    v = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("state vector must be nonzero")
    v = v / norm
    values = []
    for t in ts:
        rv = _rcp_matrix(op, float(t)) @ v
        values.append(float(np.real(np.vdot(rv, rv))))
    drift = max(values) - min(values)
    return RcpInvariantReport(
        ts=tuple(float(t) for t in ts),
        values=tuple(values),
        constant=drift < tol,
        drift=drift,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# recurrence cascade
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CascadeReport:
    """Return-fidelity trace of an excitation hopping down a chain."""

    sites: int
    noise: float
    horizon: int
    seed: int
    fidelities: tuple[float, ...]   # fidelity after step k = 1..horizon
    best_fidelity: float
    best_step: int


def cascade(n: int, noise: float, horizon: int, seed: int = 0) -> CascadeReport:
    """Hop a single excitation along an open chain of ``n`` partners.

    The step unitary is exp(-i H pi/2) with H the uniform
    nearest-neighbour hopping Hamiltonian restricted to the
    one-excitation sector; depolarizing noise of strength ``noise`` acts
    after every step.  Reports the best fidelity of return to the
    initial end-site state within the horizon.  The seed is recorded for
    report identity; the density-matrix evolution itself is
    deterministic.
    """
    if not 2 <= n <= MAX_CASCADE_SITES:
        raise ValueError(f"chain length must lie in [2, {MAX_CASCADE_SITES}], got {n}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must lie in [0, 1], got {noise}")

    hop = np.zeros((n, n), dtype=complex)
    for j in range(n - 1):
        hop[j, j + 1] = hop[j + 1, j] = 1.0
    step = expm(-1j * CASCADE_STEP * hop)

    rho = np.zeros((n, n), dtype=complex)
    rho[0, 0] = 1.0
    mix = np.eye(n, dtype=complex) / n
    fids = []
    for _ in range(horizon):
        rho = step @ rho @ step.conj().T
        if noise:
            rho = (1 - noise) * rho + noise * mix
        fids.append(float(np.real(rho[0, 0])))

    best_idx = int(np.argmax(fids))
    return CascadeReport(
        sites=n,
        noise=noise,
        horizon=horizon,
        seed=seed,
        fidelities=tuple(fids),
        best_fidelity=fids[best_idx],
        best_step=best_idx + 1,
    )


# ---------------------------------------------------------------------------
# absorber reflection identity
# ---------------------------------------------------------------------------

def wf_echo(alpha: float, i_transmitted: float) -> tuple[float, float]:
    """Split transmitted information into reflected and absorbed parts.

    Returns (i_reflected, delta_s) with i_reflected = alpha * i_transmitted
    and delta_s the exact remainder, so the two always add back to
    i_transmitted bit for bit.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"reflection coefficient must lie in [0, 1], got {alpha}")
    if i_transmitted < 0:
        raise ValueError(f"transmitted information must be >= 0, got {i_transmitted}")
    i_reflected = alpha * i_transmitted
    delta_s = i_transmitted - i_reflected
    if i_reflected < 0.5 * i_transmitted:
        # Sterbenz: subtracting the larger part is exact, so nudging the
        # smaller one by at most an ulp restores an exact balance.
        i_reflected = i_transmitted - delta_s
    return i_reflected, delta_s
