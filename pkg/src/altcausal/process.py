"""Process matrices, time-reversal duality families, and the order switch.

A process matrix here is a positive Hermitian operator on the four
labelled wires (A_in, A_out, B_in, B_out) that is simultaneously the
Choi matrix of a trace-preserving map from the in-labelled wires to the
out-labelled wires.  Concretely, a forward (A to B) process built from a
channel ``c`` has the shape

    W_AB = choi(c) on (A_in, B_out)  (x)  tau on A_out  (x)  I on B_in

with ``tau`` a unit-trace state on the wire delivered back to the
sender's side and an unnormalised identity on the receiver's unused
emission wire.  Tracing the out wires then gives the identity on the in
wires for every trace-preserving ``c``, which is the validity condition
``validate_ocb`` reports on.

The reverse orientation is the adjoint under time reversal:
``W_BA(t) = dagger(W_AB(-t))``.  ``build_alternating_family`` realises
the time dependence as phase conjugation by ``exp(-i omega t G)`` with
``G`` an integer-spectrum generator supported on the out wires, so both
orientations stay valid at every instant and the duality holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .qcore import (
    DEFAULT_TOL,
    Channel,
    ComplexOperator,
    DensityMatrix,
    apply_channel,
    dagger,
    identity,
    ket,
    partial_trace,
    projector,
    spectral_norm,
    tensor,
    von_neumann_entropy,
)

__all__ = [
    "ROLES",
    "ProcessMatrix",
    "ValidityReport",
    "ProcessFamily",
    "ProcessTensor",
    "SwitchModel",
    "ComparisonReport",
    "validate_ocb",
    "from_channel_order",
    "route_state",
    "marginal_state",
    "check_two_way",
    "build_alternating_family",
    "check_duality",
    "with_skew_perturbation",
    "decompose_process_tensor",
    "build_quantum_switch",
    "switch_unitary",
    "switch_output",
    "control_interference_probabilities",
    "traced_target_channel",
    "switch_process_matrix",
    "ac_vs_ico_entropy",
]

ROLES = ("A_in", "A_out", "B_in", "B_out")


@dataclass(frozen=True)
class ProcessMatrix:
    """Hermitian positive operator on the four process wires.

    ``emission_role`` names the wire the sending party feeds, and
    ``delivery_role`` the wire on which the receiving party's state
    appears.  Constructors fill these in; time reversal swaps them.
    ``validate=False`` skips the Hermiticity/positivity gate and exists
    for fault injection in tests.
    """

    w: ComplexOperator
    emission_role: str = "A_in"
    delivery_role: str = "B_out"
    tol: float = DEFAULT_TOL
    validate: bool = True

    def __post_init__(self):
        if self.w.subsystem_count != len(ROLES):
            raise ValueError(f"process matrix needs {len(ROLES)} wires, got {self.w.subsystem_count}")
        for role in (self.emission_role, self.delivery_role):
            if role not in ROLES:
                raise ValueError(f"unknown wire role {role!r}")
        if self.validate:
            dev = self.w.hermiticity_deviation()
            if dev > self.tol:
                raise ValueError(f"process matrix is not Hermitian: deviation {dev:.3e}")
            lo = self.w.min_eigenvalue()
            if lo < -self.tol:
                raise ValueError(f"process matrix has negative eigenvalue {lo:.3e}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.w.dims

    def role_index(self, role: str) -> int:
        return ROLES.index(role)


@dataclass(frozen=True)
class ValidityReport:
    """Deviations from the three process-matrix conditions."""

    hermiticity_deviation: float
    min_eigenvalue: float
    normalization_deviation: float
    tol: float
    valid: bool


def validate_ocb(w: ProcessMatrix, tol: float = DEFAULT_TOL) -> ValidityReport:
    """Check Hermiticity, positivity, and the in/out trace condition.

    The normalization condition is that tracing every out-labelled wire
    leaves the identity on the in-labelled wires, i.e. the local
    probability rule is normalised for all trace-preserving parties.
    """
    herm = w.w.hermiticity_deviation()
    lo = w.w.min_eigenvalue()
    in_wires = [i for i, r in enumerate(ROLES) if r.endswith("_in")]
    reduced = partial_trace(w.w, keep=in_wires).entries
    d_in = reduced.shape[0]
    norm_dev = spectral_norm(reduced - np.eye(d_in))
    valid = herm <= tol and lo >= -tol and norm_dev <= tol
    return ValidityReport(
        hermiticity_deviation=herm,
        min_eigenvalue=lo,
        normalization_deviation=norm_dev,
        tol=tol,
        valid=valid,
    )


def _permute_subsystems(entries: np.ndarray, dims: Sequence[int],
                        perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so new factor i is old factor perm[i]."""
    dims = list(dims)
    n = len(dims)
    t = entries.reshape(*dims, *dims)
    axes = list(perm) + [p + n for p in perm]
    t = np.transpose(t, axes)
    side = math.prod(dims)
    return t.reshape(side, side)


def from_channel_order(c: Channel, order: str = "AB",
                       tau: DensityMatrix | None = None,
                       tol: float = DEFAULT_TOL) -> ProcessMatrix:
    """Build the definite-order process matrix carrying ``c``.

    Parameters
    ----------
    c : Channel
        The link channel from the sender's emission wire to the
        receiver's delivery wire.
    order : {"AB", "BA"}
        "AB" routes A's emission through ``c`` to B, "BA" the reverse.
    tau : DensityMatrix, optional
        State placed on the sender-side delivery wire (defaults to the
        maximally mixed state of the sender's dimension).

    The result passes ``validate_ocb`` for every trace-preserving ``c``.
    """
    if order not in ("AB", "BA"):
        raise ValueError(f"order must be 'AB' or 'BA', got {order!r}")
    # The sender's wires carry the channel input dimension, the
    # receiver's its output dimension.
    if tau is None:
        tau = DensityMatrix.maximally_mixed((c.in_dim,))
    if tau.dim != c.in_dim:
        raise ValueError(f"tau dimension {tau.dim} does not match sender dimension {c.in_dim}")
    ident = identity((c.out_dim,))

    if order == "AB":
        # kron order (A_in, B_out, A_out, B_in) -> (A_in, A_out, B_in, B_out)
        raw = tensor(tensor(c.choi, tau), ident)
        entries = _permute_subsystems(raw.entries, raw.dims, (0, 2, 3, 1))
        dims = (c.in_dim, c.in_dim, c.out_dim, c.out_dim)
        emission, delivery = "A_in", "B_out"
    else:
        # kron order (B_in, A_out, B_out, A_in) -> (A_in, A_out, B_in, B_out)
        raw = tensor(tensor(c.choi, tau), ident)
        entries = _permute_subsystems(raw.entries, raw.dims, (3, 1, 0, 2))
        dims = (c.out_dim, c.out_dim, c.in_dim, c.in_dim)
        emission, delivery = "B_in", "A_out"

    op = ComplexOperator(entries, dims)
    return ProcessMatrix(op, emission_role=emission, delivery_role=delivery, tol=tol)


def marginal_state(w: ProcessMatrix, role: str) -> DensityMatrix:
    """Unit-trace reduction of the process matrix onto one wire."""
    idx = w.role_index(role)
    reduced = partial_trace(w.w, keep=[idx]).entries
    tr = reduced.trace().real
    if tr <= 0:
        raise ValueError("process matrix has non-positive trace")
    return DensityMatrix(reduced / tr, (w.dims[idx],))


def route_state(w: ProcessMatrix, emission_state: DensityMatrix) -> DensityMatrix:
    """State appearing on the delivery wire when ``emission_state`` is fed in.

    For a process built by ``from_channel_order`` this reproduces the
    carried channel exactly: routing ``rho`` through the A-to-B process
    of channel ``c`` returns ``apply_channel(c, rho)``.
    """
    em, dl = w.role_index(w.emission_role), w.role_index(w.delivery_role)
    if emission_state.dim != w.dims[em]:
        raise ValueError(
            f"emission state dimension {emission_state.dim} does not match wire {w.dims[em]}")
    pair = partial_trace(w.w, keep=sorted((em, dl)))
    d0, d1 = pair.dims
    t = pair.entries.reshape(d0, d1, d0, d1)
    if em < dl:
        out = np.einsum("ij,iajb->ab", emission_state.entries, t)
    else:
        out = np.einsum("ij,aibj->ab", emission_state.entries, t)
    tr = out.trace().real
    if tr <= 0:
        raise ValueError("routed state has non-positive trace")
    return DensityMatrix(out / tr, (w.dims[dl],))


def check_two_way(w_ab: ProcessMatrix, w_ba: ProcessMatrix,
                  rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """Largest deviation of the delivered marginals from the reference states.

    ``rho_b`` is compared against what the forward process delivers on
    B's side, ``rho_a`` against what the reverse process delivers on A's
    side.  Zero means the pair is mutually consistent.
    """
    got_b = marginal_state(w_ab, w_ab.delivery_role).entries
    got_a = marginal_state(w_ba, w_ba.delivery_role).entries
    if got_b.shape != rho_b.entries.shape or got_a.shape != rho_a.entries.shape:
        raise ValueError("reference state dimensions do not match the delivery wires")
    dev_b = spectral_norm(got_b - rho_b.entries)
    dev_a = spectral_norm(got_a - rho_a.entries)
    return max(dev_a, dev_b)


# ---------------------------------------------------------------------------
# duality families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessFamily:
    """One-parameter family of paired orientations.

    ``generator(t)`` returns the pair (forward, backward) at time ``t``;
    ``period`` is the recurrence time of the construction.
    """

    generator: Callable[[float], tuple[ProcessMatrix, ProcessMatrix]]
    period: float

    def forward(self, t: float) -> ProcessMatrix:
        return self.generator(t)[0]

    def backward(self, t: float) -> ProcessMatrix:
        return self.generator(t)[1]


def _out_wire_phase_generator(dims: Sequence[int]) -> np.ndarray:
    """Diagonal integer generator supported on the out wires.

    Eigenvalues are sums of basis indices over the out-labelled factors,
    so exp(-2 pi i G) is the identity and conjugation leaves the partial
    trace over the out wires untouched.
    """
    n = len(dims)
    out_wires = [i for i, r in enumerate(ROLES) if r.endswith("_out")]
    g = np.zeros(dims, dtype=float)
    for axis in out_wires:
        shape = [1] * n
        shape[axis] = dims[axis]
        g = g + np.arange(dims[axis]).reshape(shape)
    return g.reshape(-1)


def _swap_parties(entries: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    # (A_in, A_out, B_in, B_out) -> (B_in, B_out, A_in, A_out)
    return _permute_subsystems(entries, dims, (2, 3, 0, 1))


def build_alternating_family(w_fwd: ProcessMatrix, omega: float,
                             phase_mode: str = "continuous") -> ProcessFamily:
    """Embed a forward process into a dual alternating family.

    Continuous mode conjugates by the diagonal phase ``exp(-i omega t G)``
    with the out-wire generator G, which interpolates the orientation
    with a phase factor of frequency ``omega`` while keeping every
    sampled member a valid process matrix.  Discrete mode swaps the two
    party slots once per half period instead.  In both modes the
    backward member is defined as ``dagger(forward(-t))``, so the
    duality holds identically and ``forward(0)`` is ``w_fwd``.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if phase_mode not in ("continuous", "discrete"):
        raise ValueError(f"phase_mode must be 'continuous' or 'discrete', got {phase_mode!r}")
    period = 2 * math.pi / omega
    base = w_fwd.w.entries
    dims = w_fwd.dims
    em, dl = w_fwd.emission_role, w_fwd.delivery_role

    if phase_mode == "continuous":
        g = _out_wire_phase_generator(dims)
        gap = g[:, None] - g[None, :]

        def member(t: float) -> np.ndarray:
            return base * np.exp(-1j * omega * t * gap)
    else:
        if dims[0] != dims[2] or dims[1] != dims[3]:
            raise ValueError("discrete swap requires equal A and B wire dimensions")
        swapped = _swap_parties(base, dims)

        def member(t: float) -> np.ndarray:
            return base if math.cos(omega * t) >= 0 else swapped

    def generator(t: float) -> tuple[ProcessMatrix, ProcessMatrix]:
        fwd = ProcessMatrix(ComplexOperator(member(t), dims),
                            emission_role=em, delivery_role=dl)
        back = ProcessMatrix(ComplexOperator(member(-t).conj().T, dims),
                             emission_role=dl, delivery_role=em)
        return fwd, back

    return ProcessFamily(generator=generator, period=period)


def check_duality(fam: ProcessFamily, ts: Sequence[float],
                  tol: float = 1e-12) -> float:
    """Max over ``ts`` of || backward(t) - dagger(forward(-t)) ||.

    A family satisfies the time-reversal duality when the returned
    deviation is below ``tol``.
    """
    if len(ts) == 0:
        raise ValueError("need at least one sample time")
    worst = 0.0
    for t in ts:
        back = fam.backward(float(t)).w.entries
        ref = fam.forward(-float(t)).w.entries.conj().T
        worst = max(worst, spectral_norm(back - ref))
    return worst


def with_skew_perturbation(fam: ProcessFamily, epsilon: float,
                           seed: int = 0) -> ProcessFamily:
    """Fault injection: offset the backward member by a skew-Hermitian term.

    The perturbation has unit spectral norm, so the duality deviation of
    the returned family is ``epsilon`` up to float error.
    """
    probe = fam.forward(0.0)
    d = probe.w.dim
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    skew = (g - g.conj().T) / 2
    skew /= spectral_norm(skew)
    offset = epsilon * skew

    def generator(t: float) -> tuple[ProcessMatrix, ProcessMatrix]:
        fwd, back = fam.generator(t)
        bumped = ProcessMatrix(ComplexOperator(back.w.entries + offset, back.dims),
                               emission_role=back.emission_role,
                               delivery_role=back.delivery_role,
                               validate=False)
        return fwd, bumped

    return ProcessFamily(generator=generator, period=fam.period)


# ---------------------------------------------------------------------------
# process tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessTensor:
    """Ordered steps of a multi-slot process, one operator per slot."""

    steps: tuple[ComplexOperator, ...]

    def __init__(self, steps: Sequence[ComplexOperator]):
        steps = tuple(steps)
        if not steps:
            raise ValueError("process tensor needs at least one step")
        dims = steps[0].dims
        if any(s.dims != dims for s in steps):
            raise ValueError("all steps must share the same wire dimensions")
        object.__setattr__(self, "steps", steps)

    @property
    def step_count(self) -> int:
        return len(self.steps)


def _reverse_dagger(tens: ProcessTensor) -> ProcessTensor:
    return ProcessTensor([dagger(s) for s in reversed(tens.steps)])


def decompose_process_tensor(tens: ProcessTensor) -> tuple[ProcessTensor, ProcessTensor]:
    """Split into forward and reflected components.

    With R the order-reversing adjoint (dagger each step, reverse the
    step order), the reflected part is the halved R-symmetric component

        t_minus = (tens + R(tens)) / 4

    and the forward part carries the rest, t_plus = tens - t_minus.
    The sum reconstructs ``tens`` entrywise, t_minus is R-invariant, and
    on R-symmetric tensors t_minus equals dagger-of-reversed t_plus.
    """
    rev = _reverse_dagger(tens)
    minus_steps = []
    plus_steps = []
    for s, r in zip(tens.steps, rev.steps):
        minus = ComplexOperator((s.entries + r.entries) / 4, s.dims)
        minus_steps.append(minus)
        plus_steps.append(ComplexOperator(s.entries - minus.entries, s.dims))
    return ProcessTensor(plus_steps), ProcessTensor(minus_steps)


# ---------------------------------------------------------------------------
# the order switch
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SwitchModel:
    """Coherent order switch for two unitaries on a shared target."""

    u_a: ComplexOperator
    u_b: ComplexOperator

    @property
    def target_dim(self) -> int:
        return self.u_a.dim


def _as_unitary_operator(u, tol: float) -> ComplexOperator:
    if not isinstance(u, ComplexOperator):
        u = ComplexOperator(u, (np.asarray(u).shape[0],))
    dev = spectral_norm(u.entries.conj().T @ u.entries - np.eye(u.dim))
    if dev > tol:
        raise ValueError(f"matrix is not unitary: deviation {dev:.3e}")
    return u


def build_quantum_switch(u_a, u_b, tol: float = DEFAULT_TOL) -> SwitchModel:
    """Validate the two unitaries and wrap them in a SwitchModel."""
    ua = _as_unitary_operator(u_a, tol)
    ub = _as_unitary_operator(u_b, tol)
    if ua.dim != ub.dim:
        raise ValueError("switch unitaries must act on the same dimension")
    return SwitchModel(u_a=ua, u_b=ub)


def switch_unitary(model: SwitchModel) -> ComplexOperator:
    """Joint unitary on target (x) control.

    Control |0> applies u_b u_a, control |1> applies u_a u_b.
    """
    d = model.target_dim
    u0 = model.u_b.entries @ model.u_a.entries
    u1 = model.u_a.entries @ model.u_b.entries
    p0 = np.outer(ket(0), ket(0).conj())
    p1 = np.outer(ket(1), ket(1).conj())
    return ComplexOperator(np.kron(u0, p0) + np.kron(u1, p1), (d, 2))


def switch_output(model: SwitchModel, target: DensityMatrix,
                  control: DensityMatrix) -> DensityMatrix:
    """Joint output state for the given target and control inputs."""
    if target.dim != model.target_dim or control.dim != 2:
        raise ValueError("target/control dimensions do not match the switch")
    s = switch_unitary(model).entries
    joint = np.kron(target.entries, control.entries)
    return DensityMatrix(s @ joint @ s.conj().T, (model.target_dim, 2))


def control_interference_probabilities(model: SwitchModel, target: DensityMatrix,
                                       control: DensityMatrix) -> tuple[float, float]:
    """Probabilities of the +/- control outcomes after the switch.

    Anticommuting unitaries with a balanced control make the "-" outcome
    certain; commuting ones make "+" certain.
    """
    out = switch_output(model, target, control)
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2)
    d = model.target_dim
    p = []
    for v in (plus, minus):
        proj = np.kron(np.eye(d, dtype=complex), np.outer(v, v.conj()))
        p.append(float(np.real(np.trace(proj @ out.entries))))
    p_plus, p_minus = p
    return p_plus, p_minus


def traced_target_channel(model: SwitchModel, control: DensityMatrix,
                          tol: float = DEFAULT_TOL) -> Channel:
    """Effective channel on the target once the control is traced out."""
    if control.dim != 2:
        raise ValueError("control must be a qubit state")
    d = model.target_dim
    s = switch_unitary(model).entries
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            joint = s @ np.kron(unit, control.entries) @ s.conj().T
            block = joint.reshape(d, 2, d, 2)
            out = np.einsum("acbc->ab", block)
            eij = np.zeros((d, d), dtype=complex)
            eij[i, j] = 1.0
            choi += np.kron(eij, out)
    return Channel(ComplexOperator(choi, (d, d)), d, d, tol=tol)


def switch_process_matrix(model: SwitchModel, control: DensityMatrix,
                          tol: float = DEFAULT_TOL) -> ProcessMatrix:
    """Process matrix of the switch with the control traced out.

    A control fixed near |0> or |1> gives the corresponding definite
    order; any other control state is labelled with the forward order by
    convention (the validity conditions hold either way).
    """
    chan = traced_target_channel(model, control, tol=tol)
    p1 = float(np.real(control.entries[1, 1]))
    order = "BA" if p1 > 1 - 1e-12 else "AB"
    return from_channel_order(chan, order=order, tol=tol)


# ---------------------------------------------------------------------------
# alternating vs coherent order under noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonReport:
    """Entropy trajectories of the two ordering protocols.

    The series include the initial point, so each has steps + 1 entries.
    Which protocol accumulates less entropy is reported, never asserted.
    """

    noise: float
    steps: int
    ac_entropies: tuple[float, ...]
    ico_entropies: tuple[float, ...]

    @property
    def final_ac(self) -> float:
        return self.ac_entropies[-1]

    @property
    def final_ico(self) -> float:
        return self.ico_entropies[-1]


def ac_vs_ico_entropy(u_a, u_b, noise: float, steps: int,
                      target: DensityMatrix | None = None) -> ComparisonReport:
    """Compare alternating definite order against the coherent switch.

    The alternating protocol applies the composite unitaries
    u_a u_b, u_b u_a, ... in strict alternation with the control wire
    left untouched; the coherent protocol applies the switch unitary to
    target (x) control prepared with a balanced control.  Both see the
    same joint depolarizing noise of strength ``noise`` after every
    step, so any entropy gap is attributable to how the order is
    carried.
    """
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must lie in [0, 1], got {noise}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    model = build_quantum_switch(u_a, u_b)
    d = model.target_dim
    if target is None:
        target = projector(ket(0, d))
    if target.dim != d:
        raise ValueError("target state dimension does not match the unitaries")

    dim = 2 * d
    mix = np.eye(dim, dtype=complex) / dim
    ident_c = np.eye(2, dtype=complex)
    m_even = np.kron(model.u_a.entries @ model.u_b.entries, ident_c)
    m_odd = np.kron(model.u_b.entries @ model.u_a.entries, ident_c)
    s = switch_unitary(model).entries

    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    ac_state = np.kron(target.entries, np.outer(ket(0), ket(0).conj()))
    ico_state = np.kron(target.entries, np.outer(plus, plus.conj()))

    def entropy(m: np.ndarray) -> float:
        return von_neumann_entropy(DensityMatrix(m, (d, 2)))

    ac_series = [entropy(ac_state)]
    ico_series = [entropy(ico_state)]
    for k in range(steps):
        u = m_even if k % 2 == 0 else m_odd
        ac_state = u @ ac_state @ u.conj().T
        ac_state = (1 - noise) * ac_state + noise * mix
        ico_state = s @ ico_state @ s.conj().T
        ico_state = (1 - noise) * ico_state + noise * mix
        ac_series.append(entropy(ac_state))
        ico_series.append(entropy(ico_state))

    return ComparisonReport(
        noise=noise,
        steps=steps,
        ac_entropies=tuple(ac_series),
        ico_entropies=tuple(ico_series),
    )
