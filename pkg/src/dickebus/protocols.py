"""
Executable multi-step protocols: single-step W generation, heralded Dicke
preparation, deterministic sequential Dicke growth, and the N-step
entangled-transfer (NOON-like) sequence.

A protocol is a timed list of steps, each carrying a Hamiltonian spec, a
duration, and optional actions (ancilla prepending, projective measurement,
a recorded phase correction).  ``run_protocol`` executes it on one of four
engines:

- ``analytic``   closed-form single-excitation amplitudes (resonant model),
- ``effective``  reduced Dicke-pair dynamics, evolved in the interaction
                 frame of the diagonal shifts (populations identical to the
                 plain frame; per-component phases differ and are what the
                 phase ledger tracks),
- ``full``       the complete qubits-plus-mode model,
- ``lindblad``   density-matrix evolution with a LindbladSpec.

Phase ledger: each half/quarter Rabi rotation leaves a -i on the transferred
component.  Growth steps must remove it before the ancilla is absorbed into
the register (physically a local Z on the retiring ancilla); the applied
angles are recorded in the run record, and both raw and phase-corrected
fidelities are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .analytic import (mu as mu_of, resonant_amplitudes, stark_shift, tau_dicke,
                       transition_detuning, transition_element, transition_spec)
from .core import (DickeLabel, DomainError, SpaceSpec, StateVector, dicke_state,
                   fidelity, phase_corrected_fidelity)
from .design import w_couplings
from .dynamics import evolve_exact, evolve_lindblad, evolve_tdep
from .models import (CouplingProfile, DispersiveParams, EffectiveDicke,
                     HamiltonianSpec, LindbladSpec, PhysicsValidationError,
                     ResonantTC, effective_dicke, lab_dispersive,
                     number_operator, resonant_tc)


# ---------------------------------------------------------------------------
# state specifications (engine-independent)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseBasisState:
    """Superposition of computational basis states of a full space.

    ``entries`` maps (qubit pattern like 'egg', photon number) to amplitudes;
    normalized on build.
    """

    entries: tuple

    @staticmethod
    def of(entries: dict) -> "SparseBasisState":
        return SparseBasisState(tuple(sorted(entries.items())))

    def build(self, space: SpaceSpec) -> StateVector:
        amps = np.zeros(space.dim, dtype=complex)
        for (pattern, photons), c in self.entries:
            bits = [1 if ch == "e" else 0 for ch in pattern]
            amps[space.index(bits, photons)] = c
        return StateVector(space, amps).normalized()


@dataclass(frozen=True)
class DickePairState:
    """Superposition over the product ladder |D_k^N>|D_q^M>."""

    n: int
    m: int
    amplitudes: tuple

    @staticmethod
    def of(n: int, m: int, amplitudes: dict) -> "DickePairState":
        return DickePairState(n, m, tuple(sorted(amplitudes.items())))

    def build_effective(self) -> StateVector:
        space = SpaceSpec((self.n, self.m), collective=True)
        amps = np.zeros(space.dim, dtype=complex)
        for (k, q), c in self.amplitudes:
            amps[space.index((k, q))] = c
        return StateVector(space, amps).normalized()

    def build_full(self, cutoff: int) -> StateVector:
        space = SpaceSpec((self.n, self.m), cutoff)
        amps = np.zeros(space.dim, dtype=complex)
        for (k, q), c in self.amplitudes:
            v = np.kron(
                dicke_state(DickeLabel(self.n, k)).amplitudes,
                dicke_state(DickeLabel(self.m, q)).amplitudes,
            )
            full = np.zeros(space.dim, dtype=complex)
            full.reshape(-1, space.boson_dim)[:, 0] = v
            amps += c * full
        return StateVector(space, amps).normalized()


@dataclass(frozen=True)
class RegisterDickeState:
    """Symmetric-sector state of a bare register (no ancilla attached)."""

    m: int
    amplitudes: tuple

    @staticmethod
    def of(m: int, amplitudes: dict) -> "RegisterDickeState":
        return RegisterDickeState(m, tuple(sorted(amplitudes.items())))

    def build_effective(self) -> StateVector:
        space = SpaceSpec((self.m,), collective=True)
        amps = np.zeros(space.dim, dtype=complex)
        for q, c in self.amplitudes:
            amps[q] = c
        return StateVector(space, amps).normalized()

    def build_full(self, cutoff: int) -> StateVector:
        space = SpaceSpec((self.m,), cutoff)
        amps = np.zeros(space.dim, dtype=complex)
        for q, c in self.amplitudes:
            v = dicke_state(DickeLabel(self.m, q)).amplitudes
            amps.reshape(-1, space.boson_dim)[:, 0] += c * v
        return StateVector(space, amps).normalized()


# ---------------------------------------------------------------------------
# protocol structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureAction:
    qubit: int
    herald: str      # outcome that continues the protocol


@dataclass(frozen=True)
class ProtocolStep:
    hamiltonian: HamiltonianSpec
    duration: float
    label: str
    measure: MeasureAction | None = None
    prepend_ancilla: str | None = None      # 'e' to attach a fresh excited qubit
    phase_fix: float | None = None          # post-evolve angle on the ancilla-g manifold
    merge_register: bool = False            # absorb the ancilla into the register after the step
    split_register: bool = False            # pre-evolve adjoint of merge (reversal support)
    phase_fix_pre: float | None = None      # pre-evolve angle on the ancilla-g manifold
    drop_ancilla: bool = False              # post-evolve removal of an ancilla left in |e>

    def __post_init__(self):
        if self.duration < 0 and (self.measure or self.merge_register):
            raise DomainError("reversed steps cannot measure or merge")


@dataclass(frozen=True)
class Protocol:
    initial: object
    steps: tuple[ProtocolStep, ...]
    target: object
    label: str


@dataclass(frozen=True)
class StepRecord:
    label: str
    duration: float
    herald_outcome: str | None
    herald_probability: float | None
    fidelity_raw: float | None
    fidelity_phase_corrected: float | None
    leakage: float
    conservation_drift: float


@dataclass(frozen=True)
class RunRecord:
    engine: str
    seed: int
    steps: tuple[StepRecord, ...]
    fidelity_raw: float
    fidelity_phase_corrected: float
    final_state: object
    phase_ledger: tuple[str, ...]
    heralded_ok: bool = True

    @property
    def herald_probability(self) -> float:
        p = 1.0
        for s in self.steps:
            if s.herald_probability is not None:
                p *= s.herald_probability
        return p


# ---------------------------------------------------------------------------
# protocol constructors
# ---------------------------------------------------------------------------

def w_protocol(n: int, k: int = 0, chi_ref: float = 1.0, cutoff: int = 1) -> Protocol:
    """Single resonant step of duration pi/mu with the boosted-coupling
    profile; target is the N-qubit single-excitation W state."""
    profile = w_couplings(n, k, chi_ref)
    h = resonant_tc(profile, cutoff)
    duration = math.pi / mu_of(profile)
    pattern = "".join("e" if j == k else "g" for j in range(n))
    target = SparseBasisState.of(
        {("".join("e" if j == i else "g" for j in range(n)), 0): 1.0 for i in range(n)}
    )
    return Protocol(
        initial=SparseBasisState.of({(pattern, 0): 1.0}),
        steps=(ProtocolStep(h, duration, "w-transfer"),),
        target=target,
        label=f"w{n}",
    )


def probabilistic_dicke_step(m: int, q: int, params: DispersiveParams,
                             resonance_rtol: float = 1e-6) -> ProtocolStep:
    """Half Rabi period on the |e>|D_q^M> <-> |g>|D_{q+1}^M> pair, then a
    herald-on-g measurement of the ancilla.  Refuses parameters for which
    that transition is not resonant."""
    if params.n != 1 or params.m != m:
        raise DomainError(f"params describe groups ({params.n},{params.m}), expected (1,{m})")
    spec = transition_spec(1, m, 1, q, "-")
    element = transition_element(spec, params)
    det = transition_detuning(spec, params).detuning
    if abs(det) > resonance_rtol * element:
        raise PhysicsValidationError(
            f"refused: |detuning| {abs(det):.3e} exceeds {resonance_rtol:.1e} x element {element:.3e}"
        )
    return ProtocolStep(
        effective_dicke(params), math.pi / (2 * element), f"herald-D{q + 1}-of-{m}",
        measure=MeasureAction(0, "g"),
    )


def sequential_dicke_protocol(m0: int, q_target: int,
                              params_schedule: list[DispersiveParams]) -> Protocol:
    """Deterministic growth |D_0^M0> -> |D_q^(M0+q)>: each step attaches an
    excited ancilla, rotates for the merge time tau, removes the rotation
    phase from the transferred branch, and absorbs the ancilla."""
    if q_target < 0:
        raise DomainError("q_target must be >= 0")
    if len(params_schedule) != q_target:
        raise DomainError(f"schedule has {len(params_schedule)} entries, expected {q_target}")
    steps = []
    for i, params in enumerate(params_schedule):
        m_i = m0 + i
        if params.n != 1 or params.m != m_i:
            raise DomainError(f"step {i}: params groups ({params.n},{params.m}) != (1,{m_i})")
        spec = transition_spec(1, m_i, 1, i, "-")
        element = transition_element(spec, params)
        det = transition_detuning(spec, params).detuning
        if abs(det) > 1e-6 * element:
            raise PhysicsValidationError(f"step {i} is not resonant (detuning {det:.3e})")
        steps.append(ProtocolStep(
            effective_dicke(params), tau_dicke(m_i, i, element), f"grow-{m_i}to{m_i + 1}",
            prepend_ancilla="e", phase_fix=math.pi / 2, merge_register=True,
        ))
    return Protocol(
        initial=RegisterDickeState.of(m0, {0: 1.0}),
        steps=tuple(steps),
        target=RegisterDickeState.of(m0 + q_target, {q_target: 1.0}),
        label=f"dicke-seq-{m0}+{q_target}",
    )


def noon_protocol(n: int, params_schedule: list[DispersiveParams]) -> Protocol:
    """N-step preparation of (|D_N^N>|D_0^N> + |D_0^N>|D_N^N>)/sqrt(2).

    Step 1 is a quarter period on (N,0)<->(N-1,1), creating the equal
    superposition; steps 2..N are half periods walking the moving component
    down the ladder while the parked component stays far off resonance.
    Each rotation leaves -i on the moving component; the accumulated phases
    are recorded in the ledger and absorbed by phase-corrected scoring
    (physically a frame rotation on group 2).
    """
    if n < 2:
        raise DomainError("the entangled-transfer sequence needs N >= 2")
    if len(params_schedule) != n:
        raise DomainError(f"schedule has {len(params_schedule)} entries, expected {n}")
    steps = []
    for i, params in enumerate(params_schedule):
        if params.n != n or params.m != n:
            raise DomainError(f"step {i}: params groups ({params.n},{params.m}) != ({n},{n})")
        spec = transition_spec(n, n, n - i, i, "-")
        element = transition_element(spec, params)
        det = transition_detuning(spec, params).detuning
        if abs(det) > 1e-6 * element:
            raise PhysicsValidationError(f"step {i} is not resonant (detuning {det:.3e})")
        duration = math.pi / ((4 if i == 0 else 2) * element)
        steps.append(ProtocolStep(
            effective_dicke(params), duration,
            f"transfer-({n - i},{i})to({n - i - 1},{i + 1})" + ("-half" if i else "-quarter"),
        ))
    return Protocol(
        initial=DickePairState.of(n, n, {(n, 0): 1.0}),
        steps=tuple(steps),
        target=DickePairState.of(n, n, {(n, 0): 1 / math.sqrt(2), (0, n): 1 / math.sqrt(2)}),
        label=f"noon{n}",
    )


def _state_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "basis":
        return SparseBasisState.of({(doc["qubits"], int(doc.get("photons", 0))): 1.0})
    if kind == "pair":
        amps = {tuple(int(x) for x in key.split(",")): complex(*val) if isinstance(val, list)
                else complex(val) for key, val in doc["amplitudes"].items()}
        return DickePairState.of(int(doc["n"]), int(doc["m"]), amps)
    if kind == "register":
        amps = {int(key): complex(*val) if isinstance(val, list) else complex(val)
                for key, val in doc["amplitudes"].items()}
        return RegisterDickeState.of(int(doc["m"]), amps)
    raise DomainError(f"unknown state kind {kind!r}")


def _model_from_dict(doc: dict) -> HamiltonianSpec:
    kind = doc.get("kind")
    if kind == "effective":
        p = doc["params"]
        return effective_dicke(DispersiveParams(
            int(p["n"]), int(p["m"]), float(p["g1"]), float(p["g2"]),
            float(p["delta1"]), float(p["delta2"])))
    if kind == "resonant":
        return resonant_tc(CouplingProfile(tuple(float(x) for x in doc["chi"])),
                           int(doc.get("cutoff", 1)))
    raise DomainError(f"unknown model kind {kind!r}")


def _duration_from_dict(doc, h: HamiltonianSpec) -> float:
    if isinstance(doc, (int, float)):
        return float(doc)
    if not isinstance(h, EffectiveDicke):
        raise DomainError("symbolic durations need a reduced-model step")
    t = doc["transition"]
    spec = transition_spec(h.params.n, h.params.m, int(t["k"]), int(t["q"]),
                           t.get("branch", "-"))
    element = transition_element(spec, h.params)
    if "fraction" in doc:
        # fraction of the full population period pi/element: 0.5 is a
        # complete transfer, 0.25 the equal superposition
        return float(doc["fraction"]) * math.pi / element
    if doc.get("merge_time"):
        return tau_dicke(h.params.m, int(t["q"]), element)
    raise DomainError("duration needs 'fraction' or 'merge_time'")


def protocol_from_dict(doc: dict) -> Protocol:
    """Build a protocol from its JSON-config form: initial/target state
    specs plus a step list with named models and durations (numeric, a
    fraction of the addressed transition's period, or the merge time).
    """
    steps = []
    for sd in doc["steps"]:
        h = _model_from_dict(sd["model"])
        measure = None
        if "measure" in sd:
            measure = MeasureAction(int(sd["measure"]["qubit"]), sd["measure"]["herald"])
        steps.append(ProtocolStep(
            h, _duration_from_dict(sd["duration"], h), sd.get("label", "step"),
            measure=measure,
            prepend_ancilla=sd.get("prepend_ancilla"),
            phase_fix=float(sd["phase_fix"]) if "phase_fix" in sd else None,
            merge_register=bool(sd.get("merge_register", False)),
        ))
    return Protocol(_state_from_dict(doc["initial"]), tuple(steps),
                    _state_from_dict(doc["target"]), doc.get("label", "custom"))


def reversed_protocol(p: Protocol) -> Protocol:
    """Undo a protocol: steps in reverse order with negated durations, merges
    replaced by splits, phase fixes negated and applied before the evolution,
    and prepended ancillas dropped afterwards.  Measurement steps are not
    reversible."""
    if any(s.measure is not None for s in p.steps):
        raise DomainError("protocols with measurements are not reversible")
    steps = tuple(
        ProtocolStep(
            s.hamiltonian, -s.duration, s.label + "-rev",
            split_register=s.merge_register,
            phase_fix_pre=-s.phase_fix if s.phase_fix is not None else None,
            drop_ancilla=s.prepend_ancilla is not None,
        )
        for s in reversed(p.steps)
    )
    return Protocol(p.target, steps, p.initial, p.label + "-reversed")


# ---------------------------------------------------------------------------
# engine helpers
# ---------------------------------------------------------------------------

def _effective_prepend(state: StateVector) -> StateVector:
    """|psi_register> -> |e>|psi_register> in the pair basis (ancilla k=1)."""
    (m,) = state.space.qubit_groups
    space = SpaceSpec((1, m), collective=True)
    amps = np.zeros(space.dim, dtype=complex)
    for q in range(m + 1):
        amps[space.index((1, q))] = state.amplitudes[q]
    return StateVector(space, amps)


def _effective_split(state: StateVector) -> StateVector:
    """Adjoint of the merge isometry: re-express a register of M qubits as
    ancilla + (M-1)-qubit register.  Exact on symmetric-sector states:
    pair(1, q) = sqrt((q+1)/M) b_{q+1}, pair(0, q) = sqrt((M-q)/M) b_q."""
    (mp,) = state.space.qubit_groups
    if mp < 2:
        raise DomainError("cannot split a single-qubit register")
    m = mp - 1
    b = state.amplitudes
    space = SpaceSpec((1, m), collective=True)
    amps = np.zeros(space.dim, dtype=complex)
    for q in range(m + 1):
        amps[space.index((1, q))] = math.sqrt((q + 1) / mp) * b[q + 1]
        amps[space.index((0, q))] = math.sqrt((mp - q) / mp) * b[q]
    return StateVector(space, amps)


def _effective_drop(state: StateVector) -> tuple[StateVector, float]:
    """Remove an ancilla expected in |e>; the ancilla-g weight is leakage."""
    n, m = state.space.qubit_groups
    if n != 1:
        raise DomainError("drop expects a single-qubit ancilla group")
    pair = state.amplitudes.reshape(2, m + 1)
    w = float((np.abs(pair[1]) ** 2).sum())
    if w <= 0:
        raise DomainError("ancilla has no excited-state weight to drop")
    return StateVector(SpaceSpec((m,), collective=True), pair[1] / math.sqrt(w)), max(0.0, 1 - w)


def _effective_merge(state: StateVector) -> tuple[StateVector, float]:
    """Absorb a single ancilla into the register: project onto the symmetric
    sector of the M+1 qubits.

    b_{q'} = sqrt(q'/(M+1)) amp(1, q'-1) + sqrt((M+1-q')/(M+1)) amp(0, q').
    Returns the renormalized register state and the mixed-symmetry leakage.
    """
    n, m = state.space.qubit_groups
    if n != 1:
        raise DomainError("merge expects a single-qubit ancilla group")
    pair = state.amplitudes.reshape(2, m + 1)
    mp = m + 1
    out = np.zeros(mp + 1, dtype=complex)
    for qp in range(mp + 1):
        if qp >= 1:
            out[qp] += math.sqrt(qp / mp) * pair[1, qp - 1]
        if qp <= m:
            out[qp] += math.sqrt((mp - qp) / mp) * pair[0, qp]
    w = float((np.abs(out) ** 2).sum())
    leak = max(0.0, 1.0 - w)
    if w <= 0:
        raise DomainError("merged state has no symmetric component")
    return StateVector(SpaceSpec((mp,), collective=True), out / math.sqrt(w)), leak


def _effective_phase_fix(state: StateVector, angle: float) -> StateVector:
    """Multiply the ancilla-ground manifold (k=0 rows) by exp(i angle)."""
    n, m = state.space.qubit_groups
    amps = state.amplitudes.copy()
    grid = amps.reshape(n + 1, m + 1)
    grid[0, :] *= np.exp(1j * angle)
    return StateVector(state.space, grid.reshape(-1))


def _effective_measure(state: StateVector, action: MeasureAction, rng):
    """Ancilla measurement in the pair basis; collapsed state keeps the pair
    space with the ancilla projected onto the outcome row."""
    n, m = state.space.qubit_groups
    if n != 1 or action.qubit != 0:
        raise DomainError("effective-engine measurement supports the single ancilla only")
    grid = state.amplitudes.reshape(2, m + 1)
    p_e = float((np.abs(grid[1]) ** 2).sum())
    if rng is None:
        outcome = action.herald
    else:
        outcome = "e" if rng.random() < p_e else "g"
    p = p_e if outcome == "e" else 1.0 - p_e
    if p <= 0:
        raise DomainError(f"branch '{outcome}' has zero probability")
    new = np.zeros_like(grid)
    row = 1 if outcome == "e" else 0
    new[row] = grid[row] / math.sqrt(p)
    return StateVector(state.space, new.reshape(-1)), outcome, p


def _full_space_of(h: HamiltonianSpec, cutoff: int) -> SpaceSpec:
    if isinstance(h, EffectiveDicke):
        return SpaceSpec((h.params.n, h.params.m), cutoff)
    return h.space


def _full_model(h: HamiltonianSpec, cutoff: int) -> HamiltonianSpec:
    if isinstance(h, EffectiveDicke):
        return lab_dispersive(h.params, cutoff)
    return h


def _full_prepend(state: StateVector) -> StateVector:
    anc = core.basis_state(SpaceSpec((1,)), "e")
    return core.tensor(anc, state)


def _full_pair_vectors(n: int, m: int):
    vecs = {}
    for k in range(n + 1):
        dk = dicke_state(DickeLabel(n, k)).amplitudes if n >= 1 else np.array([1.0 + 0j])
        for q in range(m + 1):
            vecs[(k, q)] = np.kron(dk, dicke_state(DickeLabel(m, q)).amplitudes)
    return vecs


def _full_phase_fix(state: StateVector, params: DispersiveParams, duration: float,
                    angle: float) -> StateVector:
    """Nominal inter-step correction on the full engine: undo the
    second-order diagonal phases exp(-i (shift_kq + lam1 k + lam2 q) tau)
    of each pair manifold and apply the rotation-phase fix on the
    ancilla-ground manifold."""
    sp = state.space
    n, m = sp.qubit_groups
    amps = state.amplitudes.copy().reshape(2 ** sp.n_qubits, sp.boson_dim)
    vecs = _full_pair_vectors(n, m)
    for (k, q), v in vecs.items():
        shift = stark_shift(k, q, params) + params.lambda1 * k + params.lambda2 * q
        phi = shift * duration + (angle if k == 0 else 0.0)
        c = v.conj() @ amps
        amps += np.outer(v, (np.exp(1j * phi) - 1.0) * c)
    return StateVector(sp, amps.reshape(-1))


def _conservation_ops(h: HamiltonianSpec):
    if isinstance(h, ResonantTC):
        return number_operator(h.space)
    return None


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def run_protocol(protocol: Protocol, engine: str = "effective", seed: int = 0,
                 herald_mode: str = "project", cutoff: int | None = None,
                 dissipation: LindbladSpec | None = None, tol: float = 1e-10) -> RunRecord:
    """Execute a protocol deterministically (given the seed) and score it.

    herald_mode 'project' takes every heralded branch and records its
    probability; 'sample' draws outcomes from the seeded generator and flags
    the run when a draw misses the herald.
    """
    if engine == "analytic":
        return _run_analytic(protocol)
    if engine == "effective":
        return _run_effective(protocol, seed, herald_mode, tol)
    if engine == "full":
        return _run_full(protocol, seed, herald_mode, cutoff, tol)
    if engine == "lindblad":
        return _run_lindblad(protocol, seed, cutoff, dissipation, tol)
    raise DomainError(f"unknown engine '{engine}'")


def _score(state: StateVector, target: StateVector | None):
    if target is None or state.space.dim != target.space.dim:
        return None, None
    return fidelity(state, target), phase_corrected_fidelity(state, target)


def _build_target(protocol: Protocol, engine: str, cutoff: int | None):
    t = protocol.target
    if engine in ("effective",):
        return t.build_effective() if hasattr(t, "build_effective") else None
    return None  # full/analytic targets are built against a concrete space later


def _run_analytic(protocol: Protocol) -> RunRecord:
    if len(protocol.steps) != 1 or not isinstance(protocol.steps[0].hamiltonian, ResonantTC):
        raise DomainError("analytic engine supports single-step resonant protocols")
    step = protocol.steps[0]
    h = step.hamiltonian
    space = h.space
    init = protocol.initial.build(space)
    nz = np.nonzero(np.abs(init.amplitudes) > 1e-12)[0]
    if len(nz) != 1:
        raise DomainError("analytic engine needs a single-basis-state initial condition")
    bits = int(nz[0]) // space.boson_dim
    photons = int(nz[0]) % space.boson_dim
    pattern = [(bits >> (space.n_qubits - 1 - j)) & 1 for j in range(space.n_qubits)]
    if sum(pattern) != 1 or photons != 0:
        raise DomainError("analytic engine needs one excited qubit and the mode in vacuum")
    k = pattern.index(1)
    amps = resonant_amplitudes(h.profile, k, step.duration)
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.index([0] * space.n_qubits, 1)] = amps.c0
    for j in range(space.n_qubits):
        vec[space.index([1 if i == j else 0 for i in range(space.n_qubits)], 0)] = amps.c[j]
    state = StateVector(space, vec)
    target = protocol.target.build(space)
    f_raw, f_pc = _score(state, target)
    rec = StepRecord(step.label, step.duration, None, None, f_raw, f_pc, 0.0, 0.0)
    return RunRecord("analytic", 0, (rec,), f_raw, f_pc, state, ())


def _run_effective(protocol: Protocol, seed: int, herald_mode: str, tol: float) -> RunRecord:
    rng = np.random.default_rng(seed) if herald_mode == "sample" else None
    init = protocol.initial
    state = init.build_effective()
    target = _build_target(protocol, "effective", None)
    records, ledger = [], []
    ok = True
    for i, step in enumerate(protocol.steps):
        h = step.hamiltonian
        if not isinstance(h, EffectiveDicke):
            raise DomainError("effective engine requires reduced-model steps")
        if step.prepend_ancilla == "e":
            state = _effective_prepend(state)
        elif step.prepend_ancilla is not None:
            raise DomainError("only excited ancillas are supported")
        if step.split_register:
            state = _effective_split(state)
        if step.phase_fix_pre is not None:
            state = _effective_phase_fix(state, step.phase_fix_pre)
            ledger.append(f"step {i} ({step.label}): {step.phase_fix_pre:+.6f} rad on "
                          f"ancilla-g manifold (pre)")
        if state.space.dim != h.space.dim:
            raise DomainError(f"step {i}: state dim {state.space.dim} != model dim {h.space.dim}")
        n, m = state.space.qubit_groups
        kq = np.add.outer(np.arange(n + 1), np.arange(m + 1)).reshape(-1)
        total_before = float((kq * state.probabilities()).sum())
        res = evolve_tdep(h, state, step.duration, tol=tol, terms=h.rotated_terms())
        state = res.final
        total_after = float((kq * state.probabilities()).sum())
        drift = abs(total_after - total_before)
        herald_out, herald_p = None, None
        leak = 0.0
        if step.phase_fix is not None:
            state = _effective_phase_fix(state, step.phase_fix)
            ledger.append(f"step {i} ({step.label}): {step.phase_fix:+.6f} rad on ancilla-g manifold")
        if step.measure is not None:
            state, herald_out, herald_p = _effective_measure(state, step.measure, rng)
            if herald_out != step.measure.herald:
                ok = False
        if step.merge_register:
            state, leak = _effective_merge(state)
        if step.drop_ancilla:
            state, leak = _effective_drop(state)
        f_raw, f_pc = _score(state, target)
        records.append(StepRecord(step.label, step.duration, herald_out, herald_p,
                                  f_raw, f_pc, leak, drift))
        if not ok:
            break
    f_raw, f_pc = _score(state, target)
    return RunRecord("effective", seed, tuple(records), f_raw if f_raw is not None else 0.0,
                     f_pc if f_pc is not None else 0.0, state, tuple(ledger), ok)


def _full_initial(protocol: Protocol, cutoff: int) -> StateVector:
    init = protocol.initial
    if isinstance(init, SparseBasisState):
        space = _full_space_of(protocol.steps[0].hamiltonian, cutoff)
        return init.build(space)
    return init.build_full(cutoff)


def _full_target(protocol: Protocol, space: SpaceSpec) -> StateVector | None:
    t = protocol.target
    if isinstance(t, SparseBasisState):
        pattern_len = len(t.entries[0][0][0])
        return t.build(space) if pattern_len == space.n_qubits else None
    built = t.build_full(space.boson_cutoff)
    return built if built.space.dim == space.dim else None


def _run_full(protocol: Protocol, seed: int, herald_mode: str,
              cutoff: int | None, tol: float) -> RunRecord:
    rng = np.random.default_rng(seed) if herald_mode == "sample" else None
    first = protocol.steps[0].hamiltonian
    if cutoff is None:
        cutoff = first.space.boson_cutoff if not isinstance(first, EffectiveDicke) else 2
    state = _full_initial(protocol, cutoff)
    records, ledger = [], []
    ok = True
    for i, step in enumerate(protocol.steps):
        if step.prepend_ancilla == "e":
            state = _full_prepend(state)
        h = _full_model(step.hamiltonian, cutoff)
        if state.space.qubit_groups != h.space.qubit_groups:
            state = _regroup(state, h.space)  # growth changes grouping, not dim
        cons = _conservation_ops(h)
        before = None
        if cons is not None:
            before = float(np.vdot(state.amplitudes, cons @ state.amplitudes).real)
        if h.time_dependent:
            res = evolve_tdep(h, state, step.duration, tol=tol)
        else:
            res = evolve_exact(h, state, step.duration)
        state = res.final
        drift = 0.0
        if cons is not None:
            after = float(np.vdot(state.amplitudes, cons @ state.amplitudes).real)
            drift = abs(after - before)
        herald_out, herald_p = None, None
        if step.phase_fix is not None and isinstance(step.hamiltonian, EffectiveDicke):
            state = _full_phase_fix(state, step.hamiltonian.params, step.duration, step.phase_fix)
            ledger.append(f"step {i} ({step.label}): nominal frame unwind + "
                          f"{step.phase_fix:+.6f} rad on ancilla-g manifold")
        if step.measure is not None:
            if rng is None:
                st, p = core.project_qubit(state, step.measure.qubit, step.measure.herald)
                herald_out = step.measure.herald
            else:
                mr = core.measure_qubit(state, step.measure.qubit, int(rng.integers(0, 2 ** 63)))
                st, p, herald_out = mr.state, mr.probability, mr.outcome
            state = st
            herald_p = p
            if herald_out != step.measure.herald:
                ok = False
        leak = _full_leakage(state, step.hamiltonian)
        target = _full_target(protocol, state.space)
        f_raw, f_pc = _score(state, target)
        records.append(StepRecord(step.label, step.duration, herald_out, herald_p,
                                  f_raw, f_pc, leak, drift))
        if not ok:
            break
    target = _full_target(protocol, state.space)
    f_raw, f_pc = _score(state, target)
    return RunRecord("full", seed, tuple(records), f_raw if f_raw is not None else 0.0,
                     f_pc if f_pc is not None else 0.0, state, tuple(ledger), ok)


def _regroup(state: StateVector, space: SpaceSpec) -> StateVector:
    if state.space.dim != space.dim:
        raise DomainError(f"cannot regroup dim {state.space.dim} into dim {space.dim}")
    return StateVector(space, state.amplitudes)


def _full_leakage(state: StateVector, h: HamiltonianSpec) -> float:
    """Population outside the vacuum symmetric sector (dispersive models)."""
    if not isinstance(h, EffectiveDicke):
        return 0.0
    sp = state.space
    n, m = h.params.n, h.params.m
    if sp.qubit_groups != (n, m) or not sp.has_boson:
        return 0.0
    amps = state.amplitudes.reshape(2 ** sp.n_qubits, sp.boson_dim)[:, 0]
    vecs = _full_pair_vectors(n, m)
    w = sum(abs(v.conj() @ amps) ** 2 for v in vecs.values())
    return max(0.0, 1.0 - float(w))


def _run_lindblad(protocol: Protocol, seed: int, cutoff: int | None,
                  dissipation: LindbladSpec | None, tol: float) -> RunRecord:
    if dissipation is None:
        raise DomainError("lindblad engine needs a LindbladSpec")
    if any(s.measure or s.prepend_ancilla or s.merge_register for s in protocol.steps):
        raise DomainError("lindblad engine supports plain evolution steps only")
    first = protocol.steps[0].hamiltonian
    if cutoff is None:
        cutoff = first.space.boson_cutoff if not isinstance(first, EffectiveDicke) else 2
    state = _full_initial(protocol, cutoff).to_density()
    records = []
    for i, step in enumerate(protocol.steps):
        h = _full_model(step.hamiltonian, cutoff)
        res = evolve_lindblad(h, dissipation, state, step.duration, tol=max(tol, 1e-12))
        state = res.final
        target = _full_target(protocol, state.space)
        f_raw = fidelity(state, target) if target is not None else None
        records.append(StepRecord(step.label, step.duration, None, None, f_raw, f_raw,
                                  0.0, abs(state.trace - 1.0)))
    target = _full_target(protocol, state.space)
    f_raw = fidelity(state, target) if target is not None else 0.0
    return RunRecord("lindblad", seed, tuple(records), f_raw, f_raw, state, ())
