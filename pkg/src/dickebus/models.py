"""
Hamiltonian and dissipator constructors.

Four model variants are provided:

- resonant exchange of a single quantum between inhomogeneously coupled
  qubits and the mode (time independent),
- the two-ion blue/red sideband variant (time independent),
- the detuned two-group model in the interaction picture, with collective
  raising operators S+ (group 1) and J+ (group 2) and explicit phase factors
  exp(i Delta_j t) (time dependent),
- the effective excitation-exchange model acting directly on the reduced
  Dicke-pair basis of dimension (N+1)(M+1), valid in the far-detuned regime
  with the mode in vacuum.

All matrices are H/hbar in angular-frequency units (rad per time unit).
A time-dependent Hamiltonian is represented as a list of (matrix, rate)
terms with H(t) = sum_i matrix_i * exp(i * rate_i * t); terms come in
Hermitian-conjugate pairs so H(t) is Hermitian at every t.  Constructors are
pure and the returned specs immutable, so they can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, SpaceSpec

DISPERSIVE_THRESHOLD = 10.0


class PhysicsValidationError(ValueError):
    """Model parameters violate a regime assumption (dispersive validity,
    selectivity margin, cutoff reachability)."""


@dataclass(frozen=True)
class CouplingProfile:
    """Per-qubit coupling strengths to the mode (angular frequency)."""

    chi: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.chi)
        object.__setattr__(self, "chi", vals)
        if len(vals) == 0:
            raise DomainError("coupling profile is empty")
        if not all(math.isfinite(x) for x in vals):
            raise DomainError("couplings must be finite")
        if all(x == 0.0 for x in vals):
            raise DomainError("at least one coupling must be nonzero")

    @property
    def n(self) -> int:
        return len(self.chi)


@dataclass(frozen=True)
class DispersiveParams:
    """Two-group dispersive parameters.

    n qubits couple with strength g1 at detuning delta1; m qubits couple with
    g2 at delta2.  Derived quantities are recomputed on access, never stored:

    - lambda1 = g1^2/delta1, lambda2 = g2^2/delta2 (single-group shifts)
    - omega_eff = g1*g2/delta_tilde with delta_tilde = 2*delta1*delta2/(delta1+delta2)
    - delta = delta2 - delta1 + lambda2 - lambda1 (effective detuning)
    """

    n: int
    m: int
    g1: float
    g2: float
    delta1: float
    delta2: float

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DomainError("both groups need at least one qubit")
        if self.g1 <= 0 or self.g2 <= 0:
            raise DomainError("couplings must be positive")
        if self.delta1 == 0 or self.delta2 == 0:
            raise DomainError("detunings must be nonzero")
        if self.delta1 + self.delta2 == 0:
            raise DomainError("delta1 + delta2 = 0 leaves omega_eff undefined")

    @property
    def lambda1(self) -> float:
        return self.g1 ** 2 / self.delta1

    @property
    def lambda2(self) -> float:
        return self.g2 ** 2 / self.delta2

    @property
    def delta_tilde(self) -> float:
        return 2.0 * self.delta1 * self.delta2 / (self.delta1 + self.delta2)

    @property
    def omega_eff(self) -> float:
        return self.g1 * self.g2 / self.delta_tilde

    @property
    def delta(self) -> float:
        return self.delta2 - self.delta1 + self.lambda2 - self.lambda1

    @property
    def dispersive_margin(self) -> float:
        return min(abs(self.delta1) / self.g1, abs(self.delta2) / self.g2)

    def is_dispersive(self, threshold: float = DISPERSIVE_THRESHOLD) -> bool:
        return self.dispersive_margin >= threshold


@dataclass(frozen=True)
class LindbladSpec:
    """Dissipation rates: cavity decay kappa, qubit relaxation gamma,
    qubit pure dephasing gamma_phi (all angular, all >= 0)."""

    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.gamma < 0 or self.gamma_phi < 0:
            raise DomainError("rates must be >= 0")


# ---------------------------------------------------------------------------
# operator builders on full spaces
# ---------------------------------------------------------------------------

def annihilation(space: SpaceSpec) -> np.ndarray:
    """Photon annihilation operator on the full space."""
    if not space.has_boson:
        raise DomainError("space has no boson factor")
    nb = space.boson_dim
    a1 = np.diag(np.sqrt(np.arange(1, nb)), k=1)
    return np.kron(np.eye(2 ** space.n_qubits), a1).astype(complex)


def sigma_minus(space: SpaceSpec, qubit: int) -> np.ndarray:
    """|g><e| on one qubit, identity elsewhere."""
    nq = space.n_qubits
    if not 0 <= qubit < nq:
        raise DomainError(f"qubit index {qubit} out of range")
    sm = np.array([[0, 1], [0, 0]], dtype=complex)     # |g><e| in (g,e) basis
    op = np.array([[1.0 + 0j]])
    for j in range(nq):
        op = np.kron(op, sm if j == qubit else np.eye(2))
    if space.has_boson:
        op = np.kron(op, np.eye(space.boson_dim))
    return op


def sigma_z(space: SpaceSpec, qubit: int) -> np.ndarray:
    sm = sigma_minus(space, qubit)
    return sm.conj().T @ sm - sm @ sm.conj().T


def collective_raising(space: SpaceSpec, group: int) -> np.ndarray:
    """Sum of |e><g| over the qubits of one declared group."""
    start = sum(space.qubit_groups[:group])
    size = space.qubit_groups[group]
    return sum(sigma_minus(space, start + j).conj().T for j in range(size))


def number_operator(space: SpaceSpec) -> np.ndarray:
    """Total excitation number: sum_j |e_j><e_j| + a^dag a."""
    op = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(space.n_qubits):
        sm = sigma_minus(space, j)
        op += sm.conj().T @ sm
    if space.has_boson:
        a = annihilation(space)
        op += a.conj().T @ a
    return op


# ---------------------------------------------------------------------------
# Hamiltonian specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _HamiltonianBase:
    def matrix(self, t: float = 0.0) -> np.ndarray:
        """H(t)/hbar evaluated at time t."""
        out = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        for mat, rate in self.terms():
            out += mat * np.exp(1j * rate * t) if rate else mat
        return out

    @property
    def time_dependent(self) -> bool:
        return any(rate != 0.0 for _, rate in self.terms())

    @property
    def max_phase_rate(self) -> float:
        return max((abs(rate) for _, rate in self.terms()), default=0.0)


@dataclass(frozen=True)
class ResonantTC(_HamiltonianBase):
    """H/hbar = sum_i chi_i (|e_i><g_i| a + |g_i><e_i| a^dag); conserves
    the total excitation number."""

    profile: CouplingProfile
    cutoff: int

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec((self.profile.n,), self.cutoff)

    def terms(self):
        sp = self.space
        a = annihilation(sp)
        h = np.zeros((sp.dim, sp.dim), dtype=complex)
        for j, chi in enumerate(self.profile.chi):
            sp_j = sigma_minus(sp, j).conj().T
            h += chi * (sp_j @ a)
        return [(h + h.conj().T, 0.0)]


@dataclass(frozen=True)
class Sideband(_HamiltonianBase):
    """Two-ion variant: qubit 1 on the blue sideband, qubit 2 on the red:
    H/hbar = chi1 (s1+ a^dag + s1- a) + chi2 (s2+ a + s2- a^dag).
    Closed on span{|gg,0>, |eg,1>, |ee,0>} from |gg,0>."""

    chi1: float
    chi2: float
    cutoff: int

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec((2,), self.cutoff)

    def terms(self):
        sp = self.space
        a = annihilation(sp)
        s1p = sigma_minus(sp, 0).conj().T
        s2p = sigma_minus(sp, 1).conj().T
        h = self.chi1 * (s1p @ a.conj().T) + self.chi2 * (s2p @ a)
        return [(h + h.conj().T, 0.0)]

    def invariant(self) -> np.ndarray:
        """Conserved charge n_1 - n_2 - a^dag a of the blue/red pair."""
        sp = self.space
        s1 = sigma_minus(sp, 0)
        s2 = sigma_minus(sp, 1)
        a = annihilation(sp)
        return s1.conj().T @ s1 - s2.conj().T @ s2 - a.conj().T @ a


@dataclass(frozen=True)
class LabDispersive(_HamiltonianBase):
    """Interaction-picture two-group model on the full space:
    H(t)/hbar = g1 a S+ e^{i delta1 t} + g2 a J+ e^{i delta2 t} + h.c."""

    params: DispersiveParams
    cutoff: int

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec((self.params.n, self.params.m), self.cutoff)

    def terms(self):
        sp = self.space
        a = annihilation(sp)
        a1 = self.params.g1 * (collective_raising(sp, 0) @ a)
        a2 = self.params.g2 * (collective_raising(sp, 1) @ a)
        return [
            (a1, self.params.delta1), (a1.conj().T, -self.params.delta1),
            (a2, self.params.delta2), (a2.conj().T, -self.params.delta2),
        ]


def pair_index(n: int, m: int, k: int, q: int) -> int:
    """Canonical index of |D_k^N>|D_q^M> in the collective pair basis."""
    if not (0 <= k <= n and 0 <= q <= m):
        raise DomainError(f"pair ({k},{q}) out of range for groups ({n},{m})")
    return k * (m + 1) + q


def exchange_lowering(n: int, m: int) -> np.ndarray:
    """Matrix of S J+ on the pair basis: (k,q) -> (k-1,q+1) with element
    sqrt(k(N-k+1)) * sqrt((q+1)(M-q))."""
    dim = (n + 1) * (m + 1)
    op = np.zeros((dim, dim))
    for k in range(1, n + 1):
        for q in range(m):
            op[pair_index(n, m, k - 1, q + 1), pair_index(n, m, k, q)] = (
                math.sqrt(k * (n - k + 1)) * math.sqrt((q + 1) * (m - q))
            )
    return op


@dataclass(frozen=True)
class EffectiveDicke(_HamiltonianBase):
    """Effective model on the (N+1)(M+1) Dicke-pair basis (mode in vacuum):

    - diagonal part <k,q|H0|k,q>/hbar = lambda1 k(N-k) + lambda2 q(M-q),
    - exchange part omega_eff (S+J e^{-i delta t} + S J+ e^{i delta t}),
      coupling (k,q) <-> (k-1,q+1) with element
      omega_eff sqrt(k(N-k+1)) sqrt((q+1)(M-q)).

    Conserves k+q.  Construction requires the dispersive-validity margin
    min(|delta1|/g1, |delta2|/g2) >= validity_threshold.
    """

    params: DispersiveParams
    validity_threshold: float = DISPERSIVE_THRESHOLD

    def __post_init__(self):
        if not self.params.is_dispersive(self.validity_threshold):
            raise PhysicsValidationError(
                f"dispersive margin {self.params.dispersive_margin:.2f} below "
                f"threshold {self.validity_threshold}"
            )

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec((self.params.n, self.params.m), collective=True)

    def shift(self, k: int, q: int) -> float:
        p = self.params
        return p.lambda1 * k * (p.n - k) + p.lambda2 * q * (p.m - q)

    def terms(self):
        p = self.params
        n, m = p.n, p.m
        diag = np.diag([self.shift(k, q) for k in range(n + 1) for q in range(m + 1)]).astype(complex)
        e_minus = exchange_lowering(n, m).astype(complex)     # S J+ : k -> k-1, q -> q+1
        e_plus = e_minus.conj().T                             # S+ J : k -> k+1, q -> q-1
        return [
            (diag, 0.0),
            (p.omega_eff * e_plus, -p.delta),
            (p.omega_eff * e_minus, +p.delta),
        ]

    def rotated_terms(self):
        """Terms of the same model in the interaction frame of the diagonal
        part: one term per ladder element, phase rate -delta + shift(k-1,q+1)
        - shift(k,q) on the lowering side.  Populations in the pair basis are
        identical to :meth:`terms`; only per-component phases differ.
        """
        p = self.params
        n, m = p.n, p.m
        dim = (n + 1) * (m + 1)
        out = []
        for k in range(1, n + 1):
            for q in range(m):
                el = p.omega_eff * math.sqrt(k * (n - k + 1)) * math.sqrt((q + 1) * (m - q))
                mat = np.zeros((dim, dim), dtype=complex)
                mat[pair_index(n, m, k - 1, q + 1), pair_index(n, m, k, q)] = el
                rate = p.delta + self.shift(k - 1, q + 1) - self.shift(k, q)
                out.append((mat, rate))
                out.append((mat.conj().T, -rate))
        return out


HamiltonianSpec = ResonantTC | Sideband | LabDispersive | EffectiveDicke


def resonant_tc(profile: CouplingProfile, cutoff: int) -> ResonantTC:
    if cutoff < 1:
        raise DomainError("resonant model needs cutoff >= 1")
    return ResonantTC(profile, cutoff)


def sideband(chi1: float, chi2: float, cutoff: int) -> Sideband:
    if cutoff < 1:
        raise DomainError("sideband model needs cutoff >= 1")
    return Sideband(float(chi1), float(chi2), cutoff)


def lab_dispersive(params: DispersiveParams, cutoff: int) -> LabDispersive:
    if cutoff < 1:
        raise DomainError("dispersive full model needs cutoff >= 1")
    return LabDispersive(params, cutoff)


def effective_dicke(params: DispersiveParams,
                    validity_threshold: float = DISPERSIVE_THRESHOLD) -> EffectiveDicke:
    return EffectiveDicke(params, validity_threshold)


def validate_cutoff(h: HamiltonianSpec, psi0) -> None:
    """Check that the boson cutoff can hold every excitation reachable from
    the initial state's support (total-excitation conservation makes the
    photon number bounded by the initial total)."""
    if isinstance(h, EffectiveDicke):
        return
    sp = h.space
    amps = psi0.amplitudes if hasattr(psi0, "amplitudes") else np.diag(psi0.matrix)
    probs = np.abs(np.asarray(amps)) ** 2
    idx = np.nonzero(probs > 1e-14)[0]
    bits = idx // sp.boson_dim
    photons = idx % sp.boson_dim
    if isinstance(h, Sideband):
        # photons grow while qubit 1 excites or qubit 2 relaxes:
        # max n_ph = n_ph + (1 - n_1) + n_2
        n1 = (bits >> 1) & 1
        n2 = bits & 1
        exc = photons + (1 - n1) + n2
    else:
        exc = np.array([bin(int(b)).count("1") for b in bits]) + photons
    reachable = int(exc.max(initial=0))
    if sp.boson_cutoff < reachable:
        raise PhysicsValidationError(
            f"cutoff {sp.boson_cutoff} below max reachable excitation {reachable}"
        )


@dataclass(frozen=True)
class JumpOperator:
    label: str
    rate: float
    matrix: np.ndarray = field(repr=False)


def lindblad_dissipators(space: SpaceSpec, spec: LindbladSpec) -> list[JumpOperator]:
    """Jump operators with rates: (a, kappa); (sigma_j^-, gamma) per qubit;
    (sigma_j^z, gamma_phi/2) per qubit.  Rates of zero contribute nothing."""
    if spec.kappa > 0 and not space.has_boson:
        raise DomainError("cavity decay requires a boson factor")
    ops: list[JumpOperator] = []
    if spec.kappa > 0:
        ops.append(JumpOperator("cavity_decay", spec.kappa, annihilation(space)))
    for j in range(space.n_qubits):
        if spec.gamma > 0:
            ops.append(JumpOperator(f"relaxation_q{j}", spec.gamma, sigma_minus(space, j)))
        if spec.gamma_phi > 0:
            ops.append(JumpOperator(f"dephasing_q{j}", spec.gamma_phi / 2.0, sigma_z(space, j)))
    return ops
