"""
Composite Hilbert spaces, pure/mixed states, Dicke-basis construction and
decomposition, projective measurement, and entanglement/fidelity metrics.

Conventions
-----------
- A single qubit has basis (|g>, |e>) = ((1,0), (0,1)).
- Qubits are the most significant tensor factors, in declared group order
  (qubit 0 contributes the highest bit); the boson mode, when present, is
  the least significant factor.  A canonical basis index is therefore
  ``bits * (n_max + 1) + n`` where ``bits`` is the big-endian excitation
  pattern and ``n`` the photon number.
- Collective (Dicke-reduced) spaces index the product basis
  |D_k^N>|D_q^M>... as ``k * (M+1)... `` in group order; see
  :class:`SpaceSpec`.

All types are immutable values after construction (stored arrays are marked
read-only); raw amplitude access never mutates.  Measurement is the only
stochastic operation and takes its seed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

HERMITICITY_TOL = 1e-10
NORM_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


class DomainError(ValueError):
    """An argument lies outside the operation's mathematical domain."""


class DimensionMismatch(ValueError):
    """Operands live on incompatible spaces."""


@dataclass(frozen=True)
class SpaceSpec:
    """Descriptor of a composite Hilbert space.

    Parameters
    ----------
    qubit_groups : tuple of int
        Ordered sizes of the qubit groups (each >= 0).
    boson_cutoff : int or None
        Maximum photon number of the bosonic mode, or None if the space has
        no boson factor (e.g. Dicke-reduced spaces).
    collective : bool
        If True the space is the reduced symmetric-sector product basis:
        one ladder index per group, dimension prod(size_i + 1).  The boson
        cutoff must be None in that case.
    """

    qubit_groups: tuple[int, ...]
    boson_cutoff: int | None = None
    collective: bool = False

    def __post_init__(self):
        groups = tuple(int(n) for n in self.qubit_groups)
        object.__setattr__(self, "qubit_groups", groups)
        if any(n < 0 for n in groups):
            raise DomainError(f"group sizes must be >= 0, got {groups}")
        if self.boson_cutoff is not None and self.boson_cutoff < 0:
            raise DomainError(f"boson cutoff must be >= 0, got {self.boson_cutoff}")
        if self.collective and self.boson_cutoff is not None:
            raise DomainError("collective spaces carry no boson factor")
        if self.dim <= 0:
            raise DomainError("space has zero dimension")

    @property
    def n_qubits(self) -> int:
        return sum(self.qubit_groups)

    @property
    def has_boson(self) -> bool:
        return self.boson_cutoff is not None

    @property
    def boson_dim(self) -> int:
        return (self.boson_cutoff + 1) if self.boson_cutoff is not None else 1

    @property
    def dim(self) -> int:
        if self.collective:
            return math.prod(n + 1 for n in self.qubit_groups)
        return 2 ** self.n_qubits * self.boson_dim

    def factor_dims(self) -> tuple[int, ...]:
        """Per-subsystem dimensions: one entry per qubit, then the boson."""
        if self.collective:
            return tuple(n + 1 for n in self.qubit_groups)
        dims = (2,) * self.n_qubits
        if self.has_boson:
            dims = dims + (self.boson_dim,)
        return dims

    def index(self, excitations, photons: int = 0) -> int:
        """Canonical index of a basis state.

        ``excitations`` is a sequence of 0/1 per qubit (full spaces) or one
        ladder value per group (collective spaces).
        """
        if self.collective:
            idx = 0
            for n, k in zip(self.qubit_groups, excitations):
                if not 0 <= k <= n:
                    raise DomainError(f"ladder index {k} out of range for group of {n}")
                idx = idx * (n + 1) + k
            return idx
        bits = 0
        for b in excitations:
            bits = (bits << 1) | int(b)
        if photons < 0 or photons >= self.boson_dim:
            raise DomainError(f"photon number {photons} exceeds cutoff")
        return bits * self.boson_dim + photons


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class StateVector:
    """A pure state: complex amplitudes over the canonical basis of a space."""

    __slots__ = ("space", "amplitudes")

    def __init__(self, space: SpaceSpec, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (space.dim,):
            raise DimensionMismatch(
                f"amplitude vector of length {amps.shape} does not match dim {space.dim}"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "amplitudes", _readonly(amps.copy()))

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        if self.space.dim != other.space.dim:
            raise DimensionMismatch("overlap between different dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(self.space, np.outer(psi, psi.conj()))

    def __repr__(self):
        return f"StateVector(dim={self.space.dim}, norm={self.norm:.6f})"


class DensityMatrix:
    """A mixed state.  Construction checks Hermiticity, trace and positivity.

    Tolerances are overridable per call; the defaults are the module-level
    values (1e-10 Hermiticity, 1e-8 trace/positivity).
    """

    __slots__ = ("space", "matrix")

    def __init__(self, space: SpaceSpec, matrix, *, herm_tol: float = HERMITICITY_TOL,
                 trace_tol: float = TRACE_TOL, pos_tol: float = POSITIVITY_TOL):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (space.dim, space.dim):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dim {space.dim}")
        herm = np.abs(m - m.conj().T).max()
        if herm > herm_tol:
            raise DomainError(f"matrix is not Hermitian (deviation {herm:.2e})")
        tr = m.trace().real
        if abs(tr - 1.0) > trace_tol:
            raise DomainError(f"trace {tr!r} is not 1 within {trace_tol}")
        evals = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if evals.min() < -pos_tol:
            raise DomainError(f"negative eigenvalue {evals.min():.2e} beyond {pos_tol}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", _readonly(m.copy()))

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(operator @ self.matrix))

    def __repr__(self):
        return f"DensityMatrix(dim={self.space.dim}, trace={self.trace:.6f})"


@dataclass(frozen=True)
class DickeLabel:
    """A symmetric state |D_q^M>: q excitations shared among M qubits."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"qubit count must be >= 1, got {self.m}")
        if not 0 <= self.q <= self.m:
            raise DomainError(f"excitation number {self.q} out of range 0..{self.m}")


@dataclass(frozen=True)
class DickePair:
    """Joint ladder point |D_k^N>|D_q^M> of two qubit groups."""

    left: DickeLabel
    right: DickeLabel

    @property
    def k(self) -> int:
        return self.left.q

    @property
    def q(self) -> int:
        return self.right.q


def dicke_state(label: DickeLabel) -> StateVector:
    """Equal-amplitude superposition of all C(M, q) patterns with q excited qubits.

    Examples
    --------
    >>> dicke_state(DickeLabel(2, 1)).amplitudes.real.tolist()
    [0.0, 0.7071067811865475, 0.7071067811865475, 0.0]
    """
    m, q = label.m, label.q
    space = SpaceSpec((m,))
    amps = np.zeros(space.dim, dtype=complex)
    for excited in combinations(range(m), q):
        bits = 0
        for pos in excited:
            bits |= 1 << (m - 1 - pos)
        amps[bits] = 1.0
    amps /= math.sqrt(math.comb(m, q))
    return StateVector(space, amps)


def basis_state(space: SpaceSpec, qubits: str = "", photons: int = 0) -> StateVector:
    """Computational basis state from a pattern like ``"egg"`` plus a photon number."""
    if space.collective:
        raise DomainError("basis_state targets full spaces; use pair amplitudes instead")
    if len(qubits) != space.n_qubits:
        raise DimensionMismatch(f"pattern '{qubits}' does not match {space.n_qubits} qubits")
    bits = [1 if c == "e" else 0 for c in qubits]
    if any(c not in "ge" for c in qubits):
        raise DomainError(f"pattern must contain only 'g'/'e', got '{qubits}'")
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index(bits, photons)] = 1.0
    return StateVector(space, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product a (x) b.

    The left factor must not carry a boson (the mode stays least significant).
    """
    if a.space.collective or b.space.collective:
        raise DomainError("tensor products of collective spaces are not defined")
    if a.space.has_boson:
        raise DimensionMismatch("left tensor factor may not contain the boson mode")
    space = SpaceSpec(a.space.qubit_groups + b.space.qubit_groups, b.space.boson_cutoff)
    return StateVector(space, np.kron(a.amplitudes, b.amplitudes))


def _dicke_product_matrix(n: int, m: int) -> np.ndarray:
    """Columns |D_k^N>|D_q^M> (k-major) in the 2^(N+M) canonical basis."""
    cols = []
    for k in range(n + 1):
        dk = dicke_state(DickeLabel(n, k)).amplitudes
        for q in range(m + 1):
            dq = dicke_state(DickeLabel(m, q)).amplitudes
            cols.append(np.kron(dk, dq))
    return np.array(cols).T


def dicke_decompose(state: StateVector, split: tuple[int, int]):
    """Project a pure (N+M)-qubit state onto the Dicke product basis.

    Returns
    -------
    coeffs : dict mapping DickePair -> complex
        <D_k^N, D_q^M | state> for all k, q.
    leakage : float
        1 - sum |coeff|^2, the weight outside the symmetric sector
        (clipped into [0, 1]).
    """
    n, m = split
    if n < 1 or m < 1:
        raise DomainError("both groups must contain at least one qubit")
    if state.space.has_boson or state.space.collective:
        raise DimensionMismatch("decomposition expects a plain qubit state (project the boson first)")
    if state.space.n_qubits != n + m:
        raise DimensionMismatch(f"state has {state.space.n_qubits} qubits, expected {n + m}")
    basis = _dicke_product_matrix(n, m)
    c = basis.conj().T @ state.amplitudes
    coeffs = {}
    i = 0
    for k in range(n + 1):
        for q in range(m + 1):
            coeffs[DickePair(DickeLabel(n, k), DickeLabel(m, q))] = complex(c[i])
            i += 1
    leakage = 1.0 - float((np.abs(c) ** 2).sum())
    return coeffs, min(max(leakage, 0.0), 1.0)


def dicke_pair_state(n: int, m: int, coeffs: dict) -> StateVector:
    """Reconstruct a full (N+M)-qubit state from Dicke-pair coefficients.

    Keys may be DickePair instances or plain (k, q) tuples.
    """
    space = SpaceSpec((n, m))
    amps = np.zeros(space.dim, dtype=complex)
    for key, c in coeffs.items():
        k, q = (key.k, key.q) if isinstance(key, DickePair) else key
        dk = dicke_state(DickeLabel(n, k)).amplitudes if n else np.array([1.0 + 0j])
        dq = dicke_state(DickeLabel(m, q)).amplitudes
        amps += c * np.kron(dk, dq)
    return StateVector(space, amps)


@dataclass(frozen=True)
class MeasurementResult:
    outcome: str            # 'g' or 'e'
    state: StateVector      # renormalized post-measurement state
    probability: float      # Born weight of the sampled outcome


def _excited_mask(space: SpaceSpec, qubit_index: int) -> np.ndarray:
    if space.collective:
        raise DomainError("single-qubit measurement needs a full space")
    if not 0 <= qubit_index < space.n_qubits:
        raise DomainError(f"qubit index {qubit_index} out of range")
    idx = np.arange(space.dim)
    bits = idx // space.boson_dim
    return ((bits >> (space.n_qubits - 1 - qubit_index)) & 1).astype(bool)


def project_qubit(state: StateVector, qubit_index: int, outcome: str):
    """Deterministic projection of one qubit onto 'g' or 'e'.

    Returns the renormalized collapsed state and the branch probability.
    """
    mask = _excited_mask(state.space, qubit_index)
    if outcome not in ("g", "e"):
        raise DomainError(f"outcome must be 'g' or 'e', got {outcome!r}")
    keep = mask if outcome == "e" else ~mask
    amps = np.where(keep, state.amplitudes, 0.0)
    p = float((np.abs(amps) ** 2).sum())
    if p <= 0.0:
        raise DomainError(f"branch '{outcome}' has zero probability")
    return StateVector(state.space, amps / math.sqrt(p)), p


def measure_qubit(state: StateVector, qubit_index: int, rng_seed: int) -> MeasurementResult:
    """Born-rule measurement of a single qubit with an explicit seed."""
    mask = _excited_mask(state.space, qubit_index)
    p_e = float((np.abs(state.amplitudes[mask]) ** 2).sum())
    p_e = min(max(p_e, 0.0), 1.0)
    rng = np.random.default_rng(rng_seed)
    outcome = "e" if rng.random() < p_e else "g"
    collapsed, p = project_qubit(state, qubit_index, outcome)
    return MeasurementResult(outcome, collapsed, p)


def boson_vacuum_component(state: StateVector):
    """Split off the photon-vacuum component.

    Returns (qubit-only StateVector, weight).  The component is renormalized;
    its weight is the population of the n=0 photon sector.
    """
    sp = state.space
    if not sp.has_boson:
        return state, 1.0
    amps = state.amplitudes.reshape(2 ** sp.n_qubits, sp.boson_dim)[:, 0]
    w = float((np.abs(amps) ** 2).sum())
    if w <= 0.0:
        raise DomainError("state has no photon-vacuum component")
    return StateVector(SpaceSpec(sp.qubit_groups), amps / math.sqrt(w)), w


def fidelity(a, b: StateVector) -> float:
    """|<b|a>|^2 for pure a, <b|rho|b> for mixed a; requires equal dimensions."""
    if a.space.dim != b.space.dim:
        raise DimensionMismatch("fidelity between different dimensions")
    if isinstance(a, DensityMatrix):
        val = np.vdot(b.amplitudes, a.matrix @ b.amplitudes).real
    else:
        val = abs(np.vdot(b.amplitudes, a.amplitudes)) ** 2
    return float(min(max(val, 0.0), 1.0))


def phase_corrected_fidelity(a: StateVector, b: StateVector, component_tol: float = 1e-12) -> float:
    """Fidelity maximized over independent phases of the target's components.

    The target b is split over its nonzero canonical basis components b_i with
    amplitudes c_i; the returned value is (sum_i |c_i| |<i|a>|)^2, the maximum
    of |<b'|a>|^2 over all rephasings b' = sum_i e^{i phi_i} c_i |i>.  Used for
    protocol scoring where each step contributes a known, physically removable
    relative phase.
    """
    if a.space.dim != b.space.dim:
        raise DimensionMismatch("fidelity between different dimensions")
    sel = np.abs(b.amplitudes) > component_tol
    val = float(np.sum(np.abs(b.amplitudes[sel]) * np.abs(a.amplitudes[sel]))) ** 2
    return min(max(val, 0.0), 1.0)


_SY_SY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state (StateVector or DensityMatrix).

    Computed as max(0, s1 - s2 - s3 - s4) with s_i the singular values of
    sqrt(rho) (sy x sy) sqrt(rho)^T, which equal the square roots of the
    eigenvalues of rho * rho_tilde without the precision loss of rooting
    near-zero eigenvalues.
    """
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    if rho.space.dim != 4:
        raise DimensionMismatch("concurrence is defined for two qubits (dim 4)")
    evals, vecs = np.linalg.eigh(rho.matrix)
    root = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    s = np.linalg.svd(root @ _SY_SY @ root.T, compute_uv=False)
    return float(max(0.0, s[0] - s[1:].sum()))


def partial_trace(rho, keep) -> DensityMatrix:
    """Trace out all subsystems not listed in ``keep``.

    Subsystems are indexed per :meth:`SpaceSpec.factor_dims`: one index per
    qubit, then (if present) the boson mode.  The reduced space groups all
    kept qubits into a single group.
    """
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    sp = rho.space
    dims = sp.factor_dims()
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= len(dims) for i in keep):
        raise DomainError(f"subsystem indices {keep} out of range for {len(dims)} factors")
    n_fac = len(dims)
    t = rho.matrix.reshape(dims + dims)
    traced = [i for i in range(n_fac) if i not in keep]
    for count, i in enumerate(sorted(traced)):
        ax = i - count              # axes shift as we contract
        nleft = n_fac - count
        t = np.trace(t, axis1=ax, axis2=ax + nleft)
    d_keep = math.prod(dims[i] for i in keep)
    keep_boson = sp.has_boson and (n_fac - 1) in keep
    n_kept_qubits = len(keep) - (1 if keep_boson else 0)
    new_space = SpaceSpec(
        (n_kept_qubits,) if n_kept_qubits else (),
        sp.boson_cutoff if keep_boson else None,
    )
    return DensityMatrix(new_space, t.reshape(d_keep, d_keep), trace_tol=1e-8)
