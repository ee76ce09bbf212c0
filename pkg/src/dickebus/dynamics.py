"""
Evolution engines.

- evolve_exact: Hermitian eigendecomposition for time-independent models.
- evolve_tdep: adaptive embedded Runge-Kutta (DOP853 with dense output) for
  phase-carrying models; the step size is additionally capped so no single
  step advances the fastest phase by more than ``phase_step_cap`` radians.
- evolve_lindblad: master-equation integration of a dense density matrix,
  drho/dt = -i[H, rho] + sum_k rate_k (L rho L+ - {L+L, rho}/2).

Each run is single-threaded and deterministic; engines hold no shared
mutable state, so independent runs (parameter sweeps) may execute
concurrently.  Snapshots are produced by interpolation at the requested
sample times, never by forcing integrator steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import DensityMatrix, DimensionMismatch, StateVector
from .models import HamiltonianSpec, LindbladSpec, lindblad_dissipators, validate_cutoff

DEFAULT_TOL = 1e-10
PHASE_STEP_CAP = 0.05  # max radians of the fastest phase per integrator step


class NumericalError(RuntimeError):
    """Integration failed or left its accuracy contract."""


@dataclass(frozen=True)
class EvolutionResult:
    """Trajectory snapshots with drift diagnostics.

    ``drift[i]`` is |norm(state_i) - 1| for unitary engines and
    |trace(rho_i) - 1| for the Lindblad engine.
    """

    times: np.ndarray
    states: list
    engine: str
    drift: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        d = np.diff(t)
        if len(d) and not (np.all(d >= 0) or np.all(d <= 0)):
            raise ValueError("sample times must be monotone")
        object.__setattr__(self, "times", t)

    @property
    def final(self):
        return self.states[-1]


def _sample_grid(t_final: float, sample_times) -> np.ndarray:
    if sample_times is None:
        return np.array([0.0, t_final]) if t_final != 0.0 else np.array([0.0])
    ts = np.asarray(sample_times, dtype=float)
    return ts


def evolve_exact(h: HamiltonianSpec, psi0: StateVector, t_final: float,
                 sample_times=None) -> EvolutionResult:
    """Propagate psi(t) = exp(-i H t) psi0 via eigendecomposition."""
    if h.time_dependent:
        raise ValueError("evolve_exact requires a time-independent Hamiltonian")
    if psi0.space.dim != h.space.dim:
        raise DimensionMismatch("initial state does not live on the model space")
    validate_cutoff(h, psi0)
    (hmat, _), = h.terms()
    evals, vecs = np.linalg.eigh(hmat)
    c0 = vecs.conj().T @ psi0.amplitudes
    ts = _sample_grid(t_final, sample_times)
    states, drift = [], []
    for t in ts:
        amps = vecs @ (np.exp(-1j * evals * t) * c0)
        st = StateVector(psi0.space, amps)
        states.append(st)
        drift.append(abs(st.norm - 1.0))
    drift = np.array(drift)
    if drift.max(initial=0.0) > 1e-10:
        raise NumericalError(f"norm drift {drift.max():.2e} exceeds 1e-10")
    return EvolutionResult(ts, states, "exact", drift)


def _schrodinger_rhs(terms):
    mats = [m for m, _ in terms]
    rates = [r for _, r in terms]
    if all(r == 0.0 for r in rates):
        hsum = sum(mats)

        def rhs_static(t, y):
            return -1j * (hsum @ y)

        return rhs_static

    def rhs(t, y):
        out = np.zeros_like(y)
        for m, r in zip(mats, rates):
            out += (np.exp(1j * r * t) * (m @ y)) if r else (m @ y)
        return -1j * out

    return rhs


def evolve_tdep(h: HamiltonianSpec, psi0: StateVector, t_final: float,
                tol: float = DEFAULT_TOL, sample_times=None,
                phase_step_cap: float = PHASE_STEP_CAP,
                terms=None, t_start: float = 0.0) -> EvolutionResult:
    """Integrate i dpsi/dt = H(t) psi adaptively over t_start .. t_start+t_final.

    ``tol`` controls the local error (rtol = atol = tol); the final norm
    drift must stay below 100*tol or a NumericalError is raised.  ``terms``
    overrides the spec's term decomposition (used by the protocol engine to
    evolve in a rotated frame).  A negative ``t_final`` integrates backward
    from ``t_start``; sample times are absolute.
    """
    if psi0.space.dim != h.space.dim:
        raise DimensionMismatch("initial state does not live on the model space")
    validate_cutoff(h, psi0)
    terms = h.terms() if terms is None else terms
    rhs = _schrodinger_rhs(terms)
    if t_final == 0.0:
        ts = np.array([t_start])
        return EvolutionResult(ts, [psi0], "tdep", np.zeros(1), {"nfev": 0})
    ts = np.asarray(sample_times, dtype=float) if sample_times is not None \
        else np.array([t_start, t_start + t_final])
    max_rate = max((abs(r) for _, r in terms), default=0.0)
    max_step = phase_step_cap / max_rate if max_rate > 0 else np.inf
    sol = solve_ivp(
        rhs, (t_start, t_start + t_final), psi0.amplitudes.astype(complex),
        method="DOP853", t_eval=ts, rtol=tol, atol=tol, max_step=max_step,
        dense_output=False,
    )
    if not sol.success:
        raise NumericalError(f"integrator stopped at t={sol.t[-1] if len(sol.t) else 0.0}: {sol.message}")
    states = [StateVector(psi0.space, sol.y[:, i]) for i in range(sol.y.shape[1])]
    drift = np.array([abs(s.norm - 1.0) for s in states])
    if drift.max(initial=0.0) > 100 * tol:
        raise NumericalError(f"norm drift {drift.max():.2e} exceeds {100 * tol:.1e}")
    return EvolutionResult(ts, states, "tdep", drift, {"nfev": sol.nfev})


def evolve_lindblad(h: HamiltonianSpec, diss: LindbladSpec, rho0: DensityMatrix,
                    t_final: float, sample_times=None, tol: float = 1e-10,
                    trace_tol: float = 1e-8, positivity_tol: float = 1e-6,
                    phase_step_cap: float = PHASE_STEP_CAP) -> EvolutionResult:
    """Integrate the master equation for a dense density matrix.

    Trace drift beyond ``trace_tol`` or an eigenvalue below -``positivity_tol``
    raises a NumericalError (reported, not clipped).
    """
    if rho0.space.dim != h.space.dim:
        raise DimensionMismatch("initial state does not live on the model space")
    validate_cutoff(h, rho0)
    dim = h.space.dim
    terms = h.terms()
    mats = [m for m, _ in terms]
    rates = [r for _, r in terms]
    static = all(r == 0.0 for r in rates)
    hsum = sum(mats) if static else None

    jumps = lindblad_dissipators(h.space, diss)
    ls = [np.sqrt(j.rate) * j.matrix for j in jumps]
    anticomm = sum((l.conj().T @ l for l in ls), np.zeros((dim, dim), dtype=complex))

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        ht = hsum if static else sum(
            (np.exp(1j * r * t) * m if r else m) for m, r in zip(mats, rates)
        )
        drho = -1j * (ht @ rho - rho @ ht)
        for l in ls:
            drho += l @ rho @ l.conj().T
        drho -= 0.5 * (anticomm @ rho + rho @ anticomm)
        return drho.ravel()

    ts = _sample_grid(t_final, sample_times)
    max_rate = max((abs(r) for r in rates), default=0.0)
    max_step = phase_step_cap / max_rate if max_rate > 0 else np.inf
    sol = solve_ivp(
        rhs, (0.0, t_final), rho0.matrix.astype(complex).ravel(), method="DOP853",
        t_eval=ts, rtol=tol, atol=tol, max_step=max_step,
    )
    if not sol.success:
        raise NumericalError(f"integrator stopped at t={sol.t[-1] if len(sol.t) else 0.0}: {sol.message}")
    states, drift = [], []
    for i in range(sol.y.shape[1]):
        m = sol.y[:, i].reshape(dim, dim)
        m = (m + m.conj().T) / 2          # symmetrize integrator round-off only
        tr = m.trace().real
        drift.append(abs(tr - 1.0))
        if abs(tr - 1.0) > trace_tol:
            raise NumericalError(f"trace drift {abs(tr - 1.0):.2e} exceeds {trace_tol:.1e}")
        evals = np.linalg.eigvalsh(m)
        if evals.min() < -positivity_tol:
            raise NumericalError(
                f"positivity violation {evals.min():.2e} at t={sol.t[i]:.3g} "
                f"beyond {positivity_tol:.1e}"
            )
        states.append(DensityMatrix(h.space, m, trace_tol=trace_tol,
                                    pos_tol=positivity_tol))
    return EvolutionResult(ts, states, "lindblad", np.array(drift), {"nfev": sol.nfev})
