"""
Closed-form expressions for the resonant single-excitation sector and for the
effective Dicke-ladder model: exchange amplitudes, collective Rabi elements,
excitation-dependent shifts, transition detunings, and transfer times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DickeLabel, DickePair, DomainError
from .models import CouplingProfile, DispersiveParams


def mu(profile: CouplingProfile) -> float:
    """Collective exchange rate sqrt(sum_j chi_j^2)."""
    val = math.sqrt(sum(x * x for x in profile.chi))
    if val == 0.0:
        raise DomainError("all couplings vanish")
    return val


@dataclass(frozen=True)
class ResonantAmplitudes:
    """Single-excitation amplitudes: c0 on |g...g>|1>, c[j] on |g..e_j..g>|0>."""

    c0: complex
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        total = abs(self.c0) ** 2 + float((np.abs(c) ** 2).sum())
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"amplitudes are not normalized (sum {total!r})")


def resonant_amplitudes(profile: CouplingProfile, k: int, t: float) -> ResonantAmplitudes:
    """Exact amplitudes for qubit k initially excited, mode in vacuum:

        c0(t) = -i (chi_k / mu) sin(mu t)
        c_j(t) = delta_jk + (chi_j chi_k / mu^2) (cos(mu t) - 1)

    At t = pi/mu the photon amplitude vanishes for every profile.
    """
    if not 0 <= k < profile.n:
        raise DomainError(f"excited index {k} out of range")
    chi = np.asarray(profile.chi)
    m = mu(profile)
    c0 = -1j * chi[k] / m * math.sin(m * t)
    c = (chi * chi[k] / m ** 2) * (math.cos(m * t) - 1.0)
    c = c.astype(complex)
    c[k] += 1.0
    return ResonantAmplitudes(complex(c0), c)


def f_factor(k: int, q: int, n: int, m: int) -> float:
    """sqrt((k+1)(q+1)(N-k)(M-q)), verbatim.

    Provided for traceability only; its index placement in the source
    two-level formulas is inconsistent, so every solver and timing formula in
    this package consumes :func:`transition_element` instead.
    """
    if not (0 <= k <= n and 0 <= q <= m):
        raise DomainError(f"indices ({k},{q}) out of range for ({n},{m})")
    return math.sqrt((k + 1) * (q + 1) * (n - k) * (m - q))


def stark_shift(k: int, q: int, params: DispersiveParams) -> float:
    """Excitation-dependent level shift lambda1 k(N-k) + lambda2 q(M-q)."""
    if not (0 <= k <= params.n and 0 <= q <= params.m):
        raise DomainError(f"indices ({k},{q}) out of range")
    return params.lambda1 * k * (params.n - k) + params.lambda2 * q * (params.m - q)


@dataclass(frozen=True)
class TransitionSpec:
    """One ladder transition from |D_k^N>|D_q^M>.

    branch '+' targets (k+1, q-1) (group 2 -> group 1 transfer);
    branch '-' targets (k-1, q+1).
    """

    source: DickePair
    branch: str

    def __post_init__(self):
        if self.branch not in ("+", "-"):
            raise DomainError(f"branch must be '+' or '-', got {self.branch!r}")

    @property
    def sign(self) -> int:
        return +1 if self.branch == "+" else -1

    def target_kq(self) -> tuple[int, int]:
        k, q = self.source.k, self.source.q
        kt, qt = k + self.sign, q - self.sign
        n, m = self.source.left.m, self.source.right.m
        if not (0 <= kt <= n and 0 <= qt <= m):
            raise DomainError(f"transition ({k},{q})->({kt},{qt}) leaves the ladder")
        return kt, qt


def transition_spec(n: int, m: int, k: int, q: int, branch: str) -> TransitionSpec:
    """Convenience constructor from plain integers."""
    return TransitionSpec(DickePair(DickeLabel(n, k), DickeLabel(m, q)), branch)


@dataclass(frozen=True)
class TransitionDetuning:
    """Rotating-frame detuning of one ladder transition, in both printed sign
    conventions of the shift difference.

    ``detuning`` is the convention validated against the full two-group
    model (see tests): the transition is resonant when the effective
    detuning equals shift(source) - shift(target) on the '-' branch (and its
    negative on '+').  ``mirror`` flips the sign of the shift difference; it
    matches the alternative printed form and is exposed for comparison only.
    ``resonant_delta`` is the effective-detuning value that zeroes
    ``detuning``.
    """

    detuning: float
    mirror: float
    resonant_delta: float
    shift_source: float
    shift_target: float


def transition_detuning(spec: TransitionSpec, params: DispersiveParams) -> TransitionDetuning:
    k, q = spec.source.k, spec.source.q
    kt, qt = spec.target_kq()
    s = spec.sign
    d_s = stark_shift(k, q, params)
    d_t = stark_shift(kt, qt, params)
    delta = params.delta
    return TransitionDetuning(
        detuning=-s * delta + (d_t - d_s),
        mirror=-s * delta - (d_t - d_s),
        resonant_delta=s * (d_t - d_s),
        shift_source=d_s,
        shift_target=d_t,
    )


def transition_element(spec: TransitionSpec, params: DispersiveParams) -> float:
    """Coupling magnitude of the transition, from the collective-operator
    algebra (not from f_factor):

        '-' branch: omega_eff sqrt(k(N-k+1)) sqrt((q+1)(M-q))
        '+' branch: omega_eff sqrt((k+1)(N-k)) sqrt(q(M-q+1))

    Symmetric under source/target exchange (Hermiticity).
    """
    k, q = spec.source.k, spec.source.q
    n, m = params.n, params.m
    if spec.branch == "-":
        factor = math.sqrt(k * (n - k + 1)) * math.sqrt((q + 1) * (m - q))
    else:
        factor = math.sqrt((k + 1) * (n - k)) * math.sqrt(q * (m - q + 1))
    if factor == 0.0:
        return 0.0          # annihilated edge of the ladder
    spec.target_kq()
    return params.omega_eff * factor


def tau_dicke(m: int, q: int, element: float) -> float:
    """Merge time: rotating |e>|D_q^M> for tau under a resonant two-level
    coupling of the given element magnitude leaves the M+1 qubits in
    |D_{q+1}^{M+1}> (up to the recorded branch phase):

        tau = arcsin(sqrt((M-q)/(M+1))) / element
    """
    if not 0 <= q <= m:
        raise DomainError(f"q={q} out of range 0..{m}")
    if q == m:
        return 0.0
    if element <= 0:
        raise DomainError("element must be positive")
    return math.asin(math.sqrt((m - q) / (m + 1))) / element
