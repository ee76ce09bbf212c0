"""Shared test oracles, built independently of the package internals.

The oracle Dicke construction symmetrizes a single bit string over all
permutations; collective operators are assembled from explicit single-qubit
matrices.  Both deliberately avoid the package's own construction paths.
"""

import itertools
import math

import numpy as np
import pytest


def oracle_dicke(m: int, q: int) -> np.ndarray:
    """|D_q^M> by summing all qubit permutations of e^q g^(M-q)."""
    base = [1] * q + [0] * (m - q)
    vec = np.zeros(2 ** m)
    seen = set()
    for perm in itertools.permutations(base):
        if perm in seen:
            continue
        seen.add(perm)
        idx = 0
        for b in perm:
            idx = (idx << 1) | b
        vec[idx] = 1.0
    return vec / np.linalg.norm(vec)


def oracle_sigma_minus(n_qubits: int, j: int) -> np.ndarray:
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    op = np.array([[1.0 + 0j]])
    for i in range(n_qubits):
        op = np.kron(op, sm if i == j else np.eye(2))
    return op


def oracle_collective_raising(n_qubits: int, members) -> np.ndarray:
    return sum(oracle_sigma_minus(n_qubits, j).conj().T for j in members)


def swap_qubits(vec: np.ndarray, n_qubits: int, i: int, j: int) -> np.ndarray:
    """Permutation of two qubit tensor factors applied to raw amplitudes."""
    out = np.zeros_like(vec)
    for idx in range(len(vec)):
        bi = (idx >> (n_qubits - 1 - i)) & 1
        bj = (idx >> (n_qubits - 1 - j)) & 1
        new = idx
        if bi != bj:
            new ^= (1 << (n_qubits - 1 - i)) | (1 << (n_qubits - 1 - j))
        out[new] = vec[idx]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_sector_state(rng, space, max_excitation: int) -> np.ndarray:
    """Random amplitudes restricted to total excitation <= max_excitation."""
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    for idx in range(space.dim):
        bits = idx // space.boson_dim
        exc = bin(bits).count("1") + idx % space.boson_dim
        if exc > max_excitation:
            v[idx] = 0.0
    return v / np.linalg.norm(v)


def two_level_populations(element: float, detuning: float, t: float):
    """Exact detuned Rabi solution for i b1' = e b2, i b2' = e b1 + d b2."""
    omega = math.sqrt(element ** 2 + (detuning / 2) ** 2)
    p2 = (element / omega) ** 2 * math.sin(omega * t) ** 2 if omega > 0 else 0.0
    return 1.0 - p2, p2
