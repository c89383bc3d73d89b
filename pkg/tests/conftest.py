"""Shared test oracles: a bit-arithmetic statevector simulator and Pauli sums.

These deliberately avoid the package's tensor/kron code paths so the tests
compare two independent implementations. Site 0 is the most significant bit
of a basis index, matching the package convention.
"""

from __future__ import annotations

import numpy as np
import pytest

I2 = np.eye(2, dtype=np.complex128)
X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def apply_gate_dense(vec: np.ndarray, gate: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Apply a 4x4 gate to sites (i, j) of a dense state by explicit bit loops."""
    out = np.zeros_like(vec)
    shift_i = n - 1 - i
    shift_j = n - 1 - j
    for idx in range(len(vec)):
        if vec[idx] == 0:
            continue
        bi = (idx >> shift_i) & 1
        bj = (idx >> shift_j) & 1
        base = idx & ~(1 << shift_i) & ~(1 << shift_j)
        col = 2 * bi + bj
        for a1 in (0, 1):
            for a2 in (0, 1):
                row = 2 * a1 + a2
                if gate[row, col] == 0:
                    continue
                target = base | (a1 << shift_i) | (a2 << shift_j)
                out[target] += gate[row, col] * vec[idx]
    return out


def apply_local_dense(vec: np.ndarray, op: np.ndarray, n: int, i: int) -> np.ndarray:
    """Apply a 2x2 operator to site i of a dense state by explicit bit loops."""
    out = np.zeros_like(vec)
    shift = n - 1 - i
    for idx in range(len(vec)):
        if vec[idx] == 0:
            continue
        b = (idx >> shift) & 1
        base = idx & ~(1 << shift)
        for a in (0, 1):
            if op[a, b] == 0:
                continue
            out[base | (a << shift)] += op[a, b] * vec[idx]
    return out


def pauli_string_dense(labels: dict[int, str], n: int) -> np.ndarray:
    """Dense operator for a sparse Pauli string {site: label}."""
    mats = [PAULI[labels.get(k, "I")] for k in range(n)]
    out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_heisenberg(n: int, fields: np.ndarray) -> np.ndarray:
    """Independent dense Heisenberg chain Hamiltonian from Pauli strings."""
    dim = 2**n
    ham = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n - 1):
        for p in "XYZ":
            ham += pauli_string_dense({i: p, i + 1: p}, n)
    for i in range(n):
        if fields[i] != 0:
            ham += fields[i] * pauli_string_dense({i: "Z"}, n)
    return ham


def dense_ising(n: int, g: float, kappa: float) -> np.ndarray:
    """Independent dense perturbed Ising chain Hamiltonian from Pauli strings."""
    dim = 2**n
    ham = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n - 1):
        ham -= pauli_string_dense({i: "X", i + 1: "X"}, n)
    for i in range(n):
        ham -= pauli_string_dense({i: "Z"}, n)
        ham += g * pauli_string_dense({i: "X"}, n)
    if kappa != 0.0:
        for i in range(n - 1):
            ham += kappa * pauli_string_dense({i: "Z", i + 1: "Z"}, n)
        for i in range(n - 2):
            ham += kappa * pauli_string_dense({i: "X", i + 2: "X"}, n)
    return ham


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_state_dense(dim: int, generator: np.random.Generator) -> np.ndarray:
    vec = generator.normal(size=dim) + 1j * generator.normal(size=dim)
    return vec / np.linalg.norm(vec)
