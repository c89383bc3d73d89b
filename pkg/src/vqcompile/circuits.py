"""Parameterized brickwall circuits over chains and snake-ordered strips.

A circuit is an ordered list of layers; each layer holds two-site gate
placements on disjoint site pairs. Parameterized placements reference a
15-parameter SU(4) block; translation-invariant (TI) circuits share one
block per layer, free circuits use one block per placement. Frozen circuits
(e.g. materialized product formulas) carry fixed gate matrices instead.

Long-range placements (site pairs that are not chain-adjacent) are applied
through SWAP networks and accounted as such, so the simulated circuit and
the CNOT resource model describe the same object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import DenseSizeError, ShapeError
from .mps import SWAP_GATE, MatrixProductState
from .serialize import read_json, write_json
from .tensorops import two_qubit_generators

PARAMS_PER_BLOCK = 15
_GENERATORS = two_qubit_generators()

CIRCUIT_SCHEMA = "circuit/1"


def su4_from_params(block_theta: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Materialize ``exp(-1j * sum_k theta_k G_k)`` over the 15 two-qubit Paulis.

    The generator order is fixed (see
    :data:`vqcompile.tensorops.TWO_QUBIT_GENERATOR_LABELS`); the identity
    direction is deliberately absent, so the parameterization controls the
    gate only up to global phase, which none of the cost functions see.
    """
    block_theta = np.asarray(block_theta, dtype=np.float64)
    if block_theta.shape != (PARAMS_PER_BLOCK,):
        msg = f"an SU(4) block takes {PARAMS_PER_BLOCK} parameters, got shape {block_theta.shape}"
        raise ShapeError(msg)
    herm = np.einsum("k,kab->ab", block_theta, _GENERATORS)
    eigvals, eigvecs = np.linalg.eigh(herm)
    return (eigvecs * np.exp(-1j * eigvals)) @ eigvecs.conj().T


def su4_and_derivatives(
    block_theta: NDArray[np.float64],
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Gate and its 15 partial derivatives via the spectral divided-difference formula.

    For ``G = exp(M(theta))`` with anti-Hermitian ``M = -1j * H(theta)``,
    ``dG = W [ (W^dag dM W) * Phi ] W^dag`` where ``Phi[m, n]`` is the
    divided difference of ``exp`` at eigenvalue pairs, evaluated by series
    near degeneracies for stability.
    """
    block_theta = np.asarray(block_theta, dtype=np.float64)
    if block_theta.shape != (PARAMS_PER_BLOCK,):
        msg = f"an SU(4) block takes {PARAMS_PER_BLOCK} parameters, got shape {block_theta.shape}"
        raise ShapeError(msg)
    herm = np.einsum("k,kab->ab", block_theta, _GENERATORS)
    eigvals, eigvecs = np.linalg.eigh(herm)
    mu = -1j * eigvals
    emu = np.exp(mu)
    delta = mu[:, None] - mu[None, :]
    small = np.abs(delta) < 1e-9
    safe = np.where(small, 1.0, delta)
    ratio = np.where(small, 1.0 + delta / 2.0 + delta**2 / 6.0, (np.exp(delta) - 1.0) / safe)
    phi = emu[None, :] * ratio

    gate = (eigvecs * emu) @ eigvecs.conj().T
    w_dag = eigvecs.conj().T
    derivs = np.empty((PARAMS_PER_BLOCK, 4, 4), dtype=np.complex128)
    for k in range(PARAMS_PER_BLOCK):
        inner = w_dag @ (-1j * _GENERATORS[k]) @ eigvecs
        derivs[k] = eigvecs @ (inner * phi) @ w_dag
    return gate, derivs


@dataclass(frozen=True)
class GatePlacement:
    """One two-site gate slot: where it acts and which parameters drive it."""

    sites: tuple[int, int]  # (i, j) with i < j; j == i + 1 when chain-adjacent
    block: int | None = None  # parameter block id; None for frozen gates
    fixed_gate: NDArray[np.complex128] | None = None
    kind: str = "su4"  # resource class: "su4" or "xx"

    @property
    def distance(self) -> int:
        return self.sites[1] - self.sites[0]


class ParameterizedCircuit:
    """A layered two-site circuit with an optional TI parameter-sharing map."""

    def __init__(
        self,
        n: int,
        layers: list[list[GatePlacement]],
        ti: bool,
        geometry: dict | None = None,
        frozen: bool = False,
    ) -> None:
        if n < 2:
            msg = f"need at least two sites, got n={n}"
            raise ShapeError(msg)
        for index, layer in enumerate(layers):
            used: set[int] = set()
            for placement in layer:
                i, j = placement.sites
                if not 0 <= i < j < n:
                    msg = f"placement sites {placement.sites} invalid for n={n}"
                    raise ShapeError(msg)
                if i in used or j in used:
                    msg = f"layer {index} has overlapping gate supports"
                    raise ShapeError(msg)
                used.update((i, j))
        self.n = n
        self.layers = [list(layer) for layer in layers]
        self.ti = ti
        self.geometry = dict(geometry or {"kind": "chain", "n": n})
        self.frozen = frozen
        if frozen:
            self.num_blocks = 0
        else:
            blocks = {p.block for layer in self.layers for p in layer}
            if None in blocks:
                msg = "parameterized circuit has a placement without a block id"
                raise ShapeError(msg)
            self.num_blocks = len(blocks)
            if blocks != set(range(self.num_blocks)):
                msg = "block ids must be 0..num_blocks-1 without gaps"
                raise ShapeError(msg)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def parameter_count(self) -> int:
        return PARAMS_PER_BLOCK * self.num_blocks

    @property
    def num_gates(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def placements(self):
        """All placements in application order (layer-major, left to right)."""
        for layer in self.layers:
            yield from sorted(layer, key=lambda p: p.sites)

    def layer_blocks(self, layer_index: int) -> list[int]:
        return sorted({p.block for p in self.layers[layer_index]})

    def block_slice(self, block: int) -> slice:
        return slice(block * PARAMS_PER_BLOCK, (block + 1) * PARAMS_PER_BLOCK)

    def check_theta(self, theta: NDArray[np.float64] | None) -> NDArray[np.float64]:
        if self.frozen:
            if theta is not None and len(theta) != 0:
                msg = "frozen circuit takes no parameters"
                raise ShapeError(msg)
            return np.zeros(0)
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.parameter_count,):
            msg = (
                f"parameter vector has shape {theta.shape}, circuit needs "
                f"({self.parameter_count},)"
            )
            raise ShapeError(msg)
        return theta

    def gate_matrix(
        self, placement: GatePlacement, theta: NDArray[np.float64] | None
    ) -> NDArray[np.complex128]:
        if placement.fixed_gate is not None:
            return placement.fixed_gate
        theta = np.asarray(theta, dtype=np.float64)
        return su4_from_params(theta[self.block_slice(placement.block)])

    # ----- checkpointing ---------------------------------------------------

    def to_document(
        self, theta: NDArray[np.float64] | None = None, provenance: dict | None = None
    ) -> dict:
        if self.frozen:
            msg = "frozen circuits are rebuilt from their Hamiltonian, not checkpointed"
            raise ShapeError(msg)
        theta = self.check_theta(theta)
        return {
            "schema": CIRCUIT_SCHEMA,
            "n": self.n,
            "ti": self.ti,
            "geometry": self.geometry,
            "layers": [
                [{"sites": list(p.sites), "block": p.block, "kind": p.kind} for p in layer]
                for layer in self.layers
            ],
            "theta": [format(float(v), ".17g") for v in theta],
            "provenance": provenance or {},
        }

    @classmethod
    def from_document(cls, doc: dict) -> tuple[ParameterizedCircuit, NDArray[np.float64]]:
        if doc.get("schema") != CIRCUIT_SCHEMA:
            msg = f"unsupported circuit schema {doc.get('schema')!r}"
            raise ShapeError(msg)
        layers = [
            [
                GatePlacement(sites=tuple(p["sites"]), block=p["block"], kind=p.get("kind", "su4"))
                for p in layer
            ]
            for layer in doc["layers"]
        ]
        circuit = cls(doc["n"], layers, ti=doc["ti"], geometry=doc["geometry"])
        theta = np.array([float(v) for v in doc["theta"]], dtype=np.float64)
        circuit.check_theta(theta)
        return circuit, theta

    def save(self, path, theta, provenance: dict | None = None) -> None:
        write_json(path, self.to_document(theta, provenance))

    @classmethod
    def load(cls, path) -> tuple[ParameterizedCircuit, NDArray[np.float64]]:
        return cls.from_document(read_json(path))


# ----- layouts ----------------------------------------------------------------


def brickwall_1d(n: int, tau: int, ti: bool) -> ParameterizedCircuit:
    """The standard alternating-offset brickwall on an open chain.

    Layer ``l`` (0-based) couples pairs ``(i, i + 1)`` with ``i`` of parity
    ``l % 2``. TI circuits share one parameter block per layer.
    """
    if n < 2 or tau < 1:
        msg = f"need n >= 2 and tau >= 1, got n={n}, tau={tau}"
        raise ShapeError(msg)
    layers = []
    next_block = 0
    for layer_index in range(tau):
        layer = []
        for i in range(layer_index % 2, n - 1, 2):
            block = layer_index if ti else next_block
            layer.append(GatePlacement(sites=(i, i + 1), block=block))
            next_block += 1
        layers.append(layer)
    return ParameterizedCircuit(
        n, layers, ti=ti, geometry={"kind": "chain", "n": n, "tau": tau}
    )


def snake_index(x: int, y: int, ly: int) -> int:
    """Chain position of strip site (x, y): columns traversed alternately up/down."""
    return x * ly + (y if x % 2 == 0 else ly - 1 - y)


def strip_bond_groups(lx: int, ly: int, periodic_x: bool) -> list[tuple[str, list[tuple[int, int]]]]:
    """Nearest-neighbor bonds of the strip, grouped into disjoint gate layers.

    Groups: vertical bonds split by y parity, horizontal bonds split by x
    parity; for odd ``lx`` with periodic x the wrap bonds get their own
    group so supports stay disjoint. Pairs are chain indices under snake
    ordering, ordered (small, large).
    """
    if lx < 1 or ly < 2:
        msg = f"strip needs lx >= 1 and ly >= 2, got {lx}x{ly}"
        raise ShapeError(msg)
    groups: dict[str, list[tuple[int, int]]] = {}

    def add(label: str, a: int, b: int) -> None:
        groups.setdefault(label, []).append((min(a, b), max(a, b)))

    for x in range(lx):
        for y in range(ly - 1):
            add(f"v-{'even' if y % 2 == 0 else 'odd'}", snake_index(x, y, ly), snake_index(x, y + 1, ly))
    for x in range(lx - 1):
        for y in range(ly):
            add(f"h-{'even' if x % 2 == 0 else 'odd'}", snake_index(x, y, ly), snake_index(x + 1, y, ly))
    if periodic_x and lx > 2:
        wrap_label = "h-wrap" if lx % 2 == 1 else "h-odd"
        for y in range(ly):
            add(wrap_label, snake_index(lx - 1, y, ly), snake_index(0, y, ly))

    order = ["v-even", "v-odd", "h-even", "h-odd", "h-wrap"]
    return [(label, sorted(groups[label])) for label in order if label in groups]


def brickwall_snake_2d(
    lx: int, ly: int, tau: int, ti: bool, periodic_x: bool = False
) -> ParameterizedCircuit:
    """Brickwall ansatz on an open-y strip treated as a snake-ordered chain.

    Layers cycle through the disjoint bond groups of
    :func:`strip_bond_groups`, so every 2D nearest-neighbor bond appears
    once per cycle. Horizontal bonds are long-range on the chain and carry
    SWAP overhead in both simulation and resource accounting.
    """
    if tau < 1:
        msg = f"need tau >= 1, got {tau}"
        raise ShapeError(msg)
    cycle = strip_bond_groups(lx, ly, periodic_x)
    n = lx * ly
    layers = []
    next_block = 0
    for layer_index in range(tau):
        _, pairs = cycle[layer_index % len(cycle)]
        layer = []
        for pair in pairs:
            block = layer_index if ti else next_block
            layer.append(GatePlacement(sites=pair, block=block))
            next_block += 1
        layers.append(layer)
    geometry = {
        "kind": "snake-strip",
        "lx": lx,
        "ly": ly,
        "periodic_x": periodic_x,
        "tau": tau,
    }
    return ParameterizedCircuit(n, layers, ti=ti, geometry=geometry)


# ----- application -------------------------------------------------------------


def apply_circuit(
    state: MatrixProductState,
    circuit: ParameterizedCircuit,
    theta: NDArray[np.float64] | None = None,
    chi_max: int | None = None,
    cutoff: float | None = None,
) -> MatrixProductState:
    """Apply the circuit to ``state`` in place (layers in order) and return it."""
    if state.n != circuit.n:
        msg = f"state has {state.n} sites, circuit expects {circuit.n}"
        raise ShapeError(msg)
    theta = circuit.check_theta(theta) if not circuit.frozen else None
    for placement in circuit.placements():
        gate = circuit.gate_matrix(placement, theta)
        i, j = placement.sites
        state.apply_gate_long_range(i, j, gate, chi_max=chi_max, cutoff=cutoff)
    return state


def apply_circuit_adjoint(
    state: MatrixProductState,
    circuit: ParameterizedCircuit,
    theta: NDArray[np.float64] | None = None,
    chi_max: int | None = None,
    cutoff: float | None = None,
) -> MatrixProductState:
    """Apply the adjoint circuit (reversed order, conjugated gates) in place."""
    if state.n != circuit.n:
        msg = f"state has {state.n} sites, circuit expects {circuit.n}"
        raise ShapeError(msg)
    theta = circuit.check_theta(theta) if not circuit.frozen else None
    for placement in reversed(list(circuit.placements())):
        gate = circuit.gate_matrix(placement, theta).conj().T
        i, j = placement.sites
        state.apply_gate_long_range(i, j, gate, chi_max=chi_max, cutoff=cutoff)
    return state


def _embed_adjacent(gate: NDArray[np.complex128], n: int, i: int) -> NDArray[np.complex128]:
    left = np.eye(2**i, dtype=np.complex128)
    right = np.eye(2 ** (n - i - 2), dtype=np.complex128)
    return np.kron(np.kron(left, gate), right)


def embed_two_site(
    gate: NDArray[np.complex128], n: int, i: int, j: int
) -> NDArray[np.complex128]:
    """Dense embedding of a 4x4 gate at sites (i, j), site 0 most significant.

    Distant pairs are realized exactly as in the MPS path: a SWAP chain
    brings ``j`` next to ``i``, the gate acts, and the chain is undone.
    """
    if not 0 <= i < j < n:
        msg = f"need 0 <= i < j < n, got ({i}, {j}) with n={n}"
        raise ShapeError(msg)
    if j == i + 1:
        return _embed_adjacent(gate, n, i)
    chain = np.eye(2**n, dtype=np.complex128)
    for pos in range(j - 1, i, -1):
        chain = _embed_adjacent(SWAP_GATE, n, pos) @ chain
    return chain.conj().T @ _embed_adjacent(gate, n, i) @ chain


def circuit_to_dense(
    circuit: ParameterizedCircuit,
    theta: NDArray[np.float64] | None = None,
    max_sites: int = 12,
) -> NDArray[np.complex128]:
    """Materialize the circuit as a dense 2^n x 2^n unitary (small n only)."""
    if circuit.n > max_sites:
        msg = f"refusing dense circuit of {circuit.n} sites (cap {max_sites})"
        raise DenseSizeError(msg)
    theta = circuit.check_theta(theta) if not circuit.frozen else None
    full = np.eye(2**circuit.n, dtype=np.complex128)
    for placement in circuit.placements():
        gate = circuit.gate_matrix(placement, theta)
        i, j = placement.sites
        full = embed_two_site(gate, circuit.n, i, j) @ full
    return full


# ----- resource accounting -----------------------------------------------------

CNOT_COST = {"su4": 3, "nn_xx": 2, "nnn_xx": 6, "swap": 3}


@dataclass
class ResourceReport:
    """Gate counts and the induced nearest-neighbor CNOT total."""

    su4: int = 0
    nn_xx: int = 0
    nnn_xx: int = 0
    swaps: int = 0
    distance_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def cnot_total(self) -> int:
        return (
            CNOT_COST["su4"] * self.su4
            + CNOT_COST["nn_xx"] * self.nn_xx
            + CNOT_COST["nnn_xx"] * self.nnn_xx
            + CNOT_COST["swap"] * self.swaps
        )

    def to_document(self) -> dict:
        return {
            "su4": self.su4,
            "nn_xx": self.nn_xx,
            "nnn_xx": self.nnn_xx,
            "swaps": self.swaps,
            "cnot_total": self.cnot_total,
            "distance_histogram": {str(k): v for k, v in sorted(self.distance_histogram.items())},
        }


def count_resources(circuit: ParameterizedCircuit) -> ResourceReport:
    """Count gates by kind and total CNOTs under the nearest-neighbor cost model.

    SU(4) gates cost 3 CNOTs, XX-class gates 2; an XX-class gate at chain
    distance 2 is counted as the 6-CNOT next-nearest XX primitive. Any other
    non-adjacent placement pays ``2 * (distance - 1)`` SWAPs (3 CNOTs each)
    around the gate.
    """
    report = ResourceReport()
    for placement in circuit.placements():
        dist = placement.distance
        report.distance_histogram[dist] = report.distance_histogram.get(dist, 0) + 1
        if placement.kind == "xx":
            if dist == 1:
                report.nn_xx += 1
            elif dist == 2:
                report.nnn_xx += 1
            else:
                report.nn_xx += 1
                report.swaps += 2 * (dist - 1)
        else:
            report.su4 += 1
            if dist > 1:
                report.swaps += 2 * (dist - 1)
    return report
