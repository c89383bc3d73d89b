"""Supervised compilation: risk functions, exact gradients, and optimizers.

The training cost is the empirical risk ``1 - mean |<psi_i| V(theta) |phi_i>|^2``
over paired samples (random product input ``phi_i``, time-evolved target
``psi_i``). Gradients are analytic: per-gate environment tensors from
forward/backward sweeps, chained through the spectral derivative of the
SU(4) exponential map; translation-invariant blocks sum environments over
the positions that share them.

Sample contributions are always reduced in sample order, so cost histories
are bit-identical across runs with the same seeds and settings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .circuits import (
    PARAMS_PER_BLOCK,
    GatePlacement,
    ParameterizedCircuit,
    apply_circuit_adjoint,
    brickwall_1d,
    brickwall_snake_2d,
    su4_and_derivatives,
    su4_from_params,
)
from .errors import ConfigError, EmbeddingError, NumericalError, ShapeError
from .models import HamiltonianSpec, TrotterScheme, folded_bond_groups, tebd_evolve
from .mps import (
    SWAP_GATE,
    EnsembleSpec,
    MatrixProductState,
    overlap,
    sample_ensemble_state,
)
from .rng import RandomStream
from .serialize import read_json, write_json
from .tensorops import two_qubit_generators

_GENERATORS = two_qubit_generators()

DATASET_SCHEMA = "dataset/1"
DEFAULT_TEST_SIZE = 100
DEFAULT_TRAIN_SIZE = 16


# ----- datasets ---------------------------------------------------------------


@dataclass
class TrainingDataset:
    """Paired (input state, evolved target) samples plus generation metadata."""

    inputs: list[MatrixProductState]
    targets: list[MatrixProductState]
    metadata: dict = field(default_factory=dict)
    role: str = "train"

    def __post_init__(self) -> None:
        if len(self.inputs) != len(self.targets):
            msg = f"{len(self.inputs)} inputs vs {len(self.targets)} targets"
            raise ShapeError(msg)
        if self.inputs and any(s.n != self.inputs[0].n for s in self.inputs + self.targets):
            msg = "all samples must have the same number of sites"
            raise ShapeError(msg)

    @property
    def size(self) -> int:
        return len(self.inputs)

    @property
    def n(self) -> int:
        return self.inputs[0].n

    def to_document(self) -> dict:
        return {
            "schema": DATASET_SCHEMA,
            "role": self.role,
            "metadata": self.metadata,
            "samples": [
                {"input": inp.to_document(), "target": tgt.to_document()}
                for inp, tgt in zip(self.inputs, self.targets)
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> TrainingDataset:
        if doc.get("schema") != DATASET_SCHEMA:
            msg = f"unsupported dataset schema {doc.get('schema')!r}"
            raise ShapeError(msg)
        inputs = [MatrixProductState.from_document(s["input"]) for s in doc["samples"]]
        targets = [MatrixProductState.from_document(s["target"]) for s in doc["samples"]]
        return cls(inputs, targets, metadata=doc["metadata"], role=doc["role"])

    def save(self, path) -> None:
        write_json(path, self.to_document())

    @classmethod
    def load(cls, path) -> TrainingDataset:
        return cls.from_document(read_json(path))


def generate_dataset(
    spec: HamiltonianSpec,
    t: float,
    size: int,
    ensemble: EnsembleSpec,
    dt: float = 1e-3,
    chi_max: int | None = 128,
    cutoff: float = 1e-12,
    role: str = "train",
    max_discarded_weight: float = 1e-6,
    sample_offset: int = 0,
) -> TrainingDataset:
    """Draw inputs from ``ensemble`` and evolve each to time ``t`` by TEBD.

    Per-sample substreams make generation order-independent: sample ``i`` is
    a pure function of (ensemble.seed, sample_offset + i); disjoint offsets
    give disjoint datasets from one seed. Product-state ensembles are
    checked to have bond dimension 1; each target's accumulated discarded
    weight must stay below ``max_discarded_weight``.
    """
    inputs = []
    targets = []
    discarded = []
    for index in range(size):
        state = sample_ensemble_state(
            ensemble, spec.n, sample_offset + index, chi_max=chi_max, cutoff=cutoff
        )
        if ensemble.kind in ("random-product", "computational-basis") and state.max_bond != 1:
            msg = "product ensemble produced an entangled input"
            raise ShapeError(msg)
        target = tebd_evolve(state, spec, t, dt=dt, chi_max=chi_max, cutoff=cutoff)
        if target.discarded_weight > max_discarded_weight:
            msg = (
                f"sample {index}: discarded weight {target.discarded_weight:.3e} exceeds "
                f"bound {max_discarded_weight:.3e}; raise chi_max or lower cutoff"
            )
            raise NumericalError(msg)
        inputs.append(state)
        targets.append(target)
        discarded.append(target.discarded_weight)
    metadata = {
        "model": spec.to_document(),
        "t": t,
        "dt": dt,
        "chi_max": chi_max,
        "cutoff": cutoff,
        "ensemble": ensemble.to_document(),
        "size": size,
        "sample_offset": sample_offset,
        "max_discarded_weight": max_discarded_weight,
        "discarded_weights": discarded,
    }
    return TrainingDataset(inputs, targets, metadata=metadata, role=role)


# ----- cost and gradient --------------------------------------------------------


def _resolve_gates(circuit, theta, want_derivatives):
    """Materialize per-block gates (and derivatives) once per evaluation."""
    gates = {}
    derivs = {}
    if circuit.frozen:
        return gates, derivs
    for block in range(circuit.num_blocks):
        block_theta = theta[circuit.block_slice(block)]
        if want_derivatives:
            gates[block], derivs[block] = su4_and_derivatives(block_theta)
        else:
            gates[block] = su4_from_params(block_theta)
    return gates, derivs


def _placement_gate(placement: GatePlacement, gates: dict):
    return placement.fixed_gate if placement.fixed_gate is not None else gates[placement.block]


def _swap_to_adjacent(state: MatrixProductState, i: int, j: int, chi_max, cutoff) -> None:
    for pos in range(j - 1, i, -1):
        state.apply_two_site_gate(pos, SWAP_GATE, chi_max=chi_max, cutoff=cutoff, center_after="left")


def _adjacent_environment(
    bra: MatrixProductState, ket: MatrixProductState, site: int
) -> NDArray[np.complex128]:
    """d<bra| G(site, site+1) |ket> / dG as a 4x4 tensor (bra legs first)."""
    left = np.ones((1, 1), dtype=np.complex128)
    for s in range(site):
        left = np.einsum(
            "xy,xpc,ypd->cd", left, bra.tensors[s].conj(), ket.tensors[s], optimize=True
        )
    right = np.ones((1, 1), dtype=np.complex128)
    for s in range(bra.n - 1, site + 1, -1):
        right = np.einsum(
            "xpc,ypd,cd->xy", bra.tensors[s].conj(), ket.tensors[s], right, optimize=True
        )
    env = np.einsum(
        "xy,xau,ubv,ycw,wdz,vz->abcd",
        left,
        bra.tensors[site].conj(),
        bra.tensors[site + 1].conj(),
        ket.tensors[site],
        ket.tensors[site + 1],
        right,
        optimize=True,
    )
    return env.reshape(4, 4)


def _placement_environment(
    bra: MatrixProductState,
    ket: MatrixProductState,
    placement: GatePlacement,
    chi_max,
    cutoff,
) -> NDArray[np.complex128]:
    i, j = placement.sites
    if j == i + 1:
        return _adjacent_environment(bra, ket, i)
    # In the SWAP-network frame W |.>, the placement's gate appears exactly
    # once and adjacently, so the environment there is its derivative.
    bra_adj = bra.copy()
    ket_adj = ket.copy()
    _swap_to_adjacent(bra_adj, i, j, chi_max, cutoff)
    _swap_to_adjacent(ket_adj, i, j, chi_max, cutoff)
    return _adjacent_environment(bra_adj, ket_adj, i)


def _evaluate(
    dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta,
    chi_max=None,
    cutoff=None,
    want_gradient: bool = False,
    block_filter: set[int] | None = None,
):
    """Shared engine for cost and (optionally) its analytic gradient.

    One forward sweep per sample is cached and reused for every gate
    environment, so the work scales linearly in the number of samples.
    """
    if dataset.size == 0:
        msg = "dataset is empty"
        raise ShapeError(msg)
    if dataset.n != circuit.n:
        msg = f"dataset has {dataset.n} sites, circuit expects {circuit.n}"
        raise ShapeError(msg)
    theta = circuit.check_theta(theta)
    gates, derivs = _resolve_gates(circuit, theta, want_gradient)
    placements = list(circuit.placements())

    fidelity_sum = 0.0
    weighted_envs = {b: np.zeros((4, 4), dtype=np.complex128) for b in gates}
    for idx in range(dataset.size):
        phi = dataset.inputs[idx]
        psi = dataset.targets[idx]
        if want_gradient and not circuit.frozen:
            forward = [phi.copy()]
            for placement in placements:
                nxt = forward[-1].copy()
                nxt.apply_gate_long_range(
                    *placement.sites,
                    _placement_gate(placement, gates),
                    chi_max=chi_max,
                    cutoff=cutoff,
                )
                forward.append(nxt)
            amp = overlap(psi, forward[-1])
            fidelity_sum += abs(amp) ** 2
            backward = psi.copy()
            for k in range(len(placements) - 1, -1, -1):
                placement = placements[k]
                if block_filter is None or placement.block in block_filter:
                    env = _placement_environment(backward, forward[k], placement, chi_max, cutoff)
                    weighted_envs[placement.block] += np.conj(amp) * env
                backward.apply_gate_long_range(
                    *placement.sites,
                    _placement_gate(placement, gates).conj().T,
                    chi_max=chi_max,
                    cutoff=cutoff,
                )
        else:
            evolved = phi.copy()
            for placement in placements:
                evolved.apply_gate_long_range(
                    *placement.sites,
                    _placement_gate(placement, gates),
                    chi_max=chi_max,
                    cutoff=cutoff,
                )
            fidelity_sum += abs(overlap(psi, evolved)) ** 2

    cost = 1.0 - fidelity_sum / dataset.size
    cost = max(cost, 0.0)  # guard tiny negative from rounding near a perfect fit
    if not want_gradient:
        return cost, None

    grad = np.zeros(circuit.parameter_count)
    for block, w_env in weighted_envs.items():
        if block_filter is not None and block not in block_filter:
            continue
        block_grad = np.empty(PARAMS_PER_BLOCK)
        for k in range(PARAMS_PER_BLOCK):
            block_grad[k] = -2.0 / dataset.size * np.real(np.sum(derivs[block][k] * w_env))
        grad[circuit.block_slice(block)] = block_grad
    return cost, grad


def empirical_risk(
    dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta=None,
    chi_max=None,
    cutoff=None,
) -> float:
    """``1 - mean_i |<psi_i| V(theta) |phi_i>|^2`` over the dataset."""
    cost, _ = _evaluate(dataset, circuit, theta, chi_max=chi_max, cutoff=cutoff)
    return cost


def gradient(
    dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta,
    chi_max=None,
    cutoff=None,
    block_filter: set[int] | None = None,
) -> NDArray[np.float64]:
    """Analytic gradient of :func:`empirical_risk` at the given truncation settings."""
    _, grad = _evaluate(
        dataset,
        circuit,
        theta,
        chi_max=chi_max,
        cutoff=cutoff,
        want_gradient=True,
        block_filter=block_filter,
    )
    return grad


def cost_and_gradient(
    dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta,
    chi_max=None,
    cutoff=None,
    block_filter: set[int] | None = None,
) -> tuple[float, NDArray[np.float64]]:
    return _evaluate(
        dataset,
        circuit,
        theta,
        chi_max=chi_max,
        cutoff=cutoff,
        want_gradient=True,
        block_filter=block_filter,
    )


def per_site_risk(cost: float, n: int) -> float:
    """Per-site risk ``1 - (1 - c)^(1/n)``; the n-th-root rescaling of a global risk."""
    if not 0.0 <= cost <= 1.0:
        msg = f"cost must lie in [0, 1], got {cost}"
        raise ShapeError(msg)
    if n < 1:
        msg = f"need n >= 1, got {n}"
        raise ShapeError(msg)
    return 1.0 - (1.0 - cost) ** (1.0 / n)


def local_cost(
    dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta=None,
    chi_max=None,
    cutoff=None,
) -> float:
    """Site-averaged projector cost; 0 here forces the empirical risk to 0.

    Applies the adjoint circuit to each target and measures the single-site
    projectors onto the input's site states. Requires product-state inputs
    so each single-site reduced input is pure.
    """
    if dataset.size == 0:
        msg = "dataset is empty"
        raise ShapeError(msg)
    value_sum = 0.0
    for idx in range(dataset.size):
        phi = dataset.inputs[idx]
        if phi.max_bond != 1:
            msg = "local cost requires product-state inputs"
            raise ShapeError(msg)
        work = dataset.targets[idx].copy()
        apply_circuit_adjoint(work, circuit, theta, chi_max=chi_max, cutoff=cutoff)
        work.move_center(0)
        site_sum = 0.0
        for site in range(work.n):
            work.move_center(site)
            vec = phi.tensors[site][0, :, 0]
            vec = vec / np.linalg.norm(vec)
            projector = np.outer(vec, vec.conj())
            t = work.tensors[site]
            site_sum += float(
                np.real(np.einsum("lpr,pq,lqr->", t.conj(), projector, t, optimize=True))
            )
        value_sum += site_sum / work.n
    return max(1.0 - value_sum / dataset.size, 0.0)


def generalization_gap_diagnostic(t_gates: int, k_samples: int) -> float:
    """Shape-only scaling ``sqrt(T log T / K)`` of the out-of-distribution gap.

    The constant in front is unknown (reported as 1); use this as a
    diagnostic next to measured train/test gaps, never as a certified bound.
    """
    if t_gates < 1 or k_samples < 1:
        msg = f"need t_gates >= 1 and k_samples >= 1, got {t_gates}, {k_samples}"
        raise ShapeError(msg)
    return float(np.sqrt(t_gates * np.log(t_gates) / k_samples))


# ----- optimizer ----------------------------------------------------------------


@dataclass
class TrainConfig:
    """Optimizer and loop hyperparameters (defaults documented, not model-tuned)."""

    rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_steps: int = 1000
    patience: int = 50
    min_rel_improvement: float = 1e-4
    test_cadence: int = 10
    stop_below: float = 1e-12
    chi_max: int | None = None  # None: use each state's own settings
    cutoff: float | None = None
    sweeps: int = 2  # local-sweep training only
    inner_steps: int = 25  # local-sweep training only

    def to_document(self) -> dict:
        return {
            "rate": self.rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "max_steps": self.max_steps,
            "patience": self.patience,
            "min_rel_improvement": self.min_rel_improvement,
            "test_cadence": self.test_cadence,
            "stop_below": self.stop_below,
            "chi_max": self.chi_max,
            "cutoff": self.cutoff,
            "sweeps": self.sweeps,
            "inner_steps": self.inner_steps,
        }

    @classmethod
    def from_document(cls, doc: dict) -> TrainConfig:
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            msg = f"unknown optimizer settings: {sorted(bad)}"
            raise ConfigError(msg)
        return cls(**doc)


@dataclass
class TrainState:
    """Parameters, ADAM moments, and the full cost history of a run."""

    theta: NDArray[np.float64]
    m: NDArray[np.float64]
    v: NDArray[np.float64]
    step: int = 0
    rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    train_costs: list[float] = field(default_factory=list)
    test_history: list[tuple[int, float]] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    best_theta: NDArray[np.float64] | None = None
    best_test_cost: float = np.inf
    best_step: int = -1
    stop_reason: str = ""
    wall_time_s: float = 0.0

    @classmethod
    def fresh(cls, theta0: NDArray[np.float64], config: TrainConfig) -> TrainState:
        theta0 = np.array(theta0, dtype=np.float64)
        return cls(
            theta=theta0.copy(),
            m=np.zeros_like(theta0),
            v=np.zeros_like(theta0),
            rate=config.rate,
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.eps,
        )

    @property
    def final_test_cost(self) -> float:
        return self.test_history[-1][1] if self.test_history else np.inf

    def summary(self) -> dict:
        return {
            "steps": self.step,
            "final_train_cost": self.train_costs[-1] if self.train_costs else None,
            "best_test_cost": None if np.isinf(self.best_test_cost) else self.best_test_cost,
            "best_step": self.best_step,
            "stop_reason": self.stop_reason,
        }


def adam_step(state: TrainState, grad: NDArray[np.float64]) -> TrainState:
    """One bias-corrected ADAM update, in place; returns the state for chaining."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != state.theta.shape:
        msg = f"gradient shape {grad.shape} does not match theta {state.theta.shape}"
        raise ShapeError(msg)
    if not np.all(np.isfinite(grad)):
        msg = "non-finite gradient entries"
        raise NumericalError(msg)
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad**2
    m_hat = state.m / (1.0 - state.beta1**state.step)
    v_hat = state.v / (1.0 - state.beta2**state.step)
    state.theta = state.theta - state.rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return state


def _check_compatible(train_ds: TrainingDataset, test_ds: TrainingDataset) -> None:
    if train_ds.n != test_ds.n:
        msg = f"train/test site counts differ: {train_ds.n} vs {test_ds.n}"
        raise ConfigError(msg)
    for key in ("t", "model"):
        a = train_ds.metadata.get(key)
        b = test_ds.metadata.get(key)
        if a is not None and b is not None and a != b:
            msg = f"train/test datasets disagree on {key!r}: {a} vs {b}"
            raise ConfigError(msg)


def train(
    train_dataset: TrainingDataset,
    test_dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta0: NDArray[np.float64],
    config: TrainConfig | None = None,
) -> TrainState:
    """ADAM descent on the empirical risk with test tracking and early stop.

    The loop evaluates cost and gradient at the current parameters, records
    the train cost every step and the test cost every ``test_cadence``
    steps (plus the first and last), and stops on ``max_steps``, on a train
    cost below ``stop_below``, or after ``patience`` steps without a
    relative improvement of ``min_rel_improvement``. The returned state's
    ``theta`` is the best-by-test-cost parameter vector seen.
    """
    config = config or TrainConfig()
    _check_compatible(train_dataset, test_dataset)
    started = time.monotonic()
    state = TrainState.fresh(theta0, config)
    best_train = np.inf
    stall = 0

    def eval_test() -> None:
        cost = empirical_risk(
            test_dataset, circuit, state.theta, chi_max=config.chi_max, cutoff=config.cutoff
        )
        state.test_history.append((state.step, cost))
        if cost < state.best_test_cost:
            state.best_test_cost = cost
            state.best_theta = state.theta.copy()
            state.best_step = state.step

    while True:
        cost, grad = cost_and_gradient(
            train_dataset, circuit, state.theta, chi_max=config.chi_max, cutoff=config.cutoff
        )
        if not np.isfinite(cost):
            msg = f"non-finite training cost at step {state.step}"
            raise NumericalError(msg)
        state.train_costs.append(cost)
        state.grad_norms.append(float(np.linalg.norm(grad)))
        if state.step % max(config.test_cadence, 1) == 0:
            eval_test()

        if cost < best_train * (1.0 - config.min_rel_improvement):
            stall = 0
        else:
            stall += 1
        best_train = min(best_train, cost)

        if cost <= config.stop_below:
            state.stop_reason = "converged"
            break
        if stall >= config.patience:
            state.stop_reason = "early-stop"
            break
        if state.step >= config.max_steps:
            state.stop_reason = "max-steps"
            break
        adam_step(state, grad)

    if not state.test_history or state.test_history[-1][0] != state.step:
        eval_test()
    if state.best_theta is not None:
        state.theta = state.best_theta.copy()
    state.wall_time_s = time.monotonic() - started
    return state


def local_sweep_train(
    train_dataset: TrainingDataset,
    circuit: ParameterizedCircuit,
    theta0: NDArray[np.float64],
    config: TrainConfig | None = None,
    test_dataset: TrainingDataset | None = None,
) -> TrainState:
    """Layer-at-a-time optimization, sweeping layer 1 -> tau -> 1 repeatedly.

    Each layer visit runs ``config.inner_steps`` ADAM iterations on that
    layer's blocks only (fresh moments per visit); the cost function and
    logging are identical to :func:`train`.
    """
    config = config or TrainConfig()
    started = time.monotonic()
    state = TrainState.fresh(theta0, config)

    def eval_test() -> None:
        if test_dataset is None:
            return
        cost = empirical_risk(
            test_dataset, circuit, state.theta, chi_max=config.chi_max, cutoff=config.cutoff
        )
        state.test_history.append((state.step, cost))
        if cost < state.best_test_cost:
            state.best_test_cost = cost
            state.best_theta = state.theta.copy()
            state.best_step = state.step

    tau = circuit.depth
    visit_order = list(range(tau)) + list(range(tau - 2, 0, -1)) if tau > 1 else [0]
    done = False
    for _ in range(config.sweeps):
        if done:
            break
        for layer_index in visit_order:
            blocks = set(circuit.layer_blocks(layer_index))
            indices = np.concatenate(
                [np.arange(b * PARAMS_PER_BLOCK, (b + 1) * PARAMS_PER_BLOCK) for b in sorted(blocks)]
            )
            m_local = np.zeros(len(indices))
            v_local = np.zeros(len(indices))
            for inner in range(config.inner_steps):
                cost, grad = cost_and_gradient(
                    train_dataset,
                    circuit,
                    state.theta,
                    chi_max=config.chi_max,
                    cutoff=config.cutoff,
                    block_filter=blocks,
                )
                if not np.isfinite(cost):
                    msg = f"non-finite training cost at step {state.step}"
                    raise NumericalError(msg)
                state.train_costs.append(cost)
                state.grad_norms.append(float(np.linalg.norm(grad)))
                if state.step % max(config.test_cadence, 1) == 0:
                    eval_test()
                if cost <= config.stop_below:
                    state.stop_reason = "converged"
                    done = True
                    break
                g = grad[indices]
                tick = inner + 1
                m_local = config.beta1 * m_local + (1.0 - config.beta1) * g
                v_local = config.beta2 * v_local + (1.0 - config.beta2) * g**2
                m_hat = m_local / (1.0 - config.beta1**tick)
                v_hat = v_local / (1.0 - config.beta2**tick)
                state.theta[indices] -= config.rate * m_hat / (np.sqrt(v_hat) + config.eps)
                state.step += 1
            if done:
                break
    if not state.stop_reason:
        state.stop_reason = "sweeps-exhausted"
    cost, grad = cost_and_gradient(
        train_dataset, circuit, state.theta, chi_max=config.chi_max, cutoff=config.cutoff
    )
    state.train_costs.append(cost)
    state.grad_norms.append(float(np.linalg.norm(grad)))
    eval_test()
    if state.best_theta is not None:
        state.theta = state.best_theta.copy()
    state.wall_time_s = time.monotonic() - started
    return state


# ----- warm starts --------------------------------------------------------------


def _pauli_coefficients(matrix: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Expansion of a traceless two-site Hermitian in the 15-generator basis."""
    coeffs = np.array([np.trace(g @ matrix) / 4.0 for g in _GENERATORS])
    if np.max(np.abs(coeffs.imag)) > 1e-10:
        msg = "matrix is not Hermitian in the Pauli basis"
        raise ShapeError(msg)
    return coeffs.real.copy()


def warm_start_trotter(
    spec: HamiltonianSpec,
    t: float,
    p: int,
    tau: int | None = None,
) -> tuple[ParameterizedCircuit, NDArray[np.float64]]:
    """Initialize a brickwall ansatz at the single-step order-``p`` product formula.

    Each product-formula stage must act on exactly the pair set of the
    corresponding ansatz layer (stages are matched in order; surplus ansatz
    layers start at identity). Each stage gate ``exp(-1j * c * t * h)`` maps
    to an SU(4) block through the generator-basis expansion of ``h``.

    Raises:
        EmbeddingError: If a stage's pair set does not match its layer
            (e.g. next-nearest-neighbor stages against a nearest-neighbor
            brickwall); pick a double-time or double-space start instead.
    """
    groups = dict(folded_bond_groups(spec))
    scheme = TrotterScheme.by_order(p, list(groups))
    stages = list(scheme.stages)
    depth = tau if tau is not None else len(stages)
    if depth < len(stages):
        msg = f"formula needs {len(stages)} layers but the ansatz has {depth}"
        raise EmbeddingError(msg)

    if spec.lattice.kind == "chain":
        circuit = brickwall_1d(spec.n, depth, ti=False)
    else:
        circuit = brickwall_snake_2d(
            spec.lattice.lx,
            spec.lattice.ly,
            depth,
            ti=False,
            periodic_x=spec.lattice.periodic_x,
        )

    theta = np.zeros(circuit.parameter_count)
    for layer_index, (group, coeff) in enumerate(stages):
        layer = circuit.layers[layer_index]
        layer_pairs = {pl.sites for pl in layer}
        stage_pairs = {term.sites for term in groups[group]}
        if layer_pairs != stage_pairs:
            msg = (
                f"stage {layer_index} ({group}) acts on {sorted(stage_pairs)} but ansatz "
                f"layer {layer_index} couples {sorted(layer_pairs)}; the formula does "
                "not embed in this architecture"
            )
            raise EmbeddingError(msg)
        by_sites = {pl.sites: pl for pl in layer}
        for term in groups[group]:
            placement = by_sites[term.sites]
            theta[circuit.block_slice(placement.block)] = coeff * t * _pauli_coefficients(
                term.matrix
            )
    return circuit, theta


def warm_start_double_time(
    circuit: ParameterizedCircuit, theta: NDArray[np.float64]
) -> tuple[ParameterizedCircuit, NDArray[np.float64]]:
    """Depth-doubling warm start: the new circuit starts at V(theta) . V(theta).

    Layers are duplicated with blockwise-equal halves; retraining at twice
    the evolution time starts from the squared solution.
    """
    theta = circuit.check_theta(theta)
    tau = circuit.depth
    new_layers = []
    if circuit.ti:
        for copy_index in range(2):
            for layer_index, layer in enumerate(circuit.layers):
                shifted = copy_index * tau + layer_index
                new_layers.append(
                    [GatePlacement(sites=p.sites, block=shifted, kind=p.kind) for p in layer]
                )
        new_theta = np.concatenate([theta, theta])
    else:
        offset = circuit.num_blocks
        for copy_index in range(2):
            for layer in circuit.layers:
                new_layers.append(
                    [
                        GatePlacement(
                            sites=p.sites,
                            block=p.block + copy_index * offset,
                            kind=p.kind,
                        )
                        for p in layer
                    ]
                )
        new_theta = np.concatenate([theta, theta])
    geometry = dict(circuit.geometry)
    geometry["tau"] = 2 * tau
    doubled = ParameterizedCircuit(circuit.n, new_layers, ti=circuit.ti, geometry=geometry)
    return doubled, new_theta


def warm_start_double_space(
    circuit: ParameterizedCircuit, theta: NDArray[np.float64]
) -> tuple[ParameterizedCircuit, NDArray[np.float64]]:
    """Size-doubling warm start: parameters tiled onto the doubled chain.

    The new circuit is the standard non-TI brickwall on ``2n`` sites;
    gates fully inside either half copy the solved parameters, while the
    boundary-crossing gates start at zero (identity), so the initial
    circuit is exactly V(theta) x V(theta).
    """
    if circuit.geometry.get("kind") != "chain":
        msg = "double-space warm start is defined for chain geometries"
        raise EmbeddingError(msg)
    theta = circuit.check_theta(theta)
    n0 = circuit.n
    if n0 % 2 == 1:
        msg = f"double-space tiling needs an even chain length, got n={n0}"
        raise EmbeddingError(msg)
    doubled = brickwall_1d(2 * n0, circuit.depth, ti=False)
    new_theta = np.zeros(doubled.parameter_count)
    for layer_index, layer in enumerate(circuit.layers):
        old_by_sites = {p.sites: p for p in layer}
        for placement in doubled.layers[layer_index]:
            i, j = placement.sites
            if j <= n0 - 1:
                source = old_by_sites.get((i, j))
            elif i >= n0:
                source = old_by_sites.get((i - n0, j - n0))
            else:
                source = None  # boundary-crossing gate starts at identity
            if source is not None:
                new_theta[doubled.block_slice(placement.block)] = theta[
                    circuit.block_slice(source.block)
                ]
    return doubled, new_theta


def near_identity_theta(
    circuit: ParameterizedCircuit, scale: float, seed: int
) -> NDArray[np.float64]:
    """Random parameters of magnitude ~``scale``; zero scale gives the identity."""
    stream = RandomStream(seed)
    return scale * stream.gaussian(circuit.parameter_count)
