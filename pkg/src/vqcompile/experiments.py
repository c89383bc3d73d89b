"""Batch experiment front-end: dataset generation, compilation runs, long-time
dynamics, resource comparisons, and verification reports.

Every experiment is driven by a single JSON config document; the CLI only
selects the config path, the experiment kind, and the output directory, so
an archived config reproduces its outputs byte for byte (seeded randomness,
ordered reductions, 17-significant-digit serialization). Wall-clock timings
go to a separate ``timing.txt`` that is excluded from that contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import (
    ParameterizedCircuit,
    apply_circuit,
    brickwall_1d,
    brickwall_snake_2d,
    count_resources,
)
from .errors import ConfigError, DenseSizeError
from .models import (
    HamiltonianSpec,
    TrotterScheme,
    dense_evolution_operator,
    folded_bond_groups,
    tebd_evolve,
    trotter_circuit,
)
from .mps import EnsembleSpec, MatrixProductState, local_expectation, overlap
from .serialize import read_json, write_csv, write_json
from .tensorops import PAULI_Z
from .training import (
    TrainConfig,
    TrainingDataset,
    TrainState,
    empirical_risk,
    generate_dataset,
    local_sweep_train,
    near_identity_theta,
    per_site_risk,
    train,
    warm_start_double_space,
    warm_start_double_time,
    warm_start_trotter,
)
from .verify import (
    first_moment_test,
    haar_average_fidelity,
    prop1_bound_check,
    u1_light_cone_test,
    unitary_infidelity,
)

RUN_KINDS = ("data-gen", "compile", "dynamics", "resource-compare", "verify")

# Spin-to-hardcore-boson dictionary: |1> is an occupied site, so S+ creates.
S_PLUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
S_MINUS = S_PLUS.conj().T
OCCUPATION = S_PLUS @ S_MINUS  # |1><1|


@dataclass
class RunConfig:
    """Validated view of an experiment config document."""

    kind: str
    model: HamiltonianSpec | None = None
    t: float | None = None
    ansatz: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    optimizer: TrainConfig = field(default_factory=TrainConfig)
    warm_start: dict = field(default_factory=dict)
    dynamics: dict = field(default_factory=dict)
    resource_grid: list = field(default_factory=list)
    verify: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    _KNOWN_KEYS = {
        "kind",
        "model",
        "t",
        "ansatz",
        "data",
        "optimizer",
        "warm_start",
        "dynamics",
        "resource_grid",
        "verify",
    }

    @classmethod
    def from_document(cls, doc: dict) -> RunConfig:
        if not isinstance(doc, dict):
            msg = "config must be a JSON object"
            raise ConfigError(msg)
        unknown = set(doc) - cls._KNOWN_KEYS
        if unknown:
            msg = f"unknown config keys: {sorted(unknown)}"
            raise ConfigError(msg)
        kind = doc.get("kind")
        if kind not in RUN_KINDS:
            msg = f"config kind must be one of {RUN_KINDS}, got {kind!r}"
            raise ConfigError(msg)
        model = None
        if "model" in doc:
            try:
                model = HamiltonianSpec.from_document(doc["model"])
            except (KeyError, TypeError) as exc:
                msg = f"invalid model section: {exc}"
                raise ConfigError(msg) from exc
        optimizer = TrainConfig.from_document(doc.get("optimizer", {}))
        return cls(
            kind=kind,
            model=model,
            t=doc.get("t"),
            ansatz=doc.get("ansatz", {}),
            data=doc.get("data", {}),
            optimizer=optimizer,
            warm_start=doc.get("warm_start", {"strategy": "none"}),
            dynamics=doc.get("dynamics", {}),
            resource_grid=doc.get("resource_grid", []),
            verify=doc.get("verify", {}),
            raw=doc,
        )

    @classmethod
    def load(cls, path) -> RunConfig:
        return cls.from_document(read_json(path))

    def require_model(self) -> HamiltonianSpec:
        if self.model is None:
            msg = "this experiment kind needs a 'model' section"
            raise ConfigError(msg)
        return self.model

    def require_time(self) -> float:
        if self.t is None:
            msg = "this experiment kind needs a top-level 't'"
            raise ConfigError(msg)
        return float(self.t)


def _ensemble_from_config(data: dict, seed: int) -> EnsembleSpec:
    return EnsembleSpec(
        kind=data.get("ensemble", "random-product"),
        basis_bits=data.get("basis_bits"),
        rqc_depth=int(data.get("rqc_depth", 0)),
        rqc_charge=data.get("rqc_charge"),
        seed=seed,
    )


def _dataset_from_config(
    config: RunConfig,
    role: str,
    t: float | None = None,
    size: int | None = None,
    sample_offset: int = 0,
) -> TrainingDataset:
    data = config.data
    spec = config.require_model()
    t = config.require_time() if t is None else t
    if size is None:
        size = int(data.get("n_train", 16)) if role == "train" else int(data.get("n_test", 100))
    seed_key = "train_seed" if role == "train" else "test_seed"
    if seed_key not in data:
        msg = f"data section needs explicit '{seed_key}'"
        raise ConfigError(msg)
    ensemble = _ensemble_from_config(data, int(data[seed_key]))
    return generate_dataset(
        spec,
        t,
        size,
        ensemble,
        dt=float(data.get("dt", 1e-3)),
        chi_max=data.get("chi_max", 128),
        cutoff=float(data.get("cutoff", 1e-12)),
        role=role,
        max_discarded_weight=float(data.get("max_discarded_weight", 1e-6)),
        sample_offset=sample_offset,
    )


def _build_ansatz(config: RunConfig, tau: int | None = None) -> ParameterizedCircuit:
    spec = config.require_model()
    tau = int(config.ansatz.get("tau", 0)) if tau is None else tau
    if tau < 1:
        msg = "ansatz section needs 'tau' >= 1"
        raise ConfigError(msg)
    ti = bool(config.ansatz.get("ti", False))
    if spec.lattice.kind == "chain":
        return brickwall_1d(spec.n, tau, ti)
    return brickwall_snake_2d(
        spec.lattice.lx, spec.lattice.ly, tau, ti, periodic_x=spec.lattice.periodic_x
    )


def _load_checkpoint(path, expected_n: int | None = None):
    path = Path(path)
    if not path.exists():
        msg = f"checkpoint file {path} does not exist"
        raise ConfigError(msg)
    circuit, theta = ParameterizedCircuit.load(path)
    if expected_n is not None and circuit.n != expected_n:
        msg = f"checkpoint {path} has n={circuit.n}, expected n={expected_n}"
        raise ConfigError(msg)
    return circuit, theta


# ----- data-gen ---------------------------------------------------------------


def cmd_data_gen(config: RunConfig, output_dir) -> dict:
    """Write train/test dataset files; re-running a config is byte-identical."""
    out = Path(output_dir)
    train_ds = _dataset_from_config(config, "train")
    test_ds = _dataset_from_config(config, "test")
    train_ds.save(out / "train.json")
    test_ds.save(out / "test.json")
    summary = {
        "train_file": "train.json",
        "test_file": "test.json",
        "train_size": train_ds.size,
        "test_size": test_ds.size,
        "max_discarded_train": max(train_ds.metadata["discarded_weights"], default=0.0),
        "max_discarded_test": max(test_ds.metadata["discarded_weights"], default=0.0),
        "config": config.raw,
    }
    write_json(out / "summary.json", summary)
    return summary


# ----- compile ----------------------------------------------------------------


def _warm_start(config: RunConfig, history_rows: list) -> tuple[ParameterizedCircuit, np.ndarray]:
    """Resolve the configured warm-start strategy to (circuit, theta).

    ``double-time`` runs the full laddering protocol: train at t / 2^r with
    depth tau / 2^r, then repeatedly square the solution and double the
    time until the target (t, tau) is reached.
    """
    spec = config.require_model()
    t = config.require_time()
    strategy = config.warm_start.get("strategy", "none")
    tau = int(config.ansatz.get("tau", 0))

    if strategy == "none":
        circuit = _build_ansatz(config)
        scale = float(config.warm_start.get("init_scale", 0.0))
        seed = int(config.warm_start.get("init_seed", 0))
        return circuit, near_identity_theta(circuit, scale, seed)

    if strategy == "checkpoint":
        circuit, theta = _load_checkpoint(config.warm_start.get("lineage"), expected_n=spec.n)
        return circuit, theta

    if strategy == "trotter":
        p = int(config.warm_start.get("p", 2))
        return warm_start_trotter(spec, t, p, tau=tau if tau > 0 else None)

    if strategy == "double-space":
        circuit, theta = _load_checkpoint(config.warm_start.get("lineage"))
        if 2 * circuit.n != spec.n:
            msg = f"double-space lineage has n={circuit.n}; target model needs n={spec.n}"
            raise ConfigError(msg)
        return warm_start_double_space(circuit, theta)

    if strategy == "double-time":
        rungs = int(config.warm_start.get("rungs", 1))
        if rungs < 1:
            msg = "double-time warm start needs 'rungs' >= 1"
            raise ConfigError(msg)
        if tau % (2**rungs) != 0:
            msg = f"tau={tau} is not divisible by 2^rungs={2 ** rungs}"
            raise ConfigError(msg)
        circuit = _build_ansatz(config, tau=tau // 2**rungs)
        theta = near_identity_theta(
            circuit,
            float(config.warm_start.get("init_scale", 0.0)),
            int(config.warm_start.get("init_seed", 0)),
        )
        rung_config = TrainConfig.from_document(
            {**config.optimizer.to_document(), "max_steps": int(
                config.warm_start.get("rung_max_steps", config.optimizer.max_steps)
            )}
        )
        for rung in range(rungs):
            t_rung = t / 2 ** (rungs - rung)
            rung_train = _dataset_from_config(
                config,
                "train",
                t=t_rung,
                sample_offset=(rung + 1) * 10_000,
            )
            state = train(rung_train, rung_train, circuit, theta, rung_config)
            history_rows.append(
                {
                    "phase": f"rung-{rung}",
                    "t": t_rung,
                    "tau": circuit.depth,
                    "final_train_cost": state.train_costs[-1],
                    "steps": state.step,
                }
            )
            circuit, theta = warm_start_double_time(circuit, state.theta)
        return circuit, theta

    msg = f"unknown warm-start strategy {strategy!r}"
    raise ConfigError(msg)


def _history_csv(path, state: TrainState) -> None:
    test_by_step = dict(state.test_history)
    rows = []
    for step, cost in enumerate(state.train_costs):
        rows.append([step, cost, test_by_step.get(step), state.grad_norms[step]])
    write_csv(path, ["step", "train_cost", "test_cost", "grad_norm"], rows)


def cmd_compile(config: RunConfig, output_dir) -> dict:
    """Warm start, train, and emit checkpoint + history + summary."""
    out = Path(output_dir)
    spec = config.require_model()
    t = config.require_time()
    warm_history: list = []
    circuit, theta = _warm_start(config, warm_history)

    train_ds = _dataset_from_config(config, "train")
    test_ds = _dataset_from_config(config, "test")
    use_local = bool(config.ansatz.get("local_sweep", False))
    if use_local:
        state = local_sweep_train(train_ds, circuit, theta, config.optimizer, test_dataset=test_ds)
    else:
        state = train(train_ds, test_ds, circuit, theta, config.optimizer)

    provenance = {
        "model": spec.to_document(),
        "t": t,
        "warm_start": config.warm_start,
        "train_seed": config.data.get("train_seed"),
        "ladder": warm_history,
    }
    circuit.save(out / "checkpoint.json", state.theta, provenance=provenance)
    _history_csv(out / "history.csv", state)
    (out / "timing.txt").write_text(f"wall_time_s {state.wall_time_s:.3f}\n")

    resources = count_resources(circuit)
    final_train = state.train_costs[-1]
    best_test = state.best_test_cost
    summary = {
        "final_train_cost": final_train,
        "best_test_cost": best_test,
        "best_step": state.best_step,
        "steps": state.step,
        "stop_reason": state.stop_reason,
        "per_site_test_risk": per_site_risk(min(max(best_test, 0.0), 1.0), spec.n),
        "resources": resources.to_document(),
        "ladder": warm_history,
        "config": config.raw,
    }
    write_json(out / "summary.json", summary)
    return summary


# ----- dynamics ----------------------------------------------------------------


def splus_sminus_matrix(state: MatrixProductState) -> np.ndarray:
    """All-pairs ``<S+_a S-_b>`` (Hermitian; diagonal is site occupation)."""
    n = state.n
    matrix = np.zeros((n, n), dtype=np.complex128)
    work = state.copy()
    work.move_center(0)
    for a in range(n):
        work.move_center(a)
        t_a = work.tensors[a]
        matrix[a, a] = np.einsum("lpr,pq,lqr->", t_a.conj(), OCCUPATION, t_a, optimize=True)
        env = np.einsum("xpc,pq,xqd->cd", t_a.conj(), S_PLUS, t_a, optimize=True)
        for b in range(a + 1, n):
            t_b = work.tensors[b]
            matrix[a, b] = np.einsum(
                "cd,cpe,pq,dqe->", env, t_b.conj(), S_MINUS, t_b, optimize=True
            )
            if b < n - 1:
                env = np.einsum("cd,cpe,dpf->ef", env, t_b.conj(), t_b, optimize=True)
        matrix[a + 1 :, a] = matrix[a, a + 1 :].conj()
    return matrix


def structure_factor(site_correlators: np.ndarray, lattice_doc: dict) -> np.ndarray:
    """Momentum distribution ``S_k = (1/L) sum_{j,j'} e^{ik(j-j')} <S+_j S-_j'>``.

    ``j`` runs over the long axis (rows); for strips the correlator is
    summed over the short (column) coordinates first. Evaluated on the
    discrete grid ``k = 2 pi m / L``.
    """
    kind = lattice_doc.get("kind", "chain")
    if kind == "chain":
        row_corr = site_correlators
        length = site_correlators.shape[0]
    else:
        lx, ly = int(lattice_doc["lx"]), int(lattice_doc["ly"])
        from .circuits import snake_index

        length = ly
        row_corr = np.zeros((ly, ly), dtype=np.complex128)
        for y in range(ly):
            for yp in range(ly):
                total = 0.0 + 0.0j
                for x in range(lx):
                    for xp in range(lx):
                        total += site_correlators[snake_index(x, y, ly), snake_index(xp, yp, ly)]
                row_corr[y, yp] = total
    ks = 2.0 * np.pi * np.arange(length) / length
    positions = np.arange(length)
    out = np.empty(length)
    for m, k in enumerate(ks):
        phase = np.exp(1j * k * positions)
        out[m] = float(np.real(phase.conj() @ row_corr @ phase) / length)
    return out


@dataclass
class DynamicsTrace:
    """Per-application observables of a repeated compiled-circuit evolution."""

    times: list[float] = field(default_factory=list)
    magnetization: list[list[float]] = field(default_factory=list)
    magnetization_reference: list[list[float]] = field(default_factory=list)
    structure_factors: list[list[float]] = field(default_factory=list)
    fidelity_vs_reference: list[float | None] = field(default_factory=list)
    total_z: list[float] = field(default_factory=list)
    total_z_reference: list[float | None] = field(default_factory=list)
    max_bond: list[int] = field(default_factory=list)


def cmd_dynamics(config: RunConfig, output_dir) -> dict:
    """Repeatedly apply a compiled circuit and track observables vs a TEBD reference."""
    out = Path(output_dir)
    spec = config.require_model()
    dyn = config.dynamics
    circuit, theta = _load_checkpoint(dyn.get("checkpoint"), expected_n=spec.n)

    ckpt_doc = read_json(dyn["checkpoint"])
    t_step = float(ckpt_doc.get("provenance", {}).get("t", dyn.get("t_per_application", 0.0)))
    if t_step <= 0:
        msg = "dynamics needs the compiled time step (checkpoint provenance or 't_per_application')"
        raise ConfigError(msg)
    total_time = float(dyn.get("total_time", 0.0))
    steps = total_time / t_step
    if abs(steps - round(steps)) > 1e-9:
        msg = f"total_time {total_time} is not an integer multiple of the compiled t {t_step}"
        raise ConfigError(msg)
    steps = int(round(steps))

    bits = dyn.get("initial_state")
    if not isinstance(bits, str) or len(bits) != spec.n:
        msg = f"dynamics needs 'initial_state' as an n={spec.n} bitstring"
        raise ConfigError(msg)
    chi_max = config.data.get("chi_max", 128)
    cutoff = float(config.data.get("cutoff", 1e-12))
    state = MatrixProductState.basis_state(bits, chi_max=chi_max, cutoff=cutoff)

    with_reference = bool(dyn.get("reference", True)) and spec.n <= int(
        dyn.get("reference_max_sites", 16)
    )
    reference_dt = float(dyn.get("reference_dt", 2e-3))
    reference = (
        MatrixProductState.basis_state(bits, chi_max=chi_max, cutoff=cutoff)
        if with_reference
        else None
    )
    want_sk = bool(dyn.get("structure_factor", False))

    trace = DynamicsTrace()

    def record(step_index: int, ref: MatrixProductState | None) -> None:
        trace.times.append(step_index * t_step)
        mags = [local_expectation(state, s, PAULI_Z).real for s in range(spec.n)]
        trace.magnetization.append(mags)
        trace.total_z.append(float(sum(mags)))
        trace.max_bond.append(state.max_bond)
        if ref is not None:
            ref_mags = [local_expectation(ref, s, PAULI_Z).real for s in range(spec.n)]
            trace.magnetization_reference.append(ref_mags)
            trace.total_z_reference.append(float(sum(ref_mags)))
            trace.fidelity_vs_reference.append(abs(overlap(ref, state)) ** 2)
        else:
            trace.magnetization_reference.append([])
            trace.total_z_reference.append(None)
            trace.fidelity_vs_reference.append(None)
        if want_sk:
            trace.structure_factors.append(
                structure_factor(splus_sminus_matrix(state), spec.lattice.to_document()).tolist()
            )

    record(0, reference)
    for step_index in range(1, steps + 1):
        apply_circuit(state, circuit, theta, chi_max=chi_max, cutoff=cutoff)
        if reference is not None:
            reference = tebd_evolve(
                reference, spec, t_step, dt=reference_dt, chi_max=chi_max, cutoff=cutoff
            )
        record(step_index, reference)

    rows = []
    for k in range(len(trace.times)):
        rows.append(
            [
                k,
                trace.times[k],
                trace.fidelity_vs_reference[k],
                trace.total_z[k],
                trace.total_z_reference[k],
                trace.max_bond[k],
            ]
        )
    write_csv(
        out / "trace.csv",
        ["step", "time", "fidelity_vs_reference", "total_z", "total_z_reference", "max_bond"],
        rows,
    )
    site_header = ["step"] + [f"site_{s}" for s in range(spec.n)]
    write_csv(
        out / "magnetization.csv",
        site_header,
        [[k] + trace.magnetization[k] for k in range(len(trace.times))],
    )
    if with_reference:
        write_csv(
            out / "magnetization_reference.csv",
            site_header,
            [[k] + trace.magnetization_reference[k] for k in range(len(trace.times))],
        )
    if want_sk:
        length = len(trace.structure_factors[0])
        write_csv(
            out / "structure_factor.csv",
            ["step"] + [f"k_{m}" for m in range(length)],
            [[k] + trace.structure_factors[k] for k in range(len(trace.times))],
        )

    summary = {
        "steps": steps,
        "t_per_application": t_step,
        "total_time": total_time,
        "final_fidelity_vs_reference": trace.fidelity_vs_reference[-1],
        "max_total_z_drift": float(
            max(abs(z - trace.total_z[0]) for z in trace.total_z)
        ),
        "max_total_z_drift_reference": (
            float(
                max(
                    abs(z - trace.total_z_reference[0])
                    for z in trace.total_z_reference
                    if z is not None
                )
            )
            if with_reference
            else None
        ),
        "max_bond": max(trace.max_bond),
        "config": config.raw,
    }
    write_json(out / "summary.json", summary)
    return summary


# ----- resource comparison -------------------------------------------------------


def cmd_resource_compare(config: RunConfig, output_dir) -> dict:
    """Evaluate a grid of circuits on one held-out set; CSV sorted by CNOTs."""
    out = Path(output_dir)
    spec = config.require_model()
    t = config.require_time()
    if not config.resource_grid:
        msg = "resource-compare needs a non-empty 'resource_grid'"
        raise ConfigError(msg)
    eval_ds = _dataset_from_config(config, "test")
    dense_u = None
    if spec.n <= 10:
        dense_u = dense_evolution_operator(spec, t)

    rows = []
    for entry in config.resource_grid:
        method = entry.get("method")
        if method == "vqc":
            circuit, theta = _load_checkpoint(entry.get("checkpoint"), expected_n=spec.n)
            label = entry.get("label", "vqc")
        elif method == "trotter":
            p = int(entry.get("p", 2))
            steps = int(entry.get("steps", 1))
            group_ids = [g for g, _ in folded_bond_groups(spec)]
            if "coefficient_file" in entry:
                scheme = TrotterScheme.from_file(entry["coefficient_file"], order=p)
            else:
                scheme = TrotterScheme.by_order(p, group_ids)
            circuit = trotter_circuit(spec, t / steps, scheme, steps=steps)
            theta = None
            label = entry.get("label", f"trotter-p{p}-s{steps}")
        elif method == "identity":
            circuit = ParameterizedCircuit(spec.n, [], ti=False, frozen=True)
            theta = None
            label = entry.get("label", "identity")
        else:
            msg = f"unknown resource-grid method {method!r}"
            raise ConfigError(msg)

        report = count_resources(circuit)
        risk = empirical_risk(
            eval_ds,
            circuit,
            theta,
            chi_max=config.data.get("chi_max", 128),
            cutoff=float(config.data.get("cutoff", 1e-12)),
        )
        infidelity = None
        if dense_u is not None:
            from .circuits import circuit_to_dense

            infidelity = unitary_infidelity(dense_u, circuit_to_dense(circuit, theta))
        rows.append(
            [
                label,
                method,
                report.cnot_total,
                report.su4,
                report.nn_xx,
                report.nnn_xx,
                report.swaps,
                risk,
                infidelity,
            ]
        )

    rows.sort(key=lambda r: (r[2], r[0]))
    write_csv(
        out / "comparison.csv",
        ["label", "method", "cnots", "su4", "nn_xx", "nnn_xx", "swaps", "risk", "exact_infidelity"],
        rows,
    )
    summary = {"rows": len(rows), "config": config.raw}
    write_json(out / "summary.json", summary)
    return summary


# ----- verification --------------------------------------------------------------


def cmd_verify(config: RunConfig, output_dir) -> dict:
    """Dense verification of a checkpoint: infidelity, identity, risk bounds."""
    out = Path(output_dir)
    spec = config.require_model()
    t = config.require_time()
    ver = config.verify
    if spec.n > 12:
        msg = f"verification uses dense operators; n={spec.n} exceeds the n<=12 guard"
        raise DenseSizeError(msg)
    circuit, theta = _load_checkpoint(ver.get("checkpoint"), expected_n=spec.n)

    from .circuits import circuit_to_dense

    dense_u = dense_evolution_operator(spec, t)
    dense_v = circuit_to_dense(circuit, theta)
    infidelity = unitary_infidelity(dense_u, dense_v)
    avg_fid = haar_average_fidelity(dense_u, dense_v)
    dim = dense_u.shape[0]
    identity_residual = abs(infidelity - (dim + 1) / dim * (1.0 - avg_fid))

    bound = prop1_bound_check(
        dense_u,
        circuit,
        theta,
        samples=int(ver.get("samples", 2000)),
        seed=int(ver.get("seed", 0)),
        sigmas=float(ver.get("sigmas", 3.0)),
    )

    report = {
        "n": spec.n,
        "t": t,
        "unitary_infidelity": infidelity,
        "haar_average_fidelity": avg_fid,
        "identity_residual": identity_residual,
        "bound_check": bound.to_document(),
        "config": config.raw,
    }
    if ver.get("first_moment_samples"):
        ens = _ensemble_from_config(config.data, int(config.data.get("test_seed", 0)))
        report["first_moment_deviation"] = first_moment_test(
            ens, spec.n, int(ver["first_moment_samples"])
        )
    lc = ver.get("light_cone")
    if lc:
        report["light_cone"] = u1_light_cone_test(
            spec.n,
            int(lc.get("depth", 1)),
            int(lc.get("samples", 100)),
            seed=int(lc.get("seed", 0)),
        )
    write_json(out / "report.json", report)
    return report


COMMANDS = {
    "data-gen": cmd_data_gen,
    "compile": cmd_compile,
    "dynamics": cmd_dynamics,
    "resource-compare": cmd_resource_compare,
    "verify": cmd_verify,
}


def run_experiment(config_path, kind: str, output_dir) -> dict:
    """Load a config, check its kind, and dispatch to the experiment runner."""
    config = RunConfig.load(config_path)
    if config.kind != kind:
        msg = f"config kind is {config.kind!r} but the command requested {kind!r}"
        raise ConfigError(msg)
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    return COMMANDS[kind](config, output_dir)
