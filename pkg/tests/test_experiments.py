"""Tests for the experiment front-end: configs, commands, file formats."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from vqcompile.errors import ConfigError
from vqcompile.experiments import (
    RunConfig,
    cmd_compile,
    cmd_data_gen,
    cmd_dynamics,
    cmd_resource_compare,
    cmd_verify,
    run_experiment,
    splus_sminus_matrix,
    structure_factor,
)
from vqcompile.mps import MatrixProductState
from vqcompile.serialize import dumps_json, read_json, write_json


def base_model(n=4):
    return {"family": "heisenberg", "lattice": {"kind": "chain", "n": n}, "h": 0.0}


def compile_config(n=4, tau=2, steps=25, **overrides):
    doc = {
        "kind": "compile",
        "model": base_model(n),
        "t": 0.1,
        "ansatz": {"tau": tau, "ti": True},
        "data": {"n_train": 3, "n_test": 4, "dt": 0.01, "train_seed": 1, "test_seed": 2},
        "optimizer": {"max_steps": steps, "test_cadence": 10},
        "warm_start": {"strategy": "none"},
    }
    doc.update(overrides)
    return doc


class TestRunConfig:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_document({"kind": "compile", "bogus": 1})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_document({"kind": "train"})

    def test_unknown_optimizer_key_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_document({"kind": "compile", "optimizer": {"learning_rate": 0.1}})

    def test_kind_mismatch_at_dispatch(self, tmp_path):
        path = tmp_path / "c.json"
        write_json(path, compile_config())
        with pytest.raises(ConfigError):
            run_experiment(path, "verify", tmp_path / "out")


class TestDataGen:
    def test_writes_datasets(self, tmp_path):
        config = RunConfig.from_document(
            {
                "kind": "data-gen",
                "model": base_model(),
                "t": 0.05,
                "data": {"n_train": 2, "n_test": 3, "dt": 0.01, "train_seed": 1, "test_seed": 2},
            }
        )
        summary = cmd_data_gen(config, tmp_path)
        assert (tmp_path / "train.json").exists()
        assert (tmp_path / "test.json").exists()
        assert summary["train_size"] == 2
        assert summary["test_size"] == 3
        assert summary["max_discarded_train"] <= 1e-6

    def test_t_zero_targets_equal_inputs(self, tmp_path):
        config = RunConfig.from_document(
            {
                "kind": "data-gen",
                "model": base_model(),
                "t": 0.0,
                "data": {"n_train": 2, "n_test": 2, "dt": 0.01, "train_seed": 3, "test_seed": 4},
            }
        )
        cmd_data_gen(config, tmp_path)
        from vqcompile.mps import overlap
        from vqcompile.training import TrainingDataset

        ds = TrainingDataset.load(tmp_path / "train.json")
        for inp, tgt in zip(ds.inputs, ds.targets):
            assert abs(overlap(inp, tgt)) == pytest.approx(1.0, abs=1e-12)

    def test_byte_identical_rerun(self, tmp_path):
        config = RunConfig.from_document(
            {
                "kind": "data-gen",
                "model": base_model(),
                "t": 0.05,
                "data": {"n_train": 2, "n_test": 2, "dt": 0.01, "train_seed": 5, "test_seed": 6},
            }
        )
        cmd_data_gen(config, tmp_path / "a")
        cmd_data_gen(config, tmp_path / "b")
        for name in ("train.json", "test.json", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestCompile:
    def test_outputs_and_summary(self, tmp_path):
        config = RunConfig.from_document(compile_config())
        summary = cmd_compile(config, tmp_path)
        assert (tmp_path / "checkpoint.json").exists()
        assert (tmp_path / "history.csv").exists()
        assert summary["final_train_cost"] < 0.1
        assert summary["resources"]["cnot_total"] == 3 * (2 + 1)  # n=4 tau=2: 3 gates
        header = (tmp_path / "history.csv").read_text().splitlines()[0]
        assert header == "step,train_cost,test_cost,grad_norm"

    def test_exact_init_short_circuit(self, tmp_path):
        doc = compile_config(tau=3)
        doc["warm_start"] = {"strategy": "trotter", "p": 2}
        doc["data"]["dt"] = 1e-3
        doc["t"] = 1e-3
        config = RunConfig.from_document(doc)
        summary = cmd_compile(config, tmp_path)
        assert summary["final_train_cost"] <= 1e-8
        assert summary["steps"] == 0

    def test_checkpoint_loads_and_matches_n(self, tmp_path):
        config = RunConfig.from_document(compile_config())
        cmd_compile(config, tmp_path)
        from vqcompile.circuits import ParameterizedCircuit

        circuit, theta = ParameterizedCircuit.load(tmp_path / "checkpoint.json")
        assert circuit.n == 4
        assert len(theta) == circuit.parameter_count


class TestStructureFactor:
    def test_vacuum_zero(self):
        state = MatrixProductState.basis_state("0000")
        sk = structure_factor(splus_sminus_matrix(state), {"kind": "chain"})
        assert np.allclose(sk, 0.0, atol=1e-14)

    def test_single_occupied_site_flat(self):
        state = MatrixProductState.basis_state("0100")
        sk = structure_factor(splus_sminus_matrix(state), {"kind": "chain"})
        assert np.allclose(sk, 1 / 4, atol=1e-12)

    def test_plane_wave_peak(self):
        # one-particle momentum eigenstate: c_j = e^{iqj}/sqrt(L) -> S_k peaks at q
        length = 8
        m_index = 3
        q = 2 * np.pi * m_index / length
        corr = np.zeros((length, length), dtype=complex)
        amps = np.exp(1j * q * np.arange(length)) / np.sqrt(length)
        for j in range(length):
            for jp in range(length):
                corr[j, jp] = np.conj(amps[j]) * amps[jp]
        sk = structure_factor(corr, {"kind": "chain"})
        assert sk[m_index] == pytest.approx(1.0, abs=1e-12)
        others = [sk[m] for m in range(length) if m != m_index]
        assert np.allclose(others, 0.0, atol=1e-12)

    def test_sum_rule_total_occupation(self):
        # (1/L) sum_k S_k = mean occupation
        state = MatrixProductState.basis_state("0110")
        mat = splus_sminus_matrix(state)
        sk = structure_factor(mat, {"kind": "chain"})
        assert np.mean(sk) == pytest.approx(2 / 4, abs=1e-12)

    def test_correlator_matrix_hermitian(self):
        state = MatrixProductState.basis_state("0101")
        state.apply_two_site_gate(1, np.array(
            [[1, 0, 0, 0], [0, 0.6, 0.8, 0], [0, -0.8, 0.6, 0], [0, 0, 0, 1]], dtype=complex))
        mat = splus_sminus_matrix(state)
        assert np.allclose(mat, mat.conj().T, atol=1e-12)


class TestDynamics:
    @pytest.fixture(scope="class")
    def checkpoint(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("ckpt")
        config = RunConfig.from_document(compile_config(n=4, tau=2, steps=120))
        cmd_compile(config, out)
        return out / "checkpoint.json"

    def test_single_step_matches_apply(self, checkpoint, tmp_path):
        doc = {
            "kind": "dynamics",
            "model": base_model(),
            "data": {"chi_max": 64, "cutoff": 1e-12},
            "dynamics": {
                "checkpoint": str(checkpoint),
                "initial_state": "0110",
                "total_time": 0.1,
                "reference_dt": 0.002,
            },
        }
        summary = cmd_dynamics(RunConfig.from_document(doc), tmp_path)
        assert summary["steps"] == 1
        from vqcompile.circuits import ParameterizedCircuit, apply_circuit
        from vqcompile.mps import local_expectation
        from vqcompile.tensorops import PAULI_Z

        circuit, theta = ParameterizedCircuit.load(checkpoint)
        state = MatrixProductState.basis_state("0110")
        apply_circuit(state, circuit, theta)
        rows = (tmp_path / "magnetization.csv").read_text().splitlines()
        last = [float(x) for x in rows[-1].split(",")[1:]]
        expected = [local_expectation(state, s, PAULI_Z).real for s in range(4)]
        assert np.allclose(last, expected, atol=1e-12)

    def test_total_time_multiple_enforced(self, checkpoint, tmp_path):
        doc = {
            "kind": "dynamics",
            "model": base_model(),
            "dynamics": {
                "checkpoint": str(checkpoint),
                "initial_state": "0110",
                "total_time": 0.25,
            },
        }
        with pytest.raises(ConfigError):
            cmd_dynamics(RunConfig.from_document(doc), tmp_path)

    def test_reference_conserves_total_z(self, checkpoint, tmp_path):
        doc = {
            "kind": "dynamics",
            "model": base_model(),
            "dynamics": {
                "checkpoint": str(checkpoint),
                "initial_state": "0110",
                "total_time": 0.5,
                "reference_dt": 0.005,
                "structure_factor": True,
            },
        }
        summary = cmd_dynamics(RunConfig.from_document(doc), tmp_path)
        assert summary["max_total_z_drift_reference"] < 1e-6
        assert (tmp_path / "structure_factor.csv").exists()
        assert summary["final_fidelity_vs_reference"] > 0.9


class TestResourceCompare:
    def test_grid_sorted_and_identity_baseline(self, tmp_path):
        ckpt_dir = tmp_path / "ck"
        config = RunConfig.from_document(compile_config(n=4, tau=2, steps=80))
        cmd_compile(config, ckpt_dir)
        doc = {
            "kind": "resource-compare",
            "model": base_model(),
            "t": 0.1,
            "data": {"n_test": 6, "dt": 0.01, "test_seed": 9},
            "resource_grid": [
                {"method": "trotter", "p": 2, "steps": 2},
                {"method": "vqc", "checkpoint": str(ckpt_dir / "checkpoint.json")},
                {"method": "identity"},
                {"method": "trotter", "p": 1, "steps": 1},
            ],
        }
        cmd_resource_compare(RunConfig.from_document(doc), tmp_path)
        lines = (tmp_path / "comparison.csv").read_text().splitlines()
        assert lines[0].startswith("label,method,cnots")
        cnots = [int(line.split(",")[2]) for line in lines[1:]]
        assert cnots == sorted(cnots)
        ident = [line for line in lines if line.startswith("identity")][0]
        risk = float(ident.split(",")[7])
        infid = float(ident.split(",")[8])
        assert risk > 0.001  # t > 0: identity is measurably wrong
        assert infid > 0.001

    def test_more_trotter_steps_lower_risk(self, tmp_path):
        doc = {
            "kind": "resource-compare",
            "model": base_model(),
            "t": 0.2,
            "data": {"n_test": 6, "dt": 0.005, "test_seed": 10},
            "resource_grid": [
                {"method": "trotter", "p": 2, "steps": s, "label": f"s{s}"} for s in (1, 2, 4)
            ],
        }
        cmd_resource_compare(RunConfig.from_document(doc), tmp_path)
        lines = (tmp_path / "comparison.csv").read_text().splitlines()[1:]
        risks = {line.split(",")[0]: float(line.split(",")[7]) for line in lines}
        assert risks["s1"] > risks["s2"] > risks["s4"]


class TestVerifyCmd:
    def test_report_contents(self, tmp_path):
        ckpt_dir = tmp_path / "ck"
        cmd_compile(RunConfig.from_document(compile_config(n=4, tau=2, steps=80)), ckpt_dir)
        doc = {
            "kind": "verify",
            "model": base_model(),
            "t": 0.1,
            "verify": {
                "checkpoint": str(ckpt_dir / "checkpoint.json"),
                "samples": 500,
                "seed": 3,
                "light_cone": {"depth": 1, "samples": 10},
            },
        }
        report = cmd_verify(RunConfig.from_document(doc), tmp_path)
        assert report["identity_residual"] < 1e-12
        assert report["bound_check"]["passed"]
        assert "light_cone" in report
        on_disk = read_json(tmp_path / "report.json")
        assert on_disk["unitary_infidelity"] == report["unitary_infidelity"]

    def test_missing_checkpoint(self, tmp_path):
        doc = {
            "kind": "verify",
            "model": base_model(),
            "t": 0.1,
            "verify": {"checkpoint": str(tmp_path / "nope.json")},
        }
        with pytest.raises(ConfigError):
            cmd_verify(RunConfig.from_document(doc), tmp_path)


class TestCli:
    def test_exit_codes(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"kind": "compile"}))
        proc = subprocess.run(
            [sys.executable, "-m", "vqcompile", "compile", "--config", str(bad),
             "--output-dir", str(tmp_path / "out")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2
        assert "config error" in proc.stderr

    def test_full_cli_roundtrip(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        write_json(cfg, compile_config(steps=10))
        proc = subprocess.run(
            [sys.executable, "-m", "vqcompile", "compile", "--config", str(cfg),
             "--output-dir", str(tmp_path / "out")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "out" / "summary.json").exists()


class TestSerializationHelpers:
    def test_float_17g_round_trip(self):
        values = [0.1, 1 / 3, 1e-300, 123456789.123456789, 2**-52]
        text = dumps_json({"v": values})
        back = json.loads(text)
        assert back["v"] == values

    def test_sorted_keys(self):
        assert dumps_json({"b": 1, "a": 2}).index('"a"') < dumps_json({"b": 1, "a": 2}).index('"b"')

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError):
            dumps_json({"v": float("nan")})
