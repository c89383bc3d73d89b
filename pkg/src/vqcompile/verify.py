"""Dense small-n oracles and statistical certification of compiled circuits.

The quantities here connect three views of compilation quality: the unitary
infidelity ``1 - |Tr(U^dag V)|^2 / N^2`` (phase-invariant), the average
fidelity over Haar-random states, and Monte-Carlo risks under product-state
or charge-conserving ensembles. The two-sided equivalence bound

    (1/2) R_Haar <= (N / (N + 1)) R_product <= R_Haar

is a theorem for locally scrambled input ensembles; a statistically
significant violation indicates an implementation bug, so the bound check
doubles as an end-to-end self-test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .circuits import ParameterizedCircuit, circuit_to_dense
from .errors import DenseSizeError, NonUnitaryError, ShapeError
from .mps import EnsembleSpec, u1_rqc_state
from .rng import RandomStream
from .tensorops import PAULI_Z, is_unitary


def _check_unitary_pair(u: NDArray, v: NDArray, tol: float = 1e-8) -> int:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        msg = f"expected equal square matrices, got {u.shape} and {v.shape}"
        raise ShapeError(msg)
    for name, mat in (("u", u), ("v", v)):
        if not is_unitary(mat, tol=tol):
            msg = f"matrix {name} is not unitary to {tol:g}"
            raise NonUnitaryError(msg)
    return u.shape[0]


def unitary_infidelity(u: NDArray, v: NDArray) -> float:
    """Global-phase-invariant distance ``1 - |Tr(u^dag v)|^2 / N^2`` in [0, 1]."""
    dim = _check_unitary_pair(u, v)
    overlap_trace = np.trace(u.conj().T @ v)
    return float(max(1.0 - (abs(overlap_trace) / dim) ** 2, 0.0))


def haar_average_fidelity(u: NDArray, v: NDArray) -> float:
    """Average state fidelity ``(N + |Tr(u^dag v)|^2) / (N (N + 1))`` over Haar states.

    Satisfies ``infidelity = ((N + 1) / N) * (1 - average_fidelity)``
    exactly, which the verification suite checks to 1e-12.
    """
    dim = _check_unitary_pair(u, v)
    overlap_trace = np.trace(u.conj().T @ v)
    return float((dim + abs(overlap_trace) ** 2) / (dim * (dim + 1)))


def _dense_sample(ensemble: EnsembleSpec, n: int, index: int) -> NDArray[np.complex128]:
    """One dense ensemble state; Haar states are normalized complex Gaussians."""
    stream = RandomStream(ensemble.seed).child(index)
    if ensemble.kind == "haar":
        return stream.haar_state(2**n)
    if ensemble.kind == "random-product":
        vec = np.array([1.0 + 0.0j])
        for _ in range(n):
            vec = np.kron(vec, stream.haar_qubit_state())
        return vec
    if ensemble.kind == "computational-basis":
        if ensemble.basis_bits is None or len(ensemble.basis_bits) != n:
            msg = f"computational-basis ensemble needs an n={n} bitstring"
            raise ShapeError(msg)
        vec = np.zeros(2**n, dtype=np.complex128)
        vec[int(ensemble.basis_bits, 2)] = 1.0
        return vec
    if ensemble.kind == "u1-rqc":
        if ensemble.rqc_charge is None:
            msg = "u1-rqc ensemble needs rqc_charge"
            raise ShapeError(msg)
        state = u1_rqc_state(n, ensemble.rqc_depth, ensemble.rqc_charge, stream)
        return state.to_statevector()
    msg = f"unsupported ensemble kind {ensemble.kind!r}"
    raise ShapeError(msg)


def expected_risk_mc(
    u_dense: NDArray,
    circuit: ParameterizedCircuit,
    theta,
    ensemble: EnsembleSpec,
    samples: int,
    max_sites: int = 12,
) -> tuple[float, float]:
    """Monte-Carlo estimate of ``E[1 - |<psi| u^dag V |psi>|^2]`` under ``ensemble``.

    Returns (mean, standard error); reproducible from the ensemble seed.
    """
    if circuit.n > max_sites:
        msg = f"dense risk estimation capped at {max_sites} sites, got {circuit.n}"
        raise DenseSizeError(msg)
    if samples < 1:
        msg = f"need at least one sample, got {samples}"
        raise ShapeError(msg)
    v_dense = circuit_to_dense(circuit, theta, max_sites=max_sites)
    mixed = np.asarray(u_dense).conj().T @ v_dense
    values = np.empty(samples)
    for index in range(samples):
        psi = _dense_sample(ensemble, circuit.n, index)
        amp = np.vdot(psi, mixed @ psi)
        values[index] = 1.0 - abs(amp) ** 2
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr


@dataclass
class BoundCheckReport:
    """Outcome of the two-sided product-vs-Haar risk bound check."""

    risk_product: float
    risk_product_stderr: float
    risk_haar: float
    samples: int
    sigmas: float
    lower_margin: float  # (N/(N+1)) R_Q - R_Haar/2, must be >= -slack
    upper_margin: float  # R_Haar - (N/(N+1)) R_Q, must be >= -slack
    passed: bool

    def to_document(self) -> dict:
        return {
            "risk_product": self.risk_product,
            "risk_product_stderr": self.risk_product_stderr,
            "risk_haar": self.risk_haar,
            "samples": self.samples,
            "sigmas": self.sigmas,
            "lower_margin": self.lower_margin,
            "upper_margin": self.upper_margin,
            "passed": self.passed,
        }


def prop1_bound_check(
    u_dense: NDArray,
    circuit: ParameterizedCircuit,
    theta,
    samples: int = 2000,
    seed: int = 0,
    sigmas: float = 3.0,
    max_sites: int = 12,
) -> BoundCheckReport:
    """Verify ``R_Haar / 2 <= (N/(N+1)) R_product <= R_Haar`` statistically.

    The Haar risk is exact (trace formula); the product risk is estimated
    from ``samples`` draws, and both inequalities are allowed ``sigmas``
    standard errors of slack. The bound is a theorem, so a failure at high
    significance means a bug, not an unlucky instance.
    """
    v_dense = circuit_to_dense(circuit, theta, max_sites=max_sites)
    dim = _check_unitary_pair(np.asarray(u_dense), v_dense)
    risk_haar = 1.0 - haar_average_fidelity(u_dense, v_dense)
    ensemble = EnsembleSpec(kind="random-product", seed=seed)
    risk_q, stderr = expected_risk_mc(
        u_dense, circuit, theta, ensemble, samples, max_sites=max_sites
    )
    scale = dim / (dim + 1.0)
    slack = sigmas * scale * stderr
    lower_margin = scale * risk_q - 0.5 * risk_haar
    upper_margin = risk_haar - scale * risk_q
    passed = bool(lower_margin >= -slack and upper_margin >= -slack)
    return BoundCheckReport(
        risk_product=risk_q,
        risk_product_stderr=stderr,
        risk_haar=risk_haar,
        samples=samples,
        sigmas=sigmas,
        lower_margin=lower_margin,
        upper_margin=upper_margin,
        passed=passed,
    )


def first_moment_test(
    ensemble: EnsembleSpec, n: int, samples: int, max_sites: int = 10
) -> float:
    """Max entrywise deviation of the ensemble's first moment from I / 2^n.

    Locally scrambled ensembles converge to zero at the Monte-Carlo rate;
    charge-restricted ensembles plateau at their support deficit.
    """
    if n > max_sites:
        msg = f"dense moment test capped at {max_sites} sites, got {n}"
        raise DenseSizeError(msg)
    dim = 2**n
    accum = np.zeros((dim, dim), dtype=np.complex128)
    for index in range(samples):
        psi = _dense_sample(ensemble, n, index)
        accum += np.outer(psi, psi.conj())
    accum /= samples
    return float(np.max(np.abs(accum - np.eye(dim) / dim)))


def u1_light_cone_test(
    n: int, depth: int, samples: int, seed: int = 0
) -> dict:
    """Charge-spreading profile of shallow charge-conserving random circuits.

    Averages per-site Z over circuits applied to |100...0>. Sites beyond the
    light cone of the excitation keep Z = +1 exactly, whereas a globally
    scrambling ensemble would give ``1 - 2/n`` everywhere; the per-site gap
    to that reference quantifies the obstruction at depth < n.
    """
    if not 0 < depth < n:
        msg = f"light-cone profile needs 0 < depth < n, got depth={depth}, n={n}"
        raise ShapeError(msg)
    stream = RandomStream(seed)
    profile = np.zeros(n)
    for index in range(samples):
        state = u1_rqc_state(n, depth, 1, stream.child(index))
        work = state.copy()
        work.move_center(0)
        for site in range(n):
            work.move_center(site)
            t = work.tensors[site]
            profile[site] += float(
                np.real(np.einsum("lpr,pq,lqr->", t.conj(), PAULI_Z, t, optimize=True))
            )
    profile /= samples
    scrambled = 1.0 - 2.0 / n
    return {
        "per_site_z": profile.tolist(),
        "scrambled_reference": scrambled,
        "gap": (profile - scrambled).tolist(),
        "samples": samples,
        "depth": depth,
        "seed": seed,
    }
