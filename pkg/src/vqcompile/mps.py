"""Matrix-product states: canonical forms, gate application, and ensembles.

Site tensors are rank-3 arrays with index order ``(left bond, physical,
right bond)`` and physical dimension 2. Boundary bonds have extent 1. The
orthogonality center, when set at site ``c``, means every tensor left of
``c`` is left-isometric and every tensor right of ``c`` is right-isometric.

Truncation is dual-criterion: a bond-dimension cap ``chi_max`` plus a
relative squared-weight ``cutoff``. Every truncating operation renormalizes
the state and accumulates the relative discarded weight, which upper-bounds
the squared-fidelity loss against the untruncated state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import BondDimensionError, DenseSizeError, ShapeError
from .rng import RandomStream
from .serialize import array_to_b64, b64_to_array, read_json, write_json
from .tensorops import is_unitary, svd_truncated

DEFAULT_CHI_MAX = 128
DEFAULT_CUTOFF = 1e-12
DEFAULT_HARD_CAP = 4096

SWAP_GATE = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=np.complex128,
)

MPS_SCHEMA = "mps/1"


class MatrixProductState:
    """A finite open-boundary MPS over qubits.

    Attributes:
        tensors: Site tensors, index order (left, physical, right).
        chi_max: Bond-dimension cap applied during truncating operations
            (``None`` disables the cap; the hard cap still applies).
        cutoff: Relative squared-weight truncation threshold.
        hard_cap: Bond dimension beyond which gate application raises
            :class:`BondDimensionError` instead of truncating silently.
        center: Orthogonality center index, or ``None`` when unknown.
        discarded_weight: Cumulative relative squared weight dropped by
            truncations since construction.
        is_normalized: Whether the state is known to have norm 1.
    """

    def __init__(
        self,
        tensors: list[NDArray[np.complex128]],
        chi_max: int | None = DEFAULT_CHI_MAX,
        cutoff: float = DEFAULT_CUTOFF,
        hard_cap: int = DEFAULT_HARD_CAP,
        center: int | None = None,
        is_normalized: bool = False,
    ) -> None:
        if not tensors:
            msg = "an MPS needs at least one site"
            raise ShapeError(msg)
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            msg = "boundary bonds must have extent 1"
            raise ShapeError(msg)
        for k in range(len(tensors) - 1):
            if tensors[k].shape[2] != tensors[k + 1].shape[0]:
                msg = (
                    f"bond mismatch between sites {k} and {k + 1}: "
                    f"{tensors[k].shape[2]} vs {tensors[k + 1].shape[0]}"
                )
                raise ShapeError(msg)
        self.tensors = [np.asarray(t, dtype=np.complex128) for t in tensors]
        self.chi_max = chi_max
        self.cutoff = float(cutoff)
        self.hard_cap = int(hard_cap)
        self.center = center
        self.discarded_weight = 0.0
        self.is_normalized = is_normalized

    # ----- constructors ---------------------------------------------------

    @classmethod
    def product_state(
        cls,
        site_vectors: list[NDArray[np.complex128]],
        chi_max: int | None = DEFAULT_CHI_MAX,
        cutoff: float = DEFAULT_CUTOFF,
    ) -> MatrixProductState:
        """Build a bond-dimension-1 state from per-site 2-vectors (normalized)."""
        tensors = []
        for vec in site_vectors:
            vec = np.asarray(vec, dtype=np.complex128).reshape(2)
            norm = np.linalg.norm(vec)
            if norm == 0:
                msg = "site vector must be nonzero"
                raise ShapeError(msg)
            tensors.append((vec / norm).reshape(1, 2, 1))
        state = cls(tensors, chi_max=chi_max, cutoff=cutoff, center=0, is_normalized=True)
        return state

    @classmethod
    def basis_state(
        cls,
        bits: str | list[int],
        chi_max: int | None = DEFAULT_CHI_MAX,
        cutoff: float = DEFAULT_CUTOFF,
    ) -> MatrixProductState:
        """Computational basis state |b_0 b_1 ... b_{n-1}>."""
        vectors = []
        for bit in bits:
            b = int(bit)
            if b not in (0, 1):
                msg = f"bits must be 0 or 1, got {bit!r}"
                raise ShapeError(msg)
            vec = np.zeros(2, dtype=np.complex128)
            vec[b] = 1.0
            vectors.append(vec)
        return cls.product_state(vectors, chi_max=chi_max, cutoff=cutoff)

    # ----- basic structure ------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def bond_dimensions(self) -> list[int]:
        """Internal bond extents (length n - 1)."""
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dimensions, default=1)

    def copy(self) -> MatrixProductState:
        clone = MatrixProductState(
            [t.copy() for t in self.tensors],
            chi_max=self.chi_max,
            cutoff=self.cutoff,
            hard_cap=self.hard_cap,
            center=self.center,
            is_normalized=self.is_normalized,
        )
        clone.discarded_weight = self.discarded_weight
        return clone

    # ----- canonical form -------------------------------------------------

    def _shift_right(self, site: int) -> None:
        """QR-push the center from ``site`` to ``site + 1``."""
        t = self.tensors[site]
        left, phys, right = t.shape
        q, r = np.linalg.qr(t.reshape(left * phys, right))
        self.tensors[site] = q.reshape(left, phys, q.shape[1])
        nxt = self.tensors[site + 1]
        self.tensors[site + 1] = np.tensordot(r, nxt, axes=(1, 0))

    def _shift_left(self, site: int) -> None:
        """QR-push the center from ``site`` to ``site - 1``."""
        t = self.tensors[site]
        left, phys, right = t.shape
        q, r = np.linalg.qr(t.reshape(left, phys * right).conj().T)
        k = q.shape[1]
        self.tensors[site] = q.conj().T.reshape(k, phys, right)
        prev = self.tensors[site - 1]
        self.tensors[site - 1] = np.tensordot(prev, r.conj().T, axes=(2, 0))

    def canonicalize(self, center: int = 0) -> None:
        """Bring the state into mixed-canonical form around ``center``."""
        if not 0 <= center < self.n:
            msg = f"center {center} out of range for n={self.n}"
            raise ShapeError(msg)
        for site in range(center):
            self._shift_right(site)
        for site in range(self.n - 1, center, -1):
            self._shift_left(site)
        self.center = center

    def move_center(self, site: int) -> None:
        """Move an existing orthogonality center to ``site``."""
        if self.center is None:
            self.canonicalize(site)
            return
        while self.center < site:
            self._shift_right(self.center)
            self.center += 1
        while self.center > site:
            self._shift_left(self.center)
            self.center -= 1

    def norm(self) -> float:
        return float(np.sqrt(np.real(overlap(self, self))))

    def normalize(self) -> None:
        if self.center is None:
            self.canonicalize(0)
        t = self.tensors[self.center]
        norm = np.linalg.norm(t)
        if norm == 0:
            msg = "cannot normalize the zero state"
            raise ShapeError(msg)
        self.tensors[self.center] = t / norm
        self.is_normalized = True

    # ----- gate application -------------------------------------------------

    def apply_two_site_gate(
        self,
        site: int,
        gate: NDArray[np.complex128],
        chi_max: int | None = None,
        cutoff: float | None = None,
        center_after: str = "right",
    ) -> MatrixProductState:
        """Apply a 4x4 gate to sites (site, site + 1), truncating the new bond.

        The gate's row index is the output pair (a_site, a_site+1) with the
        left site most significant; columns are the input pair. Non-unitary
        gates are admitted with a warning (useful for testing), since the
        renormalization step repairs the norm.

        Args:
            site: Left site of the pair, 0 <= site < n - 1.
            gate: 4x4 matrix.
            chi_max: Per-call override of the state's bond cap.
            cutoff: Per-call override of the state's truncation cutoff.
            center_after: Leave the center at the "left" or "right" site.

        Returns:
            self (mutated in place), for chaining.

        Raises:
            BondDimensionError: If the kept rank would exceed the hard cap.
        """
        if not 0 <= site < self.n - 1:
            msg = f"gate site {site} out of range for n={self.n}"
            raise ShapeError(msg)
        gate = np.asarray(gate, dtype=np.complex128)
        if gate.shape != (4, 4):
            msg = f"two-site gate must be 4x4, got {gate.shape}"
            raise ShapeError(msg)
        if not is_unitary(gate, tol=1e-10):
            warnings.warn("applying a non-unitary two-site gate", stacklevel=2)

        if self.center is None:
            self.canonicalize(site)
        elif self.center < site:
            self.move_center(site)
        elif self.center > site + 1:
            self.move_center(site + 1)

        cap = self.chi_max if chi_max is None else chi_max
        eps = self.cutoff if cutoff is None else cutoff

        left_t = self.tensors[site]
        right_t = self.tensors[site + 1]
        chi_l = left_t.shape[0]
        chi_r = right_t.shape[2]
        theta = np.tensordot(left_t, right_t, axes=(2, 0))  # (l, p1, p2, r)
        gate4 = gate.reshape(2, 2, 2, 2)
        theta = np.einsum("abcd,lcdr->labr", gate4, theta)
        result = svd_truncated(theta.reshape(chi_l * 2, 2 * chi_r), max_rank=cap, cutoff=eps)
        if result.rank > self.hard_cap:
            msg = f"bond dimension {result.rank} exceeds hard cap {self.hard_cap}"
            raise BondDimensionError(msg)

        total = float(np.sum(result.singular_values**2) + result.discarded_weight)
        if total > 0:
            self.discarded_weight += result.discarded_weight / total
        sing = result.singular_values / np.linalg.norm(result.singular_values)
        if center_after == "right":
            self.tensors[site] = result.left.reshape(chi_l, 2, result.rank)
            self.tensors[site + 1] = (sing[:, None] * result.right).reshape(result.rank, 2, chi_r)
            self.center = site + 1
        elif center_after == "left":
            self.tensors[site] = (result.left * sing).reshape(chi_l, 2, result.rank)
            self.tensors[site + 1] = result.right.reshape(result.rank, 2, chi_r)
            self.center = site
        else:
            msg = f"center_after must be 'left' or 'right', got {center_after!r}"
            raise ShapeError(msg)
        self.is_normalized = True
        return self

    def apply_gate_long_range(
        self,
        site_i: int,
        site_j: int,
        gate: NDArray[np.complex128],
        chi_max: int | None = None,
        cutoff: float | None = None,
    ) -> MatrixProductState:
        """Apply a 4x4 gate to the (generally distant) pair (site_i, site_j).

        Site ``site_j`` is moved adjacent to ``site_i`` by a SWAP chain, the
        gate is applied at ``(site_i, site_i + 1)``, and the chain is undone.
        For ``site_j == site_i + 1`` this is a plain adjacent application.
        The gate's row/column index order puts ``site_i`` most significant.
        """
        if not 0 <= site_i < site_j < self.n:
            msg = f"need 0 <= i < j < n, got ({site_i}, {site_j}) with n={self.n}"
            raise ShapeError(msg)
        if site_j == site_i + 1:
            return self.apply_two_site_gate(site_i, gate, chi_max=chi_max, cutoff=cutoff)
        for pos in range(site_j - 1, site_i, -1):
            self.apply_two_site_gate(pos, SWAP_GATE, chi_max=chi_max, cutoff=cutoff, center_after="left")
        self.apply_two_site_gate(site_i, gate, chi_max=chi_max, cutoff=cutoff)
        for pos in range(site_i + 1, site_j):
            self.apply_two_site_gate(pos, SWAP_GATE, chi_max=chi_max, cutoff=cutoff, center_after="right")
        return self

    # ----- dense view -------------------------------------------------------

    def to_statevector(self, max_sites: int = 20) -> NDArray[np.complex128]:
        """Contract to a dense 2^n vector (site 0 most significant)."""
        if self.n > max_sites:
            msg = f"refusing dense contraction of {self.n} sites (cap {max_sites})"
            raise DenseSizeError(msg)
        vec = np.ones((1, 1), dtype=np.complex128)
        for t in self.tensors:
            vec = np.tensordot(vec, t, axes=(1, 0))
            vec = vec.reshape(vec.shape[0] * 2, t.shape[2])
        return vec[:, 0]

    # ----- serialization ----------------------------------------------------

    def to_document(self, metadata: dict | None = None) -> dict:
        """Self-describing checkpoint document (JSON-ready)."""
        return {
            "schema": MPS_SCHEMA,
            "n": self.n,
            "chi_max": self.chi_max,
            "cutoff": self.cutoff,
            "center": self.center,
            "discarded_weight": self.discarded_weight,
            "metadata": metadata or {},
            "tensors": [
                {"shape": list(t.shape), "data": array_to_b64(t)} for t in self.tensors
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> MatrixProductState:
        if doc.get("schema") != MPS_SCHEMA:
            msg = f"unsupported MPS schema {doc.get('schema')!r}"
            raise ShapeError(msg)
        tensors = [b64_to_array(t["data"], t["shape"]) for t in doc["tensors"]]
        state = cls(
            tensors,
            chi_max=doc["chi_max"],
            cutoff=doc["cutoff"],
            center=doc["center"],
            is_normalized=True,
        )
        state.discarded_weight = float(doc["discarded_weight"])
        return state

    def save(self, path, metadata: dict | None = None) -> None:
        write_json(path, self.to_document(metadata))

    @classmethod
    def load(cls, path) -> MatrixProductState:
        return cls.from_document(read_json(path))


# ----- pairwise quantities ---------------------------------------------------


def overlap(a: MatrixProductState, b: MatrixProductState) -> complex:
    """Inner product <a|b> by exact zipper contraction."""
    if a.n != b.n:
        msg = f"length mismatch: {a.n} vs {b.n}"
        raise ShapeError(msg)
    env = np.ones((1, 1), dtype=np.complex128)
    for ta, tb in zip(a.tensors, b.tensors):
        # env[x, y]: x = bra bond, y = ket bond
        env = np.einsum("xy,xpc,ypd->cd", env, ta.conj(), tb, optimize=True)
    return complex(env[0, 0])


def local_expectation(
    state: MatrixProductState, site: int, observable: NDArray[np.complex128]
) -> complex:
    """Expectation <psi|O_site|psi>, evaluated through the orthogonality center."""
    observable = np.asarray(observable, dtype=np.complex128)
    if observable.shape != (2, 2):
        msg = f"observable must be 2x2, got {observable.shape}"
        raise ShapeError(msg)
    if not 0 <= site < state.n:
        msg = f"site {site} out of range for n={state.n}"
        raise ShapeError(msg)
    work = state if state.center == site else state.copy()
    work.move_center(site)
    t = work.tensors[site]
    return complex(np.einsum("lpr,pq,lqr->", t.conj(), observable, t, optimize=True))


def two_point_correlator(
    state: MatrixProductState,
    site_i: int,
    site_j: int,
    op_a: NDArray[np.complex128],
    op_b: NDArray[np.complex128],
) -> complex:
    """Expectation <psi| A_i B_j |psi> for distinct sites i != j."""
    if site_i == site_j:
        msg = "two-point correlator requires distinct sites"
        raise ShapeError(msg)
    for s in (site_i, site_j):
        if not 0 <= s < state.n:
            msg = f"site {s} out of range for n={state.n}"
            raise ShapeError(msg)
    ops = {site_i: np.asarray(op_a, dtype=np.complex128), site_j: np.asarray(op_b, dtype=np.complex128)}
    lo, hi = min(site_i, site_j), max(site_i, site_j)
    work = state.copy()
    work.move_center(lo)
    env = np.eye(work.tensors[lo].shape[0], dtype=np.complex128)
    for s in range(lo, hi + 1):
        t = work.tensors[s]
        if s in ops:
            env = np.einsum("xy,xpc,pq,yqd->cd", env, t.conj(), ops[s], t, optimize=True)
        else:
            env = np.einsum("xy,xpc,ypd->cd", env, t.conj(), t, optimize=True)
    # sites right of hi are right-isometric (center is at lo), so the
    # remaining contraction is a plain bond trace.
    return complex(np.trace(env))


def total_z_expectation(state: MatrixProductState) -> float:
    """Sum of single-site Z expectations."""
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    work = state.copy()
    work.move_center(0)
    total = 0.0
    for site in range(state.n):
        work.move_center(site)
        total += local_expectation(work, site, z).real
    return total


# ----- state ensembles -------------------------------------------------------


@dataclass(frozen=True)
class EnsembleSpec:
    """Which input-state distribution to draw training/testing samples from.

    kinds:
        ``random-product``: per-site Haar single-qubit states.
        ``computational-basis``: the fixed basis state ``basis_bits``.
        ``u1-rqc``: a charge-conserving brickwall random circuit of depth
        ``rqc_depth`` applied to a Hamming-weight-``rqc_charge`` basis state.
    """

    kind: str = "random-product"
    basis_bits: str | None = None
    rqc_depth: int = 0
    rqc_charge: int | None = None
    seed: int = 0

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "basis_bits": self.basis_bits,
            "rqc_depth": self.rqc_depth,
            "rqc_charge": self.rqc_charge,
            "seed": self.seed,
        }

    @classmethod
    def from_document(cls, doc: dict) -> EnsembleSpec:
        return cls(
            kind=doc.get("kind", "random-product"),
            basis_bits=doc.get("basis_bits"),
            rqc_depth=int(doc.get("rqc_depth", 0)),
            rqc_charge=doc.get("rqc_charge"),
            seed=int(doc.get("seed", 0)),
        )


def random_product_state(
    n: int,
    seed: int | RandomStream,
    chi_max: int | None = DEFAULT_CHI_MAX,
    cutoff: float = DEFAULT_CUTOFF,
) -> MatrixProductState:
    """A product state with each site drawn Haar-uniformly on the qubit sphere."""
    if n < 1:
        msg = f"need n >= 1, got {n}"
        raise ShapeError(msg)
    stream = seed if isinstance(seed, RandomStream) else RandomStream(seed)
    vectors = [stream.haar_qubit_state() for _ in range(n)]
    return MatrixProductState.product_state(vectors, chi_max=chi_max, cutoff=cutoff)


def _u1_gate(stream: RandomStream) -> NDArray[np.complex128]:
    """A random two-site gate commuting with total charge.

    Independent Haar phases act on |00> and |11>; a Haar-random 2x2 unitary
    acts on span{|01>, |10>}.
    """
    phases = stream.phases(2)
    block = stream.haar_unitary(2)
    gate = np.zeros((4, 4), dtype=np.complex128)
    gate[0, 0] = np.exp(1j * phases[0])
    gate[3, 3] = np.exp(1j * phases[1])
    gate[1:3, 1:3] = block
    return gate


def _charge_split(
    theta: NDArray[np.complex128],
    left_charges: NDArray[np.int64],
    right_charges: NDArray[np.int64],
    chi_max: int | None,
    cutoff: float,
):
    """Split a two-site block with an exactly charge-blocked SVD.

    Row (l, p1) carries charge ``left_charges[l] + p1``; column (p2, r)
    carries ``right_charges[r] - p2``. The SVD is performed per block so
    entries outside a charge sector remain exactly zero. Truncation (global
    over all blocks) follows the same dual-criterion rule as the dense path.

    Returns (left tensor, right tensor, new bond charges).
    """
    chi_l = theta.shape[0]
    chi_r = theta.shape[3]
    mat = theta.reshape(chi_l * 2, 2 * chi_r)
    row_q = (left_charges[:, None] + np.arange(2)[None, :]).reshape(chi_l * 2)
    col_q = (right_charges[None, :] - np.arange(2)[:, None]).reshape(2 * chi_r)

    blocks = []
    for q in np.unique(row_q):
        rows = np.nonzero(row_q == q)[0]
        cols = np.nonzero(col_q == q)[0]
        if len(cols) == 0:
            continue
        sub = mat[np.ix_(rows, cols)]
        if not np.any(sub):
            continue
        u, s, vh = np.linalg.svd(sub, full_matrices=False)
        blocks.append((int(q), rows, cols, u, s, vh))

    all_s = np.concatenate([b[4] for b in blocks])
    order = np.argsort(all_s)[::-1]
    total = float(np.sum(all_s**2))
    keep_mask = np.zeros(len(all_s), dtype=bool)
    ranked = all_s[order]
    admissible = ranked**2 > cutoff * total
    admissible[0] = True  # always keep at least one
    if chi_max is not None:
        admissible[chi_max:] = False
    keep_mask[order[admissible]] = True

    # Preserve the block's global weight: without an orthogonality center the
    # split must keep ||theta|| (a unitary gate does not change the state
    # norm), so kept singular values are rescaled only for truncation loss.
    total_norm = float(np.linalg.norm(all_s))
    kept_norm = float(np.linalg.norm(all_s[keep_mask]))
    rescale = total_norm / kept_norm if kept_norm > 0 else 1.0
    new_chi = int(np.count_nonzero(keep_mask))
    left_out = np.zeros((chi_l * 2, new_chi), dtype=np.complex128)
    right_out = np.zeros((new_chi, 2 * chi_r), dtype=np.complex128)
    bond_charges = np.zeros(new_chi, dtype=np.int64)
    offset = 0
    col = 0
    for q, rows, cols, u, s, vh in blocks:
        for k in range(len(s)):
            if keep_mask[offset + k]:
                left_out[rows, col] = u[:, k]
                right_out[col, cols] = (s[k] * rescale) * vh[k, :]
                bond_charges[col] = q
                col += 1
        offset += len(s)
    left_tensor = left_out.reshape(chi_l, 2, new_chi)
    right_tensor = right_out.reshape(new_chi, 2, chi_r)
    return left_tensor, right_tensor, bond_charges


def u1_rqc_state(
    n: int,
    depth: int,
    charge: int,
    seed: int | RandomStream,
    chi_max: int | None = DEFAULT_CHI_MAX,
    cutoff: float = DEFAULT_CUTOFF,
) -> MatrixProductState:
    """Output of a depth-``depth`` brickwall of charge-conserving random gates.

    Starts from the basis state with ``charge`` ones packed to the left.
    Bond charges are tracked explicitly and all splits are charge-blocked,
    so amplitudes outside the Hamming-weight-``charge`` sector are exactly
    zero in the returned tensors.
    """
    if not 0 <= charge <= n:
        msg = f"charge must lie in [0, {n}], got {charge}"
        raise ShapeError(msg)
    stream = seed if isinstance(seed, RandomStream) else RandomStream(seed)
    bits = [1] * charge + [0] * (n - charge)
    tensors = []
    bond_charges: list[NDArray[np.int64]] = [np.zeros(1, dtype=np.int64)]
    running = 0
    for b in bits:
        t = np.zeros((1, 2, 1), dtype=np.complex128)
        t[0, b, 0] = 1.0
        tensors.append(t)
        running += b
        bond_charges.append(np.array([running], dtype=np.int64))

    for layer in range(depth):
        layer_stream = stream.child(layer)
        for idx, site in enumerate(range(layer % 2, n - 1, 2)):
            gate = _u1_gate(layer_stream.child(idx))
            theta = np.tensordot(tensors[site], tensors[site + 1], axes=(2, 0))
            theta = np.einsum("abcd,lcdr->labr", gate.reshape(2, 2, 2, 2), theta)
            left_t, right_t, mid_q = _charge_split(
                theta, bond_charges[site], bond_charges[site + 2], chi_max, cutoff
            )
            tensors[site] = left_t
            tensors[site + 1] = right_t
            bond_charges[site + 1] = mid_q

    state = MatrixProductState(
        tensors, chi_max=chi_max, cutoff=cutoff, center=None, is_normalized=True
    )
    return state


def sample_ensemble_state(
    spec: EnsembleSpec,
    n: int,
    index: int,
    chi_max: int | None = DEFAULT_CHI_MAX,
    cutoff: float = DEFAULT_CUTOFF,
) -> MatrixProductState:
    """Draw sample ``index`` of the ensemble (deterministic in (seed, index))."""
    stream = RandomStream(spec.seed).child(index)
    if spec.kind == "random-product":
        return random_product_state(n, stream, chi_max=chi_max, cutoff=cutoff)
    if spec.kind == "computational-basis":
        bits = spec.basis_bits
        if bits is None or len(bits) != n:
            msg = f"computational-basis ensemble needs an n={n} bitstring"
            raise ShapeError(msg)
        return MatrixProductState.basis_state(bits, chi_max=chi_max, cutoff=cutoff)
    if spec.kind == "u1-rqc":
        if spec.rqc_charge is None:
            msg = "u1-rqc ensemble needs rqc_charge"
            raise ShapeError(msg)
        return u1_rqc_state(
            n, spec.rqc_depth, spec.rqc_charge, stream, chi_max=chi_max, cutoff=cutoff
        )
    msg = f"unknown ensemble kind {spec.kind!r}"
    raise ShapeError(msg)
