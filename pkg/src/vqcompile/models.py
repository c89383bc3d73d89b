"""Hamiltonian families, Trotter product formulas, and TEBD evolution.

Two model families are provided on open chains and on snake-ordered strips
(periodic along x optional):

* ``heisenberg``: sum of XX + YY + ZZ on nearest-neighbor bonds plus
  on-site Z fields drawn i.i.d. uniform from [-h, h].
* ``ising``: -(sum XX + sum Z) + g sum X + kappa (sum ZZ + next-nearest XX).

Raw terms (two-site bonds and one-site fields) are exposed by
:func:`bond_terms`; for gate-based evolution the fields are folded into
adjacent bond gates and the bonds are grouped into disjoint stages
(even/odd on chains, vertical/horizontal sublattices on strips).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .circuits import (
    GatePlacement,
    ParameterizedCircuit,
    embed_two_site,
    snake_index,
    strip_bond_groups,
)
from .errors import ConfigError, DenseSizeError, ShapeError
from .mps import MatrixProductState
from .rng import RandomStream
from .tensorops import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, hermitian_exponential


@dataclass(frozen=True)
class Lattice:
    """Chain or strip geometry. Strips use snake ordering along y, then x."""

    kind: str  # "chain" | "strip"
    n: int = 0  # chain length (kind == "chain")
    lx: int = 0
    ly: int = 0
    periodic_x: bool = False

    def __post_init__(self) -> None:
        if self.kind == "chain":
            if self.n < 2:
                msg = f"chain needs n >= 2, got {self.n}"
                raise ShapeError(msg)
        elif self.kind == "strip":
            if self.lx < 1 or self.ly < 2:
                msg = f"strip needs lx >= 1, ly >= 2, got {self.lx}x{self.ly}"
                raise ShapeError(msg)
        else:
            msg = f"unsupported lattice kind {self.kind!r}"
            raise ShapeError(msg)

    @property
    def n_sites(self) -> int:
        return self.n if self.kind == "chain" else self.lx * self.ly

    def nn_groups(self) -> list[tuple[str, list[tuple[int, int]]]]:
        """Disjoint non-empty groups of nearest-neighbor bonds (chain indices)."""
        if self.kind == "chain":
            even = [(i, i + 1) for i in range(0, self.n - 1, 2)]
            odd = [(i, i + 1) for i in range(1, self.n - 1, 2)]
            groups = [("even", even), ("odd", odd)]
        else:
            groups = strip_bond_groups(self.lx, self.ly, self.periodic_x)
        return [(label, pairs) for label, pairs in groups if pairs]

    def nnn_groups(self) -> list[tuple[str, list[tuple[int, int]]]]:
        """Disjoint groups of next-nearest-neighbor pairs.

        Chains: distance-2 pairs split by parity. Strips: the two lattice
        diagonals, greedily colored into disjoint groups.
        """
        if self.kind == "chain":
            even = [(i, i + 2) for i in range(0, self.n - 2, 2)]
            odd = [(i, i + 2) for i in range(1, self.n - 2, 2)]
            return [(label, pairs) for label, pairs in (("nnn-even", even), ("nnn-odd", odd)) if pairs]
        pairs = []
        for x in range(self.lx - 1):
            for y in range(self.ly - 1):
                pairs.append((snake_index(x, y, self.ly), snake_index(x + 1, y + 1, self.ly)))
            for y in range(1, self.ly):
                pairs.append((snake_index(x, y, self.ly), snake_index(x + 1, y - 1, self.ly)))
        if self.periodic_x and self.lx > 2:
            for y in range(self.ly - 1):
                pairs.append((snake_index(self.lx - 1, y, self.ly), snake_index(0, y + 1, self.ly)))
            for y in range(1, self.ly):
                pairs.append((snake_index(self.lx - 1, y, self.ly), snake_index(0, y - 1, self.ly)))
        pairs = [(min(a, b), max(a, b)) for a, b in pairs]
        return _color_disjoint(sorted(set(pairs)), "nnn")

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "lx": self.lx,
            "ly": self.ly,
            "periodic_x": self.periodic_x,
        }

    @classmethod
    def from_document(cls, doc: dict) -> Lattice:
        return cls(
            kind=doc["kind"],
            n=int(doc.get("n", 0)),
            lx=int(doc.get("lx", 0)),
            ly=int(doc.get("ly", 0)),
            periodic_x=bool(doc.get("periodic_x", False)),
        )


def _color_disjoint(
    pairs: list[tuple[int, int]], prefix: str
) -> list[tuple[str, list[tuple[int, int]]]]:
    """Greedily partition pairs into groups with pairwise-disjoint supports."""
    colored: list[tuple[set[int], list[tuple[int, int]]]] = []
    for pair in pairs:
        support = set(pair)
        for used, members in colored:
            if not used & support:
                used.update(support)
                members.append(pair)
                break
        else:
            colored.append((set(support), [pair]))
    return [(f"{prefix}-{k}", members) for k, (_, members) in enumerate(colored)]


@dataclass
class BondTerm:
    """One Hermitian term of the Hamiltonian: a site pair or a single site."""

    sites: tuple[int, ...]
    matrix: NDArray[np.complex128]
    group: str  # staging group; "field" for on-site terms
    kind: str = "su4"  # resource class of the induced gate: "su4" | "xx"


@dataclass
class HamiltonianSpec:
    """Model family, couplings, and lattice geometry.

    Attributes:
        family: "heisenberg" or "ising".
        lattice: Chain or strip geometry.
        h: Heisenberg disorder strength; fields are i.i.d. uniform on [-h, h].
        disorder_seed: Seed fixing the disorder realization (pure function
            of (h, seed)).
        g: Ising transverse X perturbation strength.
        kappa: Ising next-nearest / ZZ perturbation strength.
    """

    family: str
    lattice: Lattice
    h: float = 0.0
    disorder_seed: int = 0
    g: float = 0.0
    kappa: float = 0.0
    fields: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.family not in ("heisenberg", "ising"):
            msg = f"unsupported model family {self.family!r}"
            raise ShapeError(msg)
        n = self.lattice.n_sites
        if self.family == "heisenberg" and self.h != 0.0:
            draws = RandomStream(self.disorder_seed).uniform(n)
            self.fields = self.h * (2.0 * draws - 1.0)
        else:
            self.fields = np.zeros(n)

    @property
    def n(self) -> int:
        return self.lattice.n_sites

    def to_document(self) -> dict:
        return {
            "family": self.family,
            "lattice": self.lattice.to_document(),
            "h": self.h,
            "disorder_seed": self.disorder_seed,
            "g": self.g,
            "kappa": self.kappa,
        }

    @classmethod
    def from_document(cls, doc: dict) -> HamiltonianSpec:
        return cls(
            family=doc["family"],
            lattice=Lattice.from_document(doc["lattice"]),
            h=float(doc.get("h", 0.0)),
            disorder_seed=int(doc.get("disorder_seed", 0)),
            g=float(doc.get("g", 0.0)),
            kappa=float(doc.get("kappa", 0.0)),
        )


_XX = np.kron(PAULI_X, PAULI_X)
_YY = np.kron(PAULI_Y, PAULI_Y)
_ZZ = np.kron(PAULI_Z, PAULI_Z)


def bond_terms(spec: HamiltonianSpec) -> list[BondTerm]:
    """All Hamiltonian terms, tagged with their Trotter staging group.

    Two-site bond matrices index the smaller chain site most significant.
    On-site terms carry group "field"; gate-based paths fold them into
    adjacent bonds via :func:`folded_bond_groups`.
    """
    terms: list[BondTerm] = []
    n = spec.n
    if spec.family == "heisenberg":
        for group, pairs in spec.lattice.nn_groups():
            for pair in pairs:
                terms.append(BondTerm(pair, _XX + _YY + _ZZ, group, "su4"))
        for i in range(n):
            if spec.fields[i] != 0.0:
                terms.append(BondTerm((i,), spec.fields[i] * PAULI_Z, "field", "su4"))
    else:
        nn_kind = "xx" if spec.kappa == 0.0 else "su4"
        bond = -_XX + spec.kappa * _ZZ
        for group, pairs in spec.lattice.nn_groups():
            for pair in pairs:
                terms.append(BondTerm(pair, bond, group, nn_kind))
        onsite = -PAULI_Z + spec.g * PAULI_X
        for i in range(n):
            terms.append(BondTerm((i,), onsite, "field", "su4"))
        if spec.kappa != 0.0:
            for group, pairs in spec.lattice.nnn_groups():
                for pair in pairs:
                    terms.append(BondTerm(pair, spec.kappa * _XX, group, "xx"))
    return terms


def folded_bond_groups(
    spec: HamiltonianSpec,
) -> list[tuple[str, list[BondTerm]]]:
    """Two-site terms grouped into disjoint stages, with fields folded in.

    Each on-site term is split equally over the nearest-neighbor bonds
    incident to its site, so the group sum still equals the Hamiltonian.
    Group order fixes the staging order of the built-in product formulas.
    """
    nn_groups = spec.lattice.nn_groups()
    degree = np.zeros(spec.n, dtype=np.int64)
    for _, pairs in nn_groups:
        for i, j in pairs:
            degree[i] += 1
            degree[j] += 1

    onsite: dict[int, NDArray[np.complex128]] = {}
    nnn_terms: list[BondTerm] = []
    nn_raw: dict[tuple[int, int], BondTerm] = {}
    for term in bond_terms(spec):
        if len(term.sites) == 1:
            onsite[term.sites[0]] = term.matrix
        elif term.group.startswith("nnn"):
            nnn_terms.append(term)
        else:
            nn_raw[term.sites] = term

    groups: list[tuple[str, list[BondTerm]]] = []
    for label, pairs in nn_groups:
        members = []
        for i, j in pairs:
            raw = nn_raw[(i, j)]
            matrix = raw.matrix.copy()
            if i in onsite:
                matrix += np.kron(onsite[i], PAULI_I) / degree[i]
            if j in onsite:
                matrix += np.kron(PAULI_I, onsite[j]) / degree[j]
            members.append(BondTerm((i, j), matrix, label, raw.kind))
        groups.append((label, members))

    nnn_by_group: dict[str, list[BondTerm]] = {}
    for term in nnn_terms:
        nnn_by_group.setdefault(term.group, []).append(term)
    for label in sorted(nnn_by_group):
        groups.append((label, nnn_by_group[label]))
    return groups


def _embed_one_site(op: NDArray[np.complex128], n: int, i: int) -> NDArray[np.complex128]:
    return np.kron(
        np.kron(np.eye(2**i, dtype=np.complex128), op),
        np.eye(2 ** (n - i - 1), dtype=np.complex128),
    )


def dense_hamiltonian(spec: HamiltonianSpec, max_sites: int = 12) -> NDArray[np.complex128]:
    """Dense 2^n x 2^n Hamiltonian: exactly the sum of embedded bond terms."""
    n = spec.n
    if n > max_sites:
        msg = f"refusing dense Hamiltonian of {n} sites (cap {max_sites})"
        raise DenseSizeError(msg)
    full = np.zeros((2**n, 2**n), dtype=np.complex128)
    for term in bond_terms(spec):
        if len(term.sites) == 1:
            full += _embed_one_site(term.matrix, n, term.sites[0])
        else:
            full += embed_two_site(term.matrix, n, *term.sites)
    return full


def dense_evolution_operator(
    spec: HamiltonianSpec, t: float, max_sites: int = 12
) -> NDArray[np.complex128]:
    """The exact evolution operator exp(-1j * H * t) for small systems."""
    return hermitian_exponential(dense_hamiltonian(spec, max_sites=max_sites), -float(t))


# ----- product formulas --------------------------------------------------------


def _fuse_stages(stages: list[tuple[str, float]]) -> list[tuple[str, float]]:
    """Merge adjacent stages acting on the same group (coefficients add)."""
    fused: list[tuple[str, float]] = []
    for group, coeff in stages:
        if fused and fused[-1][0] == group:
            fused[-1] = (group, fused[-1][1] + coeff)
        else:
            fused.append((group, coeff))
    return fused


@dataclass(frozen=True)
class TrotterScheme:
    """An ordered list of (term-group, coefficient) stages for one time step."""

    label: str
    order: int
    stages: tuple[tuple[str, float], ...]
    provenance: str = "built-in"

    def __post_init__(self) -> None:
        sums: dict[str, float] = {}
        for group, coeff in self.stages:
            sums[group] = sums.get(group, 0.0) + coeff
        for group, total in sums.items():
            if abs(total - 1.0) > 1e-12:
                msg = f"stage coefficients for group {group!r} sum to {total}, expected 1"
                raise ConfigError(msg)

    @classmethod
    def lie(cls, group_ids: list[str]) -> TrotterScheme:
        return cls("p1", 1, tuple((g, 1.0) for g in group_ids))

    @classmethod
    def strang(cls, group_ids: list[str]) -> TrotterScheme:
        if len(group_ids) == 1:
            return cls("p2", 2, ((group_ids[0], 1.0),))
        head = [(g, 0.5) for g in group_ids[:-1]]
        middle = [(group_ids[-1], 1.0)]
        tail = [(g, 0.5) for g in reversed(group_ids[:-1])]
        return cls("p2", 2, tuple(_fuse_stages(head + middle + tail)))

    @classmethod
    def suzuki4(cls, group_ids: list[str]) -> TrotterScheme:
        """The recursive fourth-order formula built from five scaled Strang steps."""
        u = 1.0 / (4.0 - 4.0 ** (1.0 / 3.0))
        w = 1.0 - 4.0 * u
        inner = list(cls.strang(group_ids).stages)
        stages: list[tuple[str, float]] = []
        for scale in (u, u, w, u, u):
            stages.extend((g, coeff * scale) for g, coeff in inner)
        return cls("p4", 4, tuple(_fuse_stages(stages)))

    @classmethod
    def by_order(cls, p: int, group_ids: list[str]) -> TrotterScheme:
        if p == 1:
            return cls.lie(group_ids)
        if p == 2:
            return cls.strang(group_ids)
        if p == 4:
            return cls.suzuki4(group_ids)
        msg = f"no built-in scheme of order {p}; supply a coefficient file"
        raise ConfigError(msg)

    @classmethod
    def from_file(cls, path, order: int = 0) -> TrotterScheme:
        """Load stages from a text file: one "(group-id, coefficient)" per line."""
        stages = []
        for line_no, raw in enumerate(open(path).read().splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            line = line.strip("()")
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                msg = f"{path}:{line_no}: expected '(group-id, coefficient)', got {raw!r}"
                raise ConfigError(msg)
            try:
                stages.append((parts[0], float(parts[1])))
            except ValueError as exc:
                msg = f"{path}:{line_no}: bad coefficient {parts[1]!r}"
                raise ConfigError(msg) from exc
        return cls(f"external-p{order}", order, tuple(stages), provenance="external")


def trotter_circuit(
    spec: HamiltonianSpec,
    dt: float,
    scheme: TrotterScheme,
    steps: int = 1,
) -> ParameterizedCircuit:
    """Materialize ``steps`` product-formula steps as a frozen gate circuit.

    Each stage becomes one layer of commuting gates
    ``exp(-1j * coeff * dt * term)``; adjacent same-group stages across step
    boundaries are fused (their coefficients add exactly).

    Raises:
        ConfigError: If the scheme references an unknown term group or
            misses a group of the Hamiltonian.
    """
    groups = dict_of_groups = {label: terms for label, terms in folded_bond_groups(spec)}
    scheme_groups = {g for g, _ in scheme.stages}
    if scheme_groups != set(dict_of_groups):
        msg = (
            f"scheme stages cover groups {sorted(scheme_groups)} but the model "
            f"has groups {sorted(dict_of_groups)}"
        )
        raise ConfigError(msg)

    stage_list = _fuse_stages([s for _ in range(steps) for s in scheme.stages])
    gate_cache: dict[tuple[str, float, int], np.ndarray] = {}
    layers = []
    for group, coeff in stage_list:
        layer = []
        for index, term in enumerate(groups[group]):
            key = (group, coeff, index)
            if key not in gate_cache:
                gate_cache[key] = hermitian_exponential(term.matrix, -coeff * dt)
            layer.append(
                GatePlacement(sites=term.sites, fixed_gate=gate_cache[key], kind=term.kind)
            )
        layers.append(layer)
    geometry = dict(spec.lattice.to_document())
    geometry["kind"] = "chain" if spec.lattice.kind == "chain" else "snake-strip"
    return ParameterizedCircuit(spec.n, layers, ti=False, geometry=geometry, frozen=True)


def tebd_evolve(
    state: MatrixProductState,
    spec: HamiltonianSpec,
    t: float,
    dt: float = 1e-3,
    chi_max: int | None = None,
    cutoff: float | None = None,
) -> MatrixProductState:
    """Evolve a copy of ``state`` to time ``t`` by repeated Strang steps.

    The step size is ``dt`` with a final fractional step when ``dt`` does
    not divide ``t``. Truncation follows the state's settings unless
    overridden; the evolved state carries the accumulated discarded weight.
    """
    if t < 0:
        msg = f"evolution time must be >= 0, got {t}"
        raise ShapeError(msg)
    if state.n != spec.n:
        msg = f"state has {state.n} sites, model expects {spec.n}"
        raise ShapeError(msg)
    evolved = state.copy()
    if t == 0:
        return evolved
    if dt <= 0:
        msg = f"dt must be > 0, got {dt}"
        raise ShapeError(msg)

    groups = folded_bond_groups(spec)
    scheme = TrotterScheme.strang([label for label, _ in groups])
    n_steps = int(np.floor(t / dt + 1e-9))
    remainder = t - n_steps * dt
    if remainder < 1e-12 * max(dt, 1.0):
        remainder = 0.0

    def apply_stages(stages: list[tuple[str, float]], step_dt: float) -> None:
        cache: dict[tuple[str, float, int], np.ndarray] = {}
        terms_by_group = dict(groups)
        for group, coeff in stages:
            for index, term in enumerate(terms_by_group[group]):
                key = (group, coeff, index)
                if key not in cache:
                    cache[key] = hermitian_exponential(term.matrix, -coeff * step_dt)
                i, j = term.sites
                evolved.apply_gate_long_range(i, j, cache[key], chi_max=chi_max, cutoff=cutoff)

    if n_steps > 0:
        full = _fuse_stages([s for _ in range(n_steps) for s in scheme.stages])
        apply_stages(full, dt)
    if remainder > 0.0:
        apply_stages(list(scheme.stages), remainder)
    return evolved
