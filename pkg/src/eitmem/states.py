"""Finite-dimensional quantum state algebra for the four-channel memory.

Pure states and density matrices live on labeled tensor-product spaces.
Each subsystem carries one label family (photonic H/V or circular
polarization, stored-spin levels, or photon number of a single mode);
operations never mix families within a subsystem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_ATOL = 1e-12
HERM_ATOL = 1e-12
PSD_FLOOR = -1e-10
KRAUS_ATOL = 1e-10

# Registered label families.  The vacuum-extended photonic families carry an
# explicit "no photon in this slot" level so partial retrieval can be
# represented without leaving the formalism.
LABEL_FAMILIES: dict[str, tuple[str, ...]] = {
    "photon_hv": ("H", "V"),
    "photon_circ": ("s-", "s+"),
    "photon_hv_vac": ("0", "H", "V"),
    "photon_circ_vac": ("0", "s-", "s+"),
    "spin": ("0", "c-", "c+"),
    "fock": ("0", "1"),
}

LABEL_SEPARATOR = "."


def family_labels(family: str) -> tuple[str, ...]:
    try:
        return LABEL_FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown label family {family!r}") from None


def family_dims(families: Sequence[str]) -> tuple[int, ...]:
    return tuple(len(family_labels(f)) for f in families)


def basis_index(families: Sequence[str], labels: Sequence[str]) -> int:
    """Flat index of the basis ket given one label per subsystem."""
    if len(labels) != len(families):
        raise ValueError("one label per subsystem required")
    idx = 0
    for fam, lab in zip(families, labels):
        symbols = family_labels(fam)
        if lab not in symbols:
            raise ValueError(f"label {lab!r} not in family {fam!r}")
        idx = idx * len(symbols) + symbols.index(lab)
    return idx


def index_labels(families: Sequence[str], idx: int) -> tuple[str, ...]:
    """Inverse of basis_index."""
    labels = []
    for fam in reversed(families):
        symbols = family_labels(fam)
        idx, r = divmod(idx, len(symbols))
        labels.append(symbols[r])
    return tuple(reversed(labels))


def label_string(families: Sequence[str], idx: int) -> str:
    return LABEL_SEPARATOR.join(index_labels(families, idx))


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over a labeled product basis."""

    families: tuple[str, ...]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        dim = int(np.prod(family_dims(self.families)))
        if amps.shape != (dim,):
            raise ValueError(f"amplitude vector has length {amps.shape}, expected ({dim},)")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state norm {norm:.6g} is not 1; normalize explicitly")
        amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, families, amps, normalize=False) -> "PureState":
        amps = np.asarray(amps, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm < 1e-300:
                raise ValueError("cannot normalize a zero vector")
            amps = amps / norm
        return cls(tuple(families), amps)

    @classmethod
    def basis(cls, families, labels) -> "PureState":
        """Computational basis ket, e.g. basis(("photon_hv",)*2, ("H", "V"))."""
        families = tuple(families)
        amps = np.zeros(int(np.prod(family_dims(families))), dtype=complex)
        amps[basis_index(families, labels)] = 1.0
        return cls(families, amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return family_dims(self.families)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def amplitude(self, labels: Sequence[str]) -> complex:
        return complex(self.amps[basis_index(self.families, labels)])

    def overlap(self, other: "PureState") -> complex:
        _check_same_space(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def nonzero_terms(self, tol: float = 1e-15):
        """Yield (label_string, amplitude) for every amplitude above tol."""
        for idx in np.flatnonzero(np.abs(self.amps) > tol):
            yield label_string(self.families, int(idx)), complex(self.amps[idx])

    def serialize(self) -> str:
        """Plain-text form: header with families, one line per nonzero amplitude."""
        lines = ["# families: " + " ".join(self.families)]
        for lab, amp in self.nonzero_terms():
            lines.append(f"{lab} {amp.real:.17g} {amp.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "PureState":
        families = None
        entries = []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "families:" in line:
                    families = tuple(line.split("families:", 1)[1].split())
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {ln}: expected 'labels real imag'")
            entries.append((parts[0], float(parts[1]), float(parts[2])))
        if families is None:
            raise ValueError("missing '# families:' header")
        amps = np.zeros(int(np.prod(family_dims(families))), dtype=complex)
        for lab, re, im in entries:
            labels = tuple(lab.split(LABEL_SEPARATOR))
            amps[basis_index(families, labels)] = re + 1j * im
        return cls(families, amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on a labeled space."""

    families: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = int(np.prod(family_dims(self.families)))
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"trace {tr:.6g} is not 1")
        mat = mat / tr
        evmin = float(np.linalg.eigvalsh(mat)[0])
        if evmin < PSD_FLOOR:
            raise ValueError(f"matrix has negative eigenvalue {evmin:.3g}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dims(self) -> tuple[int, ...]:
        return family_dims(self.families)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def element(self, bra_labels, ket_labels) -> complex:
        i = basis_index(self.families, bra_labels)
        j = basis_index(self.families, ket_labels)
        return complex(self.matrix[i, j])

    def serialize(self) -> str:
        lines = ["# families: " + " ".join(self.families)]
        rows, cols = np.nonzero(np.abs(self.matrix) > 1e-15)
        for i, j in zip(rows, cols):
            v = self.matrix[i, j]
            lines.append(
                f"{label_string(self.families, int(i))}|{label_string(self.families, int(j))}"
                f" {v.real:.17g} {v.imag:.17g}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map given by a list of uniform-shape operators.

    Trace preserving by default (sum K^dag K = 1); set trace_decreasing for
    post-selected maps with sum K^dag K <= 1.  out_family renames the target
    subsystem when the operators map between different label families.
    """

    operators: tuple[np.ndarray, ...]
    trace_decreasing: bool = False
    out_family: str | None = None

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("channel needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValueError("operators must share one (out_dim, in_dim) shape")
        comp = sum(k.conj().T @ k for k in ops)
        eye = np.eye(shape[1])
        if self.trace_decreasing:
            evmax = float(np.linalg.eigvalsh(comp)[-1])
            if evmax > 1.0 + KRAUS_ATOL:
                raise ValueError("trace-decreasing channel exceeds the identity")
        elif np.max(np.abs(comp - eye)) > KRAUS_ATOL:
            raise ValueError("operators do not satisfy sum K^dag K = 1 "
                             "(pass trace_decreasing=True for post-selected maps)")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]


def _check_same_space(a, b):
    if a.families != b.families:
        raise ValueError(f"states live on different spaces: {a.families} vs {b.families}")


def tensor(a: PureState, b: PureState) -> PureState:
    """Direct product; subsystems of b are appended after those of a."""
    return PureState(a.families + b.families, np.kron(a.amps, b.amps))


def tensor_all(states: Iterable[PureState]) -> PureState:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def cluster_state_4q() -> PureState:
    """Four-qubit polarization cluster state (|HHHH>+|VVHH>+|HHVV>-|VVVV>)/2."""
    families = ("photon_hv",) * 4
    amps = np.zeros(16, dtype=complex)
    amps[basis_index(families, "HHHH")] = 0.5
    amps[basis_index(families, "VVHH")] = 0.5
    amps[basis_index(families, "HHVV")] = 0.5
    amps[basis_index(families, "VVVV")] = -0.5
    return PureState(families, amps)


_WAVEPLATE_IN = {"photon_hv": "photon_circ", "photon_hv_vac": "photon_circ_vac"}
_WAVEPLATE_OUT = {v: k for k, v in _WAVEPLATE_IN.items()}


def waveplate_map(state, direction: str):
    """Quarter-wave plate relabeling H <-> s-, V <-> s+ on every photonic subsystem.

    direction="in" converts linear to circular labels, "out" converts back.
    Amplitudes are untouched; the vacuum level of extended families is fixed.
    Works on PureState and DensityMatrix alike.
    """
    if direction == "in":
        table = _WAVEPLATE_IN
    elif direction == "out":
        table = _WAVEPLATE_OUT
    else:
        raise ValueError("direction must be 'in' or 'out'")
    new_families = []
    for fam in state.families:
        if fam not in table:
            raise ValueError(f"waveplate direction {direction!r} does not apply to family {fam!r}")
        new_families.append(table[fam])
    # label orderings are aligned (H,V) <-> (s-,s+), so amplitudes carry over
    if isinstance(state, DensityMatrix):
        return DensityMatrix(tuple(new_families), state.matrix)
    return PureState(tuple(new_families), state.amps)


def density_from_pure(psi: PureState) -> DensityMatrix:
    return DensityMatrix(psi.families, np.outer(psi.amps, psi.amps.conj()))


def maximally_mixed(families) -> DensityMatrix:
    families = tuple(families)
    dim = int(np.prod(family_dims(families)))
    return DensityMatrix(families, np.eye(dim) / dim)


def apply_kraus(rho: DensityMatrix, ch: KrausChannel, subsystem: int):
    """Apply a channel to one subsystem: rho -> sum_i (1 x K_i x 1) rho (...)^dag.

    Returns (rho_out, success_prob).  For a trace-preserving channel the
    probability is 1 and the trace is untouched; for a trace-decreasing
    (post-selected) channel the output is renormalized and the probability is
    the pre-normalization trace.
    """
    n = len(rho.families)
    if not 0 <= subsystem < n:
        raise ValueError(f"subsystem {subsystem} out of range for {n} subsystems")
    dims = rho.dims
    if ch.in_dim != dims[subsystem]:
        raise ValueError(
            f"channel acts on dimension {ch.in_dim}, subsystem {subsystem} has {dims[subsystem]}")
    out_family = ch.out_family or rho.families[subsystem]
    if len(family_labels(out_family)) != ch.out_dim:
        raise ValueError(f"out_family {out_family!r} does not match out_dim {ch.out_dim}")

    t = rho.matrix.reshape(dims + dims)
    out = None
    for k in ch.operators:
        # contract K on the ket-side axis and K^dag on the bra-side axis
        term = np.tensordot(k, t, axes=([1], [subsystem]))
        term = np.moveaxis(term, 0, subsystem)
        term = np.tensordot(term, k.conj(), axes=([n + subsystem], [1]))
        term = np.moveaxis(term, -1, n + subsystem)
        out = term if out is None else out + term
    new_dims = list(dims)
    new_dims[subsystem] = ch.out_dim
    dim = int(np.prod(new_dims))
    mat = out.reshape(dim, dim)

    prob = float(np.trace(mat).real)
    if ch.trace_decreasing:
        if prob < 1e-14:
            raise ValueError("post-selection probability is zero")
        mat = mat / prob
    new_families = list(rho.families)
    new_families[subsystem] = out_family
    return DensityMatrix(tuple(new_families), mat), prob


def _as_density(state) -> DensityMatrix:
    if isinstance(state, PureState):
        return density_from_pure(state)
    return state


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    # Hermitian eigendecomposition with clamping, safe against -1e-14 noise
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(a, b) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2; |<a|b>|^2 for pure states."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        _check_same_space(a, b)
        return float(abs(np.vdot(a.amps, b.amps)) ** 2)
    if isinstance(a, PureState):
        _check_same_space(a, b)
        return float(np.real(a.amps.conj() @ b.matrix @ a.amps))
    if isinstance(b, PureState):
        return fidelity(b, a)
    _check_same_space(a, b)
    ra = _psd_sqrt(a.matrix)
    inner = _psd_sqrt(ra @ b.matrix @ ra)
    f = float(np.trace(inner).real ** 2)
    return min(max(f, 0.0), 1.0)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not listed in keep (kept order preserved)."""
    keep = sorted(set(int(k) for k in keep))
    n = len(rho.families)
    if not keep:
        raise ValueError("keep must be a nonempty subset")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices out of range for {n} subsystems")
    dims = rho.dims
    t = rho.matrix.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, i in enumerate(traced):
        axis = i - count  # axes shift as we trace
        t = np.trace(t, axis1=axis, axis2=axis + (n - count))
    kept_dims = [dims[i] for i in keep]
    dim = int(np.prod(kept_dims))
    return DensityMatrix(tuple(rho.families[i] for i in keep), t.reshape(dim, dim))


def embed(state: PureState, target_families) -> PureState:
    """Embed into vacuum-extended families (amplitudes land on matching labels).

    Used to compare plain photonic states against retrieval outputs that carry
    explicit empty-slot levels.
    """
    target_families = tuple(target_families)
    if len(target_families) != len(state.families):
        raise ValueError("subsystem count mismatch")
    amps = np.zeros(int(np.prod(family_dims(target_families))), dtype=complex)
    for idx in np.flatnonzero(np.abs(state.amps) > 0):
        labels = index_labels(state.families, int(idx))
        for lab, fam in zip(labels, target_families):
            if lab not in family_labels(fam):
                raise ValueError(f"label {lab!r} has no slot in family {fam!r}")
        amps[basis_index(target_families, labels)] = state.amps[idx]
    return PureState(target_families, amps)


def equal_up_to_phase(a: PureState, b: PureState, atol: float = 1e-12) -> bool:
    """Global phase is unobservable; compare |<a|b>| against 1."""
    _check_same_space(a, b)
    return abs(abs(np.vdot(a.amps, b.amps)) - 1.0) <= atol
