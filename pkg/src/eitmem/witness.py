"""Entanglement verification of retrieved four-photon states.

Uses the projector witness W = 1/2 - |C><C| built from the target cluster
state: Tr(W rho) is positive on every separable state and negative only close
to the cluster state, and equals 1/2 minus the cluster fidelity, which makes
the witness test and the F > 1/2 fidelity test equivalent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import DensityMatrix, PureState, cluster_state_4q, density_from_pure


def cluster_projector() -> np.ndarray:
    psi = cluster_state_4q().amps
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class WitnessOperator:
    """Hermitian witness operator on the four-qubit polarization space."""

    matrix: np.ndarray = field(repr=False)
    convention: str = "projector"

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (16, 16):
            raise ValueError("witness acts on the 16-dimensional four-qubit space")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("witness must be Hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def projector_witness(cls) -> "WitnessOperator":
        return cls(np.eye(16) / 2.0 - cluster_projector())


_PROJECTOR_WITNESS = None


def _witness_matrix() -> np.ndarray:
    global _PROJECTOR_WITNESS
    if _PROJECTOR_WITNESS is None:
        _PROJECTOR_WITNESS = WitnessOperator.projector_witness().matrix
    return _PROJECTOR_WITNESS


def witness_value(rho) -> float:
    """Tr(W rho); a negative value certifies four-party entanglement."""
    if isinstance(rho, PureState):
        rho = density_from_pure(rho)
    if not isinstance(rho, DensityMatrix):
        raise TypeError("witness_value expects a PureState or DensityMatrix")
    if rho.families != ("photon_hv",) * 4:
        raise ValueError("witness applies to four H/V polarization qubits")
    return float(np.trace(_witness_matrix() @ rho.matrix).real)


def partial_retrieval_fidelity(beta: complex) -> float:
    """Fidelity |beta|^2 / (1 + |beta|^2) when one channel retrieves partially."""
    b2 = abs(beta) ** 2
    return b2 / (1.0 + b2)


def beta2_required(fidelity_target: float) -> float:
    """Smallest |beta|^2 whose partial-retrieval fidelity exceeds the target."""
    if not 0.0 <= fidelity_target < 1.0:
        raise ValueError("fidelity_target must be in [0, 1)")
    return fidelity_target / (1.0 - fidelity_target)


def genuine_entanglement(fidelity: float) -> bool:
    """Cluster fidelity above 1/2 (strict) certifies genuine four-qubit entanglement."""
    if not 0.0 <= fidelity <= 1.0:
        if np.isnan(fidelity):
            return False
        raise ValueError("fidelity must be in [0, 1]")
    return fidelity > 0.5
