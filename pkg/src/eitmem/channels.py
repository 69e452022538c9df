"""Per-channel dark-state-polariton storage/retrieval and the four-channel map.

Each memory channel is a three-level lambda system driven by a common control
field.  A circularly polarized photon entering channel j is converted into a
class I (left circular) or class II (right circular) polariton; switching the
control off maps it one-to-one onto a stored collective spin excitation, and
switching back on reverses the map.  Retrieval imperfection is modeled as a
superposition of the emitted photon with an empty output slot, weighted by the
channel's retrieval amplitude beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .states import (
    DensityMatrix,
    KrausChannel,
    PureState,
    apply_kraus,
    basis_index,
    cluster_state_4q,
    density_from_pure,
    embed,
    family_dims,
    family_labels,
    fidelity,
    index_labels,
    waveplate_map,
)
from .witness import genuine_entanglement, witness_value

IDEAL_BETA_ATOL = 1e-12


@dataclass(frozen=True)
class ChannelConfig:
    """Physical parameters of one memory channel.

    g_sqrt_n: collective coupling sqrt(g^2 N) [rad/s]
    omega:    control Rabi frequency at the working point [rad/s]
    beta:     retrieval amplitude (complex, dimensionless); |beta| = 1 is ideal
    gamma_s:  spin-wave decay rate [1/s]
    """

    g_sqrt_n: float
    omega: float
    beta: complex = 1.0
    gamma_s: float = 0.0

    def __post_init__(self):
        if not self.g_sqrt_n > 0:
            raise ValueError("g_sqrt_n must be positive")
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if not np.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if self.gamma_s < 0:
            raise ValueError("gamma_s must be nonnegative")

    @property
    def ideal_retrieval(self) -> bool:
        return abs(abs(self.beta) - 1.0) <= IDEAL_BETA_ATOL


@dataclass(frozen=True)
class PolaritonState:
    """Field/spin decomposition of a single dark-state polariton."""

    theta: float
    photon_amp: complex
    spin_amp: complex
    pol_class: str  # "I" (left circular) or "II" (right circular)

    def __post_init__(self):
        if self.pol_class not in ("I", "II"):
            raise ValueError("pol_class must be 'I' or 'II'")
        norm = abs(self.photon_amp) ** 2 + abs(self.spin_amp) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"polariton components have norm {norm:.6g}")


def mixing_angle(cfg: ChannelConfig) -> float:
    """Polariton mixing angle theta = atan(sqrt(g^2 N)/Omega) in [0, pi/2]."""
    return math.atan2(cfg.g_sqrt_n, cfg.omega)


def polariton_components(theta: float) -> tuple[float, float]:
    """(field, spin) coefficients (cos theta, -sin theta) of the polariton."""
    _check_theta(theta)
    return math.cos(theta), -math.sin(theta)


def polariton_state(theta: float, pol_class: str) -> PolaritonState:
    c, s = polariton_components(theta)
    return PolaritonState(theta, c, s, pol_class)


def _check_theta(theta: float):
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta {theta!r} outside [0, pi/2]")


_SPIN_FOR_POL = {"s-": "c-", "s+": "c+"}


def dark_state(theta: float, pol: str) -> PureState:
    """Single-excitation dark state cos(theta)|1>|no spin> - sin(theta)|0>|c_-+>.

    pol selects the spin level populated in the atomic limit: "s-" stores to
    c- (class I), "s+" stores to c+ (class II).
    """
    _check_theta(theta)
    if pol not in _SPIN_FOR_POL:
        raise ValueError("pol must be 's-' or 's+'")
    families = ("fock", "spin")
    amps = np.zeros(6, dtype=complex)
    amps[basis_index(families, ("1", "0"))] = math.cos(theta)
    amps[basis_index(families, ("0", _SPIN_FOR_POL[pol]))] = -math.sin(theta)
    return PureState(families, amps)


def _require_four_channels(cfgs) -> tuple[ChannelConfig, ...]:
    cfgs = tuple(cfgs)
    if len(cfgs) != 4:
        raise ValueError(f"expected 4 channel configs, got {len(cfgs)}")
    return cfgs


def _relabel(state: PureState, slot_maps, out_families) -> PureState:
    """Move amplitudes through per-slot index maps (pure relabeling)."""
    out_families = tuple(out_families)
    amps = np.zeros(int(np.prod(family_dims(out_families))), dtype=complex)
    for idx in np.flatnonzero(np.abs(state.amps) > 0):
        labels = index_labels(state.families, int(idx))
        new_labels = tuple(m[lab] for m, lab in zip(slot_maps, labels))
        amps[basis_index(out_families, new_labels)] = state.amps[idx]
    return PureState(out_families, amps)


_STORE_MAP = {"0": "0", "s-": "c-", "s+": "c+"}


def store(photonic: PureState, cfgs) -> PureState:
    """Map a four-photon circular-polarization state onto the spin levels.

    The control switch-off takes theta to pi/2 on every channel, so each
    photon amplitude transfers one-to-one: s- -> c-, s+ -> c+.
    """
    _require_four_channels(cfgs)
    if len(photonic.families) != 4:
        raise ValueError("store expects a four-subsystem photonic state")
    for fam in photonic.families:
        if fam not in ("photon_circ", "photon_circ_vac"):
            raise ValueError(f"store expects circular-polarization labels, got {fam!r}")
    return _relabel(photonic, [_STORE_MAP] * 4, ("spin",) * 4)


def _retrieval_matrix(beta: complex) -> np.ndarray:
    """Per-channel linear map from spin levels to (empty, s-, s+) output slots."""
    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = 1.0  # empty ensemble emits nothing
    if abs(abs(beta) - 1.0) <= IDEAL_BETA_ATOL:
        m[1, 1] = beta
        m[2, 2] = beta
    else:
        w = 1.0 / math.sqrt(1.0 + abs(beta) ** 2)
        m[0, 1] = w
        m[1, 1] = beta * w
        m[0, 2] = w
        m[2, 2] = beta * w
    return m


def retrieval_channel(beta: complex) -> KrausChannel:
    """CPTP retrieval map on one channel (spin levels -> photonic output slot).

    The retrieved branch keeps the coherence between c- and c+; the
    non-retrieved branch leaves the excitation behind, which traces out to an
    empty output slot.
    """
    if abs(abs(beta) - 1.0) <= IDEAL_BETA_ATOL:
        k = np.diag([1.0, beta, beta]).astype(complex)
        return KrausChannel((k,), out_family="photon_circ_vac")
    r = beta / math.sqrt(1.0 + abs(beta) ** 2)
    n = 1.0 / math.sqrt(1.0 + abs(beta) ** 2)
    k_ret = np.array([[1, 0, 0], [0, r, 0], [0, 0, r]], dtype=complex)
    k_miss_m = np.zeros((3, 3), dtype=complex)
    k_miss_m[0, 1] = n
    k_miss_p = np.zeros((3, 3), dtype=complex)
    k_miss_p[0, 2] = n
    return KrausChannel((k_ret, k_miss_m, k_miss_p), out_family="photon_circ_vac")


def spin_decay_channel(gamma_s: float, tau: float) -> KrausChannel:
    """Amplitude damping of both spin levels to the empty level over a hold tau."""
    if gamma_s < 0 or tau < 0:
        raise ValueError("gamma_s and tau must be nonnegative")
    f = math.exp(-gamma_s * tau)
    k0 = np.diag([1.0, f, f]).astype(complex)
    g = math.sqrt(max(1.0 - f * f, 0.0))
    k1 = np.zeros((3, 3), dtype=complex)
    k1[0, 1] = g
    k2 = np.zeros((3, 3), dtype=complex)
    k2[0, 2] = g
    return KrausChannel((k0, k1, k2))


def retrieve(stored: PureState, cfgs) -> tuple[PureState, float]:
    """Convert a stored spin state back to a photonic state.

    Channels with |beta| = 1 retrieve exactly; a channel with |beta| != 1
    emits (|empty> + beta |photon>)/sqrt(1+|beta|^2), kept as a coherent
    superposition.  Returns the retrieved state over (empty, s-, s+) output
    slots and the probability that all four channels emitted a photon.
    """
    cfgs = _require_four_channels(cfgs)
    if stored.families != ("spin",) * 4:
        raise ValueError("retrieve expects a four-ensemble spin state")
    op = _retrieval_matrix(cfgs[0].beta)
    for c in cfgs[1:]:
        op = np.kron(op, _retrieval_matrix(c.beta))
    amps = op @ stored.amps
    norm = np.linalg.norm(amps)
    if norm < 1e-12:
        raise ValueError("retrieval annihilated the state (all-beta-zero input?)")
    out = PureState.from_amplitudes(("photon_circ_vac",) * 4, amps / norm)
    _, prob = project_single_photon(out)
    return out, prob


_PHOTON_OF_VAC = {"photon_circ_vac": "photon_circ", "photon_hv_vac": "photon_hv"}


def project_single_photon(state):
    """Post-select on every output slot holding a photon.

    Accepts a PureState or DensityMatrix over vacuum-extended photonic
    families; returns (projected state over plain photonic families, prob).
    The projected state is None when the probability vanishes.
    """
    plain = tuple(_PHOTON_OF_VAC[f] for f in state.families)
    ext_dims = family_dims(state.families)
    sel = _single_photon_indices(state.families)
    if isinstance(state, PureState):
        sub = state.amps[sel]
        prob = float(np.sum(np.abs(sub) ** 2))
        if prob < 1e-14:
            return None, 0.0
        return PureState.from_amplitudes(plain, sub / math.sqrt(prob)), prob
    sub = state.matrix[np.ix_(sel, sel)]
    prob = float(np.trace(sub).real)
    if prob < 1e-14:
        return None, 0.0
    return DensityMatrix(plain, sub / prob), prob


def _single_photon_indices(families) -> np.ndarray:
    keep = []
    dim = int(np.prod(family_dims(families)))
    for idx in range(dim):
        labels = index_labels(families, idx)
        if all(lab != "0" for lab in labels):
            keep.append(idx)
    return np.array(keep, dtype=int)


@dataclass(frozen=True)
class MemoryReport:
    """Summary of one store/hold/retrieve pass of the four-photon state."""

    fidelity: float
    fidelity_postselected: float
    witness: float
    success_prob: float
    eta_channels: tuple[float, float, float, float]
    genuine: bool
    state_out: object = field(repr=False)  # PureState or DensityMatrix

    def to_text(self) -> str:
        lines = [
            f"fidelity {self.fidelity:.12g}",
            f"fidelity_postselected {self.fidelity_postselected:.12g}",
            f"witness {self.witness:.12g}",
            f"success_prob {self.success_prob:.12g}",
        ]
        for j, eta in enumerate(self.eta_channels, start=1):
            lines.append(f"eta_channel_{j} {eta:.12g}")
        lines.append(f"genuine_entanglement {'true' if self.genuine else 'false'}")
        return "\n".join(lines) + "\n"


def channel_efficiency(cfg: ChannelConfig, tau: float) -> float:
    """Per-channel storage-and-retrieval survival probability after a hold tau."""
    eta = math.exp(-2.0 * cfg.gamma_s * tau)
    if not cfg.ideal_retrieval:
        b2 = abs(cfg.beta) ** 2
        eta *= b2 / (1.0 + b2)
    return eta


def store_retrieve_cluster(cfgs, tau: float = 0.0) -> MemoryReport:
    """Run the full pipeline on the four-photon cluster state.

    waveplates in -> store -> hold tau (spin decay) -> retrieve -> waveplates
    out, then score the output against the input state.  With no decay the
    evolution stays pure; with decay the state is propagated as a density
    matrix through trace-preserving channels.
    """
    cfgs = _require_four_channels(cfgs)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    phi_in = cluster_state_4q()
    stored = store(waveplate_map(phi_in, "in"), cfgs)
    decaying = tau > 0 and any(c.gamma_s > 0 for c in cfgs)

    if not decaying:
        out_circ, success = retrieve(stored, cfgs)
        state_out = waveplate_map(out_circ, "out")
        target = embed(phi_in, state_out.families)
        fid = fidelity(target, state_out)
        ps_state, ps_prob = project_single_photon(state_out)
    else:
        rho = density_from_pure(stored)
        for j, c in enumerate(cfgs):
            rho, _ = apply_kraus(rho, spin_decay_channel(c.gamma_s, tau), j)
        for j, c in enumerate(cfgs):
            rho, _ = apply_kraus(rho, retrieval_channel(c.beta), j)
        state_out = waveplate_map(rho, "out")
        target = embed(phi_in, state_out.families)
        fid = fidelity(target, state_out)
        ps_state, ps_prob = project_single_photon(state_out)

    if ps_state is None:
        fid_ps = float("nan")
        wit = float("nan")
    else:
        fid_ps = fidelity(phi_in, ps_state)
        wit = witness_value(ps_state)
    etas = tuple(channel_efficiency(c, tau) for c in cfgs)
    return MemoryReport(
        fidelity=fid,
        fidelity_postselected=fid_ps,
        witness=wit,
        success_prob=ps_prob,
        eta_channels=etas,
        genuine=genuine_entanglement(fid),
        state_out=state_out,
    )
