"""1-D adiabatic light-storage dynamics for a single lambda channel.

The resonant slowly-varying-envelope equations for the probe field E, the
optical polarization P and the spin coherence S,

    dE/dz = i sqrt(d) P
    dP/dt = -gamma P + i sqrt(d) gamma E + i Omega S
    dS/dt = -gamma_s S + i Omega P

are integrated on z in [0, 1] with time in units of 1/gamma.  The optical
depth d is normalized so a resonant probe attenuates as exp(-2 d) in
intensity.  Field envelopes are normalized to photon flux, so time integrals
of |E|^2 count photons and the storage efficiency is a plain energy ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import get_stepper

DEFAULT_NZ = 200
DEFAULT_DT_GAMMA = 0.01  # time step in units of 1/gamma


class GridResolutionError(ValueError):
    """The requested grids cannot resolve the dynamics."""


@dataclass(frozen=True)
class MediumParams:
    """Ensemble parameters: optical depth, linewidths, and length (m)."""

    depth: float
    gamma: float = 1.0      # excited-state linewidth, 1/s
    gamma_s: float = 0.0    # spin-wave decay, 1/s
    length: float = 1.0     # m, normalization only

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.gamma_s < 0:
            raise ValueError("gamma_s must be nonnegative")
        if not self.length > 0:
            raise ValueError("length must be positive")


@dataclass(frozen=True)
class ControlSchedule:
    """Control Rabi frequency samples Omega(t) on a strictly increasing grid."""

    times: np.ndarray  # s
    omega: np.ndarray  # rad/s

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("schedule needs at least two time samples")
        if omega.shape != times.shape:
            raise ValueError("times and omega must have matching shapes")
        if np.any(np.diff(times) <= 0):
            raise ValueError("schedule times must be strictly increasing")
        if np.any(omega < 0):
            raise ValueError("omega samples must be nonnegative")
        times.setflags(write=False)
        omega.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "omega", omega)

    @classmethod
    def constant(cls, omega: float, t_start: float, t_stop: float) -> "ControlSchedule":
        return cls(np.array([t_start, t_stop]), np.array([omega, omega]))

    def value_at(self, t) -> np.ndarray:
        """Linear interpolation, clamped to the end values outside the grid."""
        return np.interp(t, self.times, self.omega)

    def reversed(self) -> "ControlSchedule":
        t0, t1 = self.times[0], self.times[-1]
        return ControlSchedule(t0 + t1 - self.times[::-1], self.omega[::-1].copy())

    def scaled(self, factor: float) -> "ControlSchedule":
        return ControlSchedule(self.times, self.omega * factor)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])


@dataclass(frozen=True)
class FieldEnvelope:
    """Complex probe envelope at the medium boundary, in sqrt(photons/s)."""

    times: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        amps = np.asarray(self.amps, dtype=complex)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("envelope needs at least two samples")
        if amps.shape != times.shape:
            raise ValueError("times and amps must have matching shapes")
        if np.any(np.diff(times) <= 0):
            raise ValueError("envelope times must be strictly increasing")
        times.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def gaussian(cls, t_center: float, sigma: float, t_start: float, t_stop: float,
                 n_samples: int = 800, energy: float = 1.0) -> "FieldEnvelope":
        """Gaussian pulse normalized so the envelope carries `energy` photons."""
        t = np.linspace(t_start, t_stop, n_samples)
        amps = np.exp(-0.5 * ((t - t_center) / sigma) ** 2).astype(complex)
        raw = np.trapezoid(np.abs(amps) ** 2, t)
        return cls(t, amps * math.sqrt(energy / raw))

    def energy(self) -> float:
        return float(np.trapezoid(np.abs(self.amps) ** 2, self.times))

    def value_at(self, t) -> np.ndarray:
        """Interpolated amplitude; identically zero outside the sample window."""
        re = np.interp(t, self.times, self.amps.real, left=0.0, right=0.0)
        im = np.interp(t, self.times, self.amps.imag, left=0.0, right=0.0)
        return re + 1j * im

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


@dataclass(frozen=True)
class SpinWaveProfile:
    """Spin coherence S(z) on the scaled medium coordinate z in [0, 1]."""

    z: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        if z.ndim != 1 or z.size < 2 or s.shape != z.shape:
            raise ValueError("z and s must be matching 1-D arrays")
        if abs(z[0]) > 1e-12 or abs(z[-1] - 1.0) > 1e-12:
            raise ValueError("z grid must span [0, 1]")
        z.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "s", s)

    def norm2(self) -> float:
        """Stored excitation fraction integral |S|^2 dz."""
        return float(np.trapezoid(np.abs(self.s) ** 2, self.z))

    def resampled(self, nz: int) -> "SpinWaveProfile":
        z = np.linspace(0.0, 1.0, nz)
        re = np.interp(z, self.z, self.s.real)
        im = np.interp(z, self.z, self.s.imag)
        return SpinWaveProfile(z, re + 1j * im)

    def mirrored(self) -> "SpinWaveProfile":
        return SpinWaveProfile(self.z, self.s[::-1].copy())

    def normalized(self) -> "SpinWaveProfile":
        n = math.sqrt(self.norm2())
        if n < 1e-300:
            raise ValueError("cannot normalize an empty spin wave")
        return SpinWaveProfile(self.z, self.s / n)


@dataclass(frozen=True)
class EvolveResult:
    """Output field, final spin wave, and the probability bookkeeping."""

    e_out: FieldEnvelope
    spin: SpinWaveProfile
    energy_in: float
    energy_out: float
    stored_initial: float
    stored_final: float
    scattered: float
    spin_decayed: float
    polarization: np.ndarray = field(repr=False)  # final P(z)

    @property
    def residual(self) -> float:
        """Relative probability-bookkeeping error of the run."""
        lhs = self.energy_in + self.stored_initial
        rhs = self.energy_out + self.stored_final + self.scattered + self.spin_decayed
        return abs(lhs - rhs) / max(lhs, 1e-30)


def _check_resolution(dt_g: float, dz: float, depth: float, omega_max_g: float,
                      duration_g: float | None):
    if dt_g > 0.5:
        raise GridResolutionError(f"dt = {dt_g:.3g}/gamma cannot resolve the optical decay")
    if omega_max_g * dt_g > 0.5:
        raise GridResolutionError(
            f"dt*Omega = {omega_max_g * dt_g:.3g} gamma; reduce dt to resolve the control")
    if depth * dz > 5.0:
        raise GridResolutionError(
            f"d*dz = {depth * dz:.3g}; increase nz to resolve the absorption length")
    if duration_g is not None and duration_g < 10.0 * dt_g:
        raise GridResolutionError("input envelope spans fewer than 10 time steps")


def evolve(medium: MediumParams, control: ControlSchedule,
           e_in: FieldEnvelope | None = None,
           s0: SpinWaveProfile | None = None, *,
           t_span: tuple[float, float] | None = None,
           nz: int = DEFAULT_NZ, dt: float | None = None,
           backend: str | None = None) -> EvolveResult:
    """Integrate one storage or retrieval pass.

    Either an input envelope (storage), an initial spin wave (retrieval), or
    both may be supplied.  t_span defaults to the union of the envelope and
    schedule windows.  Probability bookkeeping holds to the discretization
    error: energy in + initially stored = energy out + stored + scattered +
    spin-decayed.
    """
    if e_in is None and s0 is None:
        raise ValueError("provide an input envelope, an initial spin wave, or both")
    gamma = medium.gamma
    if dt is None:
        dt = DEFAULT_DT_GAMMA / gamma
    if t_span is None:
        starts = [control.span[0]]
        stops = [control.span[1]]
        if e_in is not None:
            starts.append(float(e_in.times[0]))
            stops.append(float(e_in.times[-1]))
        t_span = (min(starts), max(stops))
    t0, t1 = t_span
    if not t1 > t0:
        raise ValueError("t_span must have positive extent")

    # dimensionless grids: time in 1/gamma, z in [0, 1]
    dt_g = dt * gamma
    nt = int(round((t1 - t0) * gamma / dt_g)) + 1
    if nt < 2:
        raise GridResolutionError("time window shorter than one step")
    times = t0 + np.arange(nt) * dt_g / gamma
    dz = 1.0 / (nz - 1)
    z = np.linspace(0.0, 1.0, nz)

    omega_g = control.value_at(times) / gamma
    duration_g = e_in.duration * gamma if e_in is not None else None
    _check_resolution(dt_g, dz, medium.depth, float(np.max(omega_g)), duration_g)

    if e_in is not None:
        e_boundary = e_in.value_at(times) / math.sqrt(gamma)
        energy_in = float(np.trapezoid(np.abs(e_boundary) ** 2, dx=dt_g))
    else:
        e_boundary = np.zeros(nt, dtype=complex)
        energy_in = 0.0

    p = np.zeros(nz, dtype=complex)
    if s0 is not None:
        s = s0.resampled(nz).s.astype(complex).copy()
    else:
        s = np.zeros(nz, dtype=complex)
    # initial field profile from dE/dz = i sqrt(d) P with P = 0
    e = np.full(nz, e_boundary[0], dtype=complex)

    e_out = np.zeros(nt, dtype=complex)
    p_sq = np.zeros(nt, dtype=float)
    s_sq = np.zeros(nt, dtype=float)
    stored_initial = float(np.trapezoid(np.abs(s) ** 2, z))

    stepper = get_stepper(backend)
    stepper(e_boundary, omega_g, medium.depth, medium.gamma_s / gamma,
            dz, dt_g, p, s, e, e_out, p_sq, s_sq)

    energy_out = float(np.trapezoid(np.abs(e_out) ** 2, dx=dt_g))
    stored_final = float(np.trapezoid(np.abs(s) ** 2 + np.abs(p) ** 2, z))
    scattered = 2.0 * float(np.trapezoid(p_sq, dx=dt_g))
    spin_decayed = 2.0 * (medium.gamma_s / gamma) * float(np.trapezoid(s_sq, dx=dt_g))

    return EvolveResult(
        e_out=FieldEnvelope(times, e_out * math.sqrt(gamma)),
        spin=SpinWaveProfile(z, s),
        energy_in=energy_in,
        energy_out=energy_out,
        stored_initial=stored_initial,
        stored_final=stored_final,
        scattered=scattered,
        spin_decayed=spin_decayed,
        polarization=p,
    )


def spin_decay_factor(gamma_s: float, tau: float) -> float:
    """Efficiency multiplier exp(-2 gamma_s tau) for a hold of length tau."""
    if gamma_s < 0 or tau < 0:
        raise ValueError("gamma_s and tau must be nonnegative")
    return math.exp(-2.0 * gamma_s * tau)


def storage_retrieval_efficiency(medium: MediumParams, c_store: ControlSchedule,
                                 c_retrieve: ControlSchedule, e_in: FieldEnvelope,
                                 tau: float = 0.0, *,
                                 nz: int = DEFAULT_NZ, dt: float | None = None,
                                 backend: str | None = None) -> float:
    """Retrieved-to-incident photon ratio for a full store/hold/retrieve pass.

    The hold itself is not simulated: with the control off the spin wave is
    stationary except for decay, which enters as the exact multiplier
    exp(-2 gamma_s tau).
    """
    if e_in.energy() <= 0.0:
        raise ValueError("input envelope carries no energy")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    storage = evolve(medium, c_store, e_in=e_in, nz=nz, dt=dt, backend=backend)
    retrieval = evolve(medium, c_retrieve, s0=storage.spin, nz=nz, dt=dt, backend=backend)
    eta = retrieval.energy_out / storage.energy_in
    return eta * spin_decay_factor(medium.gamma_s, tau)


@dataclass(frozen=True)
class AdiabaticityCheck:
    ratio: float
    passed: bool
    threshold: float


def check_adiabaticity(g2n: float, gamma: float, t_pulse: float,
                       threshold: float = 10.0) -> AdiabaticityCheck:
    """Adiabatic-following figure of merit g^2 N T / gamma against a threshold.

    Storage is adiabatic when the collective coupling beats the decay per
    pulse bandwidth; below threshold the efficiency of evolve() degrades.
    """
    if not (g2n > 0 and gamma > 0 and t_pulse > 0):
        raise ValueError("g2n, gamma and t_pulse must be positive")
    ratio = g2n * t_pulse / gamma
    return AdiabaticityCheck(ratio=ratio, passed=ratio >= threshold, threshold=threshold)
