"""Photon-mediated qubit couplings for arbitrary electromagnetic mode sets.

Generalizes the lattice-specific dispersive reduction: given any collection
of EM modes (frequencies, per-qubit sampled profiles, couplings), build the
qubit-qubit exchange self-energy and the mode-scattering (generalized Stark)
vertex, both within the rotating-wave approximation.  The nearest-neighbor
lattice is recovered as a special case, which doubles as a consistency check
on the hand-derived couplings used elsewhere in the package.

Resonant denominators ``omega - omega_n`` accept an imaginary regulator
``eta``; half the photon linewidth is the natural choice when modeling a
lossy structure.  Mode data can be loaded from a JSON file (frequencies and
couplings in GHz, converted to rad/ns at this boundary — see the README for
the schema).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import SystemParams, build_mode_set

TWO_PI = 2.0 * np.pi


@dataclass
class QubitLayout:
    positions: np.ndarray
    frequencies: np.ndarray  # per-qubit splittings, rad/ns
    dipole: float = 1.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        if self.positions.ndim != 1:
            raise ValueError("positions must be a 1d array")
        if len(np.unique(self.positions)) != self.positions.size:
            raise ValueError("qubit positions must be distinct")
        if self.frequencies.shape != self.positions.shape:
            raise ValueError("one frequency per qubit required")

    @property
    def n_qubits(self) -> int:
        return self.positions.size


@dataclass
class EMModeSet:
    """Sampled mode data: profiles are indexed (mode, qubit)."""

    frequencies: np.ndarray
    profiles: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.profiles = np.asarray(self.profiles, dtype=complex)
        self.couplings = np.asarray(self.couplings, dtype=complex)
        if self.profiles.ndim != 2 or self.profiles.shape[0] != self.frequencies.size:
            raise ValueError("profiles must be (n_modes, n_qubits)")
        if self.couplings.shape != self.frequencies.shape:
            raise ValueError("one coupling per mode required")
        if not np.all(np.isfinite(self.profiles.view(float))):
            raise ValueError("profiles must be finite")

    @property
    def mode_count(self) -> int:
        return self.frequencies.size

    def validate(self, orthonormal: bool = False, tol: float = 1e-10) -> None:
        if orthonormal:
            gram = self.profiles @ self.profiles.conj().T
            if np.abs(gram - np.eye(self.mode_count)).max() > tol:
                raise ValueError("sampled profiles are not orthonormal")


def lattice_em_modes(params: SystemParams, modes=None) -> tuple[EMModeSet, QubitLayout]:
    """Cast the cavity-array Bloch modes as a generic EM mode set."""
    if modes is None:
        modes = build_mode_set(params)
    ems = EMModeSet(
        frequencies=modes.frequencies,
        profiles=modes.profiles,
        couplings=np.full(params.n_sites, params.g, dtype=complex),
    )
    layout = QubitLayout(
        positions=np.arange(params.n_sites, dtype=float),
        frequencies=params.omega_q_sites,
    )
    return ems, layout


def _denominators(ems: EMModeSet, omega: float, eta: float) -> np.ndarray:
    d = omega + 1j * eta - ems.frequencies
    if eta == 0.0 and np.abs(d).min() < 1e-12 * max(np.abs(ems.frequencies).max(), 1.0):
        raise ValueError(
            "drive frequency resonant with a mode; supply a regulator eta "
            "(half the mode linewidth is the natural choice)"
        )
    return d


def self_energy(ems: EMModeSet, layout: QubitLayout, omega: float, eta: float = 0.0) -> np.ndarray:
    """Photon-mediated exchange Sigma_ij(omega), Hermitian for real omega."""
    if layout.n_qubits != ems.profiles.shape[1]:
        raise ValueError("mode profiles and layout disagree on qubit count")
    weights = np.abs(ems.couplings) ** 2 / _denominators(ems, omega, eta)
    return np.einsum("n,ni,nj->ij", weights, ems.profiles, ems.profiles.conj())


def stark_vertex(ems: EMModeSet, layout: QubitLayout, omega: float, qubit_i: int, eta: float = 0.0) -> np.ndarray:
    """Mode-scattering vertex at one qubit; element (m, n) carries 1/(omega - omega_n)."""
    phi = ems.profiles[:, qubit_i]
    d = _denominators(ems, omega, eta)
    return np.einsum("m,n,n,m->mn", ems.couplings.conj(), ems.couplings, phi / d, phi.conj())


def qubit_exchange_couplings(ems: EMModeSet, layout: QubitLayout, eta: float = 0.0) -> np.ndarray:
    # qubits may differ in frequency; each pair's exchange is evaluated at
    # the mean of the two splittings
    n = layout.n_qubits
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            omega = 0.5 * (layout.frequencies[i] + layout.frequencies[j])
            sig = self_energy(ems, layout, omega, eta)
            out[i, j] = sig[i, j]
            out[j, i] = np.conj(sig[i, j])
    return out


def generalized_w_state(ems: EMModeSet, mode_n: int, layout: QubitLayout | None = None) -> np.ndarray:
    """Single-excitation target addressed through mode n: amplitudes conj(phi_n)."""
    if not 0 <= mode_n < ems.mode_count:
        raise ValueError(f"mode index {mode_n} out of range")
    amps = ems.profiles[mode_n].conj()
    if layout is not None and layout.n_qubits != amps.size:
        raise ValueError("mode profiles and layout disagree on qubit count")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("mode profile vanishes at every qubit")
    return amps / norm


def tight_binding_reduction_error(params: SystemParams, modes=None) -> float:
    """Deviation of Sigma(omega_q) from its nearest-neighbor limit.

    Returns ||Sigma - (g/Delta)^2 (Delta I - J T)||_max normalized by
    g^2 J / Delta^2, with T the adjacency matrix; scales as O(J/Delta).
    """
    ems, layout = lattice_em_modes(params, modes)
    sigma = self_energy(ems, layout, params.omega_q)
    n = params.n_sites
    adjacency = np.zeros((n, n))
    n_bonds = n if params.boundary.value == "periodic" else n - 1
    for b in range(n_bonds):  # the two-site ring is double-bonded
        i, j = b, (b + 1) % n
        adjacency[i, j] += 1.0
        adjacency[j, i] += 1.0
    ratio = params.g / params.delta
    limit = ratio**2 * (params.delta * np.eye(n) - params.j_hop * adjacency)
    scale = params.g**2 * params.j_hop / params.delta**2
    return float(np.abs(sigma - limit).max() / scale)


# ---------------------------------------------------------------- file I/O


def load_em_modes(path) -> tuple[EMModeSet, QubitLayout]:
    """Read a JSON mode file; GHz quantities become rad/ns here."""
    data = json.loads(Path(path).read_text())
    qubits = data["qubits"]
    layout = QubitLayout(
        positions=np.asarray(qubits["positions"], dtype=float),
        frequencies=TWO_PI * np.asarray(qubits["frequencies_ghz"], dtype=float),
        dipole=float(qubits.get("dipole", 1.0)),
    )

    def as_complex(value):
        if isinstance(value, (list, tuple)):
            return complex(value[0], value[1])
        return complex(value)

    freqs, couplings, profiles = [], [], []
    for mode in data["modes"]:
        freqs.append(TWO_PI * float(mode["frequency_ghz"]))
        couplings.append(TWO_PI * as_complex(mode["coupling_ghz"]))
        profile = [as_complex(v) for v in mode["profile"]]
        if len(profile) != layout.n_qubits:
            raise ValueError("profile length must match the qubit count")
        profiles.append(profile)
    ems = EMModeSet(
        frequencies=np.asarray(freqs),
        profiles=np.asarray(profiles, dtype=complex),
        couplings=np.asarray(couplings),
    )
    return ems, layout
