"""System definition for a driven qubit-cavity chain.

Conventions
-----------
* All frequencies, couplings and rates are angular, in rad/ns.  Plain-GHz
  values from config files are multiplied by 2*pi at the config boundary
  (see :mod:`wstate_forge.sweep`); nothing in this package converts units
  anywhere else.
* The chain has ``n_sites`` cavities (frequency ``omega_c``, hopping ``j_hop``),
  one qubit per cavity (frequency ``omega_q``, coupling ``g``).
* Detunings are measured in the frame rotating at the drive frequency
  ``omega_d``:  ``delta_q = omega_q - omega_d`` and ``delta_c = omega_d -
  omega_c``.  The qubit-cavity detuning ``delta = omega_q - omega_c`` is
  positive on the dispersive side used throughout.
* Photonic normal modes:  periodic chains use plane waves
  ``phi_k(j) = exp(-i k j)/sqrt(N)`` with ``k = 2 pi n / N``; open chains use
  standing waves ``phi_k(j) = sqrt(2/(N+1)) sin(k (j+1))`` with
  ``k = pi (n+1)/(N+1)``.  Both give ``omega_k = omega_c - 2 J cos k``.
* Mode ordering is ascending in frequency, ties broken by ascending ``k``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np


class Boundary(str, enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


def _optional_site_array(value, n: int, name: str):
    if value is None:
        return None
    arr = np.asarray(value, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Static chain parameters.  Per-site override arrays hold additive
    deviations from the homogeneous values and default to None (clean chain).
    """

    n_sites: int
    omega_c: float
    omega_q: float
    g: float
    j_hop: float
    kappa: float
    gamma: float
    gamma_phi: float
    boundary: Boundary = Boundary.OPEN
    delta_omega_c: np.ndarray | None = None
    delta_omega_q: np.ndarray | None = None
    delta_g: np.ndarray | None = None
    delta_j: np.ndarray | None = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        for name in ("omega_c", "omega_q", "g", "j_hop"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("kappa", "gamma", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        delta = self.omega_q - self.omega_c
        if delta <= 0:
            raise ValueError("omega_q must exceed omega_c (dispersive side)")
        ratio = self.g / delta
        if ratio > 0.5:
            raise ValueError(f"g/delta = {ratio:.3f} breaks the dispersive hierarchy (limit 0.5)")
        if ratio > 0.2:
            warnings.warn(f"g/delta = {ratio:.3f} strains the dispersive regime", stacklevel=2)
        n = self.n_sites
        for name in ("delta_omega_c", "delta_omega_q", "delta_g", "delta_j"):
            object.__setattr__(self, name, _optional_site_array(getattr(self, name), n, name))

    # -- per-site views -------------------------------------------------

    @property
    def delta(self) -> float:
        return self.omega_q - self.omega_c

    @property
    def omega_c_sites(self) -> np.ndarray:
        base = np.full(self.n_sites, self.omega_c)
        return base if self.delta_omega_c is None else base + self.delta_omega_c

    @property
    def omega_q_sites(self) -> np.ndarray:
        base = np.full(self.n_sites, self.omega_q)
        return base if self.delta_omega_q is None else base + self.delta_omega_q

    @property
    def g_sites(self) -> np.ndarray:
        base = np.full(self.n_sites, self.g)
        return base if self.delta_g is None else base + self.delta_g

    @property
    def j_bonds(self) -> np.ndarray:
        """Hopping per bond.  Open chains have n_sites - 1 bonds, periodic
        chains n_sites (the last wraps around).  Override arrays always carry
        n_sites entries; the unused last entry is ignored for open chains.
        """
        n_bonds = self.n_sites if self.boundary is Boundary.PERIODIC else self.n_sites - 1
        base = np.full(n_bonds, self.j_hop)
        if self.delta_j is not None:
            base = base + self.delta_j[:n_bonds]
        return base

    @property
    def is_homogeneous(self) -> bool:
        return all(
            ov is None or not np.any(ov)
            for ov in (self.delta_omega_c, self.delta_omega_q, self.delta_g, self.delta_j)
        )


@dataclass(frozen=True, eq=False)
class DriveProfile:
    """Site-space drive amplitudes (complex, rad/ns) at frequency omega_d."""

    amplitudes: np.ndarray
    omega_d: float

    def __post_init__(self):
        arr = np.asarray(self.amplitudes, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("amplitudes must be a nonempty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", arr)
        if not np.isfinite(self.omega_d):
            raise ValueError("omega_d must be finite")

    @property
    def n_sites(self) -> int:
        return self.amplitudes.size

    def with_omega_d(self, omega_d: float) -> "DriveProfile":
        return DriveProfile(self.amplitudes, omega_d)

    @staticmethod
    def uniform(n_sites: int, amplitude: complex, omega_d: float) -> "DriveProfile":
        return DriveProfile(np.full(n_sites, amplitude, dtype=complex), omega_d)

    @staticmethod
    def single_site(n_sites: int, amplitude: complex, omega_d: float, site: int = 0) -> "DriveProfile":
        if not 0 <= site < n_sites:
            raise ValueError(f"site {site} outside chain of {n_sites}")
        amps = np.zeros(n_sites, dtype=complex)
        amps[site] = amplitude
        return DriveProfile(amps, omega_d)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Photonic normal modes.

    ``profiles[n, j]`` is phi_{k_n}(j); rows are orthonormal under
    sum_j profiles[n, j] * conj(profiles[m, j]).  ``wavevectors`` holds the
    analytic k values, or NaN for numerically diagonalized (disordered)
    lattices where k is not a good label.
    """

    wavevectors: np.ndarray
    frequencies: np.ndarray
    profiles: np.ndarray
    boundary: Boundary
    analytic: bool = True

    def __post_init__(self):
        wv = np.asarray(self.wavevectors, dtype=float)
        fr = np.asarray(self.frequencies, dtype=float)
        pr = np.asarray(self.profiles, dtype=complex)
        n = fr.size
        if wv.shape != (n,) or pr.shape != (n, n):
            raise ValueError("inconsistent mode-set shapes")
        object.__setattr__(self, "wavevectors", wv)
        object.__setattr__(self, "frequencies", fr)
        object.__setattr__(self, "profiles", pr)

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    def validate(self, tol: float = 1e-10) -> None:
        """Check orthonormality and completeness of the profiles."""
        gram = self.profiles @ self.profiles.conj().T
        if not np.allclose(gram, np.eye(self.n_modes), atol=tol):
            raise ValueError("mode profiles are not orthonormal")
        comp = self.profiles.conj().T @ self.profiles
        if not np.allclose(comp, np.eye(self.n_modes), atol=tol):
            raise ValueError("mode profiles are not complete")


def _analytic_modes(params: SystemParams) -> ModeSet:
    n = params.n_sites
    sites = np.arange(n)
    if params.boundary is Boundary.PERIODIC:
        k = 2.0 * np.pi * np.arange(n) / n
        profiles = np.exp(-1j * np.outer(k, sites)) / np.sqrt(n)
    else:
        k = np.pi * (np.arange(n) + 1) / (n + 1)
        profiles = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(k, sites + 1)).astype(complex)
    freqs = params.omega_c - 2.0 * params.j_hop * np.cos(k)
    order = np.lexsort((k, freqs))
    return ModeSet(k[order], freqs[order], profiles[order], params.boundary, analytic=True)


def _hopping_matrix(params: SystemParams) -> np.ndarray:
    n = params.n_sites
    h = np.diag(params.omega_c_sites)
    bonds = params.j_bonds
    for b, jb in enumerate(bonds):
        i, j = b, (b + 1) % n
        if i == j:  # n_sites == 1 with periodic wrap: a self-loop shifts the frequency
            h[i, i] -= 2.0 * jb
            continue
        h[i, j] -= jb
        h[j, i] -= jb
    return h


def _numeric_modes(params: SystemParams) -> ModeSet:
    h = _hopping_matrix(params)
    if not np.allclose(h, h.T):
        raise ValueError("photonic hopping matrix is not symmetric")
    freqs, vecs = np.linalg.eigh(h)
    profiles = vecs.T.astype(complex)
    wavevectors = np.full(params.n_sites, np.nan)
    return ModeSet(wavevectors, freqs, profiles, params.boundary, analytic=False)


def build_mode_set(params: SystemParams) -> ModeSet:
    """Normal modes of the cavity chain.

    Homogeneous lattices take the analytic branch (plane or standing waves);
    any cavity-frequency or hopping disorder routes to numeric
    diagonalization of the tight-binding matrix.
    """
    photonic_clean = (params.delta_omega_c is None or not np.any(params.delta_omega_c)) and (
        params.delta_j is None or not np.any(params.delta_j)
    )
    if photonic_clean:
        return _analytic_modes(params)
    return _numeric_modes(params)


def drive_to_mode_basis(drive: DriveProfile, modes: ModeSet) -> np.ndarray:
    """Mode-space drive amplitudes eps_k = sum_j phi_k(j) eps_j."""
    if drive.n_sites != modes.n_modes:
        raise ValueError("drive length does not match mode count")
    return modes.profiles @ drive.amplitudes


def mean_field_amplitudes(drive: DriveProfile, modes: ModeSet, kappa: float) -> np.ndarray:
    """Coherent mode amplitudes a_k = eps_k / (omega_d - omega_k + i kappa/2).

    kappa = 0 is rejected when the drive sits exactly on a mode, where the
    steady amplitude would diverge.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    eps_k = drive_to_mode_basis(drive, modes)
    detuning = drive.omega_d - modes.frequencies
    if kappa == 0.0 and np.any(detuning == 0.0):
        raise ValueError("undamped drive resonant with a mode has no steady amplitude")
    return eps_k / (detuning + 0.5j * kappa)
