"""Photon-mediated pump rates.

The drive, taken twice, flips one spin up while dumping a photon into a lossy
collective cavity mode q.  The golden-rule rate from the dressed ground state
into excited target t is

    rate(t) = 2 pi sum_q L_tq^2 rho_q(omega_d + E~_0 - E~_t)

where rho_q is the Lorentzian density of mode q, centered at its lab-frame
frequency omega_c - 2J cos q with full width kappa.  Energy bookkeeping: the
rotating-frame argument omega_d + E~_0 - E~_t is exactly the lab frequency of
the emitted photon, so the Lorentzian centers are lab-frame mode frequencies.

Matrix elements L_tq come from the second-order vertex

    L_kq = | (1 + 2 Delta/Delta_c) (g/Delta)^3 (1/Delta_q)
            sum_{k'k''q'} f_{kk'k''} f*_{q'qk'} eps_{k''} eps_{q'} |

with the triple-profile overlap tensor f; rows are transformed onto whatever
zeroth-order targets the supplied eigensystem carries (plane waves, standing
waves, bright/dark pair combinations, or numeric disorder states).

Canonical pipeline (what `rate_table` assembles):  matrix elements against
*bare* targets, transition energies from the drive-dressed spectrum, one
table shared by every downstream solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from wstate_forge.effective import (
    EffectiveSpinModel,
    EigenSystem,
    StateLabel,
    build_effective_model,
    degenerate_pair_states,
    perturbed_eigensystem,
    single_excitation_spectrum,
)
from wstate_forge.model import Boundary, DriveProfile, ModeSet, SystemParams, build_mode_set


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Lorentzian density of the lossy collective modes (unit area each)."""

    mode_frequencies: np.ndarray
    kappa: float

    def __post_init__(self):
        freqs = np.asarray(self.mode_frequencies, dtype=float)
        object.__setattr__(self, "mode_frequencies", freqs)
        if self.kappa <= 0:
            raise ValueError("kappa must be positive for a finite linewidth")

    def density(self, omega: float) -> np.ndarray:
        """rho_q(omega) for every mode q, in 1/(rad/ns)."""
        half = 0.5 * self.kappa
        return (half / np.pi) / ((omega - self.mode_frequencies) ** 2 + half**2)


@dataclass(frozen=True, eq=False)
class RateTable:
    """Pump rates and matrix elements per target state.

    target_sites[:, t] holds the bare single-excitation site amplitudes of
    target t (used downstream to locate the matching eigenstate of a larger
    diagonalization); transition_energies[t] = E~_t - E~_0 in the rotating
    frame, so the emitted-photon lab frequency is omega_d - transition_energy
    + ... evaluated as drive_frequency + E~_0 - E~_t.
    """

    target_labels: tuple
    gamma_up: np.ndarray
    matrix_elements: np.ndarray
    drive_frequency: float
    target_sites: np.ndarray
    transition_energies: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma_up, dtype=float)
        lam = np.asarray(self.matrix_elements, dtype=float)
        if np.any(g < 0):
            raise ValueError("pump rates must be nonnegative")
        if lam.shape[0] != g.size or len(self.target_labels) != g.size:
            raise ValueError("inconsistent rate-table shapes")
        object.__setattr__(self, "gamma_up", g)
        object.__setattr__(self, "matrix_elements", lam)

    @property
    def n_targets(self) -> int:
        return self.gamma_up.size

    @property
    def total_pump(self) -> float:
        return float(self.gamma_up.sum())


# ------------------------------------------------------------ matrix elements


def mode_overlap_tensor(modes: ModeSet) -> np.ndarray:
    """f[k, k', k''] = sum_i phi_k(i) phi_k'*(i) phi_k''*(i)."""
    p = modes.profiles
    return np.einsum("ai,bi,ci->abc", p, p.conj(), p.conj())


def _target_site_amplitudes(eigensystem: EigenSystem) -> tuple:
    """(site-amplitude matrix N x n_targets, target column indices)."""
    cols = eigensystem.manifold_indices(1)
    if not cols:
        raise ValueError("eigensystem has no single-excitation states")
    n = eigensystem.n_sites
    site_rows = [eigensystem.basis_states.index(1 << i) for i in range(n)]
    return eigensystem.states[np.ix_(site_rows, cols)], cols


def _transition_amplitudes(
    modes: ModeSet, drive: DriveProfile, params: SystemParams, eigensystem: EigenSystem
) -> np.ndarray:
    """Complex second-order amplitudes A_tq before taking magnitudes."""
    delta = params.delta
    delta_c = drive.omega_d - params.omega_c
    delta_q = params.omega_q - drive.omega_d
    if delta_c == 0:
        raise ValueError("drive resonant with the bare cavity (Delta_c = 0) is outside dispersive validity")
    if delta_q == 0:
        raise ValueError("drive resonant with the bare qubit (Delta_q = 0)")
    ratio = params.g / delta
    prefactor = (1.0 + 2.0 * delta / delta_c) * ratio**3 / delta_q

    f = mode_overlap_tensor(modes)
    eps_k = modes.profiles @ drive.amplitudes
    # A_kq in the photon-mode basis, summed exactly as written
    a_modes = prefactor * np.einsum("KAB,CQA,B,C->KQ", f, f.conj(), eps_k, eps_k)
    targets, _ = _target_site_amplitudes(eigensystem)
    # <t|k> for target t against the mode-profile spin waves |k>
    overlap = targets.conj().T @ modes.profiles.conj().T
    return overlap @ a_modes


def transition_matrix_elements(
    modes: ModeSet, drive: DriveProfile, params: SystemParams, eigensystem: EigenSystem
) -> np.ndarray:
    """L_tq magnitudes; rows follow the eigensystem's single-excitation order."""
    return np.abs(_transition_amplitudes(modes, drive, params, eigensystem))


# -------------------------------------------------------------------- rates


def pump_rates(
    lambda_matrix: np.ndarray,
    spectral: SpectralFunction,
    eigensystem: EigenSystem,
    omega_d: float,
) -> RateTable:
    """Golden-rule table from a matrix-element matrix and an eigensystem.

    Row order of lambda_matrix must follow the eigensystem's
    single-excitation states; energies are taken from that eigensystem as-is.
    """
    lam = np.asarray(lambda_matrix, dtype=float)
    targets, cols = _target_site_amplitudes(eigensystem)
    if lam.shape != (len(cols), spectral.mode_frequencies.size):
        raise ValueError("matrix-element shape does not match eigensystem/mode count")
    e0 = eigensystem.energies[eigensystem.ground_index()]
    e_t = eigensystem.energies[cols]
    gamma = np.array(
        [2.0 * np.pi * np.sum(lam[t] ** 2 * spectral.density(omega_d + e0 - e_t[t])) for t in range(len(cols))]
    )
    labels = tuple(eigensystem.labels[c] for c in cols)
    return RateTable(labels, gamma, lam, omega_d, targets, e_t - e0)


def _drive_resolved_systems(
    params: SystemParams, drive: DriveProfile, modes: ModeSet
) -> tuple:
    """(target eigensystem, energy eigensystem, target->energy column map).

    Targets are zeroth order in the drive; energies carry the second-order
    drive shifts.  On clean periodic lattices both come from the
    degenerate-pair construction; otherwise targets are the bare spectrum
    and energies the dressed one, matched state-by-state by overlap.
    """
    model = build_effective_model(params, drive)
    if modes.boundary is Boundary.PERIODIC and modes.analytic and model.is_homogeneous:
        deg = degenerate_pair_states(model, modes, drive)
        cols = deg.manifold_indices(1)
        return deg, deg, {c: c for c in cols}
    bare = single_excitation_spectrum(model, modes)
    dressed = perturbed_eigensystem(model, modes, drive)
    d_cols = dressed.manifold_indices(1)
    mapping = {}
    for c in bare.manifold_indices(1):
        overlaps = np.abs(dressed.states[:, d_cols].conj().T @ bare.states[:, c])
        mapping[c] = d_cols[int(np.argmax(overlaps))]
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("dressed states could not be matched one-to-one to bare targets")
    return bare, dressed, mapping


def rate_table(params: SystemParams, drive: DriveProfile, modes: ModeSet | None = None) -> RateTable:
    """Canonical pipeline: bare targets, dressed energies, one shared table."""
    if modes is None:
        modes = build_mode_set(params)
    target_sys, energy_sys, mapping = _drive_resolved_systems(params, drive, modes)
    lam = transition_matrix_elements(modes, drive, params, target_sys)
    targets, cols = _target_site_amplitudes(target_sys)
    e0 = energy_sys.energies[energy_sys.ground_index()]
    spectral = SpectralFunction(modes.frequencies, params.kappa)
    trans = np.array([energy_sys.energies[mapping[c]] - e0 for c in cols])
    omega_d = drive.omega_d
    gamma = np.array(
        [2.0 * np.pi * np.sum(lam[t] ** 2 * spectral.density(omega_d - trans[t])) for t in range(len(cols))]
    )
    labels = tuple(target_sys.labels[c] for c in cols)
    return RateTable(labels, gamma, lam, omega_d, targets, trans)


# -------------------------------------------------------- optimal frequency


def _find_target_column(eigensystem: EigenSystem, target_k) -> int:
    cols = eigensystem.manifold_indices(1)
    if isinstance(target_k, (int, np.integer)):
        if not 0 <= target_k < len(cols):
            raise ValueError(f"target index {target_k} out of range")
        return cols[int(target_k)]
    matches = [c for c in cols if eigensystem.labels[c].k is not None and abs(eigensystem.labels[c].k - target_k) < 1e-9]
    if not matches:
        raise ValueError(f"no single-excitation state labeled k = {target_k}")
    # bright member preferred when a pair carries the same k
    for c in matches:
        if eigensystem.labels[c].parity in (None, "+"):
            return c
    return matches[0]


def _mode_index(modes: ModeSet, q0) -> int:
    if isinstance(q0, (int, np.integer)):
        if not 0 <= q0 < modes.n_modes:
            raise ValueError(f"mode index {q0} out of range")
        return int(q0)
    matches = np.where(np.abs(modes.wavevectors - q0) < 1e-9)[0]
    if matches.size == 0:
        raise ValueError(f"no mode at wavevector {q0}")
    return int(matches[0])


def optimal_drive_frequency(
    params: SystemParams,
    modes: ModeSet,
    drive: DriveProfile,
    target_k,
    q0,
) -> float:
    """Drive frequency putting the emitted photon exactly on mode q0.

    Solves omega_d + E~_0(omega_d) - E~_t(omega_d) = omega_q0 (lab) with the
    same dressed energies the rate pipeline uses; the drive-dependent shifts
    make this mildly implicit, so it is solved to machine precision rather
    than by a single explicit pass.  target_k / q0 accept either a wavevector
    label or a plain index.
    """
    q_col = _mode_index(modes, q0)
    omega_mode = modes.frequencies[q_col]

    def transition(omega_d: float):
        d = drive.with_omega_d(omega_d)
        target_sys, energy_sys, mapping = _drive_resolved_systems(params, d, modes)
        t_col = _find_target_column(target_sys, target_k)
        e0 = energy_sys.energies[energy_sys.ground_index()]
        return energy_sys.energies[mapping[t_col]] - e0, target_sys, t_col

    def objective(omega_d: float) -> float:
        trans, _, _ = transition(omega_d)
        return omega_d - trans - omega_mode

    # zeroth-order seed: halfway point shifted by the two dispersions
    model0 = build_effective_model(params, drive.with_omega_d(0.5 * (params.omega_q + params.omega_c)))
    seed = 0.5 * (params.omega_q + model0.stark_shift + omega_mode)
    span = max(10.0 * params.kappa, 4.0 * model0.xy_coupling, 1e-6)
    lo, hi = seed - span, seed + span
    for _ in range(60):
        flo, fhi = objective(lo), objective(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi < 0:
            break
        span *= 2.0
        lo, hi = seed - span, seed + span
    else:
        raise ValueError("no drive frequency satisfies the resonance condition in range")
    omega_opt = brentq(objective, lo, hi, xtol=1e-12, rtol=1e-15)

    _, target_sys, t_col = transition(omega_opt)
    lam = transition_matrix_elements(modes, drive.with_omega_d(omega_opt), params, target_sys)
    row = target_sys.manifold_indices(1).index(t_col)
    if lam[row, q_col] <= 1e-12 * max(lam.max(), 1e-300):
        raise ValueError("mode cannot channel the mechanism for this target (vanishing matrix element)")
    return float(omega_opt)
