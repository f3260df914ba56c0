"""Effective spin chain after dispersive elimination of the photons.

The qubit-only Hamiltonian is an isotropic XY chain in a site-dependent
field,

    H = sum_i [ (1/2) h_i . sigma_i ]  -  sum_<ij> K_ij (s+_i s-_j + h.c.),

with K_ij = J (g/Delta)^2 > 0 on nearest-neighbor bonds (the minus sign is
inherited from the photon hopping).  The transverse field encodes the drive:
(1/2)(h^x sx + h^y sy) = c s+ + c* s- with c = (g/Delta) eps_site, so
h^x = 2 Re(eps)(g/Delta), h^y = -2 Im(eps)(g/Delta).  The longitudinal part
is h^z = Delta_q + g^2/Delta in the frame rotating at the drive frequency.

Energies are reported relative to the bare all-down (vacuum) state, which
sits at exactly zero; single-excitation plane waves then have
E_k = Delta_q + g^2/Delta - 2 J (g/Delta)^2 cos k.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from wstate_forge.model import Boundary, DriveProfile, ModeSet, SystemParams

# Bare gaps below this (rad/ns) are treated as degenerate and must go
# through the degenerate-pair branch.  Far below any physical splitting
# J(g/Delta)^2/N at realistic parameters.
DEGENERACY_THRESHOLD = 1e-9

DEFAULT_BASIS_CAP = 20_000


@dataclass(frozen=True)
class StateLabel:
    """Per-eigenstate metadata.  k and parity are None when undefined
    (numeric-disorder states, exact-diagonalization states)."""

    excitation: int
    k: float | None = None
    parity: str | None = None  # "+", "-", or "unresolved" for degenerate pairs


@dataclass(frozen=True, eq=False)
class EffectiveSpinModel:
    """XY chain parameters produced by the dispersive reduction.

    h_fields[i] = (h_i^x, h_i^y, h_i^z); xy_coupling is the homogeneous bond
    strength J(g/Delta)^2 (positive; enters H with a minus sign), xy_bonds the
    per-bond values for disordered chains.  drive_couplings[i] = g_i/Delta_i
    converts site drive amplitudes into spin-flip amplitudes.
    """

    h_fields: np.ndarray
    xy_coupling: float
    delta_q: float
    stark_shift: float
    boundary: Boundary
    xy_bonds: np.ndarray = field(default=None)
    drive_couplings: np.ndarray = field(default=None)

    def __post_init__(self):
        h = np.asarray(self.h_fields, dtype=float)
        if h.ndim != 2 or h.shape[1] != 3:
            raise ValueError("h_fields must be (N, 3)")
        object.__setattr__(self, "h_fields", h)
        n = h.shape[0]
        if self.xy_bonds is None:
            n_bonds = n if self.boundary is Boundary.PERIODIC else n - 1
            object.__setattr__(self, "xy_bonds", np.full(n_bonds, self.xy_coupling))
        else:
            object.__setattr__(self, "xy_bonds", np.asarray(self.xy_bonds, dtype=float))
        if self.drive_couplings is None:
            object.__setattr__(self, "drive_couplings", np.zeros(n))
        else:
            object.__setattr__(self, "drive_couplings", np.asarray(self.drive_couplings, dtype=float))

    @property
    def n_sites(self) -> int:
        return self.h_fields.shape[0]

    @property
    def is_homogeneous(self) -> bool:
        hz = self.h_fields[:, 2]
        return bool(
            np.allclose(hz, hz[0], rtol=0, atol=1e-15 * max(1.0, abs(hz[0])))
            and np.allclose(self.xy_bonds, self.xy_coupling, rtol=1e-15, atol=0)
        )

    def flip_amplitudes(self) -> np.ndarray:
        """c_i with the transverse field written as c s+ + c* s-."""
        return 0.5 * (self.h_fields[:, 0] - 1j * self.h_fields[:, 1])


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenstates over the truncated spin basis.

    basis_states[row] is the occupation bitmask (bit i set = site i excited)
    indexing the rows of ``states``; columns of ``states`` are eigenvectors.
    Ordering: by excitation manifold, then ascending energy.
    """

    energies: np.ndarray
    states: np.ndarray
    labels: tuple
    basis_states: tuple
    n_sites: int

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        s = np.asarray(self.states, dtype=complex)
        if s.shape != (len(self.basis_states), e.size) or len(self.labels) != e.size:
            raise ValueError("inconsistent eigensystem shapes")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "states", s)

    @property
    def dim(self) -> int:
        return self.energies.size

    def validate(self, tol: float = 1e-10) -> None:
        gram = self.states.conj().T @ self.states
        if not np.allclose(gram, np.eye(self.dim), atol=tol):
            raise ValueError("eigenstates are not orthonormal")

    def ground_index(self) -> int:
        zeros = [i for i, lab in enumerate(self.labels) if lab.excitation == 0]
        if not zeros:
            raise ValueError("no zero-excitation state present")
        return min(zeros, key=lambda i: self.energies[i])

    def manifold_indices(self, m: int) -> list:
        return [i for i, lab in enumerate(self.labels) if lab.excitation == m]


# ------------------------------------------------------------ model building


def build_effective_model(params: SystemParams, drive: DriveProfile) -> EffectiveSpinModel:
    if drive.n_sites != params.n_sites:
        raise ValueError("drive length does not match chain size")
    omega_q = params.omega_q_sites
    delta_i = omega_q - params.omega_c_sites
    if np.any(delta_i <= 0):
        raise ValueError("local qubit-cavity detuning must stay positive")
    g_i = params.g_sites
    ratio = g_i / delta_i
    eps = drive.amplitudes
    h = np.empty((params.n_sites, 3))
    h[:, 0] = 2.0 * eps.real * ratio
    h[:, 1] = -2.0 * eps.imag * ratio
    h[:, 2] = (omega_q - drive.omega_d) + g_i**2 / delta_i
    bonds = params.j_bonds
    n = params.n_sites
    xy_bonds = np.array([bonds[b] * ratio[b] * ratio[(b + 1) % n] for b in range(bonds.size)])
    delta = params.delta
    return EffectiveSpinModel(
        h_fields=h,
        xy_coupling=params.j_hop * (params.g / delta) ** 2,
        delta_q=params.omega_q - drive.omega_d,
        stark_shift=params.g**2 / delta,
        boundary=params.boundary,
        xy_bonds=xy_bonds,
        drive_couplings=ratio,
    )


# --------------------------------------------------- single-excitation sector


def _single_excitation_masks(n: int) -> tuple:
    return tuple(1 << i for i in range(n))


def _embed_single_excitation(vectors_site_basis: np.ndarray) -> np.ndarray:
    """Stack a ground column onto site-basis excitation vectors (rows gain
    a leading vacuum entry)."""
    n = vectors_site_basis.shape[0]
    states = np.zeros((n + 1, vectors_site_basis.shape[1] + 1), dtype=complex)
    states[0, 0] = 1.0
    states[1:, 1:] = vectors_site_basis
    return states


def _single_excitation_hopping(model: EffectiveSpinModel) -> np.ndarray:
    n = model.n_sites
    h1 = np.diag(model.h_fields[:, 2]).astype(complex)
    for b, kb in enumerate(model.xy_bonds):
        i, j = b, (b + 1) % n
        if i == j:
            h1[i, i] -= 2.0 * kb
            continue
        h1[i, j] -= kb
        h1[j, i] -= kb
    return h1


def single_excitation_spectrum(model: EffectiveSpinModel, modes: ModeSet) -> EigenSystem:
    """Undriven spectrum restricted to zero and one excitation.

    Plane/standing-wave states |k> = sum_i conj(phi_k(i)) |i> with
    E_k = Delta_q + g^2/Delta - 2 J (g/Delta)^2 cos k for clean chains;
    disordered chains diagonalize the hopping matrix numerically.
    """
    n = model.n_sites
    if modes.n_modes != n:
        raise ValueError("mode set does not match chain size")
    basis = (0,) + _single_excitation_masks(n)
    if modes.analytic and model.is_homogeneous:
        k = modes.wavevectors
        energies = model.delta_q + model.stark_shift - 2.0 * model.xy_coupling * np.cos(k)
        vectors = modes.profiles.conj().T  # column n holds |k_n>
        order = np.lexsort((k, energies))
        energies = energies[order]
        vectors = vectors[:, order]
        labels = [StateLabel(excitation=1, k=float(k[i])) for i in order]
    else:
        h1 = _single_excitation_hopping(model)
        energies, vectors = np.linalg.eigh(h1)
        labels = [StateLabel(excitation=1) for _ in range(n)]
    states = _embed_single_excitation(vectors)
    all_energies = np.concatenate(([0.0], energies))
    all_labels = (StateLabel(excitation=0),) + tuple(labels)
    return EigenSystem(all_energies, states, all_labels, basis, n)


def _drive_matrix_elements(model: EffectiveSpinModel, spectrum: EigenSystem, drive: DriveProfile) -> np.ndarray:
    """v_k = <k|V|0> for V = sum_i (c_i s+_i + h.c.), c_i = (g/Delta) eps_i."""
    c = model.drive_couplings * drive.amplitudes
    excited = spectrum.manifold_indices(1)
    site_amps = spectrum.states[1:, excited]  # rows: site i, cols: excited states
    return site_amps.conj().T @ c


def perturbed_eigensystem(model: EffectiveSpinModel, modes: ModeSet, drive: DriveProfile) -> EigenSystem:
    """Drive-dressed states to first order, energies to second order.

    |0~> = |0> - sum_k (v_k/Delta_q)|k>,   E~_0 = -sum_k |v_k|^2/Delta_q
    |k~> = |k> + (v_k*/Delta_q)|0>,        E~_k = E_k + |v_k|^2/Delta_q

    with v_k = (g/Delta) eps_k.  States are renormalized.  Nearly degenerate
    excited levels are rejected; use degenerate_pair_states for those.
    """
    spectrum = single_excitation_spectrum(model, modes)
    excited = spectrum.manifold_indices(1)
    e_exc = spectrum.energies[excited]
    if e_exc.size > 1:
        gaps = np.diff(np.sort(e_exc))
        if np.any(gaps < DEGENERACY_THRESHOLD):
            raise ValueError(
                "bare levels closer than the degeneracy threshold; "
                "use degenerate_pair_states for this geometry"
            )
    dq = model.delta_q
    if dq == 0:
        raise ValueError("drive resonant with the qubit (Delta_q = 0)")
    v = _drive_matrix_elements(model, spectrum, drive)
    if np.any(np.abs(v / dq) >= 0.1):
        warnings.warn("drive admixture |v/Delta_q| >= 0.1: first-order states are strained", stacklevel=2)

    dim = spectrum.dim
    states = np.array(spectrum.states, dtype=complex)
    energies = np.array(spectrum.energies)
    gcol = spectrum.ground_index()
    ground = spectrum.states[:, gcol].copy()
    shift = np.abs(v) ** 2 / dq

    states[:, gcol] = ground - spectrum.states[:, excited] @ (v / dq)
    energies[gcol] = -np.sum(shift)
    for j, col in enumerate(excited):
        states[:, col] = spectrum.states[:, col] + (v[j].conjugate() / dq) * ground
        energies[col] = spectrum.energies[col] + shift[j]
    states /= np.linalg.norm(states, axis=0)

    # manifold structure unchanged by the dressing; resort within manifolds
    order = sorted(range(dim), key=lambda i: (spectrum.labels[i].excitation, energies[i]))
    return EigenSystem(
        energies[order],
        states[:, order],
        tuple(spectrum.labels[i] for i in order),
        spectrum.basis_states,
        spectrum.n_sites,
    )


# ------------------------------------------------------- degenerate momenta


def degenerate_pair_states(model: EffectiveSpinModel, modes: ModeSet, drive: DriveProfile) -> EigenSystem:
    """Drive-resolved combinations within degenerate {k, 2pi-k} pairs.

    The drive couples the pair to the ground state through (v_k, v_{2pi-k});
    second-order degenerate theory picks the bright combination
    (|k> + alpha_k |2pi-k>)/sqrt(1+|alpha_k|^2) with alpha_k =
    eps_{2pi-k}/eps_k, shifted by (|v_k|^2+|v_{2pi-k}|^2)/Delta_q, and the
    orthogonal dark one, unshifted.  k = 0 (and pi for even N) pass through
    unmixed.  Phase convention: the |k> coefficient of the bright state is
    real positive, fixed by matching the 2x2 block diagonalization.
    """
    if modes.boundary is not Boundary.PERIODIC or not modes.analytic:
        raise ValueError("degenerate pairs require a clean periodic lattice")
    spectrum = single_excitation_spectrum(model, modes)
    excited = spectrum.manifold_indices(1)
    v = _drive_matrix_elements(model, spectrum, drive)
    dq = model.delta_q
    if dq == 0:
        raise ValueError("drive resonant with the qubit (Delta_q = 0)")

    ks = np.array([spectrum.labels[i].k for i in excited])
    by_k = {round(k, 12): j for j, k in enumerate(ks)}  # local index within excited block
    two_pi = 2.0 * np.pi
    v_floor = 1e-12 * max(np.max(np.abs(v)), 1e-300)  # amplitudes below this count as undriven

    dim = spectrum.dim
    new_states = np.zeros((dim, dim), dtype=complex)
    new_energies = np.zeros(dim)
    new_labels: list = [None] * dim
    gcol = spectrum.ground_index()
    new_states[:, gcol] = spectrum.states[:, gcol]
    new_energies[gcol] = -np.sum(np.abs(v) ** 2) / dq
    new_labels[gcol] = spectrum.labels[gcol]

    done = set()
    out_cols = [c for c in range(dim) if c != gcol]
    col_iter = iter(out_cols)
    entries = []  # (energy, k, parity, vector, label)
    for j, k in enumerate(ks):
        if j in done:
            continue
        partner_k = round((two_pi - k) % two_pi, 12)
        jp = by_k.get(partner_k)
        energy = spectrum.energies[excited[j]]
        psi_k = spectrum.states[:, excited[j]]
        if jp is None or jp == j:
            # k = 0 or pi: nondegenerate, ordinary second-order shift
            done.add(j)
            entries.append((energy + np.abs(v[j]) ** 2 / dq, k, None, psi_k, 1))
            continue
        done.update((j, jp))
        lo, hi = (j, jp) if ks[j] < ks[jp] else (jp, j)
        k_lo = ks[lo]
        psi_lo, psi_hi = spectrum.states[:, excited[lo]], spectrum.states[:, excited[hi]]
        v_lo, v_hi = v[lo], v[hi]
        pair_shift = (abs(v_lo) ** 2 + abs(v_hi) ** 2) / dq
        if abs(v_lo) <= v_floor and abs(v_hi) <= v_floor:
            entries.append((energy, k_lo, "unresolved", psi_lo, 1))
            entries.append((energy, k_lo, "unresolved", psi_hi, 2))
            continue
        if abs(v_lo) > v_floor:
            alpha = v_hi / v_lo
            norm = np.sqrt(1.0 + abs(alpha) ** 2)
            bright = (psi_lo + alpha * psi_hi) / norm
            dark = (alpha.conjugate() * psi_lo - psi_hi) / norm
        else:  # only the partner is driven: bright is purely |2pi-k>
            bright, dark = psi_hi, psi_lo
        entries.append((energy, k_lo, "-", dark, 1))
        entries.append((energy + pair_shift, k_lo, "+", bright, 2))

    entries.sort(key=lambda t: (t[0], t[1], t[4]))
    for (energy, k, parity, vec, _), col in zip(entries, col_iter):
        new_states[:, col] = vec
        new_energies[col] = energy
        new_labels[col] = StateLabel(excitation=1, k=float(k), parity=parity)
    return EigenSystem(new_energies, new_states, tuple(new_labels), spectrum.basis_states, spectrum.n_sites)


# ------------------------------------------------------ exact diagonalization


def _truncated_basis(n: int, max_excitations: int, cap: int) -> tuple:
    masks = []
    for m in range(max_excitations + 1):
        level = [sum(1 << i for i in combo) for combo in itertools.combinations(range(n), m)]
        masks.extend(sorted(level))
        if len(masks) > cap:
            raise ValueError(f"basis exceeds cap ({len(masks)} > {cap} states)")
    return tuple(masks)


def _truncated_hamiltonian(model: EffectiveSpinModel, c: np.ndarray, basis: tuple, row: dict, max_excitations: int) -> np.ndarray:
    n = model.n_sites
    hz = model.h_fields[:, 2]
    h = np.zeros((len(basis), len(basis)), dtype=complex)
    n_bonds = model.xy_bonds.size
    for s in basis:
        r = row[s]
        occ = [i for i in range(n) if s >> i & 1]
        h[r, r] = sum(hz[i] for i in occ)
        for b in range(n_bonds):
            i, j = b, (b + 1) % n
            if i == j:
                continue
            si, sj = s >> i & 1, s >> j & 1
            if si and not sj:  # hop i -> j
                t = (s ^ (1 << i)) | (1 << j)
                h[row[t], r] -= model.xy_bonds[b]
            if sj and not si:
                t = (s ^ (1 << j)) | (1 << i)
                h[row[t], r] -= model.xy_bonds[b]
        if len(occ) < max_excitations:
            for i in range(n):
                if not s >> i & 1:
                    t = s | (1 << i)
                    h[row[t], r] += c[i]
                    h[r, row[t]] += np.conj(c[i])
    return h


def exact_diagonalization(
    model: EffectiveSpinModel,
    drive: DriveProfile | None = None,
    max_excitations: int = 3,
    basis_cap: int = DEFAULT_BASIS_CAP,
) -> EigenSystem:
    """Full spectrum of the driven XY chain in a truncated excitation basis.

    Drive terms couple adjacent manifolds; flips out of the top manifold are
    dropped (that is the truncation).  Labels carry the dominant excitation
    number of each eigenvector.
    """
    n = model.n_sites
    if n > 14:
        raise ValueError("exact diagonalization capped at 14 sites")
    if max_excitations < 1:
        raise ValueError("max_excitations must be >= 1")
    max_excitations = min(max_excitations, n)
    basis = _truncated_basis(n, max_excitations, basis_cap)
    row = {mask: r for r, mask in enumerate(basis)}
    dim = len(basis)

    if drive is not None:
        if drive.n_sites != n:
            raise ValueError("drive length does not match chain size")
        c = model.drive_couplings * drive.amplitudes
    else:
        c = model.flip_amplitudes()

    h = _truncated_hamiltonian(model, c, basis, row, max_excitations)
    energies, vectors = np.linalg.eigh(h)
    manifold_of_row = np.array([bin(mask).count("1") for mask in basis])
    weights = np.abs(vectors) ** 2
    dominant = np.array(
        [np.argmax([weights[manifold_of_row == m, col].sum() for m in range(max_excitations + 1)]) for col in range(dim)]
    )
    order = sorted(range(dim), key=lambda i: (dominant[i], energies[i]))
    labels = tuple(StateLabel(excitation=int(dominant[i])) for i in order)
    return EigenSystem(energies[order], vectors[:, order], labels, basis, n)
