"""Dissipative dynamics: population rate equations and the full master equation.

Two solver families, deliberately kept independent so they can cross-check
each other:

* Population rate equations over (ground, single-excitation targets), with a
  closed-form steady state.  Secular by construction: coherences never enter.
* A Lindblad master equation over an exact truncated eigensystem, vectorized
  column-major (``vec(A rho B) = (B^T kron A) vec(rho)``), solved for its
  null space with a long-time propagation fallback.  Coherences are retained,
  so the secular claim behind the rate equations is tested rather than
  assumed.

Dissipator conventions: decay enters through per-site lowering operators at
rate ``gamma`` each; collective dephasing within the single-excitation
manifold transfers between dressed states at ``2 gamma_phi / n_sites`` per
ordered pair; higher manifolds dephase through per-site sigma^z at
``gamma_phi / 2``.  Pump channels come from a RateTable.  An optional secular
window splits per-site collapse operators into transition-frequency clusters
and drops interference between clusters farther apart than the window.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .effective import EigenSystem
from .rates import RateTable, rate_table

LIOUVILLIAN_DIM_CAP = 40

# steady state declared when max|d rho/dt| falls below this times ||L||
RESIDUAL_RTOL = 1e-10


class SteadySolver(str, enum.Enum):
    RATE_CLOSED_FORM = "rate_closed_form"
    RATE_ODE = "rate_ode"
    LINDBLAD_NULL_SPACE = "lindblad_null_space"
    LINDBLAD_PROPAGATION = "lindblad_propagation"


@dataclass
class PopulationState:
    """Ground + per-target excited populations of the secular model."""

    n0: float
    nk: np.ndarray

    def __post_init__(self):
        self.nk = np.asarray(self.nk, dtype=float)

    @property
    def total(self) -> float:
        return self.n0 + float(np.sum(self.nk))

    def validate(self, atol: float = 1e-9) -> None:
        if abs(self.total - 1.0) > atol:
            raise ValueError(f"populations sum to {self.total}, not 1")
        if self.n0 < -atol or np.any(self.nk < -atol):
            raise ValueError("negative population")


@dataclass
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, eig_floor=-1e-10) -> None:
        m = self.entries
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > herm_tol * scale:
            raise ValueError("not Hermitian")
        if abs(np.trace(m).real - 1.0) > trace_tol or abs(np.trace(m).imag) > trace_tol:
            raise ValueError(f"trace {np.trace(m)}, not 1")
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < eig_floor:
            raise ValueError("negative eigenvalue beyond tolerance")


@dataclass
class NessResult:
    rho: DensityMatrix
    solver: SteadySolver
    residual: float


@dataclass
class SteadyStateResult:
    populations: PopulationState
    fidelities: np.ndarray
    solver: SteadySolver
    residual: float
    pop_beyond_single: float = 0.0


def _gamma_vector(rates) -> np.ndarray:
    if isinstance(rates, RateTable):
        return rates.gamma_up
    return np.asarray(rates, dtype=float)


def fidelity_ceiling(gamma: float, gamma_phi: float, n_sites: int) -> float:
    """Largest excited steady population any pump distribution can reach.

    Saturated by pushing the entire pump budget into one target; dephasing
    redistributes 2*gamma_phi/n_sites of it back across the manifold.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive: no relaxation, no steady state")
    return (gamma + 2 * gamma_phi / n_sites) / (gamma + 2 * gamma_phi)


def ness_closed_form(rates, gamma: float, gamma_phi: float, n_sites: int) -> PopulationState:
    """Unique fixed point of the population rate equations."""
    if gamma <= 0:
        raise ValueError("gamma must be positive: no relaxation, no steady state")
    g_up = _gamma_vector(rates)
    total = float(np.sum(g_up))
    nk = (g_up + (2 * gamma_phi / (n_sites * gamma)) * total) / (
        (gamma + total) * (1 + 2 * gamma_phi / gamma)
    )
    return PopulationState(n0=1.0 - float(np.sum(nk)), nk=nk)


def rate_equation_rhs(state: PopulationState, rates, gamma, gamma_phi, n_sites):
    """d/dt of (n0, nk): pump up, decay down, dephasing mixes the manifold."""
    g_up = _gamma_vector(rates)
    nk = state.nk
    dn0 = gamma * np.sum(nk) - np.sum(g_up) * state.n0
    # exchange sums over every manifold state including q = k (self term drops)
    dnk = -gamma * nk + g_up * state.n0 + (2 * gamma_phi / n_sites) * (np.sum(nk) - len(nk) * nk)
    return PopulationState(n0=dn0, nk=dnk)


@dataclass
class RateTrajectory:
    times: np.ndarray
    n0: np.ndarray
    nk: np.ndarray  # shape (len(times), n_targets)
    final: PopulationState


def integrate_rate_equations(
    initial: PopulationState,
    rates,
    gamma,
    gamma_phi,
    n_sites,
    t_final,
    dt_control: dict | None = None,
) -> RateTrajectory:
    from scipy.integrate import solve_ivp

    g_up = _gamma_vector(rates)
    n_t = len(g_up)

    def rhs(_t, y):
        st = PopulationState(n0=y[0], nk=y[1:])
        d = rate_equation_rhs(st, g_up, gamma, gamma_phi, n_sites)
        return np.concatenate(([d.n0], d.nk))

    opts = dict(rtol=1e-9, atol=1e-12, method="DOP853")
    if dt_control:
        opts.update(dt_control)
    y0 = np.concatenate(([initial.n0], initial.nk))
    sol = solve_ivp(rhs, (0.0, t_final), y0, dense_output=False, **opts)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    final = PopulationState(n0=float(sol.y[0, -1]), nk=sol.y[1:, -1].copy())
    return RateTrajectory(times=sol.t, n0=sol.y[0], nk=sol.y[1:].T, final=final)


# ---------------------------------------------------------------------------
# Lindblad path


def match_targets(eigensystem: EigenSystem, rates: RateTable) -> tuple[int, ...]:
    """Map each pump target onto the eigensystem column it overlaps most.

    Targets are stored as bare site amplitudes; the eigensystem may be
    dressed by the drive, so matching goes through site-basis overlaps.
    Must come out one-to-one.
    """
    pos = {mask: i for i, mask in enumerate(eigensystem.basis_states)}
    cols = eigensystem.manifold_indices(1)
    n = eigensystem.n_sites
    site_rows = [pos[1 << i] for i in range(n)]
    amp = eigensystem.states[np.ix_(site_rows, cols)]  # (n_sites, n_manifold1)
    overlap = np.abs(amp.conj().T @ rates.target_sites)  # (n_manifold1, n_targets)
    picks = [cols[int(np.argmax(overlap[:, t]))] for t in range(rates.n_targets)]
    if len(set(picks)) != len(picks):
        raise ValueError("target-to-eigenstate matching is not one-to-one")
    return tuple(picks)


def _site_lowering(eigensystem: EigenSystem, site: int) -> np.ndarray:
    pos = {mask: i for i, mask in enumerate(eigensystem.basis_states)}
    dim = len(eigensystem.basis_states)
    op = np.zeros((dim, dim))
    bit = 1 << site
    for s, row in pos.items():
        if s & bit:
            op[pos[s ^ bit], row] = 1.0
    return op


def _site_sigma_z(eigensystem: EigenSystem, site: int) -> np.ndarray:
    bit = 1 << site
    diag = np.array([1.0 if s & bit else -1.0 for s in eigensystem.basis_states])
    return np.diag(diag)


def _secular_split(op: np.ndarray, energies: np.ndarray, window: float) -> list[np.ndarray]:
    """Split a collapse operator into transition-frequency clusters.

    Matrix element (a, b) consumes the coherence oscillating at E_b - E_a;
    elements whose frequencies differ by more than the window would only add
    rapidly rotating cross terms, so they go into separate jump operators.
    """
    scale = np.abs(op).max()
    if scale == 0.0:
        return []
    rows, cols = np.nonzero(np.abs(op) > 1e-14 * scale)
    freqs = energies[cols] - energies[rows]
    order = np.argsort(freqs)
    pieces = []
    start = 0
    for i in range(1, len(order) + 1):
        if i == len(order) or freqs[order[i]] - freqs[order[i - 1]] > window:
            piece = np.zeros_like(op)
            sel = order[start:i]
            piece[rows[sel], cols[sel]] = op[rows[sel], cols[sel]]
            pieces.append(piece)
            start = i
    return pieces


def _dissipator(c: np.ndarray) -> np.ndarray:
    # vec(A rho B) = (B^T kron A) vec(rho), column-major stacking
    dim = c.shape[0]
    eye = np.eye(dim)
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)


def build_liouvillian(
    eigensystem: EigenSystem,
    rates: RateTable,
    gamma: float,
    gamma_phi: float,
    n_sites: int,
    secular_window: float | None = None,
) -> np.ndarray:
    """Assemble d vec(rho)/dt = L vec(rho) in the eigenbasis.

    Jump channels: pump sqrt(Gamma_t)|t><ground|, per-site lowering at rate
    gamma (optionally secular-split), collective within-single-manifold
    dephasing at 2 gamma_phi / n_sites, and per-site sigma^z restricted to
    manifolds >= 2 at gamma_phi / 2.  ``secular_window=None`` keeps each
    per-site operator whole.
    """
    dim = len(eigensystem.energies)
    if dim > LIOUVILLIAN_DIM_CAP:
        raise ValueError(f"dimension {dim} exceeds cap {LIOUVILLIAN_DIM_CAP}")
    e = eigensystem.energies
    v = eigensystem.states

    # coherent part: H is diagonal in its own eigenbasis
    liou = np.zeros((dim * dim, dim * dim), dtype=complex)
    idx = np.arange(dim * dim)
    liou[idx, idx] = -1j * (np.tile(e, dim) - np.repeat(e, dim))

    jumps: list[np.ndarray] = []

    targets = match_targets(eigensystem, rates)
    g_idx = eigensystem.ground_index()
    for t, col in enumerate(targets):
        c = np.zeros((dim, dim))
        c[col, g_idx] = math.sqrt(rates.gamma_up[t])
        jumps.append(c)

    for i in range(n_sites):
        low = v.conj().T @ _site_lowering(eigensystem, i) @ v
        if secular_window is None:
            jumps.append(math.sqrt(gamma) * low)
        else:
            jumps.extend(math.sqrt(gamma) * p for p in _secular_split(low, e, secular_window))

    m1 = eigensystem.manifold_indices(1)
    for a in m1:
        for b in m1:
            c = np.zeros((dim, dim))
            c[a, b] = math.sqrt(2 * gamma_phi / n_sites)
            jumps.append(c)

    high = [i for i, lbl in enumerate(eigensystem.labels) if lbl.excitation >= 2]
    if high and gamma_phi > 0:
        proj = np.zeros(dim)
        proj[high] = 1.0
        for i in range(n_sites):
            z = v.conj().T @ _site_sigma_z(eigensystem, i) @ v
            z = z * np.outer(proj, proj)
            if secular_window is None:
                jumps.append(math.sqrt(gamma_phi / 2) * z)
            else:
                jumps.extend(math.sqrt(gamma_phi / 2) * p for p in _secular_split(z, e, secular_window))

    for c in jumps:
        liou += _dissipator(c)
    return liou


def solve_ness(liouvillian: np.ndarray, method: str = "auto") -> NessResult:
    """Steady state of L: null-space solve, propagation fallback.

    The kernel must be one-dimensional (checked via singular values); the
    linear solve replaces one row with the trace constraint, guarded by the
    condition number of the deflated spectrum.
    """
    lm = np.asarray(liouvillian)
    dim = math.isqrt(lm.shape[0])
    if dim * dim != lm.shape[0]:
        raise ValueError("liouvillian is not a square superoperator")

    sv = np.linalg.svd(lm, compute_uv=False)
    scale = sv[0]
    kernel_dim = int(np.sum(sv <= max(1e-12 * scale, 1e-300)))
    if kernel_dim > 1:
        raise ValueError(f"degenerate steady state: kernel dimension {kernel_dim}")

    def residual_of(rho_vec):
        return float(np.abs(lm @ rho_vec).max())

    if method in ("auto", "null_space"):
        gap_cond = scale / sv[-2] if sv[-2] > 0 else np.inf
        if gap_cond < 1e12 or method == "null_space":
            a = lm.copy()
            trace_row = np.zeros(dim * dim, dtype=complex)
            trace_row[np.arange(dim) * (dim + 1)] = 1.0
            a[0] = trace_row
            b = np.zeros(dim * dim, dtype=complex)
            b[0] = 1.0
            rho_vec = np.linalg.solve(a, b)
            res = residual_of(rho_vec)
            if res <= RESIDUAL_RTOL * scale or method == "null_space":
                rho = rho_vec.reshape((dim, dim), order="F")
                rho = (rho + rho.conj().T) / 2
                rho /= np.trace(rho).real
                return NessResult(DensityMatrix(rho), SteadySolver.LINDBLAD_NULL_SPACE, res)

    # propagate exp(L t) by repeated squaring; the slow relaxation mode keeps
    # an error ~ residual / gap, so push the residual to the numerical floor
    prop = scipy.linalg.expm(lm / scale)
    rho_vec = np.zeros(dim * dim, dtype=complex)
    rho_vec[np.arange(dim) * (dim + 1)] = 1.0 / dim
    best_res, best_vec = residual_of(rho_vec), rho_vec.copy()
    for _ in range(64):
        prop = prop @ prop
        rho_vec = prop @ rho_vec
        tr = rho_vec[np.arange(dim) * (dim + 1)].sum().real
        if abs(tr) < 1e-300:
            raise RuntimeError("propagation lost the trace")
        rho_vec /= tr
        res = residual_of(rho_vec)
        if res < best_res:
            best_res, best_vec = res, rho_vec.copy()
        if res <= 1e-13 * scale:
            break
    rho = best_vec.reshape((dim, dim), order="F")
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    return NessResult(DensityMatrix(rho), SteadySolver.LINDBLAD_PROPAGATION, best_res)


def fidelity(rho, target_state) -> float:
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    psi = np.asarray(target_state, dtype=complex)
    if psi.shape != (m.shape[0],):
        raise ValueError(f"dimension mismatch: state {psi.shape} vs matrix {m.shape}")
    val = float(np.real(psi.conj() @ m @ psi))
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# End-to-end helpers shared by the sweep driver and the tests


def rate_steady_state(params, drive, modes=None, table: RateTable | None = None) -> SteadyStateResult:
    if table is None:
        table = rate_table(params, drive, modes)
    pops = ness_closed_form(table, params.gamma, params.gamma_phi, params.n_sites)
    rhs = rate_equation_rhs(pops, table, params.gamma, params.gamma_phi, params.n_sites)
    residual = max(abs(rhs.n0), float(np.abs(rhs.nk).max()) if len(rhs.nk) else 0.0)
    return SteadyStateResult(
        populations=pops,
        fidelities=pops.nk.copy(),
        solver=SteadySolver.RATE_CLOSED_FORM,
        residual=residual,
        pop_beyond_single=0.0,
    )


def lindblad_steady_state(
    params,
    drive,
    modes=None,
    table: RateTable | None = None,
    max_excitations: int = 2,
    secular_window: float | None = None,
    method: str = "auto",
) -> SteadyStateResult:
    """Full master-equation steady state on the exact truncated eigensystem.

    ``secular_window=None`` means the default of 100 cavity linewidths;
    pass ``numpy.inf`` to keep every per-site collapse operator whole.
    """
    from .effective import build_effective_model, exact_diagonalization

    if table is None:
        table = rate_table(params, drive, modes)
    if secular_window is None:
        secular_window = 100 * params.kappa
    window = None if not np.isfinite(secular_window) else secular_window

    model = build_effective_model(params, drive)
    eig = exact_diagonalization(model, drive, max_excitations=max_excitations)
    liou = build_liouvillian(eig, table, params.gamma, params.gamma_phi, params.n_sites, secular_window=window)
    ness = solve_ness(liou, method=method)

    targets = match_targets(eig, table)
    dim = len(eig.energies)
    fids = np.empty(table.n_targets)
    for t, col in enumerate(targets):
        basis_vec = np.zeros(dim)
        basis_vec[col] = 1.0
        fids[t] = fidelity(ness.rho, basis_vec)
    diag = np.real(np.diag(ness.rho.entries))
    n0 = float(diag[eig.ground_index()])
    pop_high = float(sum(diag[i] for i, lbl in enumerate(eig.labels) if lbl.excitation >= 2))
    pops = PopulationState(n0=n0, nk=np.array([diag[c] for c in targets]))
    return SteadyStateResult(
        populations=pops,
        fidelities=fids,
        solver=ness.solver,
        residual=ness.residual,
        pop_beyond_single=pop_high,
    )
