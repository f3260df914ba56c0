"""Drive-frequency sweeps, disorder ensembles, and CSV emission.

The orchestration layer: reads a JSON config (frequencies in GHz — the one
place where lab units enter), scans the drive frequency across a grid or an
automatically centered window, solves each grid point for its steady state,
and writes rows sorted by (sample_id, omega_d) with floats printed to 12
significant digits so reruns are byte-identical.

Disorder is multiplicative Gaussian per site, truncated at five sigma by
redraw, with every draw taken upfront from a single seeded generator in a
fixed order — worker parallelism cannot perturb the stream.  Sample 0 is
always the clean system; disordered samples count from 1.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dynamics import lindblad_steady_state, rate_steady_state
from .model import Boundary, DriveProfile, SystemParams, build_mode_set
from .rates import optimal_drive_frequency, rate_table

TWO_PI = 2.0 * np.pi

DEFAULT_SPAN_KAPPA = 50.0
DEFAULT_STEP_KAPPA = 1.0 / 20.0


class ConfigError(ValueError):
    """Raised for malformed sweep configuration; maps to CLI exit code 2."""


@dataclass
class AutoRange:
    target: int
    mode: int
    span_kappa: float = DEFAULT_SPAN_KAPPA


@dataclass
class DisorderSpec:
    sigma_omega_c: float = 1e-2
    sigma_omega_q: float = 1e-4
    sigma_g: float = 1e-4
    sigma_j: float = 1e-2
    n_samples: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("disorder n_samples must be at least 1")


@dataclass
class SweepConfig:
    system: SystemParams
    profile_kind: str = "uniform"  # uniform | single_site | custom
    profile_site: int = 0
    amplitude: float = 0.0
    custom_amplitudes: np.ndarray | None = None
    omega_d_range: tuple[float, float, float] | None = None  # start, stop, step (rad/ns)
    auto_range: AutoRange | None = None
    solver: str = "rate"
    manifolds: int = 2
    targets: tuple[int, ...] | None = None
    disorder: DisorderSpec | None = None

    def __post_init__(self):
        if self.profile_kind not in ("uniform", "single_site", "custom"):
            raise ConfigError(f"unknown drive profile {self.profile_kind!r}")
        if self.solver not in ("rate", "lindblad"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if (self.omega_d_range is None) == (self.auto_range is None):
            raise ConfigError("exactly one of omega_d_range or auto_range is required")
        if self.omega_d_range is not None:
            start, stop, step = self.omega_d_range
            if step <= 0:
                raise ConfigError("omega_d step must be positive")
            if stop <= start:
                raise ConfigError("omega_d range must have stop > start")
        if self.profile_kind == "custom":
            if self.custom_amplitudes is None:
                raise ConfigError("custom profile requires amplitudes")
            if len(self.custom_amplitudes) != self.system.n_sites:
                raise ConfigError("custom profile length must match n_sites")

    def base_drive(self, omega_d: float) -> DriveProfile:
        n = self.system.n_sites
        if self.profile_kind == "uniform":
            return DriveProfile.uniform(n, self.amplitude, omega_d)
        if self.profile_kind == "single_site":
            return DriveProfile.single_site(n, self.amplitude, omega_d, site=self.profile_site)
        return DriveProfile(np.asarray(self.custom_amplitudes, dtype=complex), omega_d)


@dataclass
class SweepRow:
    omega_d: float
    sample_id: int
    solver: str
    residual: float
    fidelities: np.ndarray
    fid_ground: float
    pop_manifold2: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    target_count: int
    target_indices: tuple[int, ...]

    def sorted_rows(self) -> list[SweepRow]:
        return sorted(self.rows, key=lambda r: (r.sample_id, r.omega_d))

    def header(self) -> str:
        fid_cols = ",".join(f"fid_k{i}" for i in self.target_indices)
        return f"omega_d_ghz,sample_id,solver,residual,{fid_cols},fid_gs,pop_manifold2"

    def to_csv_string(self) -> str:
        lines = [self.header()]
        for row in self.sorted_rows():
            cells = [
                _fmt(row.omega_d / TWO_PI),
                str(row.sample_id),
                row.solver,
                _fmt(row.residual),
            ]
            cells.extend(_fmt(f) for f in row.fidelities)
            cells.append(_fmt(row.fid_ground))
            cells.append(_fmt(row.pop_manifold2))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        Path(path).write_text(self.to_csv_string())

    @property
    def all_failed(self) -> bool:
        return all(row.solver == "failed" for row in self.rows)


def _fmt(value: float) -> str:
    return "%.12g" % value


# ------------------------------------------------------------------ config


def load_sweep_config(path) -> SweepConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_sweep_config(data)


def parse_sweep_config(data: dict) -> SweepConfig:
    try:
        sysblock = data["system"]
        system = SystemParams(
            n_sites=int(sysblock["n_sites"]),
            omega_c=TWO_PI * float(sysblock["omega_c_ghz"]),
            omega_q=TWO_PI * float(sysblock["omega_q_ghz"]),
            g=TWO_PI * float(sysblock["g_ghz"]),
            j_hop=TWO_PI * float(sysblock["j_ghz"]),
            kappa=TWO_PI * float(sysblock["kappa_ghz"]),
            gamma=TWO_PI * float(sysblock["gamma_ghz"]),
            gamma_phi=TWO_PI * float(sysblock["gamma_phi_ghz"]),
            boundary=Boundary(sysblock.get("boundary", "open")),
        )
        drive = data["drive"]
        custom = None
        if "amplitudes_ghz" in drive:
            custom = TWO_PI * np.array(
                [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in drive["amplitudes_ghz"]]
            )
        omega_block = data.get("omega_d", {})
        omega_range = None
        auto = None
        if "auto" in omega_block:
            a = omega_block["auto"]
            auto = AutoRange(
                target=int(a["target"]),
                mode=int(a["mode"]),
                span_kappa=float(a.get("span_kappa", DEFAULT_SPAN_KAPPA)),
            )
        elif omega_block:
            omega_range = (
                TWO_PI * float(omega_block["start_ghz"]),
                TWO_PI * float(omega_block["stop_ghz"]),
                TWO_PI * float(omega_block["step_ghz"]),
            )
        disorder = None
        if "disorder" in data:
            d = data["disorder"]
            disorder = DisorderSpec(
                sigma_omega_c=float(d.get("sigma_omega_c", 1e-2)),
                sigma_omega_q=float(d.get("sigma_omega_q", 1e-4)),
                sigma_g=float(d.get("sigma_g", 1e-4)),
                sigma_j=float(d.get("sigma_j", 1e-2)),
                n_samples=int(d.get("n_samples", 20)),
                seed=int(d.get("seed", 0)),
            )
        return SweepConfig(
            system=system,
            profile_kind=drive.get("profile", "uniform"),
            profile_site=int(drive.get("site", 0)),
            amplitude=TWO_PI * float(drive.get("amplitude_ghz", 0.0)),
            custom_amplitudes=custom,
            omega_d_range=omega_range,
            auto_range=auto,
            solver=data.get("solver", "rate"),
            manifolds=int(data.get("manifolds", 2)),
            targets=tuple(data["targets"]) if "targets" in data else None,
            disorder=disorder,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc


# ---------------------------------------------------------------- disorder


def _truncated_normal(rng, size):
    # redraw beyond five sigma; the loop consumes the stream deterministically
    out = rng.standard_normal(size)
    mask = np.abs(out) > 5.0
    while np.any(mask):
        out[mask] = rng.standard_normal(int(mask.sum()))
        mask = np.abs(out) > 5.0
    return out


def disorder_samples(config: SweepConfig, seed=None) -> list[SystemParams]:
    """Clean system first, then n_samples disordered realizations."""
    systems = [config.system]
    if config.disorder is None:
        return systems
    spec = config.disorder
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    base = config.system
    n = base.n_sites
    def draw(sigma, scale):
        # zero sigma leaves the parameter untouched so the clean analytic
        # path is reused bit-for-bit
        if sigma == 0.0:
            return None
        return scale * sigma * _truncated_normal(rng, n)

    for _ in range(spec.n_samples):
        overrides = {
            "delta_omega_c": draw(spec.sigma_omega_c, base.omega_c),
            "delta_omega_q": draw(spec.sigma_omega_q, base.omega_q),
            "delta_g": draw(spec.sigma_g, base.g),
            "delta_j": draw(spec.sigma_j, base.j_hop),
        }
        systems.append(replace(base, **{k: v for k, v in overrides.items() if v is not None}))
    return systems


# ------------------------------------------------------------------- sweep


def _grid_for(config: SweepConfig, params: SystemParams):
    if config.omega_d_range is not None:
        start, stop, step = config.omega_d_range
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)
    auto = config.auto_range
    modes = build_mode_set(params)
    probe = config.base_drive(params.omega_c + params.delta / 2)
    try:
        center = optimal_drive_frequency(params, modes, probe, auto.target, auto.mode)
    except ValueError as exc:
        raise ConfigError(f"auto range: {exc}") from exc
    span = auto.span_kappa * params.kappa
    step = DEFAULT_STEP_KAPPA * params.kappa
    count = int(round(2 * span / step)) + 1
    return center - span + step * np.arange(count)


def _solve_row(task):
    params, config, omega_d, sample_id = task
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            drive = config.base_drive(omega_d)
            modes = build_mode_set(params)
            table = rate_table(params, drive, modes)
            if config.solver == "rate":
                res = rate_steady_state(params, drive, modes, table=table)
            else:
                res = lindblad_steady_state(
                    params, drive, modes, table=table, max_excitations=config.manifolds
                )
    except Exception:
        n_t = params.n_sites
        return SweepRow(
            omega_d=omega_d,
            sample_id=sample_id,
            solver="failed",
            residual=float("nan"),
            fidelities=np.full(n_t, np.nan),
            fid_ground=float("nan"),
            pop_manifold2=float("nan"),
        )
    return SweepRow(
        omega_d=omega_d,
        sample_id=sample_id,
        solver=res.solver.value,
        residual=res.residual,
        fidelities=res.fidelities,
        fid_ground=res.populations.n0,
        pop_manifold2=res.pop_beyond_single,
    )


def run_sweep(config: SweepConfig, seed=None, threads: int = 1) -> SweepResult:
    systems = disorder_samples(config, seed=seed)
    tasks = []
    for sample_id, params in enumerate(systems):
        grid = _grid_for(config, params)  # auto mode recenters per sample
        tasks.extend((params, config, float(w), sample_id) for w in grid)

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_solve_row, tasks, chunksize=16))
    else:
        rows = [_solve_row(t) for t in tasks]

    n_targets = next((len(r.fidelities) for r in rows), config.system.n_sites)
    indices = config.targets if config.targets is not None else tuple(range(n_targets))
    if config.targets is not None:
        for row in rows:
            row.fidelities = row.fidelities[list(config.targets)]
    return SweepResult(rows=rows, target_count=len(indices), target_indices=indices)


@dataclass
class DisorderSummary:
    clean_peaks: np.ndarray
    mean_peaks: np.ndarray
    min_peaks: np.ndarray
    max_peaks: np.ndarray

    @property
    def worst_relative_drop(self) -> float:
        with np.errstate(invalid="ignore", divide="ignore"):
            drops = np.abs(self.mean_peaks - self.clean_peaks) / self.clean_peaks
        return float(np.nanmax(drops))


def disorder_ensemble(config: SweepConfig, seed=None, threads: int = 1):
    if config.disorder is None:
        raise ConfigError("disorder block required for an ensemble run")
    result = run_sweep(config, seed=seed, threads=threads)
    sample_ids = sorted({r.sample_id for r in result.rows})
    peaks = {}
    for sid in sample_ids:
        fids = np.array([r.fidelities for r in result.rows if r.sample_id == sid and r.solver != "failed"])
        peaks[sid] = fids.max(axis=0) if len(fids) else np.full(result.target_count, np.nan)
    disordered = np.array([peaks[s] for s in sample_ids if s != 0])
    summary = DisorderSummary(
        clean_peaks=peaks[0],
        mean_peaks=disordered.mean(axis=0),
        min_peaks=disordered.min(axis=0),
        max_peaks=disordered.max(axis=0),
    )
    return result, summary


# ------------------------------------------------------------- scalability


@dataclass
class ScalabilityReport:
    n_sites: int
    n_max_sites: float
    uniform_kappa_bound: float
    single_site_kappa_bound: float
    uniform_resolvable: bool
    single_site_resolvable: bool
    ceiling: float
    ceiling_large_n: float

    def format(self) -> str:
        lines = [
            f"sites requested: {self.n_sites}",
            f"max stabilizable sites (2*pi*J/kappa): {self.n_max_sites:.0f}",
            f"uniform-drive resolvability: kappa < {_fmt(self.uniform_kappa_bound / TWO_PI)} GHz"
            f" -> {'resolvable' if self.uniform_resolvable else 'NOT resolvable'}",
            f"single-site resolvability: kappa < {_fmt(self.single_site_kappa_bound / TWO_PI)} GHz"
            f" -> {'resolvable' if self.single_site_resolvable else 'NOT resolvable'}",
            f"fidelity ceiling at N={self.n_sites}: {self.ceiling:.6f}",
            f"fidelity ceiling as N->inf: {self.ceiling_large_n:.6f}",
        ]
        return "\n".join(lines)


def scalability_report(params: SystemParams) -> ScalabilityReport:
    from .dynamics import fidelity_ceiling

    n = params.n_sites
    ratio = params.g / params.delta
    uniform_bound = TWO_PI * params.j_hop / n
    single_bound = TWO_PI * params.j_hop * ratio**2 / n
    return ScalabilityReport(
        n_sites=n,
        n_max_sites=TWO_PI * params.j_hop / params.kappa,
        uniform_kappa_bound=uniform_bound,
        single_site_kappa_bound=single_bound,
        uniform_resolvable=params.kappa < uniform_bound,
        single_site_resolvable=params.kappa < single_bound,
        ceiling=fidelity_ceiling(params.gamma, params.gamma_phi, n),
        ceiling_large_n=params.gamma / (params.gamma + 2 * params.gamma_phi),
    )
