"""Brute-force Schrodinger evolution of the full driven model.

No approximation beyond Fock truncation: the joint Hamiltonian

    H(t) = omega_c n + omega_m N - G0 n (b + b^dagger)
           + drive_amp cos(omega_p t) (a + a^dagger)

is applied to the joint amplitude vector with classical fixed-step RK4.
Everything else in the package is measured against this.

The Hamiltonian is banded in the field-major index i = k * mirror_dim + m
(offsets 0, +-1, +-mirror_dim), so each stage is a DIA-format
matrix-vector product after refreshing the data rows in place with the
current drive factor. RK4 applied to -iH loses norm at a known rate,
|R(-i theta)|^2 = 1 - theta^6/72 + O(theta^8) per step with
theta = lambda dt, which is what the recommended step size is solved
from; an explicit norm monitor backstops the estimate.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import IntegrationError
from .fock import (
    FockDims,
    JointState,
    SparseOperator,
    coherent_state,
    ladder_ops,
    tensor,
)
from .postproc import ObservableSeries
from .system import SystemParams

HERMITICITY_TOL = 1e-12
DEFAULT_NORM_TOLERANCE = 1e-6
DEFAULT_NORM_CHECK_EVERY = 1000
LEAK_TOLERANCE = 1e-6
# Resolve the fastest angular frequency with at least this many steps/period.
MIN_STEPS_PER_FAST_PERIOD = 40
# Per-step norm loss theta^6/72 with theta = lambda_eff * dt.
_RK4_NORM_EXPONENT = 6
_RK4_NORM_PREFACTOR = 72.0
# Stirling numbers S(6, j): E[k^6] over Poisson(mu) = sum_j S(6,j) mu^j.
_TOUCHARD6 = (1.0, 31.0, 90.0, 65.0, 15.0, 1.0)


@dataclass(frozen=True)
class HamiltonianAssembly:
    """Static part plus drive operator; H(t) = h_static + drive(t) * h_drive."""

    h_static: SparseOperator
    h_drive: SparseOperator
    drive_amp: float
    drive_freq: float

    def __post_init__(self):
        for op in (self.h_static, self.h_drive):
            defect = abs(op.mat - op.mat.conj().T).max()
            if defect > HERMITICITY_TOL:
                raise ValueError(f"Hamiltonian block not Hermitian (defect {defect:g})")

    def at(self, t: float) -> SparseOperator:
        """Dense-in-time snapshot H(t), mainly for small-system checks."""
        c = self.drive_amp * math.cos(self.drive_freq * t)
        return self.h_static + c * self.h_drive


def assemble_hamiltonian(p: SystemParams, dims: FockDims) -> HamiltonianAssembly:
    fld = ladder_ops(dims.field_dim)
    mir = ladder_ops(dims.mirror_dim)
    eye_f = _identity(dims.field_dim)
    eye_m = _identity(dims.mirror_dim)
    h_static = (
        p.omega_c * tensor(fld.number, eye_m)
        + p.omega_m * tensor(eye_f, mir.number)
        + (-p.g0) * tensor(fld.number, mir.lower + mir.raise_)
    )
    h_drive = tensor(fld.lower + fld.raise_, eye_m)
    return HamiltonianAssembly(h_static, h_drive, p.drive_amp, p.omega_p)


def _identity(dim: int) -> SparseOperator:
    return SparseOperator(dim, sp.identity(dim, dtype=np.complex128, format="csr"))


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    method: str = "RK4"
    norm_check_every: int = DEFAULT_NORM_CHECK_EVERY
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE

    def __post_init__(self):
        if self.method != "RK4":
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.norm_check_every < 1:
            raise ValueError("norm_check_every must be >= 1")
        if self.norm_tolerance <= 0:
            raise ValueError("norm_tolerance must be positive")


def _poisson_sixth_root(mu: float) -> float:
    """(E[k^6])^(1/6) for Poisson(mu): the level that sets the spectral scale."""
    if mu <= 0:
        return 0.0
    sixth = sum(c * mu ** (j + 1) for j, c in enumerate(_TOUCHARD6))
    return sixth ** (1.0 / 6.0)


def drive_growth(p: SystemParams, t_total: float) -> float:
    """Bound on how far the drive displaces the field amplitude.

    Off resonance both rotating and counter-rotating responses stay bounded
    (amplitudes drive/|detuning| and drive/(omega_p + omega_c)); on resonance
    the amplitude grows secularly as drive * t / 2.
    """
    if p.drive_amp == 0.0:
        return 0.0
    if p.detuning != 0.0:
        return p.drive_amp / abs(p.detuning) + p.drive_amp / (p.omega_p + p.omega_c)
    return 0.5 * p.drive_amp * t_total


def _populated_levels(p: SystemParams, t_total: float, dims: FockDims):
    """Effective field and mirror levels reached over the run, sixth-moment weighted."""
    mu_field = (abs(p.alpha) + drive_growth(p, t_total)) ** 2
    k6 = min(_poisson_sixth_root(mu_field), dims.field_dim - 1.0)
    # Mirror displacement grows with the photon number it is conditioned on.
    k_disp = mu_field + 3.0 * math.sqrt(mu_field) + 1.0
    mu_mirror = (abs(p.gamma) + 2.0 * p.g_ratio * min(k_disp, dims.field_dim - 1.0)) ** 2
    m6 = min(_poisson_sixth_root(mu_mirror), dims.mirror_dim - 1.0)
    return k6, m6


def max_stable_dt(p: SystemParams) -> float:
    """Hard cap: resolve the fastest oscillation, whatever the amplitudes."""
    return 2.0 * math.pi / (MIN_STEPS_PER_FAST_PERIOD * p.fastest_angular_frequency)


def recommend_integrator_config(
    p: SystemParams,
    t_total: float,
    dims: FockDims,
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE,
) -> IntegratorConfig:
    """Step size that keeps total RK4 norm loss under norm_tolerance.

    Per step the amplitude of a populated eigen-direction decays by
    theta^6/72 with theta = lambda_eff * dt, so over n = t_total/dt steps
    the drift is bounded by solving n * theta^6/72 = norm_tolerance/2 for
    dt (the half is slack for the populated tail above lambda_eff;
    lambda_eff itself already overestimates the populated spectrum by
    summing term maxima, so measured drift sits far below the bound).
    """
    if t_total <= 0:
        raise ValueError("t_total must be positive")
    k6, m6 = _populated_levels(p, t_total, dims)
    lam = (
        p.omega_c * k6
        + p.omega_m * m6
        + 2.0 * p.g0 * k6 * math.sqrt(m6 + 1.0)
        + 2.0 * p.drive_amp * math.sqrt(k6 + 1.0)
    )
    cap = max_stable_dt(p)
    if lam <= 0:
        return IntegratorConfig(dt=cap, norm_tolerance=norm_tolerance)
    budget = _RK4_NORM_PREFACTOR * (norm_tolerance / 2.0)
    dt_norm = (budget / (t_total * lam ** _RK4_NORM_EXPONENT)) ** (
        1.0 / (_RK4_NORM_EXPONENT - 1)
    )
    return IntegratorConfig(dt=min(cap, dt_norm), norm_tolerance=norm_tolerance)


@dataclass
class OracleRun:
    """States sampled on the requested grid plus integration diagnostics."""

    params: SystemParams
    dims: FockDims
    config: IntegratorConfig
    t: np.ndarray
    states: list
    norm_drift: float = 0.0
    leak_max: float = 0.0
    n_steps: int = 0


def _aligned_dia_data(mat, offsets, n):
    """DIA data rows of `mat` aligned to a fixed offset list."""
    dia = sp.dia_matrix(mat)
    data = np.zeros((len(offsets), n), dtype=np.complex128)
    for row, off in zip(dia.data, dia.offsets):
        data[offsets.index(int(off))] = row
    return data


def _leak_fraction(psi: np.ndarray, dims: FockDims) -> float:
    """Largest population sitting in the top levels of either subsystem.

    Checks the top 3 levels, but never more than dim - 1 of an axis so a
    deliberately tiny subsystem does not count its ground state as leakage.
    """
    prob = np.abs(psi.reshape(dims.field_dim, dims.mirror_dim)) ** 2
    kf = min(3, dims.field_dim - 1)
    km = min(3, dims.mirror_dim - 1)
    return max(float(prob[-kf:, :].sum()), float(prob[:, -km:].sum()))


def evolve_numeric(
    p: SystemParams,
    dims: FockDims,
    config: IntegratorConfig | None = None,
    t_grid=None,
) -> OracleRun:
    """Integrate from the product of coherent states, sampling at t_grid.

    The state is never renormalized while stepping; snapshots are
    renormalized copies taken only while the accumulated drift is inside
    config.norm_tolerance, past which IntegrationError is raised.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be non-negative and strictly ascending")
    if config is None:
        config = recommend_integrator_config(p, max(float(t_grid[-1]), 1e-300), dims)
    cap = max_stable_dt(p)
    if config.dt > cap * (1 + 1e-12):
        raise ValueError(
            f"dt {config.dt:g} does not resolve the fastest period; need <= {cap:g}"
        )

    psi = JointState.from_product(
        dims,
        coherent_state(dims.field_dim, p.alpha),
        coherent_state(dims.mirror_dim, p.gamma),
    ).amps.copy()

    asm = assemble_hamiltonian(p, dims)
    n = dims.joint
    off_static = sp.dia_matrix(asm.h_static.mat).offsets
    off_drive = sp.dia_matrix(asm.h_drive.mat).offsets
    offsets = sorted(set(int(o) for o in off_static) | set(int(o) for o in off_drive))
    # Fold -i (Schrodinger) into the data rows once so each stage is one matvec.
    data_static = -1j * _aligned_dia_data(asm.h_static.mat, offsets, n)
    data_drive = (-1j * p.drive_amp) * _aligned_dia_data(asm.h_drive.mat, offsets, n)
    template = sp.dia_matrix(
        (data_static.copy(), np.array(offsets)), shape=(n, n)
    )
    # The drive rows (offsets +-mirror_dim) are disjoint from the static rows
    # (0, +-1), so refreshing the drive factor rescales just those two rows.
    nonzero_static = np.abs(data_static).max(axis=1) > 0
    drive_rows = [
        i for i in range(len(offsets)) if np.abs(data_drive[i]).max() > 0
    ]
    if any(nonzero_static[i] for i in drive_rows):
        raise AssertionError("static and drive bands overlap; assembly changed")
    driven = p.drive_amp != 0.0 and drive_rows

    def rhs(time, vec, refresh=True):
        if driven and refresh:
            c = math.cos(p.omega_p * time)
            for i in drive_rows:
                np.multiply(data_drive[i], c, out=template.data[i])
        return template @ vec

    run = OracleRun(p, dims, config, t_grid, [])
    dt = config.dt
    t_now = 0.0
    steps_done = 0
    since_check = 0

    def check(vec):
        nrm = math.sqrt(np.vdot(vec, vec).real)
        drift = abs(nrm - 1.0)
        run.norm_drift = max(run.norm_drift, drift)
        if drift > config.norm_tolerance:
            raise IntegrationError(
                f"norm drift {drift:.3g} exceeded {config.norm_tolerance:g} after "
                f"{steps_done} steps; reduce dt below {dt:g}"
            )
        return nrm

    def snapshot(vec, t_snap):
        nrm = check(vec)
        leak = _leak_fraction(vec, dims)
        run.leak_max = max(run.leak_max, leak)
        if leak > LEAK_TOLERANCE:
            warnings.warn(
                f"population {leak:.3g} in the top 3 Fock levels at t={t_snap:g}; "
                f"increase dims beyond ({dims.field_dim}, {dims.mirror_dim})",
                stacklevel=2,
            )
        state = JointState(dims, vec / nrm, meta={"t": t_snap, "norm_drift": abs(nrm - 1.0)})
        run.states.append(state)

    stage = np.empty_like(psi)
    for t_target in t_grid:
        span = t_target - t_now
        if span > 0:
            n_sub = max(1, math.ceil(span / dt - 1e-9))
            h = span / n_sub
            for _ in range(n_sub):
                k1 = rhs(t_now, psi)
                np.multiply(k1, 0.5 * h, out=stage)
                stage += psi
                k2 = rhs(t_now + 0.5 * h, stage)
                np.multiply(k2, 0.5 * h, out=stage)
                stage += psi
                k3 = rhs(t_now + 0.5 * h, stage, refresh=False)
                np.multiply(k3, h, out=stage)
                stage += psi
                k4 = rhs(t_now + h, stage)
                # psi += (h/6) (k1 + 2 k2 + 2 k3 + k4), reusing k2 as scratch
                k2 += k3
                k2 *= 2.0
                k2 += k1
                k2 += k4
                k2 *= h / 6.0
                psi += k2
                t_now += h
                steps_done += 1
                since_check += 1
                if since_check >= config.norm_check_every:
                    since_check = 0
                    check(psi)
            t_now = t_target
        snapshot(psi, float(t_target))
    run.n_steps = steps_done
    return run


def _marginal_probs(state: JointState):
    prob = np.abs(state.as_matrix()) ** 2
    return prob.sum(axis=1), prob.sum(axis=0)


def observables_numeric(run: OracleRun) -> dict:
    """Per-snapshot observables as {name: ObservableSeries}, provenance "numeric".

    Keys: photon_avg, phonon_avg, mandel_field, mandel_mirror,
    purity_mirror, linear_entropy_mirror.
    """
    n_t = len(run.states)
    cols = {
        name: np.empty(n_t)
        for name in (
            "photon_avg",
            "phonon_avg",
            "mandel_field",
            "mandel_mirror",
            "purity_mirror",
            "linear_entropy_mirror",
        )
    }
    ks = np.arange(run.dims.field_dim, dtype=float)
    ms = np.arange(run.dims.mirror_dim, dtype=float)
    for i, state in enumerate(run.states):
        pk, pm = _marginal_probs(state)
        n1 = float(pk @ ks)
        n2 = float(pk @ ks ** 2)
        m1 = float(pm @ ms)
        m2 = float(pm @ ms ** 2)
        cols["photon_avg"][i] = n1
        cols["phonon_avg"][i] = m1
        # Mandel parameter as variance over mean: 1 on a coherent state.
        cols["mandel_field"][i] = (n2 - n1 ** 2) / n1 if n1 > 0 else 1.0
        cols["mandel_mirror"][i] = (m2 - m1 ** 2) / m1 if m1 > 0 else 1.0
        psi = state.as_matrix()
        # Tr[rho_m^2] equals ||rho_m||_F^2; orientation of the trace does not
        # matter for the norm but keep the rho_m[i,j] = sum_k psi[k,i] psi*[k,j]
        # convention used everywhere else.
        rho_m = psi.T @ psi.conj()
        purity = float(np.sum(np.abs(rho_m) ** 2))
        cols["purity_mirror"][i] = purity
        cols["linear_entropy_mirror"][i] = 1.0 - purity
    return {
        name: ObservableSeries(run.t, col, name, "numeric")
        for name, col in cols.items()
    }
