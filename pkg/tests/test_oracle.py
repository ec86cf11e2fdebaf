import math

import numpy as np
import pytest

from conftest import tiny_system
from optomech.errors import IntegrationError
from optomech.fock import FockDims, coherent_state, ladder_ops
from optomech.oracle import (
    IntegratorConfig,
    assemble_hamiltonian,
    evolve_numeric,
    max_stable_dt,
    observables_numeric,
    recommend_integrator_config,
)
from optomech.system import SystemParams
from optomech.undriven import evolve_undriven

DIMS = FockDims(12, 14)


def dense_hamiltonian(p: SystemParams, dims: FockDims, t: float) -> np.ndarray:
    """Independent construction straight from the definition."""
    f = ladder_ops(dims.field_dim)
    m = ladder_ops(dims.mirror_dim)
    If = np.eye(dims.field_dim)
    Im = np.eye(dims.mirror_dim)
    n = f.number.mat.toarray()
    N = m.number.mat.toarray()
    x_m = (m.lower.mat + m.raise_.mat).toarray()
    x_f = (f.lower.mat + f.raise_.mat).toarray()
    h = (p.omega_c * np.kron(n, Im)
         + p.omega_m * np.kron(If, N)
         - p.g0 * np.kron(n, x_m)
         + p.drive_amp * math.cos(p.omega_p * t) * np.kron(x_f, Im))
    return h


class TestAssembly:

    def test_matches_dense_definition(self):
        p = tiny_system()
        asm = assemble_hamiltonian(p, DIMS)
        for t in (0.0, 1.3e-7, 4.8e-7):
            np.testing.assert_allclose(asm.at(t).mat.toarray(),
                                       dense_hamiltonian(p, DIMS, t),
                                       atol=1e-9)

    def test_hermitian(self):
        p = tiny_system()
        h = assemble_hamiltonian(p, DIMS).at(0.37e-7).mat.toarray()
        np.testing.assert_allclose(h, h.conj().T, atol=1e-12)

    def test_undriven_assembly_is_time_independent(self):
        p = tiny_system(drive_amp=0.0, omega_p=0.0)
        asm = assemble_hamiltonian(p, DIMS)
        np.testing.assert_array_equal(asm.at(0.0).mat.toarray(),
                                      asm.at(1e-6).mat.toarray())


class TestStepSizing:

    def test_respects_stability_cap(self):
        p = tiny_system()
        cfg = recommend_integrator_config(p, 1e-5, DIMS)
        assert cfg.dt <= max_stable_dt(p)
        assert max_stable_dt(p) == pytest.approx(
            2 * math.pi / (40 * p.fastest_angular_frequency))

    def test_longer_runs_get_smaller_steps(self):
        p = tiny_system()
        short = recommend_integrator_config(p, 1e-6, FockDims(20, 40))
        long = recommend_integrator_config(p, 1e-3, FockDims(20, 40))
        assert long.dt <= short.dt

    def test_norm_decay_matches_rk4_stability_function(self):
        """A diagonal generator decays by exactly |R(-i theta)|^2 per step.

        |R|^2 = 1 - theta^6/72 + theta^8/576 exactly for classical RK4, so
        the final norm of a coherent superposition of eigenlevels is known in
        closed form and pins the step-size heuristic's foundation.
        """
        p = SystemParams(omega_c=2e6, omega_m=1e6, alpha=1.0, gamma=0.0)
        dims = FockDims(13, 2)
        dt = 3.6e-8  # theta up to ~0.9 rad on the top populated level
        n_steps = 200
        run = evolve_numeric(
            p, dims,
            config=IntegratorConfig(dt=dt, norm_tolerance=0.5),
            t_grid=np.array([0.0, n_steps * dt]))
        assert run.n_steps == n_steps
        probs = np.abs(coherent_state(13, 1.0)) ** 2
        theta = p.omega_c * np.arange(13) * dt  # gamma=0: mirror stays in |0>
        r2 = 1.0 - theta ** 6 / 72.0 + theta ** 8 / 576.0
        expected_drift = 1.0 - math.sqrt(float(probs @ r2 ** n_steps))
        assert run.norm_drift == pytest.approx(expected_drift, rel=1e-6)


class TestEvolution:

    def test_free_evolution_matches_exact_propagator(self):
        p = tiny_system(drive_amp=0.0, omega_p=0.0)
        dims = FockDims(14, 16)
        t_end = 0.5 * p.mech_period
        run = evolve_numeric(p, dims, t_grid=np.array([0.0, t_end]))
        exact = evolve_undriven(p, t_end, dims)
        fid = abs(np.vdot(exact.amps, run.states[-1].amps)) ** 2
        assert fid > 1 - 1e-6

    def test_energy_conserved_without_drive(self):
        p = tiny_system(drive_amp=0.0, omega_p=0.0)
        dims = FockDims(14, 16)
        asm = assemble_hamiltonian(p, dims)
        grid = np.linspace(0.0, p.mech_period, 5)
        run = evolve_numeric(p, dims, t_grid=grid)
        h = asm.at(0.0)
        energies = [h.expectation(st.amps).real for st in run.states]
        for e in energies[1:]:
            assert e == pytest.approx(energies[0], rel=1e-6)

    def test_step_halving_fidelity(self):
        p = tiny_system()
        dims = FockDims(14, 16)
        t_end = 0.2 * p.mech_period
        cfg = recommend_integrator_config(p, t_end, dims)
        fine = IntegratorConfig(dt=cfg.dt / 2,
                                norm_tolerance=cfg.norm_tolerance)
        grid = np.array([0.0, t_end])
        a = evolve_numeric(p, dims, config=cfg, t_grid=grid)
        b = evolve_numeric(p, dims, config=fine, t_grid=grid)
        fid = abs(np.vdot(a.states[-1].amps, b.states[-1].amps)) ** 2
        assert fid > 1 - 1e-8

    def test_snapshots_on_requested_grid(self):
        p = tiny_system()
        grid = np.linspace(0.0, 1e-6, 7)
        run = evolve_numeric(p, FockDims(16, 18), t_grid=grid)
        np.testing.assert_array_equal(run.t, grid)
        assert len(run.states) == 7
        for st in run.states:
            assert st.norm() == pytest.approx(1.0, abs=1e-12)

    def test_norm_monitor_raises(self):
        p = tiny_system()
        cfg = IntegratorConfig(dt=max_stable_dt(p), norm_check_every=1,
                               norm_tolerance=1e-16)
        with pytest.raises(IntegrationError):
            evolve_numeric(p, FockDims(14, 16), config=cfg,
                           t_grid=np.array([0.0, 1e-6]))

    def test_leak_warning_on_tight_dims(self):
        p = tiny_system(alpha=0.8, gamma=0.8, g_ratio=0.4, drive_amp=0.2e7)
        with pytest.warns(UserWarning, match="increase dims"):
            evolve_numeric(p, FockDims(10, 10),
                           t_grid=np.array([0.0, 0.5 * p.mech_period]))

    def test_grid_validation(self):
        p = tiny_system()
        with pytest.raises(ValueError):
            evolve_numeric(p, DIMS, t_grid=np.array([0.0, 2e-7, 1e-7]))
        with pytest.raises(ValueError):
            evolve_numeric(p, DIMS, t_grid=np.array([-1e-7, 1e-7]))


class TestObservables:

    def test_initial_values(self):
        p = tiny_system(alpha=2.0, gamma=2.0)
        run = evolve_numeric(p, FockDims(21, 24),
                             t_grid=np.array([0.0, 1e-8]))
        obs = observables_numeric(run)
        assert obs["photon_avg"].y[0] == pytest.approx(4.0, abs=1e-7)
        assert obs["phonon_avg"].y[0] == pytest.approx(4.0, abs=1e-7)
        assert obs["mandel_field"].y[0] == pytest.approx(1.0, abs=1e-6)
        assert obs["mandel_mirror"].y[0] == pytest.approx(1.0, abs=1e-6)
        assert obs["purity_mirror"].y[0] == pytest.approx(1.0, abs=1e-9)
        assert obs["linear_entropy_mirror"].y[0] == pytest.approx(0.0,
                                                                  abs=1e-9)

    def test_series_metadata(self):
        p = tiny_system()
        run = evolve_numeric(p, FockDims(14, 16),
                             t_grid=np.array([0.0, 1e-8]))
        obs = observables_numeric(run)
        assert set(obs) == {"photon_avg", "phonon_avg", "mandel_field",
                            "mandel_mirror", "purity_mirror",
                            "linear_entropy_mirror"}
        for name, s in obs.items():
            assert s.label == name
            assert s.provenance == "numeric"
