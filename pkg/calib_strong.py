"""Calibration sweep for the strong-coupling acceptance thresholds.

Runs the full strong red-detuned oracle evolution, the analytic route on the
same grid, and both Wigner snapshot sets, then dumps every measured number
needed to pin acceptance tolerances into .calib_strong.npz. Throwaway script,
not part of the package.
"""
import math
import time

import numpy as np

from optomech.system import SystemParams
from optomech.fock import FockDims
from optomech.oracle import recommend_integrator_config, evolve_numeric, observables_numeric
from optomech.driven import (
    DriveProfile, integrate_betas, photon_avg, phonon_avg,
    mandel_mirror, linear_entropy_mirror,
)
from optomech.postproc import ObservableSeries, filter_fast, compare
from optomech.wigner import snapshot_set, StateSource

p = SystemParams(omega_c=1e9, omega_m=1e7, omega_p=0.8e9,
                 drive_amp=math.pi / 20 * 1e9, g_ratio=0.33, alpha=2, gamma=2)
T_m = 2 * math.pi / p.omega_m
t_end = 5.5 * T_m
n_samples = 1101
t_grid = np.linspace(0.0, t_end, n_samples)
dims = FockDims(30, 308)

out = {}

print("=== analytic route ===", flush=True)
t0 = time.perf_counter()
betas = integrate_betas(p, t_grid, DriveProfile.FULL_NUMERIC_BETA)
el = time.perf_counter() - t0
print(f"betas: {el:.1f} s, antisym {betas.antisymmetry_defect:.2e}, "
      f"unitarity {betas.unitarity_defect:.2e}", flush=True)
out["t"] = t_grid
out["an_photon"] = photon_avg(p, betas)
out["an_phonon"] = phonon_avg(p, betas)
out["an_mandel_mirror"] = mandel_mirror(p, betas)
t0 = time.perf_counter()
out["an_entropy"] = linear_entropy_mirror(p, betas)
print(f"entropy: {time.perf_counter()-t0:.1f} s", flush=True)
out["an_elapsed"] = el

print("=== numeric route ===", flush=True)
cfg = recommend_integrator_config(p, t_end, dims)
print(f"dt={cfg.dt:.4e}, steps={math.ceil(t_end/cfg.dt)}", flush=True)
t0 = time.perf_counter()
run = evolve_numeric(p, dims, config=cfg, t_grid=t_grid)
el = time.perf_counter() - t0
print(f"oracle run: {el/60:.1f} min, n_steps={run.n_steps}, "
      f"drift={run.norm_drift:.2e}, leak={run.leak_max:.2e}", flush=True)
obs = observables_numeric(run)
for name, series in obs.items():
    out[f"num_{name}"] = series.y
out["num_elapsed"] = el
out["num_dt"] = cfg.dt
out["num_n_steps"] = run.n_steps
out["num_norm_drift"] = run.norm_drift
out["num_leak_max"] = run.leak_max

# criterion 7: filtered mandel comparison
T_delta = 2 * math.pi / abs(p.detuning)
fa = filter_fast(ObservableSeries(t_grid, out["an_mandel_mirror"], "qm", "analytic"), T_delta)
fn = filter_fast(obs["mandel_mirror"], T_delta)
out["qm_filt_an"] = fa.y
out["qm_filt_num"] = fn.y
ratio = np.abs(fa.y - fn.y) / np.abs(fn.y)
out["qm_ratio_max"] = ratio.max()
print(f"criterion 7: filtered Qm max rel dev {ratio.max():.4f} at "
      f"t={t_grid[ratio.argmax()]:.3e}", flush=True)
print(f"  mandel_mirror analytic min {out['an_mandel_mirror'].min():.6f}", flush=True)

# criterion 8: entropy diffs
d = np.abs(out["an_entropy"] - obs["linear_entropy_mirror"].y)
out["entropy_absdiff"] = d
mask = (t_grid >= 8e-7) & (t_grid <= 2e-6)
print(f"criterion 8: entropy |an-num| max {d.max():.4f} overall, "
      f"{d[mask].max():.4f} in collapse window", flush=True)
for n in (1, 2, 3):
    i = np.argmin(np.abs(t_grid - 2 * math.pi * n / p.omega_m))
    print(f"  S at 2pi*{n}/w_m: an {out['an_entropy'][i]:.3e} num "
          f"{obs['linear_entropy_mirror'].y[i]:.3e}", flush=True)
for n in (0, 1, 2):
    i = np.argmin(np.abs(t_grid - (2 * n + 1) * math.pi / p.omega_m))
    print(f"  S at (2n+1)pi/w_m n={n}: an {out['an_entropy'][i]:.3e} num "
          f"{obs['linear_entropy_mirror'].y[i]:.3e}", flush=True)

# criterion 5: plateau stats (photon, both routes)
for tag in ("an", "num"):
    y = out[f"{tag}_photon"]
    early = y[t_grid <= 2e-7]
    amp = (early.max() - early.min()) / 2
    print(f"criterion 5 [{tag}]: early osc amp {amp:.3f}", flush=True)
    W = 3e-7
    onset = None
    for i, ti in enumerate(t_grid):
        m = (t_grid >= ti) & (t_grid <= ti + W)
        if m.sum() < 10:
            break
        if y[m].std() < 0.1 * amp:
            onset = ti
            break
    if onset is not None:
        m = (t_grid >= onset) & (t_grid <= onset + W)
        print(f"  plateau onset {onset:.3e}, mean {y[m].mean():.3f}, "
              f"std {y[m].std():.4f}", flush=True)
        out[f"plateau_onset_{tag}"] = onset
        out[f"plateau_mean_{tag}"] = y[m].mean()
        late = t_grid >= 2.4e-6
        print(f"  post-plateau max {y[late].max():.3f} at "
              f"t={t_grid[late][y[late].argmax()]:.3e}", flush=True)
        out[f"revival_max_{tag}"] = y[late].max()
    else:
        print("  NO PLATEAU FOUND", flush=True)

c = compare(ObservableSeries(t_grid, out["an_photon"], "n", "analytic"), obs["photon_avg"])
print(f"photon an-vs-num: {c}", flush=True)
c = compare(ObservableSeries(t_grid, out["an_phonon"], "N", "analytic"), obs["phonon_avg"])
print(f"phonon an-vs-num: {c}", flush=True)

print("=== wigner snapshots ===", flush=True)
t0 = time.perf_counter()
snaps_n = snapshot_set(p, StateSource.NUMERIC, dims, n_grid=161)
print(f"numeric snapshots: {(time.perf_counter()-t0)/60:.1f} min", flush=True)
t0 = time.perf_counter()
snaps_a = snapshot_set(p, StateSource.ANALYTIC, FockDims(30, 553), n_grid=161)
print(f"analytic snapshots: {(time.perf_counter()-t0)/60:.1f} min", flush=True)
rows = []
for src, snaps in (("num", snaps_n), ("an", snaps_a)):
    for s in snaps:
        g = s.grid
        mq, mp_, vq, vp = g.moments()
        rows.append((src == "an", s.subsystem == "field", s.t, g.total_mass(),
                     g.values.min(), vq, vp))
        print(f"  [{src}] {s.subsystem:6s} t={s.t:.3e} mass={g.total_mass():.4f} "
              f"min={g.values.min():.3e} vq={vq:.3f} vp={vp:.3f} "
              f"bounds=({g.q_min:.1f},{g.q_max:.1f})x({g.p_min:.1f},{g.p_max:.1f})",
              flush=True)
out["wigner_rows"] = np.array(rows)

np.savez("/root/pkg/.calib_strong.npz", **out)
print("saved .calib_strong.npz", flush=True)
