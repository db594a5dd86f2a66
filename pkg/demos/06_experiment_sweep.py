"""Parameter sweeps: how sketch size trades against solution quality.

The experiment harness sweeps (rho, sigma, k) over seeds, solves on each
sketch, evaluates the chosen sets on the full instance, and compares against
a full-instance baseline.  The same harness backs the `coversketch
experiment` command, which writes the rows as CSV.
"""

from coversketch.cli import ExperimentSpec, run_experiment

spec = ExperimentSpec(
    instance_kind="planted",
    instance_args={"k": "50", "m": "5000", "kprime": "2000", "eps": "0.2",
                   "seed": "5"},
    rho_grid=[0.01, 0.05, 0.2, 1.0],
    sigma_grid=[100],
    k_grid=[50],
    seeds=[1, 2, 3],
    solver="greedy",
    baseline="stochastic",
    solver_eps=0.1,
    out="sweep.csv",
)

rows = run_experiment(spec)
print("rho    sigma  sketch_ratio  quality_ratio   (3-seed means)")
for row in rows:
    if row["seed"] != "mean":
        continue
    print(f"{row['rho']:<6} {row['sigma']:<6} "
          f"{row['sketch_ratio']:<13.4f} {row['quality_ratio']:.4f}")

print("\nLarger rho keeps more elements, so quality climbs toward the")
print("full-instance baseline while the sketch grows.")
