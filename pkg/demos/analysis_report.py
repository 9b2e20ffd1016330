# %%
# What the analysis step reports about a batch of experiments.
import numpy as np

from prim.analysis import ExperimentRecord, analyze
from prim.agents.roles import render_analysis
from prim.space import NANOHELIX
from prim.virtlab import evaluate_g_factor

rng = np.random.default_rng(3)
base = NANOHELIX.midpoint()
records = []
for step, pitch in enumerate(rng.uniform(60, 200, 30), start=1):
    vec = {**base, "n_turns": 6.0, "pitch": float(pitch)}
    records.append(ExperimentRecord(vec, evaluate_g_factor(vec), 1, step))

# %%
# Only pitch varies, so every other dimension is flagged as constant.
report = analyze(records, ["pitch", "curl"], fit_degree=2)
print(render_analysis(report))

# %%
# The quadratic fit locates the pitch that maximizes g along this line.
fit = report.fits[0]
c0, c1, c2 = fit.coefficients
print(f"vertex of the fitted parabola: pitch = {-c1 / (2 * c2):.1f}")
