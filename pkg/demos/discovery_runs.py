# %%
# Full discovery loop with scripted language-model replies, against the two
# ablations: search alone, and agents without hypotheses.
from pathlib import Path
import statistics
import tempfile

from prim.orchestrator import RunConfig, compare_runs, run, to_table

root = Path(__file__).resolve().parent.parent
out = Path(tempfile.mkdtemp(prefix="prim-demo-"))

summaries = []
for mode in ("prim", "vanilla_agent", "vanilla_mas"):
    for seed in range(5):
        cfg = RunConfig.load(root / "configs" / f"{mode}.json")
        cfg.seed = seed
        cfg.output_dir = out / f"{mode}-{seed}"
        summaries.append(run(cfg))

print(to_table(compare_runs(summaries)))

# %%
# Mean best value per outer iteration of the hypothesis-driven runs.
prim = [s for s in summaries if s.mode == "prim"]
for t in range(8):
    print(t + 1, f"{statistics.fmean(s.per_iteration_best[t] for s in prim):.3f}")

# %%
# Each run leaves a replayable log and one markdown report per iteration.
print(sorted(p.name for p in (out / "prim-0").iterdir()))
