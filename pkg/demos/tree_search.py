# %%
# Tree search over nested boxes versus plain random sampling, same budget.
import statistics

from prim.optimizer import MCTSConfig, best_of, mcts_optimize, random_search
from prim.space import NANOHELIX
from prim.virtlab import GRID_OPTIMUM, evaluate_g_factor

budget = 100
mcts, rand = [], []
for seed in range(10):
    trace = mcts_optimize(NANOHELIX, {}, NANOHELIX.names, evaluate_g_factor,
                          MCTSConfig(iterations=budget, seed=seed))
    mcts.append(best_of(trace)[1])
    trace = random_search(NANOHELIX, {}, NANOHELIX.names, evaluate_g_factor, budget, seed)
    rand.append(best_of(trace)[1])

print(f"tree search median best  {statistics.median(mcts):.3f}")
print(f"random search median best {statistics.median(rand):.3f}")
print(f"fraction of optimum reached {statistics.median(mcts) / GRID_OPTIMUM:.1%}")

# %%
# Searching two dimensions with the rest frozen at the midpoint converges fast,
# but the frozen values cap how high it can go.
frozen = {k: v for k, v in NANOHELIX.midpoint().items() if k not in ("helix_radius", "pitch")}
frozen["n_turns"] = 6.0
trace = mcts_optimize(NANOHELIX, frozen, ["helix_radius", "pitch"], evaluate_g_factor,
                      MCTSConfig(iterations=60))
vec, g = best_of(trace)
print(f"2-D slice: g={g:.3f} at helix_radius={vec['helix_radius']:.1f} pitch={vec['pitch']:.1f}")
