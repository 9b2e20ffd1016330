from pathlib import Path

import pytest

from prim.agents import LLMBackendConfig
from prim.orchestrator import RunConfig
from prim.space import NANOHELIX
from prim.virtlab import SurrogateConfig, serve

ROOT = Path(__file__).resolve().parent.parent
CASE_STUDY = ROOT / "fixtures" / "case_study"
LITERATURE = ROOT / "fixtures" / "literature.json"


@pytest.fixture
def space():
    return NANOHELIX


@pytest.fixture(scope="session")
def lab_server():
    server = serve("127.0.0.1", 0, SurrogateConfig())
    server.start()
    yield server
    server.stop()


@pytest.fixture
def make_config(tmp_path):
    def make(mode="prim", seed=0, outer_iterations=2, iterations=40, **kw):
        from prim.optimizer import MCTSConfig
        return RunConfig(mode=mode, seed=seed, outer_iterations=outer_iterations,
                         mcts=MCTSConfig(iterations=iterations),
                         backend=LLMBackendConfig(fixture_path=str(CASE_STUDY)),
                         literature_source=str(LITERATURE),
                         output_dir=kw.pop("output_dir", tmp_path / f"{mode}-{seed}"), **kw)
    return make
