import pytest

from finetune import FinetuneConfig, run_finetune

from support import BUNDLED_DATASET, write_toy_csv


@pytest.fixture(scope="session")
def toy_csv(tmp_path_factory):
    return write_toy_csv(tmp_path_factory.mktemp("data") / "toy.csv")


@pytest.fixture(scope="session")
def default_run(tmp_path_factory):
    """Default-config training on the bundled dataset; session-scoped
    because the run costs about half a minute."""
    out = tmp_path_factory.mktemp("artifacts")
    return run_finetune(BUNDLED_DATASET, out, FinetuneConfig(seed=0))
