import numpy as np
import pytest

from config.logging_config import configure_logging
from config.settings import NetworkConfig, TrainConfig, EvolutionConfig, OracleConfig
from services.bench import make_oracle, generate_dataset
from services.dataset_manager import dataset_manager
from services.checkpoint_manager import checkpoint_manager
from services.point_cloud_ops import synthetic_cloud
from services.search_space import default_space, hand_crafted_first_order


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging("WARNING")


@pytest.fixture(autouse=True)
def clear_managers():
    yield
    dataset_manager.clear()
    checkpoint_manager.predictors.clear()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def space():
    return default_space()


@pytest.fixture
def hand_crafted_genotype():
    return hand_crafted_first_order()


@pytest.fixture
def small_network():
    """Coarse enough that a few hundred points reach every level"""
    return NetworkConfig(base_cell=0.1, radius_ratio=2.5, max_neighbors=16, chunk_size=64)


@pytest.fixture
def small_cloud():
    return synthetic_cloud(400, seed=7)


@pytest.fixture(scope="session")
def oracle():
    return make_oracle(OracleConfig(seed=3))


@pytest.fixture(scope="session")
def small_dataset(oracle):
    return generate_dataset(oracle, n=120, seed=3)


@pytest.fixture
def quick_train():
    return TrainConfig(epochs=3, pretrain_epochs=2, batch_size=16, seed=0)


@pytest.fixture
def quick_evolution():
    return EvolutionConfig(population=12, sample_size=4, rounds=20, beta=0.0, top_k=3, random_budget=32)
