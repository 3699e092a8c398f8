"""
Pytest configuration and fixtures for topo-sft tests.
"""

import logging
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest
import yaml

from src.geometry import Camera
from src.refine import RefineConfig
from src.sft import CorrespondenceSet, KernelConfig, reconstruct_initial
from src.synthgen import EtcKind, EtcSpec, default_transforms, gen_etc


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = tempfile.mkdtemp()
    yield Path(temp_path)
    shutil.rmtree(temp_path)


@pytest.fixture
def workdir(temp_dir, monkeypatch):
    """Run in an empty directory so no stray topo_sft.yaml is picked up."""
    monkeypatch.chdir(temp_dir)
    monkeypatch.setenv('HOME', str(temp_dir))
    return temp_dir


@pytest.fixture
def test_config():
    """A small configuration for fast end-to-end runs."""
    return {
        'refine': {
            'loss_grid_side': 9,
            'min_iters': 2,
            'max_iters': 3,
            'patience': 1,
        },
        'synthgen': {
            'n_points': 30,
        },
        'logging': {
            'console_level': 'WARNING',
        },
    }


@pytest.fixture
def config_file(temp_dir, test_config):
    """Create a temporary config file."""
    config_path = temp_dir / 'topo_sft.yaml'
    with open(config_path, 'w') as f:
        yaml.safe_dump(test_config, f)
    return config_path


@pytest.fixture
def fast_refine():
    """Refinement options small enough for unit tests."""
    return RefineConfig(loss_grid_side=9, min_iters=2, max_iters=4, patience=1)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def plane_spec(n_points: int = 40, seed: int = 3) -> EtcSpec:
    return EtcSpec(EtcKind.PLANE, default_transforms(EtcKind.PLANE, seed, identity=True),
                   n_points=n_points, seed=seed)


@pytest.fixture
def plane_dataset():
    """Fronto-parallel plane at depth 2, identity transforms."""
    return gen_etc(plane_spec(), Camera())


@pytest.fixture
def plane_corrs(plane_dataset):
    return plane_dataset.to_correspondences()


@pytest.fixture
def plane_recon(plane_corrs):
    return reconstruct_initial(plane_corrs, KernelConfig())


@pytest.fixture
def hole_dataset():
    """Hole disconnection with identity transforms."""
    spec = EtcSpec(EtcKind.HOLE_DISCONNECTION,
                   default_transforms(EtcKind.HOLE_DISCONNECTION, 42, identity=True),
                   n_points=60, seed=42)
    return gen_etc(spec, Camera())


@pytest.fixture
def tilted_corrs():
    """Sources on a 5x5 grid of the tilted plane z = 2 + 0.2 s."""
    s, t = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    sources = np.column_stack([s.ravel(), t.ravel()])
    depth = 2.0 + 0.2 * sources[:, 0]
    # Arc length along s is sqrt(1 + 0.04) per unit
    template = np.column_stack([np.sqrt(1.04) * sources[:, 0], sources[:, 1], np.zeros(len(sources))])
    image = sources / depth[:, None]
    return CorrespondenceSet(sources, template, image)


@pytest.fixture(autouse=True)
def reset_singletons():
    """Reset singleton instances between tests."""
    from src.config.manager import ConfigManager
    ConfigManager._instance = None

    yield

    ConfigManager._instance = None


@pytest.fixture(autouse=True)
def restore_logging():
    """Put back the root handlers that setup_logging replaces."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level

    yield

    root.handlers[:] = handlers
    root.setLevel(level)
