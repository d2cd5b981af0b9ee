import pytest

from disc.cli_io.random_scenes import random_scene
from disc.cli_io.scene_file import load_scene
from util.project_paths import SCENE_A, SCENE_B, SCENE_C, SCENE_D


@pytest.fixture(scope="session")
def scene_a():
    return load_scene(SCENE_A)


@pytest.fixture(scope="session")
def scene_b():
    return load_scene(SCENE_B)


@pytest.fixture(scope="session")
def scene_c():
    return load_scene(SCENE_C)


@pytest.fixture(scope="session")
def scene_d():
    return load_scene(SCENE_D)


@pytest.fixture(scope="session")
def random_scenes():
    cache = {}

    def scenes(count, **kwargs):
        key = (count, tuple(sorted(kwargs.items())))
        if key not in cache:
            cache[key] = [random_scene(seed, **kwargs) for seed in range(count)]
        return cache[key]

    return scenes
