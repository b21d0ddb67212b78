import numpy as np
import pytest

from sparsenav.harness import reference_route
from sparsenav.simworld import Pose, check_collision, preprocess, reference_arena, render


@pytest.fixture(scope="session")
def arena():
    return reference_arena()


@pytest.fixture(scope="session")
def route():
    return reference_route()


@pytest.fixture(scope="session")
def rendered_views(arena):
    """Middle crops of 120 collision-free random poses, plus the poses."""
    rng = np.random.default_rng(7)
    xmin, ymin, xmax, ymax = arena.bounds
    poses, crops = [], []
    while len(crops) < 120:
        pose = Pose(
            rng.uniform(xmin + 0.45, xmax - 0.45),
            rng.uniform(ymin + 0.45, ymax - 0.45),
            rng.uniform(-np.pi, np.pi),
        )
        if check_collision(arena, pose, 0.25):
            continue
        poses.append(pose)
        crops.append(preprocess(render(arena, pose)).middle)
    return poses, np.array(crops)
