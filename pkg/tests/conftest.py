import numpy as np
import pytest

from rieszgas.radial_kernel import PotentialSpec, RadialField, RadialGrid


@pytest.fixture
def coulomb3() -> PotentialSpec:
    return PotentialSpec(3, 1.0, kappa=1, gamma=2.0)


def gaussian_field(r_max=3.0, num=512, center=1.0, width=0.4, amp=1.0,
                   r_min=1e-3):
    r = np.linspace(r_min, r_max, num)
    return RadialField(RadialGrid(r), amp * np.exp(-(((r - center) / width) ** 2)))


def uniform_ball_field(R=1.0, r_max=4.0, num=4001, value=1.0):
    """Uniform density on [0, R]; a near-duplicate node at the jump keeps the
    trapezoid rule from smearing the discontinuity."""
    inside = np.linspace(1e-6, R, num // 2)
    outside = np.linspace(R + 1e-9, r_max, num - num // 2)
    r = np.concatenate([inside, outside])
    vals = np.where(r <= R, value, 0.0)
    return RadialField(RadialGrid(r), vals)


def random_bump_field(rng, r_max=2.0, num=384, r_min=1e-3):
    r = np.linspace(r_min, r_max, num)
    vals = np.zeros_like(r)
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(0.2, 0.8) * r_max
        w = rng.uniform(0.1, 0.3) * r_max
        vals += rng.uniform(0.2, 1.5) * np.exp(-(((r - c) / w) ** 2))
    return RadialField(RadialGrid(r), vals)
