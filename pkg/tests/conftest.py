import numpy as np
import pytest

from hierheat.grid import SpatialGrid, Subdomain
from hierheat.problem import ProblemSpec, make_target
from hierheat.tree import AdaptedField, build_tree


def _spec(
    n_x=8,
    n_steps=6,
    horizon=1.0,
    length=1.0,
    seed=None,
    a1=0.8,
    a2=0.4,
    b1=0.5,
    b2=0.25,
    alpha=(1.0, 1.0),
    beta=(50.0, 50.0),
    targets="bump",
    target_amp=(1.0, 0.8),
    **overrides,
):
    """Desk-scale problem builder; seed != None draws random coefficient fields."""
    tree = build_tree(n_steps, horizon)
    grid = SpatialGrid(n_x, length)
    if seed is not None:
        rng = np.random.default_rng(seed)
        a1, a2 = rng.standard_normal((2, n_steps, n_x))
        b1, b2 = 0.5 * rng.standard_normal((2, n_steps, n_x))
    kwargs = dict(
        tree=tree,
        grid=grid,
        a1=a1,
        a2=a2,
        b1=b1,
        b2=b2,
        leader_domain=Subdomain(0.3 * length, 0.7 * length),
        follower_domains=(Subdomain(0.1 * length, 0.3 * length), Subdomain(0.7 * length, 0.9 * length)),
        target_domain=Subdomain(0.4 * length, 0.6 * length),
        alpha=alpha,
        beta=beta,
        y0=np.sin(np.pi * grid.x / length),
    )
    kwargs.update(overrides)
    spec = ProblemSpec(**kwargs)
    if targets == "bump":
        spec.targets = (
            make_target(tree, grid, spec.target_domain, target_amp[0]),
            make_target(tree, grid, spec.target_domain, target_amp[1]),
        )
    return spec


@pytest.fixture
def make_spec():
    return _spec


@pytest.fixture
def random_field():
    def build(tree, n_x, n_levels, seed=0, scale=1.0):
        rng = np.random.default_rng(seed)
        return AdaptedField(
            tree, [scale * rng.standard_normal((2**n, n_x)) for n in range(n_levels)]
        )

    return build
