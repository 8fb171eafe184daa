import numpy as np
import pytest

import gradion as g


@pytest.fixture(scope="session")
def d4_pipeline():
    """Solved table1-d4 preset: (layout, field, equilibrium, modes, couplings)."""
    layout, field = g.preset_layout_field("table1-d4")
    eq = g.solve_equilibrium(layout)
    modes = g.normal_modes(layout, eq)
    couplings = g.compute_couplings(modes, field, eq)
    return layout, field, eq, modes, couplings


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
