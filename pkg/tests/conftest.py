import json
import os
from pathlib import Path

os.environ.setdefault("EDGEWORTH_PROGRESS", "0")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from edgeworth.models import make_builtin  # noqa: E402
from edgeworth.models.base import GFunction, GModel, constant  # noqa: E402
from edgeworth.paths import GridSpec, PathGrid  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures" / "derived_values.json"


@pytest.fixture(scope="session")
def derived():
    """Pinned reference values keyed by name."""
    with open(FIXTURES, encoding="utf-8") as f:
        return {record["name"]: record for record in json.load(f)}


@pytest.fixture
def exp_pair_model():
    return make_builtin("exp_pair", {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0})


@pytest.fixture
def brownian_model():
    return make_builtin("brownian_identity")


@pytest.fixture
def odd_error_model():
    """g_X = w^2 - t, g_Y = w: the error is odd under W -> -W."""
    return GModel(
        name="odd_error",
        g_x=GFunction(
            value=lambda t, w: w * w - t,
            d_t=constant(-1.0),
            d_w=lambda t, w: 2.0 * w + 0.0 * t,
            d_ww=constant(2.0),
            d_www=constant(0.0),
            d_tw=constant(0.0),
        ),
        g_y=GFunction(
            value=lambda t, w: w + 0.0 * t,
            d_t=constant(0.0),
            d_w=constant(1.0),
            d_ww=constant(0.0),
            d_www=constant(0.0),
            d_tw=constant(0.0),
        ),
    )


@pytest.fixture
def zero_path():
    spec = GridSpec.build(1.0, 4, 256)
    return PathGrid(spec, np.zeros(spec.fine_steps + 1))


@pytest.fixture
def write_config(tmp_path):
    def write(**raw):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(raw), encoding="utf-8")
        return str(path)

    return write
