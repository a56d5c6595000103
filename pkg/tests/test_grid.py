import numpy as np
import pytest

from kinterp import DyadicGrid, default_grid
from kinterp.grid import GRID_ENV_VAR


class TestDyadicGrid:
    def test_default_shape(self):
        g = DyadicGrid()
        assert g.size == 161
        pts = g.points()
        assert pts[0] == pytest.approx(2.0**-20)
        assert pts[-1] == pytest.approx(2.0**20)
        assert np.all(np.diff(np.log2(pts)) > 0)

    def test_log_weight(self):
        g = DyadicGrid(-2, 2, 4)
        assert g.log_weight == pytest.approx(np.log(2.0) / 4)

    def test_parse(self):
        g = DyadicGrid.parse("-8:8:2")
        assert (g.n_min, g.n_max, g.per_octave) == (-8, 8, 2)
        with pytest.raises(ValueError):
            DyadicGrid.parse("junk")

    def test_validation(self):
        with pytest.raises(ValueError):
            DyadicGrid(3, 3, 1)
        with pytest.raises(ValueError):
            DyadicGrid(0, 1, 0)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(GRID_ENV_VAR, "-4:4:1")
        g = default_grid()
        assert (g.n_min, g.n_max, g.per_octave) == (-4, 4, 1)
        monkeypatch.delenv(GRID_ENV_VAR)
        assert default_grid() == DyadicGrid()


def test_split_witness_json_roundtrip():
    import json

    from kinterp import CoupleDescriptor, k_numeric

    couple = CoupleDescriptor.sequence_lp(0.5, 1.0)
    _, w = k_numeric([1.0, -0.5], couple, 0.7)
    data = json.loads(json.dumps(w.to_json()))
    assert data["t"] == 0.7
    assert "seq" in data["x0"] and "seq" in data["x1"]
    total = np.asarray(data["x0"]["seq"]) + np.asarray(data["x1"]["seq"])
    assert np.allclose(total, [1.0, -0.5], atol=1e-12)
