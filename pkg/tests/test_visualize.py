import os

import numpy as np
import pandas as pd

from src.report import output_paths
from src.visualize import visualize_all


def test_figures_from_csv(tmp_path):
    prefix = str(tmp_path / "run" / "osc")
    paths = output_paths(prefix)
    os.makedirs(tmp_path / "run")
    x = np.linspace(-4.0, 4.0, 81)
    pd.DataFrame({"x": x, "V_x": 0.5 * x ** 2, "V_y": 0.5 * x ** 2}).to_csv(paths["potential"], index=False)
    pd.DataFrame({
        "level": [0, 1, 1],
        "index_x": [0, 0, 1],
        "index_y": [0, 1, 0],
        "energy": [1.0, 2.0, 2.0],
        "residual": [1e-10, 1e-10, 1e-10],
    }).to_csv(paths["spectrum"], index=False)

    visualize_all(prefix)

    figures = tmp_path / "run" / "figures"
    assert (figures / "osc.potential.png").exists()
    assert (figures / "osc.levels.png").exists()
