"""
report.py

Writes the result files of a run: spectrum table, check records,
sampled potentials and the resolved configuration. Every file is written
to a temporary name first and renamed into place.
"""

import json
import logging
import os
import tempfile

import pandas as pd

from src.config import CSV_FLOAT_FORMAT, SPECTRUM_COLUMNS
from src.errors import OutputError

logger = logging.getLogger(__name__)


def _atomic_write(path, write):
    """
    Write through a temporary file in the target directory, then rename.

    Parameters:
        path (str): Final path
        write (callable): Receives an open text handle
    """

    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                write(handle)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def spectrum_table(ctx):
    """
    One row per state.

    Two axes: one row per product state (i, j) of every multiplet, with the
    multiplet index as level and the larger axis residual. One axis: one row
    per level with an empty index_y.

    Parameters:
        ctx (CheckContext): Context holding the spectra

    Returns:
        pd.DataFrame: Columns SPECTRUM_COLUMNS
    """

    spectra = ctx.spectra
    rows = []
    if ctx.scenario.two_dimensional:
        Sx, Sy = spectra
        for level, multiplet in enumerate(ctx.multiplets):
            for i, j in multiplet.members:
                rows.append({
                    "level": level,
                    "index_x": i,
                    "index_y": j,
                    "energy": float(Sx.energies[i] + Sy.energies[j]),
                    "residual": float(max(Sx.residuals[i], Sy.residuals[j])),
                })
    else:
        (S,) = spectra
        for i, (energy, residual) in enumerate(zip(S.energies, S.residuals)):
            rows.append({
                "level": i,
                "index_x": i,
                "index_y": None,
                "energy": float(energy),
                "residual": float(residual),
            })

    df = pd.DataFrame(rows, columns=SPECTRUM_COLUMNS)
    for column in ("level", "index_x", "index_y"):
        df[column] = df[column].astype("Int64")
    return df


def potential_table(scenario):
    """
    Potentials of the axes sampled on the interior of the x-axis box.

    Returns:
        pd.DataFrame: Columns x, V (one axis) or x, V_x, V_y (two axes)
    """

    grid = scenario.axes[0].grid
    x = grid.samples[grid.interior()]
    if not scenario.two_dimensional:
        return pd.DataFrame({"x": x, "V": scenario.axes[0].potential.eval(x)})
    x_axis, y_axis = scenario.axes
    return pd.DataFrame({
        "x": x,
        "V_x": x_axis.potential.eval(x),
        "V_y": y_axis.potential.eval(x),
    })


def output_paths(prefix):
    return {
        "spectrum": f"{prefix}.spectrum.csv",
        "checks": f"{prefix}.checks.json",
        "potential": f"{prefix}.potential.csv",
        "config": f"{prefix}.config.json",
    }


def _write_csv(df, path):
    _atomic_write(path, lambda handle: df.to_csv(
        handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
    ))


def _write_json(payload, path):
    def write(handle):
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    _atomic_write(path, write)


def write_spectrum(df, prefix):
    path = output_paths(prefix)["spectrum"]
    _write_csv(df, path)
    return path


def write_report(ctx, records, config):
    """
    Write the four result files of a run.

    Parameters:
        ctx (CheckContext): Context of the run
        records (list[CheckRecord]): Check outcomes
        config (ScenarioConfig): Resolved configuration

    Returns:
        dict[str, str]: File kind -> path
    """

    paths = output_paths(config.output)
    _write_csv(spectrum_table(ctx), paths["spectrum"])
    _write_json(
        {
            "system": ctx.scenario.name,
            "pass": all(record.passed for record in records),
            "checks": [record.to_dict() for record in records],
        },
        paths["checks"],
    )
    _write_csv(potential_table(ctx.scenario), paths["potential"])
    _write_json(config.to_dict(), paths["config"])
    logger.info("report written under prefix %s", config.output)
    return paths
