"""
visualize.py

Generates figures from the result files of a run: the sampled
potentials and the energy levels with their degeneracies.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from src.report import output_paths


def plot_potentials(csv_path, save_path, levels_csv=None, max_levels=8):
    """
    Plot the potential of each axis, with the lowest levels as horizontal lines.

    Parameters:
        csv_path (str): Path to <prefix>.potential.csv
        save_path (str): Path to save the figure
        levels_csv (str | None): Path to <prefix>.spectrum.csv
        max_levels (int): Number of levels drawn
    """

    df = pd.read_csv(csv_path)
    columns = [c for c in df.columns if c != "x"]
    long = df.melt(id_vars="x", value_vars=columns, var_name="axis", value_name="V")

    plt.figure(figsize=(10, 6))
    sns.lineplot(data=long, x="x", y="V", hue="axis", linewidth=2)

    if levels_csv is not None:
        spectrum = pd.read_csv(levels_csv)
        energies = spectrum.groupby("level")["energy"].mean().head(max_levels)
        for energy in energies:
            plt.axhline(energy, color="gray", linestyle="--", linewidth=0.8, alpha=0.6)
        top = energies.max() if len(energies) else long["V"].max()
        plt.ylim(long["V"].min() - 0.5, top + 1.0)

    plt.title("Potentials", fontsize=16, fontweight="bold", pad=20)
    plt.xlabel("x", fontsize=12, fontweight="bold")
    plt.ylabel("V(x)", fontsize=12, fontweight="bold")
    plt.grid(alpha=0.3)
    plt.tight_layout()

    os.makedirs(os.path.dirname(save_path) or ".", exist_ok=True)
    plt.savefig(save_path, dpi=300, bbox_inches="tight")
    print(f"✅ Potential plot saved to: {save_path}")
    plt.close()


def plot_levels(csv_path, save_path):
    """
    Bar plot of the levels, colored by degeneracy.

    Parameters:
        csv_path (str): Path to <prefix>.spectrum.csv
        save_path (str): Path to save the figure
    """

    df = pd.read_csv(csv_path)
    summary = df.groupby("level").agg(energy=("energy", "mean"), degeneracy=("energy", "size")).reset_index()

    plt.figure(figsize=(10, 6))
    sns.barplot(
        data=summary,
        x="level",
        y="energy",
        hue="degeneracy",
        dodge=False,
        palette="YlOrRd",
        edgecolor="black",
    )

    plt.title("Energy Levels", fontsize=16, fontweight="bold", pad=20)
    plt.xlabel("Level", fontsize=12, fontweight="bold")
    plt.ylabel("Energy", fontsize=12, fontweight="bold")
    plt.grid(axis="y", alpha=0.3)
    plt.legend(title="Degeneracy")
    plt.tight_layout()

    os.makedirs(os.path.dirname(save_path) or ".", exist_ok=True)
    plt.savefig(save_path, dpi=300, bbox_inches="tight")
    print(f"✅ Level plot saved to: {save_path}")
    plt.close()


def visualize_all(prefix, output_dir=None):
    """
    Generate all figures of a run.

    Parameters:
        prefix (str): Output prefix the report was written under
        output_dir (str | None): Directory for the figures; defaults to <prefix dir>/figures
    """

    paths = output_paths(prefix)
    output_dir = output_dir or os.path.join(os.path.dirname(prefix) or ".", "figures")
    name = os.path.basename(prefix)

    print("📊 Generating all visualizations...")
    plot_potentials(paths["potential"], os.path.join(output_dir, f"{name}.potential.png"), paths["spectrum"])
    plot_levels(paths["spectrum"], os.path.join(output_dir, f"{name}.levels.png"))
    print(f"✨ All visualizations saved to: {output_dir}")


if __name__ == "__main__":
    import sys

    visualize_all(sys.argv[1] if len(sys.argv) > 1 else os.path.join("outputs", "mielnik2d"))
