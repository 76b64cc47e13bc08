"""
Offline SVG plots: latent trajectories per class and generated-vs-truth traces
"""
import logging
from pathlib import Path
from typing import List, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from gpdmm.gp.mixture import TrainedGPDMM  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids and no timestamp so reruns write identical files
plt.rcParams["svg.hashsalt"] = "gpdmm"
SVG_METADATA = {"Date": None}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_latent(model: TrainedGPDMM, out_dir: Union[str, Path]) -> Path:
    """First two latent coordinates of every training sequence, colored by class"""
    fig, ax = plt.subplots(figsize=(6, 5))
    cmap = plt.get_cmap("tab10")
    for a, label in enumerate(model.class_labels):
        for i, X in enumerate(model.class_latents(a)):
            y = X[:, 1] if X.shape[1] > 1 else X[:, 0] * 0.0
            ax.plot(X[:, 0], y, color=cmap(a % 10), lw=1.2, label=label if i == 0 else None)
            ax.scatter(X[0, 0], y[0], color=cmap(a % 10), s=12)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title("Trayectorias latentes")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, Path(out_dir) / "latent.svg")


def plot_generation(outcomes, dataset, out_dir: Union[str, Path], features: int = 3) -> List[Path]:
    """
    One file per evaluated sequence: observed prefix, true remainder and
    generated remainder for the first `features` features.
    """
    paths = []
    for outcome in outcomes:
        seq = dataset.sequences[outcome.index]
        T = outcome.prefix.shape[0]
        shown = min(features, seq.feature_count)
        fig, axes = plt.subplots(shown, 1, figsize=(7, 2.2 * shown), sharex=True, squeeze=False)
        for j in range(shown):
            ax = axes[j, 0]
            ax.plot(range(T), outcome.prefix[:, j], color="black", lw=1.2, label="prefijo")
            steps = range(T, T + outcome.remainder.shape[0])
            ax.plot(steps, outcome.remainder[:, j], color="tab:blue", lw=1.2, label="real")
            ax.plot(steps, outcome.generated[:, j], color="tab:orange", lw=1.2, ls="--", label="generado")
            ax.set_ylabel(f"f{j + 1}")
        axes[0, 0].legend(loc="upper right", fontsize=8)
        axes[-1, 0].set_xlabel("paso")
        fig.suptitle(f"{seq.source_id} ({'ok' if outcome.correct else 'error'})")
        paths.append(_save(fig, Path(out_dir) / f"generated_{seq.source_id}.svg"))
    logger.info(f"📈 {len(paths)} gráficos de generación en {out_dir}")
    return paths
