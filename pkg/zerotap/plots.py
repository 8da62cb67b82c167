"""Static SVG figures for analyze and compare-derivative."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from zerotap.config import SVG_DPI, SVG_HASH_SALT, SVG_SIZE_PX  # noqa: E402
from zerotap.convex import PiecewiseConvex, evaluate  # noqa: E402
from zerotap.roots import RootSet  # noqa: E402
from zerotap.wiman import Profile, Segmentation  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no date keep the SVG text identical across runs
_RC = {
    "svg.hashsalt": SVG_HASH_SALT,
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _new_figure(size_px: int, dpi: int):
    inches = size_px / dpi
    return plt.subplots(figsize=(inches, inches), dpi=dpi)


def _save(fig, path: Path, dpi: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", dpi=dpi, metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote {path}")
    return path


def _finite(points: np.ndarray) -> np.ndarray:
    return points[np.isfinite(points)]


def _draw_circles(ax, radii, style: str = "--", color: str = "tab:red") -> None:
    theta = np.linspace(0.0, 2.0 * np.pi, 721)
    for i, r in enumerate(radii):
        label = "detected circle" if i == 0 else None
        ax.plot(r * np.cos(theta), r * np.sin(theta), style, color=color, linewidth=1.0, label=label)


def profile_svg(
    profile: Profile,
    path: Path,
    segmentation: Segmentation | None = None,
    title: str = "",
    size_px: int = SVG_SIZE_PX,
    dpi: int = SVG_DPI,
) -> Path:
    """Lower and upper bounds of (1/V) ln M(e^t) with the detected affine pieces."""
    with plt.rc_context(_RC):
        fig, ax = _new_figure(size_px, dpi)
        t = profile.t_grid
        ax.fill_between(t, profile.lower, profile.upper, color="tab:blue", alpha=0.2, label="sandwich")
        ax.plot(t, profile.lower, color="tab:blue", linewidth=1.2, label="lower (1/V) ln m")
        ax.plot(t, profile.upper, color="tab:orange", linewidth=1.0, label="upper bound")
        if segmentation is not None:
            for i, piece in enumerate(segmentation.pieces):
                ts = np.array([piece.t_from, piece.t_to])
                ax.plot(
                    ts,
                    piece.intercept + piece.slope * ts,
                    ":",
                    color="black",
                    linewidth=1.5,
                    label="affine pieces" if i == 0 else None,
                )
            for circle in segmentation.circles:
                ax.axvline(circle.t, color="tab:red", linewidth=0.8, linestyle="--")
        ax.set_xlabel("t = ln r")
        ax.set_ylabel("(1/V) ln M(e^t)")
        ax.set_title(f"Profile {title}".strip())
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper left")
        return _save(fig, path, dpi)


def envelope_svg(
    psi: PiecewiseConvex,
    legendre_psi: PiecewiseConvex,
    t_grid: np.ndarray,
    path: Path,
    title: str = "",
    size_px: int = SVG_SIZE_PX,
    dpi: int = SVG_DPI,
) -> Path:
    """psi_n over its breakpoints and its conjugate over the profile grid."""
    with plt.rc_context(_RC):
        inches = size_px / dpi
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(inches, inches), dpi=dpi)
        top.plot(psi.breakpoints, psi.values, "-o", color="tab:green", markersize=3, label="psi_n")
        top.set_xlabel("x = k / V")
        top.set_ylabel("psi_n(x)")
        top.grid(True, alpha=0.3)
        top.legend(loc="upper left")
        top.set_title(f"Convex minorant {title}".strip())

        t = np.asarray(t_grid, dtype=np.float64)
        values = evaluate(legendre_psi, t)
        shown = np.isfinite(values)
        bottom.plot(t[shown], values[shown], color="tab:purple", label="L(psi_n)")
        bottom.set_xlabel("t")
        bottom.set_ylabel("L(psi_n)(t)")
        bottom.grid(True, alpha=0.3)
        bottom.legend(loc="upper left")
        fig.tight_layout()
        return _save(fig, path, dpi)


def roots_svg(
    roots: RootSet,
    path: Path,
    circle_radii=(),
    title: str = "",
    size_px: int = SVG_SIZE_PX,
    dpi: int = SVG_DPI,
) -> Path:
    """Scatter of the zeros with the detected circles overlaid."""
    with plt.rc_context(_RC):
        fig, ax = _new_figure(size_px, dpi)
        points = _finite(roots.all_roots())
        ax.scatter(points.real, points.imag, s=8, color="tab:blue", label=f"zeros ({roots.degree})")
        radii = [r for r in circle_radii if np.isfinite(r)]
        _draw_circles(ax, radii)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title(f"Zeros {title}".strip())
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right")
        return _save(fig, path, dpi)


def overlay_svg(
    zeros: RootSet,
    critical: RootSet,
    path: Path,
    title: str = "",
    size_px: int = SVG_SIZE_PX,
    dpi: int = SVG_DPI,
) -> Path:
    """Zeros against critical points."""
    with plt.rc_context(_RC):
        fig, ax = _new_figure(size_px, dpi)
        z = _finite(zeros.all_roots())
        c = _finite(critical.all_roots())
        ax.scatter(z.real, z.imag, s=10, marker="o", color="tab:blue", label=f"zeros ({zeros.degree})")
        ax.scatter(c.real, c.imag, s=14, marker="x", color="tab:red", label=f"critical points ({critical.degree})")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title(f"Zeros and critical points {title}".strip())
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right")
        return _save(fig, path, dpi)
