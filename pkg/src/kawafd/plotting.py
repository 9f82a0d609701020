"""Figure rendering for the report path (headless, PNG next to each CSV)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .config import RunResult  # noqa: E402
from .grid import make_grid  # noqa: E402
from .solutions import exact_soliton  # noqa: E402

__all__ = ["render_run", "render_convergence"]

_DPI = 140


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)
    return path


def render_run(result: RunResult, out_dir: str | Path) -> list[Path]:
    """One PNG per snapshot plus a diagnostics panel figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    x = make_grid(cfg.domain[0], cfg.domain[1], cfg.n).nodes
    exact_col = cfg.compare_exact and cfg.initial_condition.id == "one_soliton"
    paths = []

    for t in sorted(result.snapshots):
        u = result.snapshots[t]
        fig, ax = plt.subplots(figsize=(7.0, 3.2))
        ax.plot(x, u.values, lw=1.2,
                label=f"{cfg.scheme.kind} (n={cfg.n})")
        if exact_col:
            ax.plot(x, exact_soliton(x, t, cfg.initial_condition.c),
                    "k--", lw=0.9, label="exact")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.set_title(f"t = {t:g}")
        ax.legend(loc="upper right", fontsize=8)
        fig.tight_layout()
        paths.append(_save(fig, out / f"snapshot_t{t:.6f}.png"))

    if result.diagnostics:
        d = result.diagnostics
        ts = [r.t for r in d]
        fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), sharex=True)
        axes[0, 0].plot(ts, [r.mass for r in d], lw=1.0)
        axes[0, 0].set_ylabel("mass")
        axes[0, 1].plot(ts, [r.hamiltonian for r in d], lw=1.0)
        axes[0, 1].set_ylabel("energy functional")
        axes[1, 0].plot(ts, [r.ledger_residual for r in d], lw=1.0)
        axes[1, 0].set_ylabel("ledger residual")
        axes[1, 0].axhline(0.0, color="k", lw=0.5)
        axes[1, 1].semilogy(
            ts, [max(r.solver_residual, 1e-30) for r in d], lw=1.0)
        axes[1, 1].set_ylabel("solver residual")
        for ax in axes[1]:
            ax.set_xlabel("t")
        fig.tight_layout()
        paths.append(_save(fig, out / "diagnostics.png"))
    return paths


def render_convergence(rows: list[dict], out_dir: str | Path) -> Path:
    """Log-log error-versus-mesh figure with a first-order guide line."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    schemes = sorted({r["scheme"] for r in rows})
    for scheme in schemes:
        pts = [(r["n"], r["l2_error"]) for r in rows
               if r["scheme"] == scheme and r["l2_error"] > 0]
        if not pts:
            continue
        ns, errs = zip(*pts)
        ax.loglog(ns, errs, "o-", label=scheme)
    if rows and rows[0]["l2_error"] > 0:
        n0, e0 = rows[0]["n"], rows[0]["l2_error"]
        ns = sorted({r["n"] for r in rows})
        ax.loglog(ns, [e0 * n0 / n for n in ns], "k:", lw=0.8,
                  label="first order")
    ax.set_xlabel("mesh points")
    ax.set_ylabel("l2 error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, out / "convergence.png")
