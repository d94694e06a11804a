"""File emitters: OBJ meshes, trace / profile / sweep CSVs and JSON summaries.

Every emitter returns the file text as well as writing it, and the text is a
pure function of its inputs: fixed ``%g`` precisions, fixed ordering, no
timestamps.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (
    ConservedPair,
    OrbitKind,
    classify_orbit,
    find_equilibria,
    potential_derivatives,
)
from .errors import ValidationError
from .integrator import GeodesicTrace, state_beta
from .quadrature import half_period, surface_area
from .surface import SurfaceParams, embed, gaussian_curvature, metric_at, wrap_angle

OBJ_DIGITS = 9
CSV_DIGITS = 17

GEODESIC_HEADER = "lambda,r,chi_wrapped,phi,x,y,z,ur,uphi,ell_drift,E_drift"
POTENTIAL_HEADER = "r,V,dV,K"
CURVATURE_HEADER = "r,chi,K"
SWEEP_HEADER = "beta,ell,E,kind,r_plus,half_period_lambda"


def _num(x, digits=CSV_DIGITS) -> str:
    return format(float(x), f".{digits}g")


def _rows(columns) -> list[str]:
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    return [",".join(_num(v) for v in row) for row in zip(*cols)]


def _write(path, text: str) -> str:
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


@dataclass(frozen=True)
class MeshSpec:
    n_chi: int = 64
    n_phi: int = 64
    revolutions: float = 2.5

    def __post_init__(self):
        if int(self.n_chi) != self.n_chi or self.n_chi < 8:
            raise ValidationError(f"n_chi must be an integer >= 8, got {self.n_chi}")
        if int(self.n_phi) != self.n_phi or self.n_phi < 8:
            raise ValidationError(f"n_phi must be an integer >= 8, got {self.n_phi}")
        if not (math.isfinite(self.revolutions) and self.revolutions > 0):
            raise ValidationError(f"revolutions must be positive, got {self.revolutions}")

    @property
    def n_columns(self) -> int:
        """Number of quad columns along ``phi``; there is one more vertex ring."""
        return math.ceil(self.n_phi * self.revolutions)

    @property
    def n_vertices(self) -> int:
        return self.n_chi * (self.n_columns + 1)

    @property
    def n_triangles(self) -> int:
        return 2 * self.n_chi * self.n_columns


def mesh_grid(p: SurfaceParams, spec: MeshSpec):
    """Vertex positions ``(n_vertices, 3)`` and 0-based triangles ``(n_triangles, 3)``.

    Vertex ``(i, j)`` (``chi`` index ``i``, ``phi`` index ``j``) sits at row
    ``j n_chi + i``; the ``chi`` seam is shared, the ``phi`` ends are open.
    """
    n, cols = spec.n_chi, spec.n_columns
    chi = 2.0 * np.pi * np.arange(n) / n
    phi = 2.0 * np.pi * spec.revolutions * np.arange(cols + 1) / cols
    verts = embed(p, chi[None, :], phi[:, None]).reshape(-1, 3)
    i = np.arange(n)
    j = np.arange(cols)[:, None]
    v00 = j * n + i
    v10 = j * n + (i + 1) % n
    v01 = v00 + n
    v11 = v10 + n
    tris = np.stack([
        np.stack([v00, v10, v11], axis=-1),
        np.stack([v00, v11, v01], axis=-1),
    ], axis=2).reshape(-1, 3)
    return verts, tris


def write_obj(p: SurfaceParams, spec: MeshSpec, path=None) -> str:
    verts, tris = mesh_grid(p, spec)
    lines = [
        f"# helical tube a={p.a!r} b={p.b!r} c={p.c!r} d={p.d!r} m={p.m}",
        f"# n_chi={spec.n_chi} n_phi={spec.n_phi} revolutions={spec.revolutions!r}",
    ]
    lines += ["v " + " ".join(_num(x, OBJ_DIGITS) for x in v) for v in verts]
    lines += [f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}" for t in tris]
    return _write(path, "\n".join(lines) + "\n")


def read_obj(text: str):
    """Parse the ``v`` and ``f`` records of an OBJ file (1-based faces returned 0-based)."""
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
    return np.array(verts), np.array(faces, dtype=int)


def geodesic_table(trace: GeodesicTrace) -> str:
    b = trace.params.b
    xyz = trace.xyz
    cols = [
        trace.lam, trace.r, wrap_angle(trace.r / b), trace.phi,
        xyz[:, 0], xyz[:, 1], xyz[:, 2], trace.ur, trace.uphi,
        np.maximum.accumulate(trace.ell_dev), np.maximum.accumulate(trace.E_dev),
    ]
    return "\n".join([GEODESIC_HEADER] + _rows(cols)) + "\n"


def geodesic_summary(trace: GeodesicTrace) -> dict:
    p = trace.params
    start = trace.start
    cp = trace.conserved
    try:
        analysis = classify_orbit(p, cp, start.r, allow_zero_momentum=True)
        kind = analysis.kind.value
        turning = analysis.turning
    except ValidationError as exc:
        kind, turning = f"unclassified: {exc}", None
    return {
        "params": p.as_dict(),
        "start": {"lambda": start.lam, "r": start.r, "phi": start.phi,
                  "ur": start.ur, "uphi": start.uphi, "beta": state_beta(p, start)},
        "lambda_end": float(trace.lam[-1]),
        "n_steps": len(trace) - 1,
        "conserved": {"ell": cp.ell, "E": cp.E},
        "classification": kind,
        "turning_points": None if turning is None else
            {"r_plus": turning.r_plus, "r_minus": turning.r_minus, "separatrix": turning.separatrix},
        "max_drift": {"ell": trace.drift_ell, "E": trace.drift_E},
        "events": [{"kind": e.kind, "lambda": e.lam, "r": e.state.r, "phi": e.state.phi}
                   for e in trace.events],
    }


def write_geodesic(trace: GeodesicTrace, csv_path=None, json_path=None) -> tuple[str, str]:
    table = _write(csv_path, geodesic_table(trace))
    summary = _write(json_path, _json(geodesic_summary(trace)))
    return table, summary


def profile_grid(p: SurfaceParams, n: int = 1025) -> np.ndarray:
    """Uniform ``r`` grid over one period, both ends ``-b pi`` and ``b pi`` included."""
    if n < 2:
        raise ValidationError(f"profile grid needs at least 2 points, got {n}")
    return p.b * np.pi * np.linspace(-1.0, 1.0, n)


def write_potential(p: SurfaceParams, ell: float = 1.0, n: int = 1025, path=None) -> str:
    """``r, V, V', K`` table followed by one ``#`` comment row per equilibrium."""
    r = profile_grid(p, n)
    V, dV, _ = potential_derivatives(p, ell, r)
    K = gaussian_curvature(p, r)
    lines = [POTENTIAL_HEADER] + _rows([r, V, dV, K])
    for e in find_equilibria(p, ell):
        lines.append(f"# equilibrium r={_num(e.r_star)} stability={e.stability.value} V={_num(e.V_value)}")
    return _write(path, "\n".join(lines) + "\n")


def write_curvature(p: SurfaceParams, n: int = 1025, path=None) -> str:
    r = profile_grid(p, n)
    lines = [CURVATURE_HEADER] + _rows([r, r / p.b, gaussian_curvature(p, r)])
    return _write(path, "\n".join(lines) + "\n")


def area_summary(p: SurfaceParams, phi_span: float = 2.0 * math.pi) -> dict:
    return {"params": p.as_dict(), "phi_span": phi_span, "area": surface_area(p, phi_span)}


def write_area(p: SurfaceParams, phi_span: float = 2.0 * math.pi, path=None) -> str:
    return _write(path, _json(area_summary(p, phi_span)))


@dataclass(frozen=True)
class SweepRow:
    beta: float
    ell: float
    E: float
    kind: str
    r_plus: float
    half_period_lambda: float


def _sweep_point(p, r0, beta, mode, value):
    M0 = float(metric_at(p, r0).M)
    s = math.sin(beta)
    if mode == "energy":
        E = value
        ell = math.sqrt(2.0 * E) * M0 * s
    else:
        if s == 0.0:
            raise ValidationError("fixed-ell sweep needs beta > 0")
        ell = value
        E = 0.5 * (ell / (M0 * s)) ** 2
    cp = ConservedPair(ell, E)
    analysis = classify_orbit(p, cp, r0, allow_zero_momentum=True)
    r_plus = period = math.nan
    tp = analysis.turning
    if tp is not None:
        r_plus = tp.r_plus
        if analysis.kind is OrbitKind.BOUND:
            period = half_period(p, cp, tp.r_minus, tp.r_plus)
    return SweepRow(beta, ell, E, analysis.kind.value, r_plus, period)


def sweep(p: SurfaceParams, betas, *, r0: float = 0.0, mode: str = "energy",
          value: float = 0.5, workers: int | None = None) -> list[SweepRow]:
    """Classify launches from ``r0`` over ``betas`` at fixed ``E`` or fixed ``ell``.

    Points run concurrently; rows come back sorted by ``beta``.
    """
    if mode not in ("energy", "ell"):
        raise ValidationError(f"sweep mode must be 'energy' or 'ell', got {mode!r}")
    betas = sorted(float(b) for b in betas)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: _sweep_point(p, r0, b, mode, value), betas))


def write_sweep(rows, path=None) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        lines.append(",".join([
            _num(row.beta), _num(row.ell), _num(row.E), row.kind,
            _num(row.r_plus), _num(row.half_period_lambda),
        ]))
    return _write(path, "\n".join(lines) + "\n")


def summary_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")
