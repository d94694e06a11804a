"""``helixgeo`` command line.

Exit status is 0 on success, 1 for invalid input (bad parameters, forbidden
launches, unreadable config, I/O errors) and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import export
from .config import RunConfig
from .errors import NumericalError, ValidationError
from .integrator import IntegrateOptions, LaunchSpec, integrate, launch

COMMANDS = ("mesh", "geodesic", "potential", "sweep", "area", "curvature")
DEFAULT_OUT = {
    "mesh": "mesh.obj",
    "geodesic": "geodesic.csv",
    "potential": "potential.csv",
    "sweep": "sweep.csv",
    "area": "area.json",
    "curvature": "curvature.csv",
}

# flag name -> (type, help); dest is the RunConfig field
_FLAGS = {
    "a": (float, "helix radius"),
    "b": (float, "cross-section radius"),
    "c": (float, "pitch per radian"),
    "d": (float, "ridge amplitude"),
    "m": (int, "ridge frequency"),
    "r0": (float, "launch radius r = b chi"),
    "phi0": (float, "launch azimuth"),
    "beta": (float, "launch angle from the meridian direction"),
    "energy": (float, "E = |U|^2 / 2"),
    "ur0": (float, "explicit dr/dlambda (with --uphi0, replaces --beta)"),
    "uphi0": (float, "explicit dphi/dlambda"),
    "lambda-end": (float, "final affine parameter"),
    "rtol": (float, "integrator relative tolerance"),
    "atol": (float, "integrator absolute tolerance"),
    "ell": (float, "screw momentum for the potential profile, or fixed ell in an ell sweep"),
    "n-grid": (int, "profile grid points over one period"),
    "n-chi": (int, "mesh samples around the cross-section"),
    "n-phi": (int, "mesh samples per revolution"),
    "revolutions": (float, "mesh azimuthal span in turns"),
    "beta-min": (float, "first sweep angle"),
    "beta-max": (float, "last sweep angle"),
    "n-beta": (int, "number of sweep angles"),
    "workers": (int, "sweep thread count"),
    "phi-span": (float, "azimuthal span for the area"),
    "out": (str, "output path"),
}


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not numerical ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="helixgeo", description="Geodesics on helical tubes.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration; flags override it")
    parser.add_argument("--save-config", metavar="PATH", help="write the effective configuration")
    for flag, (kind, text) in _FLAGS.items():
        parser.add_argument(f"--{flag}", type=kind, default=None, help=text)
    parser.add_argument("--legendre-exact", action="store_true", default=None,
                        help="use the pitch c = 5/(2 pi) instead of 4/5")
    parser.add_argument("--sweep-mode", choices=("energy", "ell"), default=None,
                        help="hold E (default) or ell fixed across the sweep")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {"command": args.command}
    for flag in list(_FLAGS) + ["legendre-exact", "sweep-mode"]:
        dest = flag.replace("-", "_")
        value = getattr(args, dest)
        if value is not None:
            overrides[dest] = value
    return cfg.replace(**overrides)


def run(cfg: RunConfig) -> str:
    """Execute one configured command; returns the primary output path."""
    p = cfg.params()
    out = cfg.out or DEFAULT_OUT[cfg.command]
    if cfg.command == "mesh":
        export.write_obj(p, export.MeshSpec(cfg.n_chi, cfg.n_phi, cfg.revolutions), out)
    elif cfg.command == "geodesic":
        spec = LaunchSpec(cfg.r0, cfg.phi0, cfg.beta, cfg.energy, cfg.ur0, cfg.uphi0)
        opts = IntegrateOptions(rtol=cfg.rtol, atol=cfg.atol)
        trace = integrate(p, launch(p, spec), cfg.lambda_end, opts)
        export.write_geodesic(trace, out, export.summary_path(out))
    elif cfg.command == "potential":
        export.write_potential(p, cfg.ell, cfg.n_grid, out)
    elif cfg.command == "curvature":
        export.write_curvature(p, cfg.n_grid, out)
    elif cfg.command == "area":
        export.write_area(p, cfg.phi_span, out)
    elif cfg.command == "sweep":
        if cfg.n_beta < 1:
            raise ValidationError(f"n_beta must be positive, got {cfg.n_beta}")
        betas = np.linspace(cfg.beta_min, cfg.beta_max, cfg.n_beta)
        value = cfg.energy if cfg.sweep_mode == "energy" else cfg.ell
        rows = export.sweep(p, betas, r0=cfg.r0, mode=cfg.sweep_mode, value=value,
                            workers=cfg.workers)
        export.write_sweep(rows, out)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.save_config:
            cfg.dump(args.save_config)
        out = run(cfg)
    except (ValidationError, ValueError, TypeError, OSError) as exc:
        print(f"helixgeo: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, ArithmeticError) as exc:
        print(f"helixgeo: numerical failure: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
