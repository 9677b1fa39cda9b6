"""Command-line frontend.

Every run reads a JSON model file and emits self-describing CSV or JSON:
the header carries the model fingerprint and all effective parameters, so
identical (model, parameters, version) runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .decompose import cassaigne_decompose, decomposition_to_json, detect_qs, rotation_number
from .errors import QsturmError
from .spectrum import finite_eigenvalues, measure_report, periodic_bands, stable_set
from .tracemap import classify_orbit, in_escape, invariant, orbit_trace
from .transfer import gordon_residual, growth_exponents, lyapunov_many
from .words import ModelSpec, complexity, find_squares, level_words_prime, qs_prefix, sturmian_levels


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class Output:
    def __init__(self, spec: ModelSpec, command: str, params: dict, fmt: str):
        self.meta = {
            "fingerprint": spec.fingerprint(),
            "command": command,
            "version": __version__,
            **{k: params[k] for k in sorted(params)},
        }
        self.fmt = fmt
        self.rows: List[List[str]] = []
        self.columns: List[str] = []
        self.extra: dict = {}

    def header(self, columns: List[str]):
        self.columns = columns

    def row(self, *cells):
        self.rows.append([c if isinstance(c, str) else _fmt(c) for c in cells])

    def render(self) -> str:
        if self.fmt == "json":
            return json.dumps(
                {"meta": self.meta, "columns": self.columns,
                 "rows": self.rows, **self.extra},
                indent=2, sort_keys=True,
            ) + "\n"
        lines = [f"# {k}={v}" for k, v in self.meta.items()]
        for k, v in sorted(self.extra.items()):
            lines.append(f"# {k}={json.dumps(v, sort_keys=True)}")
        if self.columns:
            lines.append(",".join(self.columns))
        lines.extend(",".join(r) for r in self.rows)
        return "\n".join(lines) + "\n"


def _load_spec(path: str) -> ModelSpec:
    with open(path) as fh:
        return ModelSpec.from_json(json.load(fh))


def _emit(out: Output, out_path: Optional[str]):
    text = out.render()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(spec, args, out: Output):
    if args.levels is not None:
        primes = level_words_prime(spec, args.levels)
        base = sturmian_levels(spec.cf, args.levels)
        out.header(["n", "s_n", "s_prime_n"])
        for i in range(len(base)):
            out.row(str(i - 1), base[i].to_str(), primes[i].to_str())
    else:
        w = qs_prefix(spec, args.length, shift=args.shift)
        out.header(["sequence"])
        out.row(w.to_str())


def _cmd_complexity(spec, args, out: Output):
    w = qs_prefix(spec, args.length, shift=args.shift)
    p = complexity(w, args.nmax)
    cls = detect_qs(w)
    out.extra["classification"] = {"kind": cls.kind, "k": cls.k, "n0": cls.n0}
    out.header(["n", "p_n"])
    for i, pn in enumerate(p, start=1):
        out.row(str(i), str(pn))


def _cmd_decompose(spec, args, out: Output):
    w = qs_prefix(spec, args.length, shift=args.shift)
    d = cassaigne_decompose(w)
    theta = rotation_number(d, refine=args.refine)
    out.extra["decomposition"] = decomposition_to_json(d)
    out.header(["theta"])
    out.row(theta)


def _cmd_tracemap(spec, args, out: Output):
    orbit = orbit_trace(spec, args.energy, args.levels)
    verdict = classify_orbit(spec, args.energy, args.levels)
    out.extra["verdict"] = {
        "kind": verdict.kind,
        "escape_step": verdict.escape_step,
        "sup_norm": verdict.sup_norm,
        "invariant": verdict.invariant,
    }
    out.header(["level", "x", "y", "z", "invariant", "in_escape"])
    for n, t in enumerate(orbit, start=1):
        out.row(str(n), t.x, t.y, t.z, invariant(t), str(in_escape(t)).lower())


def _cmd_bands(spec, args, out: Output):
    bl = periodic_bands(spec, args.level, tol=args.tol)
    out.extra["band_count"] = bl.band_count
    out.extra["total_measure"] = bl.total_measure
    out.extra["merged"] = bl.merged
    out.header(["E_lo", "E_hi"])
    for lo, hi in bl.bands:
        out.row(lo, hi)


def _parse_nrange(s: str) -> List[int]:
    lo, _, hi = s.partition(":")
    return list(range(int(lo), int(hi) + 1))


def _cmd_spectrum(spec, args, out: Output):
    sweep = stable_set(spec, grid=args.grid, n_levels=args.levels)
    rows = measure_report(spec, _parse_nrange(args.nrange))
    out.extra["stable_bands"] = [[_fmt(lo), _fmt(hi)] for lo, hi in sweep.bands.bands]
    out.extra["stable_measure"] = sweep.bands.total_measure
    out.header(["n", "band_count", "total_measure"])
    for r in rows:
        out.row(str(r.n), str(r.band_count), r.total_measure)


def _cmd_lyapunov(spec, args, out: Output):
    from .spectrum import energy_window

    lo, hi = energy_window(spec)
    grid = np.linspace(lo, hi, args.grid)
    gammas = lyapunov_many(spec, grid, args.length, shift=args.shift)
    out.header(["E", "gamma"])
    for e, g in zip(grid, gammas):
        out.row(e, g)


def _cmd_gordon(spec, args, out: Output):
    squares = find_squares(spec, args.shift, args.nmax)
    out.header(["m", "n", "kind", "residual", "trace"])
    for sq in squares:
        res = gordon_residual(spec, args.energy, sq, shift=args.shift)
        out.row(str(sq[0]), str(sq[1]), sq[2], res.residual, res.trace)


def _cmd_alpha(spec, args, out: Output):
    g = growth_exponents(spec, args.energy, args.shift, args.lmax)
    out.header(["gamma1", "gamma2", "alpha", "escaped"])
    out.row(g.gamma1, g.gamma2, g.alpha, str(g.escaped).lower())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsturm",
                                     description="Quasi-Sturmian potentials and their spectra")
    parser.add_argument("--version", action="version", version=f"qsturm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **flags):
        p = sub.add_parser(name)
        p.add_argument("spec_path", help="JSON model file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("QSTURM_THREADS", "1")),
                       help="worker cap (results are worker-count independent)")
        for flag, kw in flags.items():
            p.add_argument(f"--{flag}", **kw)
        p.set_defaults(func=func)
        return p

    add("generate", _cmd_generate,
        length={"type": int, "default": 100},
        shift={"type": int, "default": 0},
        levels={"type": int, "default": None})
    add("complexity", _cmd_complexity,
        nmax={"type": int, "default": 50},
        length={"type": int, "default": 100_000},
        shift={"type": int, "default": 0})
    add("decompose", _cmd_decompose,
        refine={"type": int, "default": 20},
        length={"type": int, "default": 100_000},
        shift={"type": int, "default": 0})
    add("tracemap", _cmd_tracemap,
        energy={"type": float, "required": True},
        levels={"type": int, "default": 30})
    add("bands", _cmd_bands,
        level={"type": int, "required": True},
        tol={"type": float, "default": 1e-10})
    add("spectrum", _cmd_spectrum,
        grid={"type": int, "default": 4000},
        levels={"type": int, "default": 30},
        nrange={"type": str, "default": "3:10"})
    add("lyapunov", _cmd_lyapunov,
        grid={"type": int, "default": 200},
        length={"type": int, "default": 10_000},
        shift={"type": int, "default": 0})
    add("gordon", _cmd_gordon,
        energy={"type": float, "required": True},
        nmax={"type": int, "default": 8},
        shift={"type": int, "default": 0})
    add("alpha", _cmd_alpha,
        energy={"type": float, "required": True},
        lmax={"type": int, "default": 10_000},
        shift={"type": int, "default": 0})
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _load_spec(args.spec_path)
        params = {
            k: v for k, v in vars(args).items()
            if k not in ("func", "command", "spec_path", "out", "threads") and v is not None
        }
        out = Output(spec, args.command, params, args.format)
        args.func(spec, args, out)
        _emit(out, args.out)
        return 0
    except (QsturmError, OSError, ValueError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
