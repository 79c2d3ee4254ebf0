"""Command line: ``nullfront run``.

Builds a null front from a named example or an INI config, runs the requested
pipeline and writes the mesh, locus CSV and JSON report.

Exit codes: 0 success, 2 usage error, 3 unknown generator, 4 invalid window
or configuration, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import catalog, completion, export, frontgen, geometry, lorentz, singular

log = logging.getLogger("nullfront")

EXIT_OK = 0
EXIT_UNKNOWN_GENERATOR = 3
EXIT_INVALID = 4
EXIT_IO = 5

MODES = ("generate", "analyze", "reconstruct", "glue")
EXAMPLES = tuple(catalog.CURVES) + ("sphere", "lightcone")
MIN_GRID = 16
SPHERE_GRID = (64, 64)

DEFAULTS = {
    "sigma": "+",
    "t_window": "-5,5",
    "grid": "512",
    "t_resolution": "64",
    "mode": "analyze",
    "seed": "0",
    "tol": "1e-6",
    "samples": "200",
}


class ConfigError(ValueError):
    """Invalid job configuration (exit code 4)."""


class UnknownGenerator(KeyError):
    """Unknown generator name (exit code 3)."""


@dataclass
class JobConfig:
    generator: str
    params: dict = field(default_factory=dict)
    coefficients: tuple | None = None
    sigma: int = 1
    t_window: tuple = (-5.0, 5.0)
    grid: tuple = (512,)
    t_resolution: int = 64
    mode: str = "analyze"
    tol: float = 1e-6
    samples: int = 200
    windows: tuple | None = None  # None: three overlapping windows over the domain
    seed: int = 0
    mesh: str | None = None
    locus: str | None = None
    report: str | None = None
    raw_axes: bool = False

    def validate(self):
        if self.generator not in EXAMPLES and self.generator != "fourier":
            raise UnknownGenerator(self.generator)
        a, b = self.t_window
        if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
            raise ConfigError(f"empty t window {self.t_window}")
        if min(self.grid) < MIN_GRID or self.t_resolution < 2:
            raise ConfigError(f"grid sizes must be >= {MIN_GRID}")
        if self.tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.sigma not in (1, -1):
            raise ConfigError("sigma must be + or -")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        return self


def _parse_pair(text: str, what: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.replace(":", ",").split(","))
    except ValueError:
        raise ConfigError(f"cannot parse {what} {text!r}") from None
    if len(vals) != 2:
        raise ConfigError(f"{what} needs two numbers, got {text!r}")
    return vals


def _parse_grid(text: str) -> tuple:
    try:
        vals = tuple(int(x) for x in str(text).split(","))
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if not 1 <= len(vals) <= 2:
        raise ConfigError("grid is N or N,M")
    return vals


def _parse_sigma(text: str) -> int:
    text = str(text).strip()
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise ConfigError(f"sigma must be + or -, got {text!r}")


def _parse_windows(text: str) -> tuple:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if part:
            out.append(_parse_pair(part, "window"))
    if not out:
        raise ConfigError("no gluing windows given")
    return tuple(out)


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_config(path) -> dict:
    """Read a sectioned key-value file into flat job settings.

    Sections: ``[job]`` (generator, sigma, t_window, grid, t_resolution, mode,
    seed, tol, samples, windows), ``[generator]`` (keyword parameters of the
    built-in generator, or ``ax``, ``bx``, ``ay``, ``by`` coefficient lists
    for ``fourier``) and ``[output]`` (mesh, locus, report, raw_axes).
    """
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    out = dict(cp["job"]) if cp.has_section("job") else {}
    if cp.has_section("generator"):
        gen = dict(cp["generator"])
        coeffs = {k: gen.pop(k) for k in ("ax", "bx", "ay", "by") if k in gen}
        if coeffs:
            try:
                out["coefficients"] = tuple(tuple(float(x) for x in coeffs.get(k, "0").split(","))
                                            for k in ("ax", "bx", "ay", "by"))
            except ValueError:
                raise ConfigError("coefficient lists must be comma-separated numbers") from None
        try:
            out["params"] = {k: _number(v) for k, v in gen.items()}
        except ValueError:
            raise ConfigError("generator parameters must be numbers") from None
    if cp.has_section("output"):
        out.update(dict(cp["output"]))
    return out


def build_config(args) -> JobConfig:
    raw = dict(DEFAULTS)
    params, coefficients = {}, None
    loaded_keys = set()
    if args.config:
        loaded = load_config(args.config)
        loaded_keys = set(loaded)
        params = loaded.pop("params", {})
        coefficients = loaded.pop("coefficients", None)
        raw.update(loaded)
    if args.example:
        raw["generator"] = args.example
    for key in ("sigma", "t_window", "grid", "mode", "seed", "mesh", "locus", "report"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    if "generator" not in raw:
        raise ConfigError("no generator given (use --example or a [job] generator key)")
    try:
        cfg = JobConfig(
            generator=raw["generator"],
            params=params,
            coefficients=coefficients,
            sigma=_parse_sigma(raw["sigma"]),
            t_window=_parse_pair(raw["t_window"], "t window"),
            grid=_parse_grid(raw["grid"]),
            t_resolution=int(raw["t_resolution"]),
            mode=raw["mode"],
            tol=float(raw["tol"]),
            samples=int(raw["samples"]),
            windows=_parse_windows(raw["windows"]) if raw.get("windows") else None,
            seed=int(raw["seed"]),
            mesh=raw.get("mesh"),
            locus=raw.get("locus"),
            report=raw.get("report"),
            raw_axes=bool(args.raw_axes) or str(raw.get("raw_axes", "")).lower() in ("1", "true", "yes"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if cfg.generator == "lightcone":
        cfg.mode = "reconstruct"
    if cfg.generator == "sphere" and args.grid is None and "grid" not in loaded_keys:
        cfg.grid = SPHERE_GRID
    return cfg.validate()


# -- pipeline -----------------------------------------------------------------

def make_generator(cfg: JobConfig) -> geometry.GeneratingFront:
    if cfg.generator == "sphere":
        shape = cfg.grid if len(cfg.grid) == 2 else (cfg.grid[0], cfg.grid[0])
        return geometry.build_surface(catalog.sphere(**cfg.params), shape, kind="closed-surface")
    if cfg.generator == "fourier":
        if cfg.coefficients is None:
            raise ConfigError("fourier generator needs ax, bx, ay, by coefficient lists")
        curve = catalog.fourier_curve(*cfg.coefficients)
        return geometry.build_curve(curve, cfg.grid[0])
    try:
        curve = catalog.CURVES[cfg.generator](**cfg.params)
    except TypeError as exc:
        raise ConfigError(f"bad generator parameters: {exc}") from None
    return geometry.build_curve(curve, cfg.grid[0])


def _t_resolution(cfg: JobConfig) -> int:
    if len(cfg.grid) == 2 and cfg.generator != "sphere":
        return cfg.grid[1]
    return cfg.t_resolution


def _lemma_sweep(seed: int, trials: int = 100) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        V, W, N = lorentz.random_lemma_triple(rng, int(rng.integers(3, 7)))
        rep = lorentz.check_subspace_lemma(V, W, N)
        failures += int(not (rep.hypotheses_hold and rep.conclusion))
    return failures


def _invariants(front, seed) -> list:
    suite = frontgen.invariant_suite(front)
    shifted = frontgen.parallel_front(front, 0.3)
    suite["parallel_shift_identity"] = float(np.max(np.abs(
        shifted.samples() - front.evaluate(front.t_values + 0.3))))
    suite["subspace_lemma_failures"] = _lemma_sweep(seed)
    return [{"name": k, "max_violation": v} for k, v in sorted(suite.items())]


def _generator_block(cfg, gen):
    return {
        "name": cfg.generator,
        "kind": gen.kind if gen is not None else "samples",
        "grid": list(cfg.grid),
        "sigma": "+" if cfg.sigma > 0 else "-",
        "t_window": list(cfg.t_window),
        "t_resolution": _t_resolution(cfg),
        "params": cfg.params,
    }


def _analyze(front, report):
    locus = singular.singular_locus(front)
    comp = singular.completeness_check(front)
    report["completeness"] = {"verdict": comp.verdict, "reasons": comp.reasons,
                              "sign_constant": comp.sign_constant, "same_sign": comp.same_sign}
    if front.generator.is_curve:
        locus = singular.classify(locus, front)
        verts = geometry.vertices(front.generator)
        report["counts"] = {
            "vertices": len(verts),
            "non_cuspidal": locus.count(singular.NON_CUSPIDAL),
            "cuspidal_arcs": locus.cuspidal_arcs(),
            "undetermined": locus.count(singular.UNDETERMINED) - int(np.sum(locus.unbounded)),
            "unbounded": int(np.sum(locus.unbounded)),
        }
        report["non_cuspidal_count"] = report["counts"]["non_cuspidal"]
        report["non_cuspidal_params"] = locus.non_cuspidal_params.tolist() \
            if len(locus.non_cuspidal_params) <= 64 else "omitted (more than 64)"
        report["constant_curvature"] = locus.constant_curvature
        if front.generator.closed:
            audit = singular.four_vertex_audit(front, locus)
            report["four_vertex"] = {"status": audit.status, "embedded": audit.embedded,
                                     "non_cuspidal_count": audit.non_cuspidal_count,
                                     "reasons": audit.reasons}
        report["lift_embedded"] = frontgen.lift_embedding_check(front)
    else:
        report["counts"] = {"vertices": None, "non_cuspidal": None, "cuspidal_arcs": None,
                            "unbounded": int(np.sum(locus.unbounded))}
    t_range = locus.t[~locus.unbounded]
    report["locus"] = {"points": len(locus),
                       "t_min": float(t_range.min()) if len(t_range) else None,
                       "t_max": float(t_range.max()) if len(t_range) else None}
    return locus


def _reconstruct_lightcone(report):
    pts, nrm, labels = catalog.lightcone_samples()
    patch = completion.reconstruct_generator(pts, nrm, labels, closed=True)
    wind = completion.winding_number(patch)
    embedded = patch.strongly_adopted()
    report["reconstruction"] = {
        "samples": len(pts),
        "parameter_samples": len(patch),
        "max_minkowski_norm": float(np.max(np.abs(lorentz.minkowski_inner(pts, pts)))),
        "max_generator_radius": float(np.max(np.linalg.norm(patch.g, axis=-1))),
        "normal_winding_number": wind,
        "lift_embedded": embedded,
        "double_cover": (not embedded) and abs(round(wind)) == 2,
    }


def _reconstruct(front, cfg, report):
    gen = front.generator
    rng = np.random.default_rng(cfg.seed)
    nodes = rng.integers(0, gen.points.shape[0], cfg.samples)
    t = rng.uniform(*cfg.t_window, cfg.samples)
    if not gen.is_curve:
        raise ConfigError("reconstruct mode is implemented for curve generators")
    F = front.lifted_generator()[nodes] + t[:, None] * front.xi()[nodes]
    patch = completion.reconstruct_generator(F, front.xi()[nodes], gen.params[nodes])
    uniq = np.unique(nodes)
    report["reconstruction"] = {
        "samples": cfg.samples,
        "parameter_samples": len(patch),
        "max_generator_error": float(np.max(np.abs(patch.g - gen.points[uniq]))),
        "max_normal_error": float(np.max(np.abs(patch.nu - front.sigma * gen.normals[uniq]))),
        "lift_embedded": patch.strongly_adopted(),
    }


def default_windows(gen: geometry.GeneratingFront) -> tuple:
    """Three overlapping parameter windows covering the whole curve."""
    if gen.closed:
        lo, length = 0.0, gen.period()
    else:
        lo, length = float(gen.params[0]), float(gen.params[-1] - gen.params[0])
    edges = lo + length * np.array([0.0, 0.4, 0.35, 0.75, 0.7, 1.08 if gen.closed else 1.0])
    return tuple((float(a), float(b)) for a, b in edges.reshape(3, 2))


def _glue(front, cfg, report):
    gen = front.generator
    if not gen.is_curve:
        raise ConfigError("glue mode is implemented for curve generators")
    try:
        patches = [completion.patch_from_front(front, w)
                   for w in (cfg.windows or default_windows(gen))]
    except ValueError as exc:
        raise ConfigError(f"bad gluing window: {exc}") from None
    atlas = completion.glue(patches, tol=cfg.tol, strict=False,
                            period=gen.period() or 2 * np.pi)
    pairs = {}
    for a in range(len(patches)):
        for b in range(a + 1, len(patches)):
            pairs[f"{a}-{b}"] = completion.admissibility_check(patches[a], patches[b], cfg.tol).verdict
    report["gluing"] = {
        "patch_count": atlas.patch_count,
        "class_count": atlas.class_count,
        "closed": atlas.closed,
        "manifold": atlas.manifold,
        "branch_classes": len(atlas.branch_classes),
        "lift_mismatch": atlas.lift_mismatch,
        "admissibility": pairs,
    }


def run(cfg: JobConfig) -> dict:
    """Execute one job and return its report (files are written as requested)."""
    report = {"schema_version": export.SCHEMA_VERSION, "mode": cfg.mode,
              "counts": {"vertices": None, "non_cuspidal": None, "cuspidal_arcs": None},
              "completeness": None, "invariant_suite": [],
              "gluing": {"patch_count": 0, "class_count": 0, "admissibility": {}}}
    if cfg.generator == "lightcone":
        report["generator"] = _generator_block(cfg, None)
        _reconstruct_lightcone(report)
        if cfg.mesh or cfg.locus:
            raise ConfigError("the light-cone example is sample-based: no mesh or locus")
        return report
    gen = make_generator(cfg)
    front = frontgen.normal_form(gen, cfg.sigma, cfg.t_window, _t_resolution(cfg))
    report["generator"] = _generator_block(cfg, gen)
    report["invariant_suite"] = _invariants(front, cfg.seed)
    locus = None
    if cfg.mode in ("analyze", "glue") or cfg.locus:
        locus = _analyze(front, report)
    if cfg.mode == "reconstruct":
        _reconstruct(front, cfg, report)
    if cfg.mode == "glue":
        _glue(front, cfg, report)
    if cfg.mesh:
        if not gen.is_curve:
            raise ConfigError("mesh export needs a curve generator")
        export.export_mesh(front, cfg.mesh, cfg.raw_axes)
    if cfg.locus:
        export.export_locus(locus, cfg.locus)
    return report


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nullfront", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser(
        "run", help="run one job",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="Examples: " + ", ".join(EXAMPLES) + ".  Config files use sections "
                    "[job], [generator] and [output] with the same keys as the flags.")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", help="built-in generator name")
    src.add_argument("--config", help="INI job file")
    r.add_argument("--sigma", help=f"+ or - (default {DEFAULTS['sigma']})")
    r.add_argument("--t-window", dest="t_window",
                   help=f"a,b; write --t-window=-1,5 when a is negative "
                        f"(default {DEFAULTS['t_window']})")
    r.add_argument("--grid", help=f"N[,M]: N curve nodes and M t nodes, or the sphere's "
                                  f"u,v grid (default {DEFAULTS['grid']} with "
                                  f"{DEFAULTS['t_resolution']} t nodes; sphere "
                                  f"{SPHERE_GRID[0]},{SPHERE_GRID[1]})")
    r.add_argument("--mode", choices=MODES, help=f"default {DEFAULTS['mode']}")
    r.add_argument("--mesh", help="OBJ output path (curve fronts)")
    r.add_argument("--locus", help="singular-locus CSV output path")
    r.add_argument("--report", help="JSON report output path")
    r.add_argument("--seed", help=f"seed for randomized checks (default {DEFAULTS['seed']})")
    r.add_argument("--raw-axes", dest="raw_axes", action="store_true",
                   help="write mesh vertices as (t, x, y) instead of (x, y, t)")
    r.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
        report = run(cfg)
        if cfg.report:
            export.write_report(report, cfg.report)
        else:
            sys.stdout.write(json.dumps(export.jsonable(report), sort_keys=True, indent=2) + "\n")
    except UnknownGenerator as exc:
        log.error("unknown generator %s; choose from %s", exc, ", ".join(EXAMPLES))
        return EXIT_UNKNOWN_GENERATOR
    except (ConfigError, geometry.GeometryError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_INVALID
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
