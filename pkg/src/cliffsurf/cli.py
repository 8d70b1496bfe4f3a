"""End-to-end pipeline: structure file in, smoothed isosurface meshes out.

Stages run in a fixed order (input, grid, rasterize, filter, extract,
output) and any failure aborts with a stage-tagged message on stderr and
a stage-family exit code: 2 input, 3 configuration, 4 compute, 5 output.

The run manifest (stdout) records every effective parameter, grid shape,
field ranges, per-surface metrics, and wall-clock per stage. Mesh, volume,
and metrics files contain no timings or other run-varying content, so two
runs of one configuration produce byte-identical files regardless of
thread count; only the manifest's timing lines differ.

Sweeps over several propagation times reuse the forward spectrum of the
initial field (it does not depend on t); results are bit-identical to
independent single-time runs because the per-time arithmetic is the same
operations on the same spectrum.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import volumetrics
from .cft import MultivectorField3, cft3_forward
from .grids import GridSpec, ScalarField3
from .molecule import Molecule, ParseError, parse_auto, parse_pdb, parse_pqr, parse_xyzr
from .pdefilter import (
    DEFAULT_HALF_ORDER,
    FilterParams,
    default_coefficients,
    highband_energy,
    lowpass_from_spectrum,
    mode_decompose,
)
from .surface import marching_cubes, mesh_metrics, write_obj, write_off

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_COMPUTE = 4
EXIT_OUTPUT = 5

_STAGE_EXIT = {
    "input": EXIT_INPUT,
    "config": EXIT_CONFIG,
    "grid": EXIT_COMPUTE,
    "rasterize": EXIT_COMPUTE,
    "filter": EXIT_COMPUTE,
    "extract": EXIT_COMPUTE,
    "output": EXIT_OUTPUT,
}

INIT_KINDS = ("piecewise", "gaussian", "piecewise-swapped")
FORMATS = ("pqr", "pdb", "xyzr", "auto")

# diagnostic band edge for the manifest's smoothness indicator, rad^2/A^2
ENERGY_W2_THRESHOLD = 0.25


class StageError(Exception):
    """Pipeline failure attributed to one stage."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        self.exit_code = _STAGE_EXIT[stage]
        super().__init__(message)

    def tagged(self) -> str:
        return f"error[stage={self.stage}]: {super().__str__()}"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved pipeline parameters; everything has a value."""

    input_path: str
    input_format: str = "auto"
    init_kind: str = "piecewise"
    spacing: float = volumetrics.DEFAULT_SPACING
    padding: float = volumetrics.DEFAULT_PADDING
    s: float = volumetrics.DEFAULT_BUMP_HEIGHT
    r_e: float = volumetrics.DEFAULT_BUMP_DECAY
    m: int = DEFAULT_HALF_ORDER
    d: tuple[float, ...] | None = None  # None: single highest-order term
    epsilon: float = 0.0
    times: tuple[float, ...] = (100.0,)
    isovalues: tuple[float, ...] | None = None  # None: per-init default
    passes: int = 1
    mesh_out: str | None = None
    volume_out: str | None = None
    volume_format: str | None = None  # dx | raw | None: by extension
    metrics_out: str | None = None
    mem_cap_gib: float = volumetrics.DEFAULT_MEM_CAP / 1024**3
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def resolved(self) -> "RunConfig":
        """Fill derived defaults and validate cross-field consistency."""
        d = tuple(self.d) if self.d is not None else default_coefficients(self.m)
        isovalues = self.isovalues
        if isovalues is None:
            # the swapped binary field is the complement of the piecewise
            # one, so its natural default is the mirrored level 1 - 0.9
            isovalues = {"gaussian": (0.8,), "piecewise-swapped": (0.1,)}.get(
                self.init_kind, (0.9,)
            )
        cfg = replace(self, d=d, isovalues=tuple(isovalues))
        cfg.validate()
        return cfg

    def validate(self):
        if self.input_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.input_format!r}")
        if self.init_kind not in INIT_KINDS:
            raise ValueError(f"init must be one of {INIT_KINDS}, got {self.init_kind!r}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.padding < 0:
            raise ValueError(f"padding must be nonnegative, got {self.padding}")
        if not self.s > 0:
            raise ValueError(f"s must be positive, got {self.s}")
        if not self.r_e > 0:
            raise ValueError(f"re must be positive, got {self.r_e}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")
        if not self.times or any(not (t > 0 and np.isfinite(t)) for t in self.times):
            raise ValueError(f"every propagation time must be positive, got {self.times}")
        if not self.isovalues:
            raise ValueError("need at least one isovalue")
        for iso in self.isovalues:
            if not np.isfinite(iso):
                raise ValueError(f"isovalue must be finite, got {iso}")
            if self.init_kind != "gaussian" and not 0.0 < iso <= 1.0:
                raise ValueError(
                    f"isovalue must lie in (0, 1] for binary initial data, got {iso}"
                )
            if self.init_kind == "gaussian" and not iso > 0:
                raise ValueError(f"isovalue must be positive, got {iso}")
        if self.volume_format not in (None, "dx", "raw"):
            raise ValueError(f"volume format must be dx or raw, got {self.volume_format}")
        if not self.mem_cap_gib > 0:
            raise ValueError(f"mem-cap must be positive, got {self.mem_cap_gib}")
        # constructing one parameter set validates m, d, epsilon jointly
        FilterParams(m=self.m, d=self.d, epsilon=self.epsilon, t=self.times[0])


def _combo_path(base: str, t: float | None, iso: float | None, multi: bool) -> str:
    if not multi:
        return base
    stem, dot, ext = base.rpartition(".")
    if not dot:
        stem, ext = base, ""
    suffix = ""
    if t is not None:
        suffix += f"_t{t:g}"
    if iso is not None:
        suffix += f"_iso{iso:g}"
    return stem + suffix + (dot + ext if dot else "")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list, np.ndarray)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _rasterize(cfg: RunConfig, mol: Molecule, grid: GridSpec) -> ScalarField3:
    if cfg.init_kind == "piecewise":
        return volumetrics.rasterize_piecewise(mol, grid)
    if cfg.init_kind == "piecewise-swapped":
        return volumetrics.rasterize_piecewise_swapped(mol, grid)
    return volumetrics.rasterize_gaussian(mol, grid, s=cfg.s, r_e=cfg.r_e)


def _write_volume(field: ScalarField3, path: str, fmt: str | None):
    if fmt is None:
        fmt = "raw" if path.endswith(".raw") else "dx"
    if fmt == "raw":
        volumetrics.export_raw(field, path)
    else:
        volumetrics.export_opendx(field, path)


def _write_mesh(mesh, path: str):
    if path.endswith(".off"):
        write_off(mesh, path)
    else:
        write_obj(mesh, path)


_METRIC_FIELDS = (
    "component_count",
    "euler_characteristic",
    "boundary_edge_count",
    "area",
    "enclosed_volume",
    "min_dihedral",
)


def _metrics_text(t: float, iso: float, mesh, metrics) -> str:
    lines = [
        f"t: {_fmt(t)}",
        f"isovalue: {_fmt(iso)}",
        f"vertices: {mesh.n_vertices}",
        f"triangles: {mesh.n_triangles}",
    ]
    lines += [f"{name}: {_fmt(getattr(metrics, name))}" for name in _METRIC_FIELDS]
    return "\n".join(lines) + "\n"


def execute(config: RunConfig) -> tuple[str, list[dict]]:
    """Run the pipeline; returns (manifest text, one mapping per t/iso combo).

    Raises StageError; callers decide between exceptions and exit codes.
    """
    try:
        cfg = config.resolved()
    except ValueError as exc:
        raise StageError("config", str(exc)) from exc

    manifest: list[str] = []
    timings: list[tuple[str, float]] = []

    def stage(name):
        class _Timer:
            def __enter__(self):
                self.start = time.perf_counter()
                return self

            def __exit__(self, exc_type, exc, tb):
                timings.append((name, time.perf_counter() - self.start))
                if exc is not None and not isinstance(exc, StageError):
                    raise StageError(name, str(exc)) from exc
                return False

        return _Timer()

    with stage("input"):
        try:
            with open(cfg.input_path, "r") as fh:
                text = fh.read()
        except OSError as exc:
            raise StageError("input", f"cannot read {cfg.input_path}: {exc}") from exc
        parser = {
            "pqr": parse_pqr,
            "pdb": parse_pdb,
            "xyzr": parse_xyzr,
            "auto": parse_auto,
        }[cfg.input_format]
        try:
            mol = parser(text, cfg.input_path)
        except ParseError as exc:
            raise StageError("input", str(exc)) from exc

    with stage("grid"):
        grid = volumetrics.make_grid(
            mol,
            spacing=cfg.spacing,
            padding=cfg.padding,
            mem_cap_bytes=int(cfg.mem_cap_gib * 1024**3),
        )

    with stage("rasterize"):
        initial = _rasterize(cfg, mol, grid)

    manifest += [
        f"input.path: {cfg.input_path}",
        f"input.format: {mol.source.format or cfg.input_format}",
        f"input.atoms: {len(mol)}",
        f"init.kind: {cfg.init_kind}",
        f"init.s: {_fmt(cfg.s)}",
        f"init.re: {_fmt(cfg.r_e)}",
        f"grid.spacing: {_fmt(cfg.spacing)}",
        f"grid.padding: {_fmt(cfg.padding)}",
        f"grid.dims: {_fmt(grid.dims)}",
        f"grid.origin: {_fmt(grid.origin)}",
        f"grid.mem_cap_gib: {_fmt(cfg.mem_cap_gib)}",
        f"filter.order: {2 * cfg.m}",
        f"filter.d: {_fmt(cfg.d)}",
        f"filter.epsilon: {_fmt(cfg.epsilon)}",
        f"filter.passes: {cfg.passes}",
        f"field.initial.min: {_fmt(initial.min)}",
        f"field.initial.max: {_fmt(initial.max)}",
    ]
    for w in mol.source.warnings:
        manifest.append(f"input.warning: {w}")

    multi = len(cfg.times) > 1 or len(cfg.isovalues) > 1
    combos: list[dict] = []

    with stage("filter"):
        # the forward spectrum is shared by every propagation time
        spectrum = cft3_forward(MultivectorField3.from_scalar_field(initial))
        filtered: dict[float, ScalarField3] = {}
        for t in cfg.times:
            params = FilterParams(m=cfg.m, d=cfg.d, epsilon=cfg.epsilon, t=t)
            if cfg.passes == 1:
                out = lowpass_from_spectrum(spectrum, params)
            else:
                # several peel-off passes: the surface field is the sum of
                # the extracted low-pass modes (the residue holds the
                # remaining detail)
                modes = mode_decompose(initial, cfg.passes, params).modes
                total = modes[0].values.copy()
                for mode in modes[1:]:
                    total += mode.values
                out = ScalarField3(grid, total)
            filtered[t] = out

    for t in cfg.times:
        f = filtered[t]
        key = f"run[t={t:g}]"
        manifest += [
            f"{key}.field.min: {_fmt(f.min)}",
            f"{key}.field.max: {_fmt(f.max)}",
            f"{key}.highband_energy: {_fmt(highband_energy(f, ENERGY_W2_THRESHOLD))}",
        ]

    if cfg.volume_out:
        with stage("output"):
            for t in cfg.times:
                path = _combo_path(cfg.volume_out, t, None, len(cfg.times) > 1)
                try:
                    _write_volume(filtered[t], path, cfg.volume_format)
                except OSError as exc:
                    raise StageError("output", f"cannot write {path}: {exc}") from exc
                manifest.append(f"run[t={t:g}].volume_file: {path}")

    for t in cfg.times:
        for iso in cfg.isovalues:
            key = f"run[t={t:g},iso={iso:g}]"
            with stage("extract"):
                mesh = marching_cubes(filtered[t], iso)
                metrics = mesh_metrics(mesh)
            combo = {
                "t": t,
                "isovalue": iso,
                "mesh": mesh,
                "metrics": metrics,
            }
            manifest += [
                f"{key}.mesh.vertices: {mesh.n_vertices}",
                f"{key}.mesh.triangles: {mesh.n_triangles}",
            ]
            manifest += [
                f"{key}.mesh.{name}: {_fmt(getattr(metrics, name))}"
                for name in _METRIC_FIELDS
            ]
            if cfg.mesh_out:
                with stage("output"):
                    path = _combo_path(cfg.mesh_out, t, iso, multi)
                    try:
                        _write_mesh(mesh, path)
                    except OSError as exc:
                        raise StageError("output", f"cannot write {path}: {exc}") from exc
                    combo["mesh_file"] = path
                    manifest.append(f"{key}.mesh_file: {path}")
            if cfg.metrics_out:
                with stage("output"):
                    path = _combo_path(cfg.metrics_out, t, iso, multi)
                    try:
                        with open(path, "w", newline="\n") as fh:
                            fh.write(_metrics_text(t, iso, mesh, metrics))
                    except OSError as exc:
                        raise StageError("output", f"cannot write {path}: {exc}") from exc
                    combo["metrics_file"] = path
                    manifest.append(f"{key}.metrics_file: {path}")
            combos.append(combo)

    agg: dict[str, float] = {}
    for name, dt in timings:
        agg[name] = agg.get(name, 0.0) + dt
    manifest += [f"timing.{name}_s: {dt:.3f}" for name, dt in agg.items()]
    return "\n".join(manifest) + "\n", combos


def run_pipeline(config: RunConfig) -> str:
    """Execute the full pipeline and return the manifest text."""
    return execute(config)[0]


def sweep(config: RunConfig) -> list[dict]:
    """Execute over the config's time and isovalue lists.

    Returns one mapping per (t, isovalue) combination with the mesh, its
    metrics, and any output paths. The forward transform of the initial
    field is computed once for the whole sweep.
    """
    return execute(config)[1]


def _parse_dcoeff(entries: list[str], m: int) -> tuple[float, ...]:
    d = list(default_coefficients(m))
    for entry in entries:
        j_txt, _, v_txt = entry.partition(":")
        try:
            j = int(j_txt)
            v = float(v_txt)
        except ValueError:
            raise ValueError(f"--dcoeff expects j:value, got {entry!r}") from None
        if not 1 <= j <= m:
            raise ValueError(f"--dcoeff index {j} outside 1..{m}")
        d[j - 1] = v
    return tuple(d)


def _load_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ValueError(f"{path} line {line_no}: expected key=value")
            out[key.strip()] = value.strip()
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to the config exit code
        raise StageError("config", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="cliffsurf",
        description=(
            "Generate smooth molecular isosurfaces by spectral high-order "
            "PDE filtering of atom-derived scalar fields."
        ),
    )
    p.add_argument("--input", help="structure file (PQR, PDB, or XYZR)")
    p.add_argument("--format", choices=FORMATS, help="input format (default auto)")
    p.add_argument("--init", choices=INIT_KINDS, help="initial field kind")
    p.add_argument("--spacing", type=float, help="grid spacing in Angstrom")
    p.add_argument("--padding", type=float, help="box padding in Angstrom")
    p.add_argument("--s", type=float, help="bump height for the smooth initial field")
    p.add_argument("--re", type=float, help="bump decay length in Angstrom")
    p.add_argument("--order", type=int, help="PDE order 2m (even, default 12)")
    p.add_argument(
        "--dcoeff",
        action="append",
        metavar="J:VALUE",
        help="set diffusion coefficient d_J (repeatable)",
    )
    p.add_argument("--epsilon", type=float, help="fidelity weight")
    p.add_argument(
        "--time",
        action="append",
        type=float,
        metavar="T",
        help="propagation time (repeatable)",
    )
    p.add_argument(
        "--isovalue",
        action="append",
        type=float,
        metavar="V",
        help="extraction isovalue (repeatable)",
    )
    p.add_argument("--passes", type=int, help="number of peel-off filter passes")
    p.add_argument("--mesh-out", help="mesh output path (.obj or .off)")
    p.add_argument("--volume-out", help="filtered volume output path")
    p.add_argument(
        "--volume-format", choices=("dx", "raw"), help="volume format (default by extension)"
    )
    p.add_argument("--metrics-out", help="metrics report output path")
    p.add_argument("--mem-cap", type=float, help="grid memory cap in GiB")
    p.add_argument("--config", help="flat key=value config file")
    return p


_CONFIG_KEYS = {
    "input": str,
    "format": str,
    "init": str,
    "spacing": float,
    "padding": float,
    "s": float,
    "re": float,
    "order": int,
    "dcoeff": None,  # comma-separated j:value entries
    "epsilon": float,
    "time": None,  # comma-separated floats
    "isovalue": None,
    "passes": int,
    "mesh-out": str,
    "volume-out": str,
    "volume-format": str,
    "metrics-out": str,
    "mem-cap": float,
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over config-file values over built-in defaults."""
    file_vals: dict[str, object] = {}
    if args.config:
        try:
            raw = _load_config_file(args.config)
        except OSError as exc:
            raise StageError("config", f"cannot read {args.config}: {exc}") from exc
        except ValueError as exc:
            raise StageError("config", str(exc)) from exc
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise StageError("config", f"unknown config key {key!r}")
            caster = _CONFIG_KEYS[key]
            try:
                if key in ("time", "isovalue"):
                    file_vals[key] = tuple(float(v) for v in value.split(","))
                elif key == "dcoeff":
                    file_vals[key] = [v.strip() for v in value.split(",")]
                else:
                    file_vals[key] = caster(value)
            except ValueError:
                raise StageError("config", f"bad value for {key!r}: {value!r}") from None

    def pick(flag: str, file_key: str | None = None):
        v = getattr(args, flag)
        if v is not None:
            return v
        return file_vals.get(file_key or flag.replace("_", "-"))

    input_path = pick("input")
    if input_path is None:
        raise StageError("config", "--input is required")

    order = pick("order")
    if order is not None:
        if order % 2 != 0 or order < 2:
            raise StageError("config", f"--order must be a positive even integer, got {order}")
        m = order // 2
    else:
        m = DEFAULT_HALF_ORDER

    dcoeff_entries = pick("dcoeff")
    if dcoeff_entries is not None:
        try:
            d = _parse_dcoeff(list(dcoeff_entries), m)
        except ValueError as exc:
            raise StageError("config", str(exc)) from exc
    else:
        d = None

    times = pick("time")
    isovalues = pick("isovalue")

    kwargs = dict(
        input_path=input_path,
        input_format=pick("format") or "auto",
        init_kind=pick("init") or "piecewise",
        m=m,
        d=d,
        times=tuple(times) if times else (100.0,),
        isovalues=tuple(isovalues) if isovalues else None,
    )
    for attr, flag in (
        ("spacing", "spacing"),
        ("padding", "padding"),
        ("s", "s"),
        ("r_e", "re"),
        ("epsilon", "epsilon"),
        ("passes", "passes"),
        ("mesh_out", "mesh_out"),
        ("volume_out", "volume_out"),
        ("volume_format", "volume_format"),
        ("metrics_out", "metrics_out"),
        ("mem_cap_gib", "mem_cap"),
    ):
        v = pick(flag)
        if v is not None:
            kwargs[attr] = v
    return RunConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        manifest = run_pipeline(config)
    except StageError as exc:
        print(exc.tagged(), file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(manifest)
    return EXIT_OK
