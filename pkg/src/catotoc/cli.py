"""
Command-line driver: ``verify``, ``run`` and ``sweep``.

Settings come from an optional flat config file (``key = value`` per line,
``#`` comments) and are overridden by command-line flags. Exit codes: 0 on
success, 1 for configuration errors, 2 for numerical-consistency failures.

Examples:
  catotoc verify --preset HH --basis translation --n 16
  catotoc run --preset EE-fixed --basis reflection --tmax 10 --t0 10 --out out/ee --svg
  catotoc sweep --preset HH,HE,EH,EE-fixed,EE-offcenter --basis translation \\
      --t0 5:40:5 --out out/fig7
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import artifacts, maps
from .bases import KINDS, make_basis
from .errors import BasisUnavailableError, CatOtocError, NumericalConsistencyError
from .otoc import PRESETS, THEOREM_TOL, Scenario, make_scenario, otoc_re_series, theorem_residuals
from .relevance import DEFAULT_FRACTION, QUADRATURES, footprint, relevance_report
from .torus import make_bipartite

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


class ConfigError(CatOtocError, ValueError):
    pass


@dataclass
class RunConfig:
    presets: list[str] = field(default_factory=lambda: ["HH"])
    bases: list[str] = field(default_factory=lambda: ["translation"])
    N: int = 64
    K: float = maps.DEFAULT_K
    Kc: float = maps.DEFAULT_KC
    map1: str | None = None
    map2: str | None = None
    centre1: tuple[float, float] | None = None
    centre2: tuple[float, float] | None = None
    observed: str = "B"
    t_max: int = 40
    t0_list: list[int] = field(default_factory=list)
    fraction: float = DEFAULT_FRACTION
    quadrature: str = "riemann"
    out: Path | None = None
    csv: bool = True
    svg: bool = False
    json: bool = True
    remap_odd: bool = True
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)


def _parse_bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def parse_int_list(v: str) -> list[int]:
    """'5,10,20' or an inclusive range 'start:stop:step'."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in v.split(","))):
        if ":" in part:
            bits = [int(x) for x in part.split(":")]
            start, stop, step = (bits + [1])[:3]
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(part))
    return out


def _names(v: str) -> list[str]:
    return [x.strip() for x in v.split(",") if x.strip()]


def _centre(v: str) -> tuple[float, float]:
    q, p = (float(x) for x in v.replace(";", ",").split(","))
    return q, p


_KEYS = {
    "preset": ("presets", _names),
    "presets": ("presets", _names),
    "basis": ("bases", _names),
    "n": ("N", int),
    "k": ("K", float),
    "kc": ("Kc", float),
    "map1": ("map1", str.strip),
    "map2": ("map2", str.strip),
    "centre1": ("centre1", _centre),
    "centre2": ("centre2", _centre),
    "observed": ("observed", str.strip),
    "tmax": ("t_max", int),
    "t_max": ("t_max", int),
    "t0": ("t0_list", parse_int_list),
    "fraction": ("fraction", float),
    "quadrature": ("quadrature", str.strip),
    "out": ("out", Path),
    "csv": ("csv", _parse_bool),
    "svg": ("svg", _parse_bool),
    "json": ("json", _parse_bool),
    "remap_odd": ("remap_odd", _parse_bool),
    "threads": ("threads", int),
}


def read_config(path: Path) -> dict[str, tuple[object, int]]:
    """Parse a flat key-value file into {field: (value, line number)}."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    values: dict[str, tuple[object, int]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key.lower() not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        name, conv = _KEYS[key.lower()]
        try:
            values[name] = (conv(val), lineno)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def validate(cfg: RunConfig, where: dict[str, str] | None = None) -> RunConfig:
    where = where or {}

    def fail(name, msg):
        raise ConfigError(f"{where.get(name, name)}: {msg}")

    custom = cfg.map1 is not None or cfg.map2 is not None
    for p in cfg.presets:
        if p not in PRESETS and not (custom and p == "custom"):
            fail("presets", f"unknown preset {p!r}; choose from {', '.join(PRESETS)}")
    for b in cfg.bases:
        if b not in KINDS:
            fail("bases", f"unknown basis {b!r}; choose from {', '.join(KINDS)}")
        if b == "pauli" and cfg.N & (cfg.N - 1):
            fail("bases", f"Pauli basis unavailable for N = {cfg.N} (needs a power of two)")
    for m in (cfg.map1, cfg.map2):
        if m is not None and m not in ("hyperbolic", "elliptic"):
            fail("map1" if m == cfg.map1 else "map2", f"unknown map {m!r}")
    if cfg.N < 2:
        fail("N", "n must be >= 2")
    if cfg.t_max < 1:
        fail("t_max", "tmax must be >= 1")
    if any(t < 0 or t > cfg.t_max for t in cfg.t0_list):
        fail("t0_list", f"every t0 must lie in 0..{cfg.t_max}")
    if not 0 < cfg.fraction <= 1:
        fail("fraction", "fraction must lie in (0, 1]")
    if cfg.quadrature not in QUADRATURES:
        fail("quadrature", f"quadrature must be one of {QUADRATURES}")
    if cfg.observed.upper() not in ("A", "B"):
        fail("observed", "observed must be A or B")
    if cfg.threads < 1:
        fail("threads", "threads must be >= 1")
    return cfg


def scenarios_for(cfg: RunConfig) -> list[Scenario]:
    out = []
    for name in cfg.presets:
        if name == "custom":
            base = make_scenario("HH", cfg.N, t_max=cfg.t_max, K=cfg.K, Kc=cfg.Kc)
            base = replace(base, name="custom")
        else:
            base = make_scenario(name, cfg.N, t_max=cfg.t_max, K=cfg.K, Kc=cfg.Kc)
        coupled = base.coupled
        if cfg.map1:
            coupled = replace(coupled, map1=_map(cfg.map1, cfg.K))
        if cfg.map2:
            coupled = replace(coupled, map2=_map(cfg.map2, cfg.K))
        c1, c2 = base.initial
        initial = (cfg.centre1 or c1, cfg.centre2 or c2)
        out.append(replace(base, coupled=coupled, initial=initial, observed=cfg.observed))
    return out


def _map(kind: str, K: float) -> maps.CatMapSpec:
    return maps.hyperbolic(K) if kind == "hyperbolic" else maps.elliptic(K)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catotoc",
        description="OTOCs and relevant operators for coupled quantum cat maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Examples:" + __doc__.split("Examples:", 1)[1],
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("verify", "check the OTOC sum against the linear entropy"),
        ("run", "emit entropy, OTOC, relevance and footprint files"),
        ("sweep", "relevant-operator counts versus integration time"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path)
        p.add_argument("--preset", help="preset name or comma list: " + ", ".join(PRESETS))
        p.add_argument("--basis", help="basis kind or comma list: " + ", ".join(KINDS))
        p.add_argument("--n", type=int)
        p.add_argument("--tmax", type=int)
        p.add_argument("--t0", help="comma list or inclusive range start:stop:step")
        p.add_argument("--fraction", type=float)
        p.add_argument("--quadrature", choices=QUADRATURES)
        p.add_argument("--out", type=Path)
        p.add_argument("--svg", action="store_true", default=None)
        p.add_argument("--threads", type=int)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    where: dict[str, str] = {}
    if args.config is not None:
        for name, (value, lineno) in read_config(args.config).items():
            setattr(cfg, name, value)
            where[name] = f"{args.config}:{lineno}"
    overrides = {
        "presets": _names(args.preset) if args.preset else None,
        "bases": _names(args.basis) if args.basis else None,
        "N": args.n,
        "t_max": args.tmax,
        "t0_list": parse_int_list(args.t0) if args.t0 else None,
        "fraction": args.fraction,
        "quadrature": args.quadrature,
        "out": args.out,
        "svg": args.svg,
        "threads": args.threads,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
            where[name] = "--" + {"presets": "preset", "bases": "basis", "N": "n", "t_max": "tmax", "t0_list": "t0"}.get(name, name)
    return validate(cfg, where)


def _work_items(cfg: RunConfig):
    bases = {}
    for kind in cfg.bases:
        try:
            bases[kind] = make_basis(kind, make_bipartite(cfg.N).subsystem(cfg.observed))
        except BasisUnavailableError as exc:
            raise ConfigError(str(exc)) from None
    return [(sc, kind, bases[kind]) for sc in scenarios_for(cfg) for kind in cfg.bases]


def _compute(cfg: RunConfig, items):
    def job(item):
        sc, kind, basis = item
        sc = replace(sc, basis_kind=kind)
        return otoc_re_series(sc, basis)

    with ThreadPoolExecutor(max_workers=min(cfg.threads, max(len(items), 1))) as pool:
        return list(pool.map(job, items))


def cmd_verify(cfg: RunConfig) -> int:
    items = _work_items(cfg)
    results = _compute(cfg, items)
    rows, worst = [], 0.0
    for (sc, kind, _), (series, entropy) in zip(items, results):
        res = theorem_residuals(series, entropy)
        worst = max(worst, float(res.max()))
        rows.extend((sc.name, kind, t, r) for t, r in enumerate(res))
        print(f"{sc.name:>13s} {kind:>11s}  N={cfg.N}  t<={cfg.t_max}  max residual {res.max():.3e}")
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        artifacts.write_csv(cfg.out / "residuals.csv", artifacts.RESIDUAL_HEADER, rows)
    ok = worst < THEOREM_TOL
    print(f"{'PASS' if ok else 'FAIL'}: max |1 - sum C_M - S_L| = {worst:.3e} (tolerance {THEOREM_TOL:g})")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_run(cfg: RunConfig) -> int:
    if cfg.out is None:
        raise ConfigError("run needs an output directory (--out or 'out =')")
    items = _work_items(cfg)
    results = _compute(cfg, items)
    multi = len(items) > 1
    for (sc, kind, basis), (series, entropy) in zip(items, results):
        out = cfg.out / f"{sc.name}_{kind}" if multi else cfg.out
        out.mkdir(parents=True, exist_ok=True)
        if cfg.csv:
            artifacts.write_entropy(out / "entropy.csv", entropy)
            artifacts.write_otoc(out / "otoc.csv", series)
        if not cfg.t0_list:
            logger.info("no t0 given; relevance stage skipped for %s/%s", sc.name, kind)
            continue
        reports = [relevance_report(series, entropy, t0, cfg.fraction, cfg.quadrature) for t0 in cfg.t0_list]
        for rep in reports:
            print(f"{sc.name} {kind} t0={rep.t0}: {rep.n_relevant} of {len(basis)} relevant")
        if cfg.json:
            meta = {"scenario": sc.name, "basis": kind, "N": sc.N, "quadrature": cfg.quadrature}
            artifacts.write_relevance(out / "relevance.json", reports, meta)
        if cfg.csv:
            artifacts.write_partial_sums(out / "partial_sums.csv", reports, series, entropy)
        if kind == "pauli":
            continue
        overlay = sc.observed_map if sc.observed_map.is_hyperbolic else None
        fp = footprint(reports[-1], basis, overlay, remap_odd=cfg.remap_odd)
        if cfg.csv:
            artifacts.write_footprint_csv(out / "footprint.csv", fp)
        if cfg.svg:
            title = f"{sc.name} {kind} N={sc.N} t0={reports[-1].t0} ({reports[-1].n_relevant} relevant)"
            artifacts.write_footprint_svg(out / "footprint.svg", fp, title)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.t0_list:
        raise ConfigError("sweep needs a nonempty t0 list")
    if cfg.out is None:
        raise ConfigError("sweep needs an output directory (--out or 'out =')")
    items = _work_items(cfg)
    results = _compute(cfg, items)
    rows = []
    for (sc, kind, basis), (series, entropy) in zip(items, results):
        for t0 in cfg.t0_list:
            n = relevance_report(series, entropy, t0, cfg.fraction, cfg.quadrature).n_relevant
            rows.append((sc.name, kind, t0, n, len(basis)))
            print(f"{sc.name:>13s} {kind:>11s} t0={t0:3d} n_relevant={n}")
    cfg.out.mkdir(parents=True, exist_ok=True)
    artifacts.write_counts(cfg.out / "counts_vs_t0.csv", rows)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "run": cmd_run, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalConsistencyError as exc:
        print(f"numerical-consistency failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
