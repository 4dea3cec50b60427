"""TOML run configuration.

Layout::

    [geometry]
    points = [[x, y, z], ...]        # or a [geometry.diamond] table
    exponent = 1.0                   # optional Riesz exponent
    symmetry = [[1, 0, 3, 2, 4, 5]]  # optional site permutations

    [geometry.diamond]
    a = 0.7
    b = 1.7
    h_squared = 0.51                 # or h = ...

    [potential]
    values = [...]

    [density]
    values = [...]                   # or half_filling = true

    [grid]      v1_range, v3_range, steps, fixed, N
    [search]    K, trials, box_halfwidth, seed, planar, keep_all,
                center = "diamond", jitter
    [quantum]   ell, n_max
    [run]       N

A ``[search]`` section with ``K`` and no ``[geometry]`` is the random-search
geometry source; at most one geometry source may be given.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import SiteConfiguration
from .errors import SiteModelError
from .fixtures import DIAMOND_REFLECTIONS, diamond


class ConfigError(SiteModelError):
    pass


@dataclass
class RunConfig:
    source: str
    geometry_source: str | None = None
    config: SiteConfiguration | None = None
    potential: np.ndarray | None = None
    density: np.ndarray | None = None
    symmetry: list[tuple[int, ...]] | None = None
    grid: dict = field(default_factory=dict)
    search: dict = field(default_factory=dict)
    quantum: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    def require_geometry(self) -> SiteConfiguration:
        if self.config is None:
            raise ConfigError(f"{self.source}: no [geometry] section")
        return self.config

    def require_potential(self) -> np.ndarray:
        if self.potential is None:
            raise ConfigError(f"{self.source}: no [potential] section")
        return self.potential

    def require_density(self) -> np.ndarray:
        if self.density is None:
            raise ConfigError(f"{self.source}: no [density] section")
        return self.density


def _locate(text: str, section: str, key: str | None = None) -> int | None:
    """1-based line of ``key`` inside ``[section]`` (or of the header itself)."""
    current = None
    header = re.compile(r"^\s*\[([^\]]+)\]\s*(#.*)?$")
    for i, line in enumerate(text.splitlines(), 1):
        m = header.match(line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return i
    return None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, msg: str, section: str, key: str | None = None):
        line = _locate(self.text, section, key)
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: [{section}] {msg}")

    def vector(self, table, section, key, n=None):
        try:
            v = np.array(table[key], dtype=float).reshape(-1)
        except (TypeError, ValueError):
            self.fail(f"{key} must be a list of numbers", section, key)
        if not np.all(np.isfinite(v)):
            self.fail(f"{key} must be finite", section, key)
        if n is not None and len(v) != n:
            self.fail(f"{key} has {len(v)} entries, expected {n}", section, key)
        return v


def parse_config(text: str, source: str = "<config>", exponent: float | None = None) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    rd = _Reader(text, source)
    out = RunConfig(source=source)
    known = {"geometry", "potential", "density", "grid", "search", "quantum", "run"}
    for name in data:
        if name not in known:
            rd.fail("unknown section", name)

    geo = data.get("geometry")
    sources = []
    if geo is not None:
        if "points" in geo:
            sources.append("points")
        if "diamond" in geo:
            sources.append("diamond")
    if "search" in data and "K" in data["search"] and geo is None:
        sources.append("search")
    if len(sources) > 1:
        rd.fail(f"exactly one geometry source allowed, found {sources}", "geometry")
    if geo is not None and not sources:
        rd.fail("needs either points or a [geometry.diamond] table", "geometry")
    out.geometry_source = sources[0] if sources else None

    if geo is not None:
        s = float(exponent if exponent is not None else geo.get("exponent", 1.0))
        try:
            if "points" in geo:
                pts = np.array(geo["points"], dtype=float)
                out.config = SiteConfiguration(pts, s)
            else:
                d = geo["diamond"]
                if "h_squared" in d:
                    h = math.sqrt(float(d["h_squared"]))
                else:
                    h = float(d.get("h", math.sqrt(0.51)))
                out.config = diamond(float(d.get("a", 0.7)), float(d.get("b", 1.7)), h, s)
                if "symmetry" not in geo:
                    out.symmetry = [tuple(p) for p in DIAMOND_REFLECTIONS]
        except (SiteModelError, ValueError, TypeError) as exc:
            key = "points" if "points" in geo else None
            rd.fail(str(exc), "geometry" if key else "geometry.diamond", key)
        if "symmetry" in geo:
            try:
                out.symmetry = [tuple(int(i) for i in p) for p in geo["symmetry"]]
            except (TypeError, ValueError):
                rd.fail("symmetry must be a list of integer permutations", "geometry", "symmetry")
            K = out.config.K
            for p in out.symmetry:
                if sorted(p) != list(range(K)):
                    rd.fail(f"{list(p)} is not a permutation of 0..{K - 1}", "geometry", "symmetry")

    K = out.config.K if out.config is not None else None
    if "potential" in data:
        if "values" not in data["potential"]:
            rd.fail("missing values", "potential")
        out.potential = rd.vector(data["potential"], "potential", "values", K)
    if "density" in data:
        dens = data["density"]
        if dens.get("half_filling"):
            if K is None:
                rd.fail("half_filling needs a geometry", "density", "half_filling")
            out.density = np.full(K, 0.5)
        elif "values" in dens:
            out.density = rd.vector(dens, "density", "values", K)
        else:
            rd.fail("needs values or half_filling = true", "density")
    out.grid = dict(data.get("grid", {}))
    out.search = dict(data.get("search", {}))
    out.quantum = dict(data.get("quantum", {}))
    out.run = dict(data.get("run", {}))
    if "center" in out.search and out.search["center"] != "diamond":
        rd.fail("center must be \"diamond\"", "search", "center")
    return out


def load_config(path, exponent: float | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text, str(path), exponent)


def fixture_names() -> list[str]:
    data = resources.files("coulomb_sites") / "data"
    return sorted(p.name[:-5] for p in data.iterdir() if p.name.endswith(".toml"))


def load_fixture(name: str, exponent: float | None = None) -> RunConfig:
    """Bundled configuration by name, e.g. ``diamond_vstar``."""
    res = resources.files("coulomb_sites") / "data" / f"{name}.toml"
    if not res.is_file():
        raise ConfigError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return parse_config(res.read_text(), f"fixture:{name}", exponent)
