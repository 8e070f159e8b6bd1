"""Dispersion tables, index interpolation, and the per-layer choice catalog.

Dispersion data comes in as CSV (`wavelength_nm,n,k`, strictly increasing
wavelengths).  A :class:`Catalog` freezes one optimization instance: the
spectrum, the substrate index at each wavelength, the admissible
(material, thickness) choices per layer, and the precomputed layer matrix
for every admissible combination.
"""
from __future__ import annotations

import bisect
import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    ConfigError,
    MissingDispersion,
    OutOfRange,
    ParseError,
    SpectrumCoverage,
    ValidationError,
)
from .optics import ComplexIndex, Spectrum, StructuredMatrix, make_transfer_matrix

CSV_HEADER = ["wavelength_nm", "n", "k"]

#: Directory with the bundled dispersion tables.
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class DispersionTable:
    """Tabulated complex refractive index of one material."""

    material_id: str
    wavelengths_nm: tuple[float, ...]
    n: tuple[float, ...]
    k: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.wavelengths_nm) < 2:
            raise ValidationError(f"{self.material_id}: need at least 2 rows")
        if len(self.n) != len(self.wavelengths_nm) or len(self.k) != len(self.wavelengths_nm):
            raise ValidationError(f"{self.material_id}: ragged columns")
        if any(b <= a for a, b in zip(self.wavelengths_nm, self.wavelengths_nm[1:])):
            raise ValidationError(f"{self.material_id}: wavelengths must be strictly increasing")
        if any(v <= 0 for v in self.n):
            raise ValidationError(f"{self.material_id}: n must be positive")
        if any(v < 0 for v in self.k):
            raise ValidationError(f"{self.material_id}: k must be nonnegative")

    def covers(self, wavelength: float) -> bool:
        return self.wavelengths_nm[0] <= wavelength <= self.wavelengths_nm[-1]


def load_dispersion(path: str | Path) -> DispersionTable:
    """Read a dispersion CSV; the material id is the file stem."""
    path = Path(path)
    rows: list[tuple[float, float, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1]), float(row[2])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least 2 data rows")
    if any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
        raise ValidationError(f"{path}: wavelengths must be strictly increasing")
    return DispersionTable(
        material_id=path.stem,
        wavelengths_nm=tuple(r[0] for r in rows),
        n=tuple(r[1] for r in rows),
        k=tuple(r[2] for r in rows),
    )


def index_at(table: DispersionTable, wavelength: float) -> ComplexIndex:
    """Linear interpolation of n and k; exact at grid points."""
    wls = table.wavelengths_nm
    if not table.covers(wavelength):
        raise OutOfRange(
            f"{table.material_id}: {wavelength} nm outside "
            f"[{wls[0]}, {wls[-1]}] nm"
        )
    i = bisect.bisect_left(wls, wavelength)
    if i < len(wls) and wls[i] == wavelength:
        return ComplexIndex(table.n[i], table.k[i])
    lo, hi = i - 1, i
    t = (wavelength - wls[lo]) / (wls[hi] - wls[lo])
    return ComplexIndex(
        table.n[lo] + t * (table.n[hi] - table.n[lo]),
        table.k[lo] + t * (table.k[hi] - table.k[lo]),
    )


@dataclass(frozen=True)
class ThicknessSet:
    """Admissible thickness grid (nm) for one coating material."""

    material_id: str
    thicknesses: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.thicknesses:
            raise ValidationError(f"{self.material_id}: empty thickness set")
        if any(t <= 0 for t in self.thicknesses):
            raise ValidationError(f"{self.material_id}: thicknesses must be positive")
        if any(b <= a for a, b in zip(self.thicknesses, self.thicknesses[1:])):
            raise ValidationError(f"{self.material_id}: thicknesses must be sorted, unique")


def _progression(start: float, step: float, end: float) -> tuple[float, ...]:
    if step <= 0:
        raise ConfigError("thickness progression step must be positive")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    if count < 1:
        raise ConfigError("empty thickness progression")
    return tuple(start + i * step for i in range(count))


@dataclass(frozen=True)
class CatalogConfig:
    """Declarative description of one optimization instance."""

    substrate: str
    materials: tuple[str, ...]
    thicknesses: Mapping[str, tuple[float, ...]]
    wavelengths: tuple[float, ...]
    layers: int
    alternating: bool = False
    weights: tuple[float, ...] | None = None
    dispersion_dir: Path | None = None

    @classmethod
    def from_json(cls, path: str | Path) -> "CatalogConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
        try:
            materials = tuple(raw["materials"])
            thick: dict[str, tuple[float, ...]] = {}
            for mat, spec in raw["thicknesses"].items():
                if isinstance(spec, dict):
                    thick[mat] = _progression(spec["start"], spec["step"], spec["end"])
                else:
                    thick[mat] = tuple(float(t) for t in spec)
            wl_spec = raw["wavelengths"]
            if isinstance(wl_spec, dict):
                wavelengths = _progression(wl_spec["start"], wl_spec["step"], wl_spec["end"])
            else:
                wavelengths = tuple(float(w) for w in wl_spec)
            weights = raw.get("weights")
            ddir = raw.get("dispersion_dir")
            return cls(
                substrate=raw["substrate"],
                materials=materials,
                thicknesses=thick,
                wavelengths=wavelengths,
                layers=int(raw["layers"]),
                alternating=bool(raw.get("alternating", False)),
                weights=tuple(float(w) for w in weights) if weights is not None else None,
                dispersion_dir=Path(ddir) if ddir is not None else None,
            )
        except KeyError as exc:
            raise ConfigError(f"{path}: missing config key {exc}") from None


@dataclass(frozen=True)
class Catalog:
    """Frozen optimization instance with precomputed layer matrices.

    `layer_choices[i]` lists the admissible (material, thickness) pairs of
    layer i+1 (layer 1 sits next to the substrate), sorted by material then
    thickness; `fixed[(material, thickness, wavelength)]` is the layer matrix.
    """

    n_layers: int
    layer_choices: tuple[tuple[tuple[str, float], ...], ...]
    spectrum: Spectrum
    substrate_id: str
    substrate_indices: tuple[ComplexIndex, ...]
    thickness_sets: tuple[ThicknessSet, ...]
    fixed: Mapping[tuple[str, float, float], StructuredMatrix] = field(repr=False)

    def matrix(self, material: str, thickness: float, wavelength: float) -> StructuredMatrix:
        return self.fixed[(material, thickness, wavelength)]

    def choices_at(self, layer: int) -> tuple[tuple[str, float], ...]:
        """Admissible pairs of 1-based `layer`."""
        return self.layer_choices[layer - 1]

    def design_count(self) -> int:
        count = 1
        for choices in self.layer_choices:
            count *= len(choices)
        return count


def load_tables(config: CatalogConfig) -> dict[str, DispersionTable]:
    """Load dispersion tables for the config's substrate and coatings."""
    directory = config.dispersion_dir or DATA_DIR
    tables: dict[str, DispersionTable] = {}
    for mat in (config.substrate, *config.materials):
        path = Path(directory) / f"{mat}.csv"
        if not path.exists():
            raise MissingDispersion(f"no dispersion file for {mat!r} in {directory}")
        tables[mat] = load_dispersion(path)
    return tables


def _rank_by_mean_index(
    materials: Sequence[str],
    tables: Mapping[str, DispersionTable],
    wavelengths: Sequence[float],
) -> tuple[str, str]:
    """(high, low) coating pair for alternating mode, by mean n over the spectrum."""
    if len(materials) != 2:
        raise ConfigError("alternating mode needs exactly two coating materials")
    means = {
        m: sum(index_at(tables[m], w).re for w in wavelengths) / len(wavelengths)
        for m in materials
    }
    ordered = sorted(materials, key=lambda m: means[m], reverse=True)
    if means[ordered[0]] == means[ordered[1]]:
        raise ConfigError("cannot rank materials: equal mean refractive index")
    return ordered[0], ordered[1]


def build_catalog(
    config: CatalogConfig, tables: Mapping[str, DispersionTable]
) -> Catalog:
    """Validate coverage and precompute every admissible layer matrix.

    In alternating mode odd layers (counting from the substrate) carry the
    high-index material, even layers the low-index one.  Coating extinction
    is forced to zero; a warning is emitted if the table says otherwise.
    """
    if config.layers < 0:
        raise ConfigError("layer count must be nonnegative")
    if not config.materials:
        raise ConfigError("at least one coating material required")
    for mat in (config.substrate, *config.materials):
        if mat not in tables:
            raise MissingDispersion(f"no dispersion table for {mat!r}")
        table = tables[mat]
        missing = [w for w in config.wavelengths if not table.covers(w)]
        if missing:
            raise SpectrumCoverage(
                f"{mat}: table [{table.wavelengths_nm[0]}, {table.wavelengths_nm[-1]}] nm "
                f"does not cover {missing[:3]}..."
            )
    for mat in config.materials:
        if mat not in config.thicknesses:
            raise ConfigError(f"no thickness set for coating {mat!r}")

    if config.weights is not None:
        if len(config.weights) != len(config.wavelengths):
            raise ConfigError("weights and wavelengths differ in length")
        total = sum(config.weights)
        if total <= 0 or any(w < 0 for w in config.weights):
            raise ConfigError("weights must be nonnegative with positive sum")
        spectrum = Spectrum(
            tuple(config.wavelengths), tuple(w / total for w in config.weights)
        )
    else:
        spectrum = Spectrum.uniform(config.wavelengths)

    thickness_sets = tuple(
        ThicknessSet(mat, tuple(sorted(config.thicknesses[mat])))
        for mat in config.materials
    )
    by_mat = {ts.material_id: ts for ts in thickness_sets}

    if config.alternating:
        high, low = _rank_by_mean_index(config.materials, tables, spectrum.wavelengths)
        allowed = [(high,) if n % 2 == 1 else (low,) for n in range(1, config.layers + 1)]
    else:
        allowed = [tuple(config.materials) for _ in range(config.layers)]

    layer_choices = tuple(
        tuple(sorted((m, t) for m in mats for t in by_mat[m].thicknesses))
        for mats in allowed
    )

    coatings_in_use = sorted({m for choices in layer_choices for m, _ in choices})
    indices: dict[tuple[str, float], float] = {}
    for mat in coatings_in_use:
        lossy = False
        for w in spectrum.wavelengths:
            idx = index_at(tables[mat], w)
            lossy = lossy or idx.im != 0
            indices[(mat, w)] = idx.re
        if lossy:
            warnings.warn(
                f"{mat}: nonzero extinction in dispersion data ignored "
                "(coatings are treated as ideal dielectrics)",
                stacklevel=2,
            )

    fixed: dict[tuple[str, float, float], StructuredMatrix] = {}
    for mat in coatings_in_use:
        for t in by_mat[mat].thicknesses:
            for w in spectrum.wavelengths:
                fixed[(mat, t, w)] = make_transfer_matrix(
                    ComplexIndex(indices[(mat, w)]), t, w
                )

    substrate_indices = tuple(
        index_at(tables[config.substrate], w) for w in spectrum.wavelengths
    )
    return Catalog(
        n_layers=config.layers,
        layer_choices=layer_choices,
        spectrum=spectrum,
        substrate_id=config.substrate,
        substrate_indices=substrate_indices,
        thickness_sets=thickness_sets,
        fixed=fixed,
    )
