#!/usr/bin/env python3
"""Regenerate the bundled dispersion tables in src/filmopt/data/.

Dielectrics come from published dispersion formulas:

* MgF2 — Dodge (1984) three-term Sellmeier fit for the ordinary ray,
  valid 0.2-7 um.
* TiO2 — DeVore (1951) single-term fit for rutile (ordinary ray) for
  wavelengths >= 360 nm; below that the fit approaches its resonance pole,
  so a few hand-smoothed points are substituted.  Extinction is set to zero
  over the whole range: the coatings are modeled as ideal dielectrics.

Metal substrates (Mo, Nb, Ta, W) are smoothed anchor tables assembled from
standard optical-constant compilations (Palik's handbook tabulations for
Mo/Ta/W, Golovashkin et al. for Nb).  Each anchor stores (wavelength, n, R)
with R the normal-incidence reflectance of the polished metal; k is solved
from R and n via

    R = ((n-1)^2 + k^2) / ((n+1)^2 + k^2).

These tables are interpolation-grade fixtures for design studies, not
measurement-grade data; see src/filmopt/data/README.md.
"""
from __future__ import annotations

import math
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "filmopt" / "data"


def sellmeier_mgf2(lam_um: float) -> float:
    terms = (
        (0.48755108, 0.04338408),
        (0.39875031, 0.09461442),
        (2.3120353, 23.793604),
    )
    lam2 = lam_um * lam_um
    n2 = 1.0 + sum(b * lam2 / (lam2 - c * c) for b, c in terms)
    return math.sqrt(n2)


def devore_tio2(lam_um: float) -> float:
    return math.sqrt(5.913 + 0.2441 / (lam_um * lam_um - 0.0803))


# Hand-smoothed continuation of the rutile curve below 360 nm (the DeVore fit
# blows up toward its 283 nm pole).
TIO2_UV = [(300.0, 3.560), (320.0, 3.451), (340.0, 3.354)]

# (wavelength nm, n, normal-incidence reflectance) anchors per metal.
METAL_ANCHORS: dict[str, list[tuple[float, float, float]]] = {
    "Molybdenum": [
        (300, 3.02, 0.548), (320, 3.04, 0.550), (340, 3.06, 0.552),
        (360, 3.09, 0.554), (370, 3.10, 0.5545), (380, 3.11, 0.5555),
        (400, 3.14, 0.557), (410, 3.16, 0.558), (430, 3.19, 0.559),
        (450, 3.22, 0.560), (480, 3.26, 0.5615), (500, 3.30, 0.563),
        (530, 3.34, 0.565), (550, 3.38, 0.567), (580, 3.42, 0.570),
        (600, 3.46, 0.573), (630, 3.50, 0.5765), (650, 3.53, 0.580),
        (680, 3.56, 0.585), (700, 3.60, 0.590), (730, 3.63, 0.5965),
        (750, 3.65, 0.601), (770, 3.67, 0.605), (800, 3.68, 0.615),
        (850, 3.60, 0.640), (900, 3.52, 0.665), (950, 3.42, 0.690),
        (1000, 3.32, 0.715), (1100, 3.15, 0.755), (1200, 3.00, 0.790),
        (1300, 2.86, 0.820), (1400, 2.73, 0.845), (1500, 2.60, 0.865),
        (1600, 2.48, 0.880), (1700, 2.37, 0.893), (1800, 2.26, 0.905),
        (1900, 2.16, 0.915), (2000, 2.07, 0.923), (2100, 1.98, 0.930),
        (2200, 1.90, 0.936), (2400, 1.76, 0.946), (2600, 1.64, 0.953),
        (2800, 1.56, 0.959), (3000, 1.50, 0.964),
    ],
    "Tungsten": [
        (300, 3.24, 0.478), (320, 3.28, 0.482), (340, 3.31, 0.486),
        (360, 3.34, 0.489), (370, 3.35, 0.490), (380, 3.36, 0.492),
        (400, 3.39, 0.494), (410, 3.40, 0.495), (430, 3.42, 0.497),
        (450, 3.44, 0.499), (480, 3.46, 0.501), (500, 3.47, 0.503),
        (530, 3.48, 0.504), (550, 3.49, 0.505), (580, 3.50, 0.504),
        (600, 3.51, 0.503), (630, 3.53, 0.500), (650, 3.55, 0.498),
        (680, 3.56, 0.499), (700, 3.55, 0.498), (730, 3.53, 0.498),
        (750, 3.52, 0.498), (770, 3.50, 0.498), (800, 3.48, 0.494),
        (850, 3.45, 0.488), (900, 3.42, 0.481), (950, 3.40, 0.477),
        (1000, 3.38, 0.479), (1050, 3.35, 0.488), (1100, 3.28, 0.510),
        (1150, 3.18, 0.545), (1200, 3.05, 0.600), (1250, 2.92, 0.655),
        (1300, 2.80, 0.705), (1350, 2.68, 0.745), (1400, 2.57, 0.780),
        (1500, 2.38, 0.830), (1600, 2.22, 0.862), (1700, 2.08, 0.885),
        (1800, 1.96, 0.902), (1900, 1.86, 0.915), (2000, 1.77, 0.925),
        (2100, 1.69, 0.933), (2200, 1.62, 0.939), (2400, 1.50, 0.949),
        (2600, 1.41, 0.956), (2800, 1.34, 0.961), (3000, 1.28, 0.965),
    ],
    "Niobium": [
        (300, 2.50, 0.500), (340, 2.56, 0.505), (370, 2.60, 0.508),
        (400, 2.64, 0.512), (410, 2.66, 0.513), (450, 2.71, 0.518),
        (500, 2.78, 0.525), (550, 2.85, 0.532), (600, 2.92, 0.540),
        (650, 2.99, 0.554), (700, 3.06, 0.565), (750, 3.12, 0.578),
        (770, 3.15, 0.583), (800, 3.18, 0.590), (900, 3.25, 0.610),
        (1000, 3.28, 0.625), (1100, 3.26, 0.652), (1200, 3.20, 0.680),
        (1300, 3.10, 0.708), (1400, 2.98, 0.735), (1500, 2.85, 0.760),
        (1600, 2.72, 0.783), (1700, 2.59, 0.804), (1800, 2.47, 0.823),
        (1900, 2.35, 0.840), (2000, 2.24, 0.855), (2200, 2.04, 0.879),
        (2400, 1.87, 0.898), (2600, 1.73, 0.913), (2800, 1.61, 0.925),
        (3000, 1.51, 0.935),
    ],
    "Tantalum": [
        (300, 2.05, 0.495), (340, 2.12, 0.500), (370, 2.18, 0.505),
        (400, 2.25, 0.512), (410, 2.27, 0.514), (450, 2.35, 0.522),
        (500, 2.45, 0.533), (550, 2.55, 0.545), (600, 2.65, 0.558),
        (650, 2.75, 0.576), (700, 2.85, 0.594), (750, 2.94, 0.612),
        (770, 2.98, 0.620), (800, 3.03, 0.628), (900, 3.15, 0.652),
        (1000, 3.22, 0.672), (1100, 3.24, 0.698), (1200, 3.20, 0.723),
        (1300, 3.12, 0.748), (1400, 3.01, 0.772), (1500, 2.89, 0.794),
        (1600, 2.76, 0.814), (1700, 2.63, 0.832), (1800, 2.51, 0.848),
        (1900, 2.39, 0.862), (2000, 2.28, 0.874), (2200, 2.08, 0.895),
        (2400, 1.91, 0.911), (2600, 1.77, 0.924), (2800, 1.65, 0.935),
        (3000, 1.55, 0.944),
    ],
}


def k_from_reflectance(n: float, refl: float) -> float:
    k2 = (refl * (n + 1.0) ** 2 - (n - 1.0) ** 2) / (1.0 - refl)
    if k2 < 0:
        raise ValueError(f"inconsistent anchor: n={n}, R={refl}")
    return math.sqrt(k2)


def write_csv(name: str, rows: list[tuple[float, float, float]]) -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    path = DATA_DIR / f"{name}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("wavelength_nm,n,k\n")
        for w, n, k in rows:
            fh.write(f"{w:g},{n:.6f},{k:.6f}\n")
    print(f"wrote {path} ({len(rows)} rows)")


def dielectric_rows(name: str) -> list[tuple[float, float, float]]:
    rows: list[tuple[float, float, float]] = []
    if name == "TiO2":
        rows.extend((w, n, 0.0) for w, n in TIO2_UV)
        grid = [360 + 20 * i for i in range(8)] + [520 + 40 * i for i in range(13)] + [
            1100 + 100 * i for i in range(20)
        ]
        rows.extend((float(w), devore_tio2(w / 1000.0), 0.0) for w in grid)
    elif name == "MgF2":
        grid = [300 + 20 * i for i in range(11)] + [520 + 40 * i for i in range(13)] + [
            1100 + 100 * i for i in range(20)
        ]
        rows.extend((float(w), sellmeier_mgf2(w / 1000.0), 0.0) for w in grid)
    else:
        raise ValueError(name)
    return rows


def main() -> None:
    for name in ("TiO2", "MgF2"):
        write_csv(name, dielectric_rows(name))
    for name, anchors in METAL_ANCHORS.items():
        rows = [(w, n, k_from_reflectance(n, r)) for w, n, r in anchors]
        write_csv(name, rows)


if __name__ == "__main__":
    main()
