"""Exact optimization of the discrete coating design problem.

Two engines, both returning a :class:`SolveReport`:

* :func:`brute_force` — depth-first enumeration with prefix-product sharing;
  the trailing layers are folded into a precomputed suffix-product table so
  the innermost loop runs vectorized.
* :func:`branch_and_bound` — the same search with interval-box pruning:
  at each node an optimistic completion value is computed from the fixed
  prefix and corner-propagated bounds on the remaining-layer product, and
  children are visited in order of decreasing bound.

Node accounting: ``nodes_explored`` counts complete designs whose objective
was evaluated; ``nodes_pruned`` counts children skipped because their bound
could not beat the incumbent (each skipped subtree counts once).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from . import bounds as bounds_mod
from .arrayops import denominator4, mul4, reflectance4
from .errors import InadmissibleDesign, InstanceTooLarge
from .materials import Catalog, DispersionTable, index_at
from .optics import (
    ComplexIndex,
    StructuredMatrix,
    average_reflectance,
    chain_product,
    make_transfer_matrix,
    reflectance,
)

Design = tuple[tuple[str, float], ...]

#: A candidate must beat the incumbent by more than this to replace it, so
#: among tolerance-equal optima the enumeration-first (lexicographically
#: smallest) design is kept.
OBJECTIVE_EPS = 1e-12


@dataclass(frozen=True)
class SolveReport:
    design: Design
    objective: float
    per_wavelength: tuple[float, ...]
    nodes_explored: int
    nodes_pruned: int
    wall_time_s: float
    proven_optimal: bool
    incumbents: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "design": design_to_json(self.design),
            "objective": self.objective,
            "per_wavelength": list(self.per_wavelength),
            "nodes_explored": self.nodes_explored,
            "nodes_pruned": self.nodes_pruned,
            "wall_time_s": self.wall_time_s,
            "proven_optimal": self.proven_optimal,
            "incumbents": list(self.incumbents),
        }


def design_to_json(design: Design) -> list[dict]:
    return [{"material": m, "thickness_nm": t} for m, t in design]


def design_from_json(items: Sequence[Mapping]) -> Design:
    return tuple((str(d["material"]), float(d["thickness_nm"])) for d in items)


def evaluate_design(design: Design, catalog: Catalog) -> tuple[tuple[float, ...], float]:
    """Per-wavelength reflectances and the weighted average, on the catalog spectrum."""
    if len(design) != catalog.n_layers:
        raise InadmissibleDesign(
            f"design has {len(design)} layers, catalog expects {catalog.n_layers}"
        )
    for layer, pair in enumerate(design, start=1):
        if pair not in catalog.choices_at(layer):
            raise InadmissibleDesign(f"layer {layer}: {pair!r} not admissible")
    per = []
    for li, wl in enumerate(catalog.spectrum.wavelengths):
        w = chain_product([catalog.matrix(m, t, wl) for m, t in design])
        per.append(reflectance(w, catalog.substrate_indices[li]))
    avg = sum(p * phi for p, phi in zip(per, catalog.spectrum.weights))
    return tuple(per), avg


def evaluate_design_on_grid(
    design: Design,
    coating_tables: Mapping[str, DispersionTable],
    substrate_table: DispersionTable,
    grid: Sequence[float],
) -> tuple[list[float], float]:
    """Reflectance curve of an arbitrary design on a fresh wavelength grid.

    Layer matrices are rebuilt from dispersion data (coating extinction is
    dropped), so the design need not come from any catalog; thicknesses may
    be off-grid.  The average is unweighted.
    """
    per = []
    for wl in grid:
        mats = []
        for m, t in design:
            idx = index_at(coating_tables[m], wl)
            mats.append(make_transfer_matrix(ComplexIndex(idx.re), t, wl))
        per.append(reflectance(chain_product(mats), index_at(substrate_table, wl)))
    return per, sum(per) / len(per)


def _layer_arrays(catalog: Catalog) -> list[np.ndarray]:
    """Per layer: (choices, wavelengths, 4) array of fixed matrices."""
    out = []
    for layer in range(1, catalog.n_layers + 1):
        choices = catalog.choices_at(layer)
        arr = np.array(
            [
                [catalog.matrix(m, t, wl).entries() for wl in catalog.spectrum.wavelengths]
                for m, t in choices
            ]
        )
        out.append(arr)
    return out


def _substrate_arrays(catalog: Catalog) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.array([s.re for s in catalog.substrate_indices])
    b = np.array([s.im for s in catalog.substrate_indices])
    phi = np.array(catalog.spectrum.weights)
    return a, b, phi


def _report(
    catalog: Catalog,
    design: Design,
    nodes: int,
    pruned: int,
    t0: float,
    proven: bool,
    incumbents: list[float],
) -> SolveReport:
    per, avg = evaluate_design(design, catalog)
    return SolveReport(
        design=design,
        objective=avg,
        per_wavelength=per,
        nodes_explored=nodes,
        nodes_pruned=pruned,
        wall_time_s=time.perf_counter() - t0,
        proven_optimal=proven,
        incumbents=tuple(incumbents),
    )


def brute_force(catalog: Catalog, leaf_cap: int = 100_000_000) -> SolveReport:
    """Provably optimal design by exhaustive enumeration.

    Prefix products are shared across subtrees; the trailing layers whose
    combination count fits in memory are evaluated as one vectorized block.
    Ties within the improvement tolerance keep the first (lexicographically
    smallest) design found.
    """
    t0 = time.perf_counter()
    total = catalog.design_count()
    if total > leaf_cap:
        raise InstanceTooLarge(f"{total} designs exceed cap {leaf_cap}")
    n_layers = catalog.n_layers
    if n_layers == 0:
        _, avg = evaluate_design((), catalog)
        return _report(catalog, (), 1, 0, t0, True, [avg])

    mats = _layer_arrays(catalog)
    a, b, phi = _substrate_arrays(catalog)
    counts = [m.shape[0] for m in mats]
    n_wl = len(catalog.spectrum)

    suffix_limit = max(1024, 262_144 // n_wl)
    tail = 1
    prod = counts[-1]
    while tail < n_layers and prod * counts[n_layers - tail - 1] <= suffix_limit:
        tail += 1
        prod *= counts[n_layers - tail]
    split = n_layers - tail

    suffix = mats[split]
    for u in range(split + 1, n_layers):
        k, c = suffix.shape[0], counts[u]
        suffix = mul4(suffix[:, None, :, :], mats[u][None, :, :, :]).reshape(
            k * c, n_wl, 4
        )

    best = -np.inf
    best_design: list[int] | None = None
    incumbents: list[float] = []
    nodes = 0

    identity = np.tile(np.array([1.0, 0.0, 0.0, 1.0]), (n_wl, 1))

    def decode_suffix(index: int) -> list[int]:
        picks: list[int] = []
        for u in range(n_layers - 1, split - 1, -1):
            index, j = divmod(index, counts[u])
            picks.append(j)
        return picks[::-1]

    def descend(depth: int, prefix: np.ndarray, chosen: list[int]) -> None:
        nonlocal best, best_design, nodes
        if depth == split:
            w = mul4(prefix[None, :, :], suffix)
            obj = reflectance4(w, a, b) @ phi
            nodes += obj.shape[0]
            i = int(np.argmax(obj))
            if obj[i] > best + OBJECTIVE_EPS:
                best = float(obj[i])
                best_design = chosen + decode_suffix(i)
                incumbents.append(best)
            return
        layer = mul4(prefix[None, :, :], mats[depth])
        for j in range(counts[depth]):
            descend(depth + 1, layer[j], chosen + [j])

    descend(0, identity, [])
    assert best_design is not None
    design = tuple(
        catalog.choices_at(n + 1)[j] for n, j in enumerate(best_design)
    )
    return _report(catalog, design, nodes, 0, t0, True, incumbents)


def _box_product_batch(
    prefixes: np.ndarray, slo: np.ndarray, shi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise range of P*S for a batch of prefixes (c, L, 4) and a suffix box (L, 4)."""
    p11, p12 = prefixes[..., 0], prefixes[..., 1]
    p21, p22 = prefixes[..., 2], prefixes[..., 3]
    combos = (
        ((p11, 0), (-p12, 2)),
        ((p11, 1), (p12, 3)),
        ((p21, 0), (p22, 2)),
        ((p22, 3), (-p21, 1)),
    )
    lo = np.empty_like(prefixes)
    hi = np.empty_like(prefixes)
    for e, ((c1, e1), (c2, e2)) in enumerate(combos):
        t1a, t1b = c1 * slo[:, e1], c1 * shi[:, e1]
        t2a, t2b = c2 * slo[:, e2], c2 * shi[:, e2]
        lo[..., e] = np.minimum(t1a, t1b) + np.minimum(t2a, t2b)
        hi[..., e] = np.maximum(t1a, t1b) + np.maximum(t2a, t2b)
    return lo, hi


def _corner_dmax(lo: np.ndarray, hi: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Max of D over each box in a (c, L, 4) batch, via the 16 corners."""
    dmax = np.full(lo.shape[:-1], -np.inf)
    w = np.empty_like(lo)
    for picks in product((0, 1), repeat=4):
        for e, p in enumerate(picks):
            w[..., e] = hi[..., e] if p else lo[..., e]
        np.maximum(dmax, denominator4(w, a, b), out=dmax)
    return dmax


def branch_and_bound(
    catalog: Catalog,
    suffix_boxes: bounds_mod.EntryBounds | None = None,
    node_cap: int | None = None,
    check_monotone: bool = False,
) -> SolveReport:
    """Optimal design by bound-pruned depth-first search.

    Children are expanded in decreasing order of their optimistic bound; a
    child whose bound cannot beat the incumbent (plus tolerance) is pruned
    together with its whole subtree.  With `node_cap` set, the search stops
    early once that many designs were evaluated and the report is flagged as
    incumbent-only.
    """
    t0 = time.perf_counter()
    n_layers = catalog.n_layers
    if n_layers == 0:
        _, avg = evaluate_design((), catalog)
        return _report(catalog, (), 1, 0, t0, True, [avg])
    if suffix_boxes is None:
        suffix_boxes = bounds_mod.suffix_product_bounds(catalog)

    mats = _layer_arrays(catalog)
    a, b, phi = _substrate_arrays(catalog)
    counts = [m.shape[0] for m in mats]
    n_wl = len(catalog.spectrum)
    slo, shi = suffix_boxes.lower, suffix_boxes.upper

    best = -np.inf
    best_design: list[int] | None = None
    incumbents: list[float] = []
    nodes = 0
    pruned = 0
    capped = False

    identity = np.tile(np.array([1.0, 0.0, 0.0, 1.0]), (n_wl, 1))

    def child_bounds(prefixes: np.ndarray, depth: int) -> np.ndarray:
        lo, hi = _box_product_batch(prefixes, slo[:, depth + 1], shi[:, depth + 1])
        dmax = _corner_dmax(lo, hi, a, b)
        return (1.0 - 4.0 * a / dmax) @ phi

    def descend(depth: int, prefix: np.ndarray, chosen: list[int], parent_bound: float) -> None:
        nonlocal best, best_design, nodes, pruned, capped
        if capped:
            return
        if depth == n_layers - 1:
            w = mul4(prefix[None, :, :], mats[depth])
            obj = reflectance4(w, a, b) @ phi
            nodes += obj.shape[0]
            i = int(np.argmax(obj))
            if obj[i] > best + OBJECTIVE_EPS:
                best = float(obj[i])
                best_design = chosen + [i]
                incumbents.append(best)
            if node_cap is not None and nodes >= node_cap:
                capped = True
            return
        prefixes = mul4(prefix[None, :, :], mats[depth])
        bound_c = child_bounds(prefixes, depth)
        if check_monotone and np.any(bound_c > parent_bound + 1e-9):
            raise AssertionError("child bound exceeds parent bound")
        for j in np.argsort(-bound_c, kind="stable"):
            if capped:
                return
            if bound_c[j] <= best + OBJECTIVE_EPS:
                pruned += 1
                continue
            descend(depth + 1, prefixes[j], chosen + [int(j)], float(bound_c[j]))

    root_bound = bounds_mod.upper_bound_objective(
        [StructuredMatrix(1.0, 0.0, 0.0, 1.0)] * n_wl,
        slo[:, 0],
        shi[:, 0],
        catalog.substrate_indices,
        catalog.spectrum.weights,
    )
    descend(0, identity, [], root_bound)
    assert best_design is not None
    design = tuple(catalog.choices_at(n + 1)[j] for n, j in enumerate(best_design))
    return _report(catalog, design, nodes, pruned, t0, not capped, incumbents)
