"""Solver-agnostic algebraic models of the discrete coating problem.

The exact formulation is a nonconvex MIQCP.  Binary variables pick one
(material, thickness) per layer; gated copies `v` of the running cumulative
matrix linearize the product recursion (the copy is boxed to zero unless its
binary fires, and to the tightened entry bounds when it does); auxiliaries
`d <= D(w)` and `f*d >= 4 Re(a)` turn the reflectance into the linear
objective sum phi*(1 - f).  Intermediate cumulative matrices are eliminated
by substitution: the chain constraints tie consecutive copy sums together,
so only v, w, d, f and the binaries remain.

The relaxation keeps everything except the reverse-convex cap `d <= D(w)`,
which is replaced by validated affine overapproximators of D.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import bounds as bounds_mod
from .bounds import EntryBounds
from .errors import InconsistentBounds, MissingHyperplanes
from .materials import Catalog
from .optics import StructuredMatrix, chain_product, denominator_D
from .relax import Hyperplane

ENTRY_TAGS = ("11", "12", "21", "22")


# ---------------------------------------------------------------------------
# Generic container


@dataclass
class Variable:
    name: str
    lower: float
    upper: float
    kind: str = "continuous"  # or "binary"


@dataclass
class LinearConstraint:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", "=", ">="
    rhs: float


@dataclass
class QuadraticConstraint:
    name: str
    quad: dict[tuple[str, str], float]
    lin: dict[str, float]
    sense: str
    rhs: float


@dataclass
class Objective:
    coeffs: dict[str, float]
    constant: float = 0.0
    sense: str = "max"


@dataclass
class Model:
    name: str
    variables: list[Variable] = field(default_factory=list)
    linear: list[LinearConstraint] = field(default_factory=list)
    quadratic: list[QuadraticConstraint] = field(default_factory=list)
    objective: Objective = field(default_factory=lambda: Objective({}))
    header_comments: list[str] = field(default_factory=list)

    def variable_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def validate(self) -> None:
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        declared = set(names)
        for v in self.variables:
            if v.kind == "continuous" and not (
                math.isfinite(v.lower) and math.isfinite(v.upper)
            ):
                raise ValueError(f"{v.name}: continuous variable needs finite bounds")
            if v.lower > v.upper:
                raise ValueError(f"{v.name}: lower bound exceeds upper")
        referenced = set(self.objective.coeffs)
        for c in self.linear:
            referenced |= set(c.coeffs)
        for q in self.quadratic:
            referenced |= set(q.lin)
            for pair in q.quad:
                referenced |= set(pair)
        missing = referenced - declared
        if missing:
            raise ValueError(f"constraints reference undeclared variables: {sorted(missing)[:5]}")

    def objective_value(self, values: dict[str, float]) -> float:
        return self.objective.constant + sum(
            c * values[n] for n, c in self.objective.coeffs.items()
        )

    def check_point(self, values: dict[str, float]) -> float:
        """Largest constraint/bound violation of a full assignment (0 if feasible)."""
        worst = 0.0

        def residual(lhs: float, sense: str, rhs: float) -> float:
            if sense == "<=":
                return lhs - rhs
            if sense == ">=":
                return rhs - lhs
            return abs(lhs - rhs)

        for v in self.variables:
            x = values[v.name]
            worst = max(worst, v.lower - x, x - v.upper)
            if v.kind == "binary":
                worst = max(worst, min(abs(x), abs(x - 1.0)))
        for c in self.linear:
            lhs = sum(coef * values[n] for n, coef in c.coeffs.items())
            worst = max(worst, residual(lhs, c.sense, c.rhs))
        for q in self.quadratic:
            lhs = sum(coef * values[n] for n, coef in q.lin.items())
            lhs += sum(coef * values[n1] * values[n2] for (n1, n2), coef in q.quad.items())
            worst = max(worst, residual(lhs, q.sense, q.rhs))
        return worst


def models_close(a: Model, b: Model, rtol: float = 1e-15) -> bool:
    """Structural equality up to relative coefficient tolerance."""

    def close(x: float, y: float) -> bool:
        return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))

    avars = {v.name: v for v in a.variables}
    bvars = {v.name: v for v in b.variables}
    if set(avars) != set(bvars):
        return False
    for name, va in avars.items():
        vb = bvars[name]
        if va.kind != vb.kind or not (close(va.lower, vb.lower) and close(va.upper, vb.upper)):
            return False
    if len(a.linear) != len(b.linear) or len(a.quadratic) != len(b.quadratic):
        return False
    for ca, cb in zip(a.linear, b.linear):
        if ca.name != cb.name or ca.sense != cb.sense or not close(ca.rhs, cb.rhs):
            return False
        if set(ca.coeffs) != set(cb.coeffs):
            return False
        if not all(close(ca.coeffs[n], cb.coeffs[n]) for n in ca.coeffs):
            return False
    for qa, qb in zip(a.quadratic, b.quadratic):
        if qa.name != qb.name or qa.sense != qb.sense or not close(qa.rhs, qb.rhs):
            return False
        if set(qa.lin) != set(qb.lin) or set(qa.quad) != set(qb.quad):
            return False
        if not all(close(qa.lin[n], qb.lin[n]) for n in qa.lin):
            return False
        if not all(close(qa.quad[p], qb.quad[p]) for p in qa.quad):
            return False
    if a.objective.sense != b.objective.sense:
        return False
    if set(a.objective.coeffs) != set(b.objective.coeffs):
        return False
    if not all(close(a.objective.coeffs[n], b.objective.coeffs[n]) for n in a.objective.coeffs):
        return False
    return close(a.objective.constant, b.objective.constant)


# ---------------------------------------------------------------------------
# Naming scheme


def _fmt_thickness(t: float) -> str:
    if t == int(t):
        return str(int(t))
    return str(t).replace(".", "p").replace("-", "m")


def x_name(layer: int, material: str, thickness: float) -> str:
    return f"x_{layer}_{material}_{_fmt_thickness(thickness)}"


def v_name(li: int, layer: int, material: str, thickness: float, tag: str) -> str:
    return f"v_{li}_{layer}_{material}_{_fmt_thickness(thickness)}_{tag}"


def w_name(li: int, tag: str) -> str:
    return f"w_{li}_{tag}"


def d_name(li: int) -> str:
    return f"d_{li}"


def f_name(li: int) -> str:
    return f"f_{li}"


def variable_map(catalog: Catalog) -> dict:
    """Name -> meaning map for every variable of the catalog's models."""
    out: dict[str, dict] = {"x": {}, "v": {}, "w": {}, "d": {}, "f": {}}
    for layer in range(1, catalog.n_layers + 1):
        for m, t in catalog.choices_at(layer):
            out["x"][x_name(layer, m, t)] = {
                "layer": layer, "material": m, "thickness_nm": t,
            }
    for li, wl in enumerate(catalog.spectrum.wavelengths):
        for layer in range(1, catalog.n_layers + 1):
            for m, t in catalog.choices_at(layer):
                for tag in ENTRY_TAGS:
                    out["v"][v_name(li, layer, m, t, tag)] = {
                        "wavelength_nm": wl, "layer": layer, "material": m,
                        "thickness_nm": t, "entry": tag,
                    }
        for tag in ENTRY_TAGS:
            out["w"][w_name(li, tag)] = {"wavelength_nm": wl, "entry": tag}
        out["d"][d_name(li)] = {"wavelength_nm": wl}
        out["f"][f_name(li)] = {"wavelength_nm": wl}
    return out


# ---------------------------------------------------------------------------
# Builders

_HEADER = [
    "variable naming: x_<layer>_<material>_<thickness> binary layer choice;",
    "v_<l>_<layer>_<material>_<thickness>_<ij> gated copy (wavelength index l) of the",
    "cumulative-product entry ij entering <layer>; w_<l>_<ij> final cumulative entries;",
    "d_<l> denominator auxiliary; f_<l> loss auxiliary (objective = sum phi*(1 - f)).",
    "entry tags: 11,12,21,22 address the real carrier (a11, a12, a21, a22).",
]


def _structure(catalog: Catalog, entry_bounds: EntryBounds, name: str) -> Model:
    """Common part of both models: everything except the d <= D(w) coupling."""
    if entry_bounds.lower.shape[1] != catalog.n_layers + 1:
        raise InconsistentBounds("entry bounds depth does not match the catalog")
    if (entry_bounds.lower > entry_bounds.upper).any():
        raise InconsistentBounds("entrywise lower bound exceeds upper bound")

    n_layers = catalog.n_layers
    n_wl = len(catalog.spectrum)
    model = Model(name=name, header_comments=list(_HEADER))

    for layer in range(1, n_layers + 1):
        for m, t in catalog.choices_at(layer):
            model.variables.append(Variable(x_name(layer, m, t), 0.0, 1.0, "binary"))
    for li in range(n_wl):
        for layer in range(1, n_layers + 1):
            lo, hi = entry_bounds.box(li, layer - 1)
            for m, t in catalog.choices_at(layer):
                for e, tag in enumerate(ENTRY_TAGS):
                    model.variables.append(
                        Variable(
                            v_name(li, layer, m, t, tag),
                            min(lo[e], 0.0),
                            max(hi[e], 0.0),
                        )
                    )
        lo, hi = entry_bounds.box(li, n_layers)
        for e, tag in enumerate(ENTRY_TAGS):
            model.variables.append(Variable(w_name(li, tag), lo[e], hi[e]))
    for li in range(n_wl):
        sub = catalog.substrate_indices[li]
        lo, hi = entry_bounds.box(li, n_layers)
        dmax = bounds_mod.max_denominator_over_box(lo, hi, sub)
        model.variables.append(Variable(d_name(li), 0.0, dmax))
        model.variables.append(Variable(f_name(li), 0.0, 2.0))

    identity = (1.0, 0.0, 0.0, 1.0)
    for li, wl in enumerate(catalog.spectrum.wavelengths):
        # product-rule images of the gated copies: (v*T)_ij is linear in v
        def image(layer: int, m: str, t: float, e: int) -> dict[str, float]:
            mat = catalog.matrix(m, t, wl)
            t11, t12, t21, t22 = mat.entries()
            v = lambda tag: v_name(li, layer, m, t, tag)  # noqa: E731
            if e == 0:
                return {v("11"): t11, v("12"): -t21}
            if e == 1:
                return {v("11"): t12, v("12"): t22}
            if e == 2:
                return {v("21"): t11, v("22"): t21}
            return {v("22"): t22, v("21"): -t12}

        if n_layers >= 1:
            for e, tag in enumerate(ENTRY_TAGS):
                coeffs = {v_name(li, 1, m, t, tag): 1.0 for m, t in catalog.choices_at(1)}
                model.linear.append(
                    LinearConstraint(f"c_u0_{li}_{tag}", coeffs, "=", identity[e])
                )
        for layer in range(1, n_layers):
            for e, tag in enumerate(ENTRY_TAGS):
                coeffs: dict[str, float] = {}
                for m, t in catalog.choices_at(layer):
                    for nm, c in image(layer, m, t, e).items():
                        coeffs[nm] = coeffs.get(nm, 0.0) + c
                for m, t in catalog.choices_at(layer + 1):
                    nm = v_name(li, layer + 1, m, t, tag)
                    coeffs[nm] = coeffs.get(nm, 0.0) - 1.0
                model.linear.append(
                    LinearConstraint(f"c_chain_{li}_{layer}_{tag}", coeffs, "=", 0.0)
                )
        if n_layers >= 1:
            for e, tag in enumerate(ENTRY_TAGS):
                coeffs = {}
                for m, t in catalog.choices_at(n_layers):
                    for nm, c in image(n_layers, m, t, e).items():
                        coeffs[nm] = coeffs.get(nm, 0.0) + c
                coeffs[w_name(li, tag)] = -1.0
                model.linear.append(
                    LinearConstraint(f"c_final_{li}_{tag}", coeffs, "=", 0.0)
                )
        else:
            for e, tag in enumerate(ENTRY_TAGS):
                model.linear.append(
                    LinearConstraint(
                        f"c_final_{li}_{tag}", {w_name(li, tag): 1.0}, "=", identity[e]
                    )
                )
        for layer in range(1, n_layers + 1):
            lo, hi = entry_bounds.box(li, layer - 1)
            for m, t in catalog.choices_at(layer):
                xn = x_name(layer, m, t)
                for e, tag in enumerate(ENTRY_TAGS):
                    vn = v_name(li, layer, m, t, tag)
                    model.linear.append(
                        LinearConstraint(
                            f"c_ub_{li}_{layer}_{m}_{_fmt_thickness(t)}_{tag}",
                            {vn: 1.0, xn: -hi[e]}, "<=", 0.0,
                        )
                    )
                    model.linear.append(
                        LinearConstraint(
                            f"c_lb_{li}_{layer}_{m}_{_fmt_thickness(t)}_{tag}",
                            {vn: 1.0, xn: -lo[e]}, ">=", 0.0,
                        )
                    )
    for layer in range(1, n_layers + 1):
        coeffs = {x_name(layer, m, t): 1.0 for m, t in catalog.choices_at(layer)}
        model.linear.append(LinearConstraint(f"c_pick_{layer}", coeffs, "=", 1.0))

    for li in range(n_wl):
        a = catalog.substrate_indices[li].re
        model.quadratic.append(
            QuadraticConstraint(
                f"qc_cone_{li}",
                quad={(d_name(li), f_name(li)): 1.0},
                lin={},
                sense=">=",
                rhs=4.0 * a,
            )
        )

    phi = catalog.spectrum.weights
    model.objective = Objective(
        coeffs={f_name(li): -phi[li] for li in range(n_wl)},
        constant=sum(phi),
        sense="max",
    )
    return model


def build_miqcp(catalog: Catalog, entry_bounds: EntryBounds) -> Model:
    """Exact nonconvex model: structure plus the reverse-convex cap d <= D(w)."""
    model = _structure(catalog, entry_bounds, "miqcp")
    for li in range(len(catalog.spectrum)):
        sub = catalog.substrate_indices[li]
        a, b = sub.re, sub.im
        w = lambda tag: w_name(li, tag)  # noqa: E731
        quad = {
            (w("11"), w("11")): -1.0,
            (w("12"), w("12")): -(a * a + b * b),
            (w("21"), w("21")): -1.0,
            (w("22"), w("22")): -(a * a + b * b),
            (w("11"), w("12")): 2.0 * b,
            (w("21"), w("22")): -2.0 * b,
        }
        model.quadratic.append(
            QuadraticConstraint(
                f"qc_dcap_{li}", quad=quad, lin={d_name(li): 1.0}, sense="<=", rhs=2.0 * a
            )
        )
    model.validate()
    return model


def build_misocp(
    catalog: Catalog,
    entry_bounds: EntryBounds,
    overapproximators: list[list[Hyperplane]],
) -> Model:
    """Convex relaxation: the cap is replaced by affine overapproximators of D."""
    if len(overapproximators) != len(catalog.spectrum):
        raise MissingHyperplanes(
            f"{len(overapproximators)} hyperplane families for "
            f"{len(catalog.spectrum)} wavelengths"
        )
    if any(not planes for planes in overapproximators):
        raise MissingHyperplanes("a wavelength has an empty hyperplane family")
    model = _structure(catalog, entry_bounds, "misocp")
    for li, planes in enumerate(overapproximators):
        for k, h in enumerate(planes):
            #  a1*w11 + a2*w22 + a3*w12 + a4*w21 - d >= -a0
            coeffs = {
                w_name(li, "11"): h.a1,
                w_name(li, "22"): h.a2,
                w_name(li, "12"): h.a3,
                w_name(li, "21"): h.a4,
                d_name(li): -1.0,
            }
            model.linear.append(
                LinearConstraint(f"c_hyp_{li}_{k}", coeffs, ">=", -h.a0)
            )
    model.validate()
    return model


def linear_constraint_count(catalog: Catalog) -> int:
    """Closed form for the structural linear-constraint count of the exact model."""
    n_wl = len(catalog.spectrum)
    n_layers = catalog.n_layers
    per_layer_choices = sum(len(catalog.choices_at(n)) for n in range(1, n_layers + 1))
    return n_wl * (4 + 4 * n_layers + 8 * per_layer_choices) + n_layers


def design_point(
    catalog: Catalog,
    design: tuple[tuple[str, float], ...],
    overapproximators: list[list[Hyperplane]] | None = None,
) -> dict[str, float]:
    """Full variable assignment induced by a concrete design.

    For the exact model, d = D(w) and f = 4 Re(a)/d make both quadratic
    couplings tight.  With hyperplanes given, d is additionally capped by
    their minimum so the point is feasible in the relaxation as well.
    """
    values: dict[str, float] = {}
    for layer in range(1, catalog.n_layers + 1):
        for m, t in catalog.choices_at(layer):
            values[x_name(layer, m, t)] = 1.0 if design[layer - 1] == (m, t) else 0.0
    for li, wl in enumerate(catalog.spectrum.wavelengths):
        mats = [catalog.matrix(m, t, wl) for m, t in design]
        running: list[StructuredMatrix] = [chain_product(mats[:k]) for k in range(len(design) + 1)]
        for layer in range(1, catalog.n_layers + 1):
            u_prev = running[layer - 1].entries()
            for m, t in catalog.choices_at(layer):
                chosen = design[layer - 1] == (m, t)
                for e, tag in enumerate(ENTRY_TAGS):
                    values[v_name(li, layer, m, t, tag)] = u_prev[e] if chosen else 0.0
        w = running[-1]
        for e, tag in enumerate(ENTRY_TAGS):
            values[w_name(li, tag)] = w.entries()[e]
        sub = catalog.substrate_indices[li]
        d = denominator_D(w, sub)
        if overapproximators is not None:
            x = (w.a11, w.a22, w.a12, w.a21)
            d = min(d, min(h.value(x) for h in overapproximators[li]))
        values[d_name(li)] = d
        values[f_name(li)] = 4.0 * sub.re / d
    return values
