"""LP-format text export/import and solution-file decoding.

The emitted dialect is the common solver LP format: `Maximize` /
`Subject To` / `Bounds` / `Binaries` / `End`, quadratic parts in square
brackets with `*` and `^ 2` terms.  Every coefficient is written with 17
significant digits, so a parse-back reproduces the exact doubles and a
re-emission is byte-identical.  Long expressions wrap onto continuation
lines indented by two spaces; item lines are indented by one.

Solution files are plain `name value` pairs, one per line.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .errors import InfeasibleAssignment, ParseError
from .materials import Catalog
from .model import (
    LinearConstraint,
    Model,
    Objective,
    QuadraticConstraint,
    Variable,
    x_name,
)

_MAX_LINE = 200


def _num(x: float) -> str:
    return format(x, ".17g")


def _wrap(tokens: Iterable[str], first_prefix: str) -> list[str]:
    lines: list[str] = []
    current = first_prefix
    for tok in tokens:
        if len(current) + len(tok) + 1 > _MAX_LINE and current.strip():
            lines.append(current)
            current = "  " + tok
        else:
            current = current + " " + tok if current.strip() else current + tok
    lines.append(current)
    return lines


def _linear_tokens(coeffs: dict[str, float], constant: float | None = None) -> list[str]:
    toks: list[str] = []
    for name, c in coeffs.items():
        sign = "-" if c < 0 else "+"
        toks.extend([sign, _num(abs(c)), name])
    if constant is not None and constant != 0.0:
        sign = "-" if constant < 0 else "+"
        toks.extend([sign, _num(abs(constant))])
    if not toks:
        toks = ["+", "0", ""][:2]
    if toks[0] == "+":
        toks = toks[1:]
    return toks


def _quad_tokens(quad: dict[tuple[str, str], float]) -> list[str]:
    toks: list[str] = ["["]
    first = True
    for (n1, n2), c in quad.items():
        sign = "-" if c < 0 else "+"
        if first and sign == "+":
            group = [_num(abs(c))]
        else:
            group = [sign, _num(abs(c))]
        if n1 == n2:
            group.extend([n1, "^", "2"])
        else:
            group.extend([n1, "*", n2])
        toks.extend(group)
        first = False
    toks.append("]")
    return toks


def export_lp(model: Model, path: str | Path) -> None:
    model.validate()
    lines: list[str] = [f"\\ Model: {model.name}"]
    lines.extend(f"\\ {c}" for c in model.header_comments)
    empty = not (
        model.variables
        or model.linear
        or model.quadratic
        or model.objective.coeffs
        or model.objective.constant
    )
    if not empty:
        lines.append("Maximize" if model.objective.sense == "max" else "Minimize")
        obj_toks = _linear_tokens(model.objective.coeffs, model.objective.constant)
        lines.extend(_wrap(obj_toks, " obj:"))
        if model.linear or model.quadratic:
            lines.append("Subject To")
        for c in model.linear:
            toks = _linear_tokens(c.coeffs) + [c.sense, _num(c.rhs)]
            lines.extend(_wrap(toks, f" {c.name}:"))
        for q in model.quadratic:
            toks = []
            if q.lin:
                toks.extend(_linear_tokens(q.lin))
                toks.append("+")
            toks.extend(_quad_tokens(q.quad))
            toks.extend([q.sense, _num(q.rhs)])
            lines.extend(_wrap(toks, f" {q.name}:"))
        continuous = [v for v in model.variables if v.kind != "binary"]
        if continuous:
            lines.append("Bounds")
            for v in continuous:
                lines.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
        binaries = [v.name for v in model.variables if v.kind == "binary"]
        if binaries:
            lines.append("Binaries")
            lines.extend(_wrap(binaries, " "))
    lines.append("End")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Parsing


def _logical_lines(text: str) -> tuple[list[str], str | None, list[str]]:
    """Split into logical item lines, the model name, and header comments.

    Two-space-indented lines continue the previous item; leading comment
    lines (before any section) are the exported header.
    """
    out: list[str] = []
    header: list[str] = []
    name: str | None = None
    for raw in text.splitlines():
        if raw.startswith("\\"):
            if out:
                continue
            content = raw[1:].strip()
            if name is None and content.startswith("Model:"):
                name = content.split(":", 1)[1].strip()
            else:
                header.append(content)
            continue
        if not raw.strip():
            continue
        if raw.startswith("  ") and out:
            out[-1] += " " + raw.strip()
        else:
            out.append(raw.rstrip())
    return out, name, header


def _parse_terms(tokens: list[str]) -> tuple[dict[str, float], dict[tuple[str, str], float], float]:
    """Signed term groups -> (linear coeffs, quadratic coeffs, constant)."""
    lin: dict[str, float] = {}
    quad: dict[tuple[str, str], float] = {}
    const = 0.0
    sign = 1.0
    i = 0
    in_quad = False
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
            i += 1
            continue
        if tok == "-":
            sign = -1.0
            i += 1
            continue
        if tok == "[":
            in_quad = True
            sign = 1.0
            i += 1
            continue
        if tok == "]":
            in_quad = False
            sign = 1.0
            i += 1
            continue
        try:
            coef = sign * float(tok)
        except ValueError:
            raise ParseError(f"expected a coefficient, got {tok!r}")
        if i + 1 < len(tokens) and tokens[i + 1] not in {"+", "-", "]", "["} and not _is_number(tokens[i + 1]):
            name = tokens[i + 1]
            if in_quad:
                if i + 3 < len(tokens) and tokens[i + 2] == "*":
                    quad[(name, tokens[i + 3])] = quad.get((name, tokens[i + 3]), 0.0) + coef
                    i += 4
                elif i + 3 < len(tokens) and tokens[i + 2] == "^" and tokens[i + 3] == "2":
                    quad[(name, name)] = quad.get((name, name), 0.0) + coef
                    i += 4
                else:
                    raise ParseError(f"malformed quadratic term near {name!r}")
            else:
                lin[name] = lin.get(name, 0.0) + coef
                i += 2
        else:
            const += coef
            i += 1
        sign = 1.0
    return lin, quad, const


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def import_lp(path: str | Path) -> Model:
    """Parse a file previously written by :func:`export_lp`."""
    text = Path(path).read_text(encoding="utf-8")
    lines, name, header = _logical_lines(text)
    model = Model(name=name or Path(path).stem, header_comments=header)
    section = None
    sense = "max"
    declared: dict[str, Variable] = {}
    bounds_order: list[str] = []
    binaries_order: list[str] = []

    def ensure_var(name: str) -> None:
        if name not in declared:
            declared[name] = Variable(name, float("-inf"), float("inf"))

    for line in lines:
        stripped = line.strip()
        lowered = stripped.lower()
        if lowered in {"maximize", "minimize"}:
            section = "objective"
            sense = "max" if lowered == "maximize" else "min"
            continue
        if lowered == "subject to":
            section = "constraints"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered == "binaries":
            section = "binaries"
            continue
        if lowered == "end":
            break
        if section == "objective":
            body = stripped.split(":", 1)[1] if ":" in stripped else stripped
            lin, quad, const = _parse_terms(body.split())
            if quad:
                raise ParseError("quadratic objective not supported")
            for n in lin:
                ensure_var(n)
            model.objective = Objective(coeffs=lin, constant=const, sense=sense)
        elif section == "constraints":
            if ":" not in stripped:
                raise ParseError(f"constraint line without name: {stripped!r}")
            name, body = stripped.split(":", 1)
            tokens = body.split()
            sense_pos = max(
                (tokens.index(s) for s in ("<=", ">=", "=") if s in tokens),
                default=-1,
            )
            if sense_pos < 0:
                raise ParseError(f"{name}: no constraint sense")
            csense = tokens[sense_pos]
            rhs = float(tokens[sense_pos + 1])
            lin, quad, const = _parse_terms(tokens[:sense_pos])
            for n in lin:
                ensure_var(n)
            for n1, n2 in quad:
                ensure_var(n1)
                ensure_var(n2)
            if quad:
                model.quadratic.append(
                    QuadraticConstraint(name.strip(), quad, lin, csense, rhs - const)
                )
            else:
                model.linear.append(
                    LinearConstraint(name.strip(), lin, csense, rhs - const)
                )
        elif section == "bounds":
            toks = stripped.split()
            if len(toks) != 5 or toks[1] != "<=" or toks[3] != "<=":
                raise ParseError(f"unsupported bounds line: {stripped!r}")
            lo, vname, hi = float(toks[0]), toks[2], float(toks[4])
            ensure_var(vname)
            declared[vname].lower = lo
            declared[vname].upper = hi
            bounds_order.append(vname)
        elif section == "binaries":
            for vname in stripped.split():
                ensure_var(vname)
                declared[vname].kind = "binary"
                declared[vname].lower = 0.0
                declared[vname].upper = 1.0
                binaries_order.append(vname)
        else:
            raise ParseError(f"content outside any section: {stripped!r}")

    listed = bounds_order + binaries_order
    leftover = sorted(set(declared) - set(listed))
    model.variables = [declared[n] for n in listed + leftover]
    return model


def write_solution(values: dict[str, float], path: str | Path) -> None:
    lines = [f"{name} {_num(val)}" for name, val in values.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_solution(path: str | Path, catalog: Catalog) -> tuple[tuple[str, float], ...]:
    """Decode the binary block of a solution file into a design.

    Values are rounded at 0.5; exactly one choice per layer must fire.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith(("#", "\\")):
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'name value'")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    design: list[tuple[str, float]] = []
    for layer in range(1, catalog.n_layers + 1):
        fired = [
            (m, t)
            for m, t in catalog.choices_at(layer)
            if values.get(x_name(layer, m, t), 0.0) >= 0.5
        ]
        if len(fired) != 1:
            raise InfeasibleAssignment(
                f"layer {layer}: {len(fired)} choices selected, need exactly 1"
            )
        design.append(fired[0])
    return tuple(design)
