"""JSON encodings of the exact data types.

Rationals are written as decimal strings ``"p"`` or ``"p/q"``; JSON numbers
are accepted on input and read exactly (``0.3`` is ``3/10``). Decoders raise
``SchemaError`` naming the offending path.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .invariants import InvariantTuple, OrbitDatum
from .lattice import AntisymmetricForm, SaturatedSublattice
from .models import DelzantConstructionData, ProductModel
from .moser import InvariantForm, Mode, MoserReport, PeriodicCoefficient
from .polytope import HalfSpace, Polytope


# the pencil check expands Pfaffians by rows, which is factorial in n
MAX_HALF_DIM = 6


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


def loads(text: str) -> Any:
    """``json.loads`` reading every non-integer number as an exact Fraction."""
    return json.loads(text, parse_float=Fraction)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# scalars


def q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_q(x, path: str) -> Fraction:
    if isinstance(x, bool):
        raise SchemaError(path, "expected a rational, got a boolean")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(path, f"cannot read {x!r} as a rational") from None
    raise SchemaError(path, f"expected a rational, got {type(x).__name__}")


def parse_int(x, path: str) -> int:
    if isinstance(x, bool):
        raise SchemaError(path, "expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, (str, Fraction)):
        v = parse_q(x, path)
        if v.denominator == 1:
            return int(v)
    raise SchemaError(path, f"expected an integer, got {x!r}")


def _list(x, path: str) -> list:
    if not isinstance(x, list):
        raise SchemaError(path, f"expected an array, got {type(x).__name__}")
    return x


def _obj(x, path: str, required: tuple[str, ...] = ()) -> dict:
    if not isinstance(x, dict):
        raise SchemaError(path, f"expected an object, got {type(x).__name__}")
    for key in required:
        if key not in x:
            raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    return x


def _join(path: str, key) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _int_vector(x, path: str) -> tuple[int, ...]:
    return tuple(parse_int(v, _join(path, i)) for i, v in enumerate(_list(x, path)))


def _q_vector(x, path: str) -> tuple[Fraction, ...]:
    return tuple(parse_q(v, _join(path, i)) for i, v in enumerate(_list(x, path)))


def _guard(path: str, fn, *args):
    """Turn constructor ValueErrors into SchemaErrors at ``path``."""
    try:
        return fn(*args)
    except SchemaError:
        raise
    except (ValueError, TypeError) as exc:
        raise SchemaError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# lattice data


def form_to_json(sigma: AntisymmetricForm) -> list:
    return [[q(x) for x in row] for row in sigma.entries]


def form_from_json(x, path: str = "sigma") -> AntisymmetricForm:
    rows = [_q_vector(r, _join(path, i)) for i, r in enumerate(_list(x, path))]
    return _guard(path, AntisymmetricForm, tuple(rows))


def sublattice_to_json(L: SaturatedSublattice) -> dict:
    return {"ambient": L.ambient, "basis": [list(v) for v in L.basis]}


def sublattice_from_json(x, path: str = "t_h") -> SaturatedSublattice:
    x = _obj(x, path, ("ambient", "basis"))
    ambient = parse_int(x["ambient"], _join(path, "ambient"))
    basis = [_int_vector(v, _join(_join(path, "basis"), i)) for i, v in enumerate(_list(x["basis"], _join(path, "basis")))]
    return _guard(path, SaturatedSublattice, ambient, tuple(basis))


# ---------------------------------------------------------------------------
# polytopes


def polytope_to_json(P: Polytope) -> dict:
    try:
        P = P.canonical()
    except ValueError:
        pass
    return {"dim": P.dim, "facets": [{"normal": list(h.normal), "offset": q(h.offset)} for h in P.facets]}


def polytope_from_json(x, path: str = "delta") -> Polytope:
    x = _obj(x, path, ("dim", "facets"))
    dim = parse_int(x["dim"], _join(path, "dim"))
    facets = []
    for i, f in enumerate(_list(x["facets"], _join(path, "facets"))):
        fp = _join(_join(path, "facets"), i)
        f = _obj(f, fp, ("normal", "offset"))
        normal = _int_vector(f["normal"], _join(fp, "normal"))
        if len(normal) != dim:
            raise SchemaError(_join(fp, "normal"), f"expected {dim} entries, got {len(normal)}")
        facets.append(_guard(fp, HalfSpace, normal, parse_q(f["offset"], _join(fp, "offset"))))
    return Polytope(dim, tuple(facets))


# ---------------------------------------------------------------------------
# classification data


def orbit_to_json(d: OrbitDatum) -> dict:
    return {"dim_M": d.dim_M, "dim_T": d.dim_T, "dim_stabilizer": d.dim_stabilizer}


def orbit_from_json(x, path: str = "") -> OrbitDatum:
    """Decode an orbit datum; ``SliceBoundViolated`` propagates unchanged."""
    x = _obj(x, path, ("dim_M", "dim_T", "dim_stabilizer"))
    args = [parse_int(x[k], _join(path, k)) for k in ("dim_M", "dim_T", "dim_stabilizer")]
    return OrbitDatum(*args)


def tuple_to_json(t: InvariantTuple) -> dict:
    return {
        "dim_T": t.dim_T,
        "sigma": form_to_json(t.sigma),
        "t_h": sublattice_to_json(t.t_h),
        "delta": polytope_to_json(t.delta),
        "P": [[q(x) for x in g] for g in t.p_generators],
        "c": [[[_int_or_q(x) for x in v] for v in row] for row in t.c_values],
        "tau": [[q(x) for x in v] for v in t.tau],
    }


def _int_or_q(x: Fraction):
    return int(x) if x.denominator == 1 else q(x)


def tuple_from_json(x, path: str = "") -> InvariantTuple:
    x = _obj(x, path, ("sigma", "t_h", "delta"))
    sigma = form_from_json(x["sigma"], _join(path, "sigma"))
    if "dim_T" in x and parse_int(x["dim_T"], _join(path, "dim_T")) != sigma.dim:
        raise SchemaError(_join(path, "dim_T"), f"does not match sigma, which is {sigma.dim}x{sigma.dim}")
    t_h = sublattice_from_json(x["t_h"], _join(path, "t_h"))
    delta = polytope_from_json(x["delta"], _join(path, "delta"))
    P = [_q_vector(g, _join(_join(path, "P"), i)) for i, g in enumerate(_list(x.get("P", []), _join(path, "P")))]
    c = [
        [_q_vector(v, f"{_join(path, 'c')}[{i}][{j}]") for j, v in enumerate(_list(row, f"{_join(path, 'c')}[{i}]"))]
        for i, row in enumerate(_list(x.get("c", []), _join(path, "c")))
    ]
    tau = [_q_vector(v, _join(_join(path, "tau"), i)) for i, v in enumerate(_list(x.get("tau", []), _join(path, "tau")))]
    return InvariantTuple(sigma, t_h, delta, tuple(P), tuple(map(tuple, c)), tuple(tau))


# ---------------------------------------------------------------------------
# models


def model_to_json(m: ProductModel) -> dict:
    tf = m.toric_factor
    return {
        "dim_T": m.dim_T,
        "manifold_dimension": m.manifold_dimension,
        "toric_factor": {
            "dim": tf.dim,
            "normals": [list(u) for u in tf.normals],
            "offsets": [q(x) for x in tf.offsets],
            "facet_kernel": sublattice_to_json(tf.kernel),
        },
        "hamiltonian": sublattice_to_json(m.hamiltonian),
        "complement": [list(v) for v in m.complement],
        "omega": form_to_json(m.omega),
        "acting": sublattice_to_json(m.acting),
        "acting_codimension": m.acting_codimension,
    }


def model_from_json(x, path: str = "") -> ProductModel:
    x = _obj(x, path, ("dim_T", "toric_factor", "hamiltonian", "complement", "omega", "acting"))
    tp = _join(path, "toric_factor")
    tf = _obj(x["toric_factor"], tp, ("dim", "normals", "offsets"))
    toric = _guard(
        tp,
        DelzantConstructionData,
        parse_int(tf["dim"], _join(tp, "dim")),
        tuple(_int_vector(u, f"{tp}.normals[{i}]") for i, u in enumerate(_list(tf["normals"], _join(tp, "normals")))),
        _q_vector(tf["offsets"], _join(tp, "offsets")),
    )
    comp = tuple(
        _int_vector(v, f"{_join(path, 'complement')}[{i}]")
        for i, v in enumerate(_list(x["complement"], _join(path, "complement")))
    )
    model = ProductModel(
        dim_T=parse_int(x["dim_T"], _join(path, "dim_T")),
        toric_factor=toric,
        hamiltonian=sublattice_from_json(x["hamiltonian"], _join(path, "hamiltonian")),
        complement=comp,
        omega=form_from_json(x["omega"], _join(path, "omega")),
        acting=sublattice_from_json(x["acting"], _join(path, "acting")),
    )
    _guard(path, model.check)
    return model


# ---------------------------------------------------------------------------
# Moser forms


def coefficient_to_json(f: PeriodicCoefficient) -> list:
    return [{"freq": m.freq, "cos": q(m.cos), "sin": q(m.sin)} for m in f.modes]


def coefficient_from_json(x, path: str) -> PeriodicCoefficient:
    modes = []
    for i, m in enumerate(_list(x, path)):
        mp = _join(path, i)
        m = _obj(m, mp, ("freq",))
        freq = parse_int(m["freq"], _join(mp, "freq"))
        if freq < 0:
            raise SchemaError(_join(mp, "freq"), "frequencies must be nonnegative")
        modes.append(Mode(freq, parse_q(m.get("cos", 0), _join(mp, "cos")), parse_q(m.get("sin", 0), _join(mp, "sin"))))
    return PeriodicCoefficient(tuple(modes))


def moser_form_to_json(w: InvariantForm) -> dict:
    return {
        "n": w.n,
        "constants": {f"{i + 1},{j + 1}": q(v) for (i, j), v in w.constants.items()},
        "coeffs": [{"i": i + 1, "modes": coefficient_to_json(f)} for i, f in enumerate(w.coeffs)],
    }


def moser_form_from_json(x, path: str = "") -> InvariantForm:
    x = _obj(x, path, ("n", "coeffs"))
    n = parse_int(x["n"], _join(path, "n"))
    if not 1 <= n <= MAX_HALF_DIM:
        raise SchemaError(_join(path, "n"), f"must lie in 1..{MAX_HALF_DIM}")
    m = 2 * n - 1
    consts = {}
    cp = _join(path, "constants")
    for key, v in _obj(x.get("constants", {}), cp).items():
        try:
            i, j = (int(k) for k in key.split(","))
        except ValueError:
            raise SchemaError(_join(cp, key), "keys must look like 'i,j'") from None
        if not 1 <= i < j <= m:
            raise SchemaError(_join(cp, key), f"need 1 <= i < j <= {m}")
        consts[(i - 1, j - 1)] = parse_q(v, _join(cp, key))
    coeffs = [PeriodicCoefficient()] * m
    seen = set()
    for k, entry in enumerate(_list(x["coeffs"], _join(path, "coeffs"))):
        ep = f"{_join(path, 'coeffs')}[{k}]"
        entry = _obj(entry, ep, ("i", "modes"))
        i = parse_int(entry["i"], _join(ep, "i"))
        if not 1 <= i <= m or i in seen:
            raise SchemaError(_join(ep, "i"), f"index must be unique and in 1..{m}")
        seen.add(i)
        coeffs[i - 1] = coefficient_from_json(entry["modes"], _join(ep, "modes"))
    return InvariantForm(n, consts, tuple(coeffs))


def moser_report_to_json(r: MoserReport) -> dict:
    return {
        "passed": r.passed,
        "n": r.n,
        "averaged": [q(a) for a in r.averaged],
        "b": [{"i": i + 1, "two_pi_power": bi.scale, "modes": coefficient_to_json(bi)} for i, bi in enumerate(r.b)],
        "exact_primitive": r.exact_primitive,
        "min_pencil_pfaffian": r.min_pencil_pfaffian,
        "flow_pullback_error": r.flow_pullback_error,
        "equivariance_error": r.equivariance_error,
        "steps": r.steps,
        "samples": r.samples,
        "grid_t": r.grid_t,
        "grid_x": r.grid_x,
        "tolerance": r.tolerance,
        "failures": list(r.failures),
    }
