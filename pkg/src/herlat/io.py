"""JSON formats for instances (herlat-instance-1) and certificates (herlat-cert-1).

Rationals are written as bare integers or "p/q" strings.  Integers that can
outgrow 64 bits (index, eta, discriminants) are decimal strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import Algebra, AlgebraKind
from .bounds import PowerBound
from .errors import HerlatError, MalformedInput
from .hermitian import Instance
from .reduction import ReductionCertificate

INSTANCE_FORMAT = "herlat-instance-1"
CERT_FORMAT = "herlat-cert-1"
BOUND_KEYS = ("index", "psi", "index_discL", "psi_discL")


def rat_out(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_in(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise MalformedInput(f"{where}: expected a rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise MalformedInput(f"{where}: expected an integer or 'p/q' string, got {x!r}")


def int_in(x, where: str) -> int:
    v = rat_in(x, where)
    if v.denominator != 1:
        raise MalformedInput(f"{where}: expected an integer, got {x!r}")
    return int(v)


def _matrix_in(M, where: str, conv=rat_in) -> list[list]:
    if not isinstance(M, list) or not all(isinstance(r, list) for r in M):
        raise MalformedInput(f"{where}: expected a list of rows")
    return [[conv(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(M)]


def _vector_in(v, where: str, conv=rat_in) -> list:
    if not isinstance(v, list):
        raise MalformedInput(f"{where}: expected a list")
    return [conv(x, f"{where}[{k}]") for k, x in enumerate(v)]


def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedInput(f"{where}: missing field {key!r}")
    return obj[key]


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _loads(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")


# -- instances ------------------------------------------------------------

def instance_to_json(inst: Instance) -> dict:
    A = inst.algebra
    alg: dict[str, Any] = {"type": A.kind.value, "minpoly": list(A.field.minpoly)}
    if A.kind is AlgebraKind.TYPE_II:
        alg["a"] = [rat_out(c) for c in A.a]
        alg["b"] = [rat_out(c) for c in A.b]
    names = ("t",) if A.kind is AlgebraKind.TYPE_I else ("t", "i", "j")
    return {
        "format": INSTANCE_FORMAT,
        "algebra": alg,
        "action": {k: [[rat_out(x) for x in r] for r in inst.action[k]] for k in names},
        "phi": [[int(x) for x in r] for r in inst.phi],
        "lattice": [[rat_out(x) for x in r] for r in inst.lattice],
    }


def instance_from_json(obj: dict) -> Instance:
    if _get(obj, "format", "instance") != INSTANCE_FORMAT:
        raise MalformedInput(f"instance.format: expected {INSTANCE_FORMAT!r}")
    alg = _get(obj, "algebra", "instance")
    kind = _get(alg, "type", "algebra")
    minpoly = _vector_in(_get(alg, "minpoly", "algebra"), "algebra.minpoly", int_in)
    try:
        if kind == "I":
            A = Algebra.type_i(minpoly)
        elif kind == "II":
            a = _vector_in(_get(alg, "a", "algebra"), "algebra.a")
            b = _vector_in(_get(alg, "b", "algebra"), "algebra.b")
            A = Algebra.type_ii(minpoly, a, b)
        else:
            raise MalformedInput(f"algebra.type: expected 'I' or 'II', got {kind!r}")
    except MalformedInput:
        raise
    except HerlatError as exc:
        raise MalformedInput(f"algebra: {exc}") from exc
    act = _get(obj, "action", "instance")
    names = ("t",) if A.kind is AlgebraKind.TYPE_I else ("t", "i", "j")
    action = {k: _matrix_in(_get(act, k, "action"), f"action.{k}") for k in names}
    phi = _matrix_in(_get(obj, "phi", "instance"), "phi", int_in)
    lattice = _matrix_in(_get(obj, "lattice", "instance"), "lattice")
    try:
        return Instance(A, action, phi, lattice)
    except HerlatError as exc:
        raise MalformedInput(f"instance: {exc}") from exc
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"instance: inconsistent shapes ({exc})") from exc


def dump_instance(inst: Instance) -> str:
    return _dumps(instance_to_json(inst))


def load_instance(text: str) -> Instance:
    return instance_from_json(_loads(text, "instance"))


def read_instance(path) -> Instance:
    return load_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(dump_instance(inst), encoding="utf-8")


# -- certificates ---------------------------------------------------------

def bound_to_json(b: PowerBound) -> list:
    return [[rat_out(base), rat_out(exp)] for base, exp in b.factors]


def bound_from_json(obj, where: str) -> PowerBound:
    if not isinstance(obj, list):
        raise MalformedInput(f"{where}: expected a list of [base, exponent] pairs")
    pairs = []
    for k, p in enumerate(obj):
        if not isinstance(p, list) or len(p) != 2:
            raise MalformedInput(f"{where}[{k}]: expected a [base, exponent] pair")
        base, exp = rat_in(p[0], f"{where}[{k}][0]"), rat_in(p[1], f"{where}[{k}][1]")
        if base <= 0:
            raise MalformedInput(f"{where}[{k}][0]: base must be positive")
        pairs.append((base, exp))
    return PowerBound.of(pairs)


def cert_to_json(cert: ReductionCertificate) -> dict:
    return {
        "format": CERT_FORMAT,
        "basis": [[int(x) for x in v] for v in cert.basis],
        "case_trace": [{"case": s["case"], "i": s["i"], "j": s["j"]} for s in cert.case_trace],
        "index": str(cert.index),
        "d_gram": [[[rat_out(c) for c in x] for x in row] for row in cert.d_gram],
        "norm_sq": [[str(Fraction(x)) for x in row] for row in cert.norm_sq],
        "eta_used": str(cert.eta_used),
        "disc_R": str(cert.disc_R),
        "disc_L": str(cert.disc_L),
        "bounds": {k: bound_to_json(cert.bounds[k]) for k in BOUND_KEYS},
    }


def cert_from_json(obj: dict) -> ReductionCertificate:
    if _get(obj, "format", "certificate") != CERT_FORMAT:
        raise MalformedInput(f"certificate.format: expected {CERT_FORMAT!r}")
    trace = _get(obj, "case_trace", "certificate")
    if not isinstance(trace, list):
        raise MalformedInput("case_trace: expected a list")
    steps = []
    for k, s in enumerate(trace):
        case = _get(s, "case", f"case_trace[{k}]")
        if case not in ("a", "b", "c"):
            raise MalformedInput(f"case_trace[{k}].case: expected a, b or c")
        steps.append({"case": case, "i": int_in(_get(s, "i", f"case_trace[{k}]"), f"case_trace[{k}].i"),
                      "j": int_in(_get(s, "j", f"case_trace[{k}]"), f"case_trace[{k}].j")})
    d_gram = _get(obj, "d_gram", "certificate")
    if not isinstance(d_gram, list) or not all(isinstance(r, list) for r in d_gram):
        raise MalformedInput("d_gram: expected a matrix of algebra elements")
    gram = [[tuple(_vector_in(x, f"d_gram[{i}][{j}]")) for j, x in enumerate(r)]
            for i, r in enumerate(d_gram)]
    bounds_obj = _get(obj, "bounds", "certificate")
    bounds = {k: bound_from_json(_get(bounds_obj, k, "bounds"), f"bounds.{k}") for k in BOUND_KEYS}
    return ReductionCertificate(
        basis=_matrix_in(_get(obj, "basis", "certificate"), "basis", int_in),
        case_trace=steps,
        index=int_in(_get(obj, "index", "certificate"), "index"),
        d_gram=gram,
        norm_sq=_matrix_in(_get(obj, "norm_sq", "certificate"), "norm_sq"),
        eta_used=int_in(_get(obj, "eta_used", "certificate"), "eta_used"),
        disc_R=int_in(_get(obj, "disc_R", "certificate"), "disc_R"),
        disc_L=int_in(_get(obj, "disc_L", "certificate"), "disc_L"),
        bounds=bounds,
    )


def dump_cert(cert: ReductionCertificate) -> str:
    return _dumps(cert_to_json(cert))


def load_cert(text: str) -> ReductionCertificate:
    return cert_from_json(_loads(text, "certificate"))


def read_cert(path) -> ReductionCertificate:
    return load_cert(Path(path).read_text(encoding="utf-8"))


def write_cert(cert: ReductionCertificate, path) -> None:
    Path(path).write_text(dump_cert(cert), encoding="utf-8")
