"""Command-line entry point: ``herlat gen | reduce | verify | info | selftest``."""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import io
from .algebra import Algebra, AlgebraKind
from .bounds import PowerBound, theorem_bounds
from .errors import (BoundViolation, DegenerateForm, HerlatError, InternalBoundViolation,
                     MalformedInput, ZeroDivisor)
from .instancegen import mix, standard_instance

EXIT_MALFORMED = 1
EXIT_BOUND = 2
EXIT_DEGENERATE = 3


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers, got {text!r}")


def _rats(text: str, what: str) -> list:
    from fractions import Fraction

    try:
        return [Fraction(c.strip()) for c in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{what} must be comma-separated rationals, got {text!r}")


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Reduction of lattices with a symplectic form and a D-action."""


@main.command()
@click.option("--type", "kind", type=click.Choice(["I", "II"]), required=True)
@click.option("--minpoly", required=True, help="Coefficients c0,c1,...,1 of the monic minimal polynomial.")
@click.option("--a", "a_text", default=None, help="Quaternion parameter a (F-coordinates, comma-separated).")
@click.option("--b", "b_text", default=None, help="Quaternion parameter b (F-coordinates, comma-separated).")
@click.option("--m", "m", type=int, required=True, help="D-dimension of V.")
@click.option("--mix", "steps", type=int, default=0, show_default=True, help="Number of random coordinate changes.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sublattice", default=None, help="Sublattice pass 'p,k' with p in {2,3,5}.")
@click.option("--out", "out", type=click.Path(dir_okay=False), required=True)
def gen(kind, minpoly, a_text, b_text, m, steps, seed, sublattice, out):
    """Write a generated instance file."""
    coeffs = _ints(minpoly, "--minpoly")
    sub = None
    if sublattice:
        sub = tuple(_ints(sublattice, "--sublattice"))
        if len(sub) != 2:
            raise click.BadParameter("--sublattice takes 'p,k'")
    try:
        if kind == "I":
            A = Algebra.type_i(coeffs)
        else:
            if a_text is None or b_text is None:
                raise click.BadParameter("type II needs --a and --b")
            A = Algebra.type_ii(coeffs, _rats(a_text, "--a"), _rats(b_text, "--b"))
        inst = mix(standard_instance(A, m), seed, steps, sub)
    except HerlatError as exc:
        _fail(f"{type(exc).__name__}: {exc}", EXIT_MALFORMED)
    io.write_instance(inst, out)
    click.echo(f"wrote {out} (n={inst.n}, m={inst.m})")


def _reduce_one(src: str, dst: str, eta: str, budget: int, seed: int) -> tuple[str, int, str]:
    from .reduction import reduce_full

    try:
        inst = io.read_instance(src)
        cert = reduce_full(inst, eta_mode=eta, budget=budget, seed=seed)
    except MalformedInput as exc:
        return src, EXIT_MALFORMED, str(exc)
    except (BoundViolation, InternalBoundViolation) as exc:
        return src, EXIT_BOUND, f"{type(exc).__name__}: {exc}"
    except (DegenerateForm, ZeroDivisor) as exc:
        return src, EXIT_DEGENERATE, f"{type(exc).__name__}: {exc}"
    except HerlatError as exc:
        return src, EXIT_MALFORMED, f"{type(exc).__name__}: {exc}"
    io.write_cert(cert, dst)
    return src, 0, f"index {cert.index}, cases {''.join(s['case'] for s in cert.case_trace)}"


@main.command()
@click.option("--in", "src", type=click.Path(exists=True), required=True,
              help="Instance file, or a directory of instance files.")
@click.option("--out", "dst", type=click.Path(), required=True,
              help="Certificate file, or a directory when --in is a directory.")
@click.option("--eta", type=click.Choice(["min", "discL"]), default="min", show_default=True)
@click.option("--budget", type=int, default=10**7, show_default=True, help="Enumeration node budget.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel workers for a directory.")
def reduce(src, dst, eta, budget, seed, jobs):
    """Reduce an instance and write its certificate."""
    if not Path(src).is_dir():
        name, code, msg = _reduce_one(src, dst, eta, budget, seed)
        if code:
            _fail(msg, code)
        click.echo(f"wrote {dst}: {msg}")
        return
    out_dir = Path(dst)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(p for p in Path(src).glob("*.json"))
    tasks = [(str(p), str(out_dir / f"{p.stem}.cert.json"), eta, budget, seed) for p in files]
    worst = 0
    with ProcessPoolExecutor(max_workers=max(1, jobs)) as pool:
        for name, code, msg in pool.map(_reduce_one, *zip(*tasks)) if tasks else []:
            click.echo(f"{'ok ' if code == 0 else 'ERR'} {name}: {msg}")
            worst = max(worst, code)
    sys.exit(worst)


@main.command()
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--cert", type=click.Path(exists=True, dir_okay=False), required=True)
def verify(src, cert):
    """Check a certificate against its instance from scratch."""
    from .verify import verify_certificate

    try:
        inst = io.read_instance(src)
        c = io.read_cert(cert)
    except MalformedInput as exc:
        _fail(str(exc), EXIT_MALFORMED)
    report = verify_certificate(inst, c)
    click.echo(report.render())
    if not report.ok:
        click.echo(f"FAILED: {', '.join(report.failed())}")
        sys.exit(1)
    click.echo("all checks passed")


def _render_bound(b: PowerBound) -> str:
    B, Q = b.cleared()
    return f"({B})^(1/{Q}) ~ {b.to_float():.6g}"


@main.command()
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
def info(src):
    """Print invariants of an instance and its evaluated bounds."""
    from .hermitian import adjoint_involution
    from .orders import eta_min, omega_short, order_disc, stabilizer_order

    try:
        inst = io.read_instance(src)
        inv = adjoint_involution(inst)
        R = stabilizer_order(inst)
    except MalformedInput as exc:
        _fail(str(exc), EXIT_MALFORMED)
    except HerlatError as exc:
        _fail(f"{type(exc).__name__}: {exc}", EXIT_MALFORMED)
    A = inst.algebra
    disc_R, disc_L = abs(order_disc(R)), abs(inst.disc)
    eta = eta_min(R, inv)
    click.echo(f"type {A.kind.value}  d={A.d}  e={A.e}  m={inst.m}  n={inst.n}")
    click.echo(f"|disc R| = {disc_R}")
    click.echo(f"|disc L| = {disc_L}")
    click.echo(f"eta_min = {eta}")
    if A.kind is AlgebraKind.TYPE_II:
        w = omega_short(R, inv, eta)
        click.echo(f"omega = {[io.rat_out(c) for c in w]}")
    idx, psi = theorem_bounds(A.d, A.e, inst.m, disc_R, disc_L)
    click.echo(f"index bound = {_render_bound(idx)}")
    click.echo(f"|psi| bound = {_render_bound(psi)}")


@main.command()
@click.option("--quick", is_flag=True, help="Use smaller sample sizes.")
def selftest(quick):
    """Run the acceptance criteria and print one line per criterion."""
    from .acceptance import run_all

    results = run_all(quick=quick, echo=click.echo)
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
