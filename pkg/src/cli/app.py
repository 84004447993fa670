"""Command line interface"""

import json
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from src.algebra.exact_linalg import rational_str, to_rational
from src.algebra.poly_toolkit import (
    build_delta_prime,
    delta_check,
    delta_product,
    discriminant,
    enumerate_delta,
    parse_poly,
    power_poly,
    reciprocal,
    render_poly,
    resultant,
)
from src.algebra.quaternion_core import (
    Layout,
    SigmaTuple,
    jordan_form,
    quat_jordan_nilpotent,
    quat_jordan_structure,
    sigma,
)
from src.cli.schemas import (
    JordanDataPayload,
    load_matrix,
    load_payload,
    load_quaternion_matrix,
    load_vector,
    parse_real,
    read_source,
)
from src.config import settings
from src.services import dim12_classifier, lattice_witnesses, solvmanifold_lab
from src.services.dim12_classifier import BCase, Dim12Input, V0Status, classify12
from src.services.lie_group_kernel import LatticeWitness, bock_verify, exp_group, lattice_necessary
from src.services.nilpotent_classifier import (
    HcxAAData,
    StructureKind,
    admissible,
    assemble_A,
    canonical_data,
    canonical_matrix,
    count_classes,
    identify_class,
    normalize_v0,
)
from src.utils.exceptions import HaalError, NotNilpotent, ParseError
from src.utils.logger import get_logger, setup_logger

logger = get_logger(__name__)

app = typer.Typer(name="haal", help="Hypercomplex almost abelian Lie algebra toolkit", no_args_is_help=True)
quat_app = typer.Typer(help="Quaternionic matrices", no_args_is_help=True)
nilp_app = typer.Typer(help="Nilpotent almost abelian algebras", no_args_is_help=True)
dim12_app = typer.Typer(help="12-dimensional classification", no_args_is_help=True)
poly_app = typer.Typer(help="Integer polynomials and Delta_n", no_args_is_help=True)
solv_app = typer.Typer(help="Solvmanifolds from Delta_n", no_args_is_help=True)
lattice_app = typer.Typer(help="Lattices and Bock witnesses", no_args_is_help=True)

app.add_typer(quat_app, name="quat")
app.add_typer(nilp_app, name="nilp")
app.add_typer(dim12_app, name="dim12")
app.add_typer(poly_app, name="poly")
app.add_typer(solv_app, name="solv")
app.add_typer(lattice_app, name="lattice")

_output = {"table": False}


def _default(value):
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def emit(payload: Dict[str, object]) -> None:
    """Write one result to stdout with sorted keys"""
    document = {"schema": settings.SCHEMA_VERSION, **payload}
    if _output["table"]:
        table = Table(show_header=True, header_style="bold")
        table.add_column("key")
        table.add_column("value")
        for key in sorted(document):
            value = document[key]
            text = value if isinstance(value, str) else json.dumps(value, sort_keys=True, default=_default)
            table.add_row(key, text)
        Console().print(table)
        return
    typer.echo(json.dumps(document, sort_keys=True, default=_default))


def run(action: Callable[[], Dict[str, object]]) -> None:
    """Run a verb, mapping toolkit errors to JSON and exit codes"""
    try:
        payload = action()
    except HaalError as e:
        logger.error(f"{e.code}: {e.message}")
        document = {"schema": settings.SCHEMA_VERSION, **e.to_dict()}
        typer.echo(json.dumps(document, sort_keys=True, default=_default))
        raise typer.Exit(code=e.exit_code)
    emit(payload)


def _kind(name: str) -> StructureKind:
    for kind in StructureKind:
        if kind.value.lower() == name.lower():
            return kind
    raise ParseError(f"unknown structure {name!r}, expected hypercomplex or complex", position=None)


def _blocks(text: str) -> Dict[int, int]:
    """"m:p,m:p" block sizes with multiplicities"""
    blocks: Dict[int, int] = {}
    if not text.strip():
        return blocks
    for item in text.split(","):
        try:
            size, count = item.split(":")
            blocks[int(size)] = blocks.get(int(size), 0) + int(count)
        except ValueError as e:
            raise ParseError(f"invalid block {item!r}, expected size:count", position=text.find(item)) from e
    return blocks


@app.callback()
def main_callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING, ERROR or CRITICAL"),
    table: bool = typer.Option(False, "--table", help="Render results as a table instead of JSON"),
):
    """Exact computations with hypercomplex and complex almost abelian Lie algebras"""
    setup_logger(log_level)
    _output["table"] = table


# ---------------------------------------------------------------- quat


@quat_app.command("jordan")
def quat_jordan(
    matrix: str = typer.Argument(..., help="Quaternionic matrix JSON, or a real 4q x 4q matrix payload"),
    layout: str = typer.Option("interleaved", help="Layout of a real input: interleaved or grouped"),
):
    """Quaternionic Jordan form"""

    def action():
        text = read_source(matrix)
        try:
            raw = json.loads(text)
            chosen = Layout(layout.lower())
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", position=e.pos) from e
        except ValueError as e:
            raise ParseError(f"unknown layout {layout!r}", position=None) from e
        if isinstance(raw, dict) and "rows" in raw:
            real = load_matrix(text)
            Q = sigma(real, chosen)
        else:
            real, Q = None, load_quaternion_matrix(text)
        try:
            result = quat_jordan_nilpotent(Q)
        except NotNilpotent:
            if real is None:
                raise
            blocks = quat_jordan_structure(real)
            return {
                "nilpotent": False,
                "eigen_blocks": [
                    {"factor": str(b.factor), "root": b.root, "blocks": {str(k): v for k, v in b.blocks.items()}}
                    for b in blocks
                ],
            }
        return {"nilpotent": True, "sigma": result.to_dict(), "jordan_form": jordan_form(result).to_json()}

    run(action)


# ---------------------------------------------------------------- nilp


@nilp_app.command("classify")
def nilp_classify(
    b_matrix: str = typer.Option(..., "--B", help="Matrix payload of B"),
    v0: str = typer.Option(..., "--v0", help="Vector v0"),
    kind: str = typer.Option("hypercomplex", "--kind"),
):
    """Canonical class of the nilpotent algebra with mu = 0"""

    def action():
        structure = _kind(kind)
        matrix = load_matrix(b_matrix)
        data = HcxAAData(matrix.rows // structure.beta + 1, 0, tuple(load_vector(v0)), matrix, structure)
        canonical = identify_class(data)
        return {
            "class": canonical.to_dict(),
            "step": canonical.step,
            "normalized_v0": [rational_str(x) for x in normalize_v0(data).v0],
        }

    run(action)


@nilp_app.command("canon")
def nilp_canon(
    blocks: str = typer.Option("", "--blocks", help="Block sizes m:p, e.g. 3:1,2:2"),
    s: int = typer.Option(0, "--s", help="Number of zero blocks"),
    ell: Optional[int] = typer.Option(None, "--ell", help="Index ell of A_ell; omit for N(s)"),
    kind: str = typer.Option("hypercomplex", "--kind"),
):
    """Canonical matrix N(s) or A_ell"""
    run(lambda: canonical_matrix(SigmaTuple.from_blocks(_blocks(blocks), s), ell, _kind(kind)).to_dict())


@nilp_app.command("witness")
def nilp_witness(
    blocks: str = typer.Option("", "--blocks", help="Block sizes m:p, e.g. 3:1,2:2"),
    s: int = typer.Option(0, "--s"),
    ell: Optional[int] = typer.Option(None, "--ell"),
    kind: str = typer.Option("hypercomplex", "--kind"),
):
    """Structure data (mu, v0, B) realizing a canonical class"""

    def action():
        data = canonical_data(SigmaTuple.from_blocks(_blocks(blocks), s), ell, _kind(kind))
        return {
            "n": data.n,
            "mu": rational_str(data.mu),
            "v0": [rational_str(x) for x in data.v0],
            "B": data.B.to_json(),
            "A": assemble_A(data).to_json(),
            "structure": data.kind.value,
        }

    run(action)


@nilp_app.command("admissible")
def nilp_admissible(
    jordan: str = typer.Argument(..., help='JordanData JSON {"parts": [[n, q], ...], "d": d}'),
    kind: str = typer.Option("hypercomplex", "--kind"),
):
    """Whether a nilpotent Jordan type carries the structure"""
    run(lambda: admissible(load_payload(JordanDataPayload, jordan).to_jordan_data(), _kind(kind)).to_dict())


@nilp_app.command("count")
def nilp_count(
    n: int = typer.Option(..., "--n", min=2),
    kind: str = typer.Option("hypercomplex", "--kind"),
    max_step: Optional[int] = typer.Option(None, "--max-step"),
):
    """Number of isomorphism classes in quaternionic dimension n"""
    run(lambda: count_classes(n, _kind(kind), max_step).to_dict())


# ---------------------------------------------------------------- dim12


@dim12_app.command("classify")
def dim12_classify(
    mu: str = typer.Option("0", "--mu"),
    case: str = typer.Option(..., "--case", help="B1 or B2"),
    a: str = typer.Option("0", "--a"),
    b: str = typer.Option("0", "--b"),
    c: str = typer.Option("0", "--c"),
    d: str = typer.Option("0", "--d"),
    v0: str = typer.Option("zero", "--v0", help="zero, in-image or not-in-image"),
):
    """Family s1..s18 with flags and lattice verdict"""

    def action():
        try:
            bcase, status = BCase(case.upper()), V0Status(v0.lower())
        except ValueError as e:
            raise ParseError(str(e), position=None) from e
        data = Dim12Input(
            to_rational(mu), bcase, to_rational(a), to_rational(b), to_rational(c), to_rational(d), status
        )
        return {"input": data.to_dict(), **classify12(data).to_dict()}

    run(action)


@dim12_app.command("families")
def dim12_families():
    """One member of each family with flags and lattice verdict"""

    def action():
        members = []
        for label in dim12_classifier.all_families():
            label = dim12_classifier.flags(label)
            label.lattice = dim12_classifier.lattice_verdict(label)
            members.append(label.to_dict())
        return {"families": members}

    run(action)


# ---------------------------------------------------------------- poly


@poly_app.command("delta-check")
def poly_delta_check(p: str = typer.Argument(..., help='Polynomial text such as "x^2-3x+1"')):
    """Membership in Delta_n and Delta_n'"""
    run(lambda: delta_check(parse_poly(p)).to_dict())


@poly_app.command("enumerate")
def poly_enumerate(
    n: int = typer.Option(..., "--n", min=2),
    bound: Optional[int] = typer.Option(None, "--bound", help="Coefficient bound"),
    jobs: int = typer.Option(1, "--jobs", min=1, help="Worker processes"),
):
    """All members of Delta_n with bounded coefficients"""

    def action():
        members = enumerate_delta(n, bound, jobs)
        return {
            "n": n,
            "bound": settings.ENUMERATION_BOUND if bound is None else bound,
            "count": len(members),
            "members": [render_poly(p) for p in members],
        }

    run(action)


@poly_app.command("reciprocal")
def poly_reciprocal(p: str = typer.Argument(...)):
    run(lambda: {"reciprocal": render_poly(reciprocal(parse_poly(p)))})


@poly_app.command("power")
def poly_power(p: str = typer.Argument(...), k: int = typer.Option(..., "--k")):
    """Polynomial whose roots are the k-th powers"""
    run(lambda: {"k": k, "power": render_poly(power_poly(parse_poly(p), k))})


@poly_app.command("resultant")
def poly_resultant(p: str = typer.Argument(...), q: str = typer.Argument(...)):
    run(lambda: {"resultant": resultant(parse_poly(p), parse_poly(q))})


@poly_app.command("discriminant")
def poly_discriminant(p: str = typer.Argument(...)):
    run(lambda: {"discriminant": discriminant(parse_poly(p))})


@poly_app.command("product")
def poly_product(p: str = typer.Argument(...), q: str = typer.Argument(...)):
    """pq for members of Delta without a common root"""

    def action():
        product = delta_product(parse_poly(p), parse_poly(q))
        return {"common_root": product is None, "product": None if product is None else render_poly(product)}

    run(action)


@poly_app.command("build-prime")
def poly_build_prime(n: int = typer.Option(..., "--n")):
    """An explicit element of Delta_n'"""
    run(lambda: {"n": n, "poly": render_poly(build_delta_prime(n))})


# ---------------------------------------------------------------- solv


@solv_app.command("build")
def solv_build(
    p: str = typer.Argument(...),
    kind: str = typer.Option("hypercomplex", "--kind"),
    precision: Optional[float] = typer.Option(None, "--precision", help="Root isolation width"),
):
    """Solvmanifold data of p in Delta_n"""
    run(lambda: solvmanifold_lab.build(parse_poly(p), _kind(kind), precision).to_dict())


@solv_app.command("equiv")
def solv_equiv(p: str = typer.Argument(...), q: str = typer.Argument(...)):
    """Diffeomorphism of the solvmanifolds of p and q"""
    run(lambda: {"diffeomorphic": solvmanifold_lab.diffeo_equiv(parse_poly(p), parse_poly(q))})


@solv_app.command("split")
def solv_split(p: str = typer.Argument(...), kind: str = typer.Option("hypercomplex", "--kind")):
    """Torus factor when p(1) = 0"""

    def action():
        split = solvmanifold_lab.split_torus_factor(parse_poly(p), _kind(kind))
        return {"split": None if split is None else split.to_dict()}

    run(action)


@solv_app.command("product")
def solv_product(
    p: str = typer.Argument(...), q: str = typer.Argument(...), kind: str = typer.Option("hypercomplex", "--kind")
):
    """Solvmanifold of pq as a codimension-beta submanifold"""
    run(lambda: solvmanifold_lab.product_embedding(parse_poly(p), parse_poly(q), _kind(kind)).to_dict())


# ---------------------------------------------------------------- lattice


@lattice_app.command("verify")
def lattice_verify(
    a_matrix: str = typer.Option(..., "--A", help="Matrix payload of A"),
    t0: float = typer.Option(..., "--t0"),
    e_matrix: str = typer.Option(..., "--E", help="Integer matrix payload"),
    p_matrix: Optional[str] = typer.Option(None, "--P", help="Conjugator with P^{-1} e^{t0 A} P = E"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Defaults to BOCK_TOLERANCE"),
):
    """Bock criterion check of e^{t0 A} against E"""

    def action():
        conjugator = None if p_matrix is None else load_matrix(p_matrix).to_numpy()
        witness = LatticeWitness(t0, load_matrix(e_matrix), conjugator=conjugator)
        return bock_verify(load_matrix(a_matrix), witness, tol).to_dict()

    run(action)


@lattice_app.command("necessary")
def lattice_necessary_cmd(
    mu: str = typer.Option("0", "--mu"),
    b_matrix: str = typer.Option(..., "--B", help="Matrix payload of B"),
):
    """mu = 0 and tr B = 0"""
    run(lambda: {"necessary": lattice_necessary(to_rational(mu), load_matrix(b_matrix))})


@lattice_app.command("witness")
def lattice_witness(
    family: str = typer.Option(..., "--family", help="s9, s6, s13, s2, s1, s5, p, s10 or s16"),
    k: Optional[int] = typer.Option(None, "--k"),
    m: Optional[int] = typer.Option(None, "--m"),
    kd: Optional[int] = typer.Option(None, "--kd"),
    s: Optional[int] = typer.Option(None, "--s"),
    verify: bool = typer.Option(True, "--verify/--no-verify"),
    tol: Optional[float] = typer.Option(None, "--tol"),
):
    """Explicit lattice witness of a 12-dimensional family"""

    def action():
        case = lattice_witnesses.build_witness(family, k=k, m=m, kd=kd, s=s)
        payload = case.to_dict()
        payload["report"] = case.verify(tol).to_dict() if verify else None
        return payload

    run(action)


@lattice_app.command("catalogue")
def lattice_catalogue():
    run(lambda: {"witnesses": lattice_witnesses.catalogue()})


# ---------------------------------------------------------------- exp


@app.command("exp")
def exp_cmd(
    a_matrix: str = typer.Option(..., "--A", help="Matrix payload of A"),
    t: str = typer.Option(..., "--t"),
    v: str = typer.Option(..., "--v", help="Vector as a JSON array or comma-separated"),
):
    """exp(t, v) = (t, Phi(tA) v) in the almost abelian group"""

    def action():
        values: List[object] = [parse_real(str(x)) for x in load_vector(v)]
        return exp_group(parse_real(t), values, load_matrix(a_matrix)).to_dict()

    run(action)
