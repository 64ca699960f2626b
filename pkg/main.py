"""
Command-line Entry Point
Generate states, run PPT checks, extract canonical forms, certify
separability and verify certificates
"""
from typing import List, Optional
import argparse
import logging
import sys

from pythonjsonlogger import jsonlogger

from config import settings
from exceptions import SeparabilityError, StateFileError
from models import GenSpec, StateKind, TriDims
from canonical.canonical_form import extract_canonical, find_full_rank_pivot
from data.state_files import (
    decomposition_from_file, load_certificate, load_state, save_canonical,
    save_certificate, save_state
)
from decompose.certifier import CertificationPipeline
from decompose.decomposer import verify_decomposition
from kernel.kernel_search import find_product_kernel_vector
from ppt.ppt_support import ppt_check
from statezoo.generators import generate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_REFUSED = 2
EXIT_IO = 3

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: str, fmt: str = "text", log_file: Optional[str] = None) -> None:
    """Configure the root logger once per invocation; output goes to stderr"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    if fmt == "json":
        formatter = jsonlogger.JsonFormatter('%(asctime)s %(name)s %(levelname)s %(message)s')
    else:
        formatter = logging.Formatter(LOG_FORMAT)
    for handler in handlers:
        handler.setFormatter(formatter)
    logging.basicConfig(level=level.upper(), handlers=handlers, force=True)


def _num(value: float) -> str:
    return f"{value:.17g}"


def _vector(v) -> str:
    return "[" + ", ".join(f"{_num(z.real)}{'+' if z.imag >= 0 else '-'}{_num(abs(z.imag))}j" for z in v) + "]"


# Subcommands
def cmd_gen(args: argparse.Namespace) -> int:
    spec = GenSpec(
        kind=StateKind(args.kind),
        dims=TriDims.parse(args.dims),
        rank=args.rank,
        seed=args.seed,
        mixing=args.p
    )
    rho, _ = generate(spec)
    save_state(args.output, rho, seed=args.seed, kind=spec.kind.value)
    print(f"wrote {spec.kind.value} state {spec.dims} seed={args.seed} to {args.output}")
    return EXIT_OK


def cmd_ppt(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    report = ppt_check(rho, tol=args.tol)
    print(f"plain min eigenvalue: {_num(report.plain_min_eigenvalue)}")
    for label, value in report.min_eigenvalues.items():
        print(f"t_{label} min eigenvalue: {_num(value)}")
    print(f"verdict: {report.verdict.value}")
    return EXIT_OK if report.is_ppt else EXIT_NEGATIVE


def cmd_canon(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    pivot = find_full_rank_pivot(rho, seed=args.seed)
    cf, residuals = extract_canonical(rho, pivot=pivot)
    save_canonical(args.output, cf, residuals)
    print(f"max block residual: {_num(residuals.max_block_residual)}")
    for name, value in residuals.commutator_norms.items():
        print(f"{name}: {_num(value)}")
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    certificate = CertificationPipeline(seed=args.seed).certify(rho)
    save_certificate(args.output, certificate)
    print(f"terms: {len(certificate.decomposition.terms)}")
    print(f"reconstruction residual: {_num(certificate.reconstruction_residual)}")
    print(f"relative residual: {_num(certificate.relative_residual)}")
    if certificate.pruned_terms:
        print(f"pruned terms: {certificate.pruned_terms}")
    print(f"verified: {certificate.verified}")
    return EXIT_OK if certificate.verified else EXIT_NEGATIVE


def cmd_kernel_vector(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    result = find_product_kernel_vector(rho, seed=args.seed)
    print(f"strategy: {result.strategy}")
    print(f"e: {_vector(result.e)}")
    print(f"f: {_vector(result.f)}")
    print(f"g: {_vector(result.g)}")
    print(f"residual: {_num(result.residual)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    payload = load_certificate(args.certificate)
    report = verify_decomposition(rho, decomposition_from_file(payload), tol=args.tol)
    print(f"residual: {_num(report.residual)}")
    for label, value in report.marginal_residuals.items():
        print(f"marginal {label}: {_num(value)}")
    print(f"passed: {report.passed}")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppt-certify", description=settings.app_name)
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument("--log-format", choices=["text", "json"], default=settings.log_format)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded test state")
    gen.add_argument("kind", choices=[kind.value for kind in StateKind])
    gen.add_argument("--dims", required=True, help="dims as AxBxC, e.g. 2x3x4")
    gen.add_argument("--rank", type=int, default=None)
    gen.add_argument("--seed", type=int, default=settings.default_seed)
    gen.add_argument("--p", type=float, default=None, help="mixing parameter for npt states")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(handler=cmd_gen)

    ppt = sub.add_parser("ppt", help="partial-transpose report")
    ppt.add_argument("state")
    ppt.add_argument("--tol", type=float, default=None)
    ppt.set_defaults(handler=cmd_ppt)

    canon = sub.add_parser("canon", help="extract the canonical form")
    canon.add_argument("state")
    canon.add_argument("--seed", type=int, default=settings.default_seed)
    canon.add_argument("-o", "--output", required=True)
    canon.set_defaults(handler=cmd_canon)

    decompose = sub.add_parser("decompose", help="certify separability of a rank-N PPT state")
    decompose.add_argument("state")
    decompose.add_argument("--seed", type=int, default=settings.default_seed)
    decompose.add_argument("-o", "--output", required=True)
    decompose.set_defaults(handler=cmd_decompose)

    kernel = sub.add_parser("kernel-vector", help="find a product vector in the kernel")
    kernel.add_argument("state")
    kernel.add_argument("--seed", type=int, default=settings.default_seed)
    kernel.set_defaults(handler=cmd_kernel_vector)

    verify = sub.add_parser("verify", help="recompute a certificate's residual")
    verify.add_argument("state")
    verify.add_argument("certificate")
    verify.add_argument("--tol", type=float, default=None)
    verify.set_defaults(handler=cmd_verify)
    return parser


def run_command(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv and run one subcommand

    Returns:
        0 success / PPT / verified, 1 negative verdict, 2 refusal with the
        error class name, 3 file errors
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format, settings.log_file)
    try:
        return args.handler(args)
    except StateFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except SeparabilityError as e:
        print(f"refused: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
