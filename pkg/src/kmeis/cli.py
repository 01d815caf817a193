"""
Command-line entry point.

Every command prints CSV (tables) or JSON (reports) on stdout. Exit codes:
0 on success, 1 on a domain error (class name on stderr), 2 on a
configuration error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError
from sqlalchemy.exc import SQLAlchemyError

from kmeis.archive import RunArchive
from kmeis.cartan import CartanMatrix, is_finite_type, validate_gcm
from kmeis.config import JobConfig, load_job_config
from kmeis.eisenstein import SHELL_TABLE_HEADER, EisensteinEvaluator, ShellTable, SpectralParameter
from kmeis.errors import ConfigError, KacMoodyError
from kmeis.lattice import RootSystem, WeightVector
from kmeis.property import PropertyChecker, verify_prop42_claims, verify_prop43_claims
from kmeis.settings import LOG_LEVELS, Settings
from kmeis.special import PrecisionContext, c_infinity, rank1_sum_bound, xi_ratio, xi_ratio_threshold
from kmeis.utils import csv_table, dumps_json, format_decimal, format_rational
from kmeis.weyl import WeylGroup

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# ============================================================================
# Run context
# ============================================================================

@dataclass
class RunContext:
    """Resolved inputs for one command: flags override the job file, which overrides settings."""

    args: argparse.Namespace
    settings: Settings

    @cached_property
    def config_text(self) -> Optional[str]:
        path = getattr(self.args, "config", None)
        if not path:
            return None
        try:
            with open(path, encoding="utf-8") as handle:
                return handle.read()
        except OSError:
            return None

    @cached_property
    def job(self) -> Optional[JobConfig]:
        path = getattr(self.args, "config", None)
        return load_job_config(path) if path else None

    def require_job(self) -> JobConfig:
        if self.job is None:
            raise ConfigError("--config", "this command needs a job configuration")
        return self.job

    @cached_property
    def cm(self) -> CartanMatrix:
        return self.require_job().cartan_matrix()

    @property
    def digits(self) -> int:
        flag = getattr(self.args, "digits", None)
        if flag is not None:
            if flag < 10:
                raise ConfigError("--digits", "must be >= 10")
            return flag
        if self.job is not None and self.job.precision_digits is not None:
            return self.job.precision_digits
        return self.settings.precision_digits

    @cached_property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(digits=self.digits)

    @property
    def threads(self) -> int:
        flag = getattr(self.args, "threads", None)
        return flag if flag is not None else self.settings.threads

    @property
    def tits_cap(self) -> int:
        if self.job is not None and self.job.caps.tits_cap is not None:
            return self.job.caps.tits_cap
        return self.settings.tits_cap

    @property
    def string_cap(self) -> int:
        if self.job is not None and self.job.caps.string_cap is not None:
            return self.job.caps.string_cap
        return self.settings.string_cap

    def max_length(self) -> int:
        flag = getattr(self.args, "max_length", None)
        if flag is not None:
            if flag < 0:
                raise ConfigError("--max-length", "must be >= 0")
            return flag
        if self.job is not None and self.job.max_length is not None:
            return self.job.max_length
        raise ConfigError("max_length", "give --max-length or set max_length in the configuration")

    def spectral_parameter(self) -> SpectralParameter:
        job = self.require_job()
        if job.lambda_ is None:
            raise ConfigError("lambda", "this command needs lambda.coroot_pairings")
        return SpectralParameter(job.lambda_.values)

    def point(self):
        job = self.require_job()
        if job.point is None:
            raise ConfigError("point", "this command needs point.alpha_values")
        return job.point.values

    @cached_property
    def roots(self) -> RootSystem:
        return RootSystem(self.cm, string_cap=self.string_cap)

    def checker(self) -> PropertyChecker:
        return PropertyChecker(self.cm, WeylGroup(self.cm, self.roots))

    def evaluator(self) -> EisensteinEvaluator:
        return EisensteinEvaluator(self.cm, self.ctx, threads=self.threads, tits_cap=self.tits_cap)

    def decimal(self, value) -> str:
        return format_decimal(value, self.digits)


def _real(text: str, path: str) -> Fraction:
    """Exact value of a decimal or "p/q" string given on the command line."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(path, f"cannot parse {text!r} as a real number") from e


def _word(text: str, rank: int) -> List[int]:
    try:
        letters = [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as e:
        raise ConfigError("--word", f"expected comma-separated integers, got {text!r}") from e
    for i in letters:
        if not 1 <= i <= rank:
            raise ConfigError("--word", f"generator index {i} out of range 1..{rank}")
    return letters


def _table_output(table: ShellTable, as_json: bool) -> str:
    if as_json:
        return dumps_json(table.to_dict())
    return csv_table(SHELL_TABLE_HEADER, table.csv_rows(), comments=table.comments)


# ============================================================================
# Commands
# ============================================================================

def cmd_validate(run: RunContext) -> str:
    cm = run.cm
    job = run.require_job()
    report: Dict = {
        "matrix": cm.to_list(),
        "rank": cm.rank,
        "symmetrizer": list(cm.symmetrizer),
        "determinant": cm.determinant,
        "symmetric": cm.is_symmetric(),
        "finite_type": is_finite_type(cm, range(1, cm.rank + 1)),
    }
    if job.lambda_ is not None:
        lam = SpectralParameter(job.lambda_.values)
        report["lambda"] = {
            "coroot_pairings": [format_rational(c) for c in lam.weight],
            "godement": lam.godement,
        }
    if job.point is not None:
        reduction = WeylGroup(cm, run.roots).tits_reduce(job.point.values, run.tits_cap)
        report["point"] = reduction.to_dict()
    if job.mu is not None:
        mu = WeightVector(job.mu.values)
        report["mu"] = {
            "coroot_pairings": [format_rational(c) for c in mu],
            "dominant_integral": mu.is_dominant() and mu.is_integral(),
        }
    return dumps_json(report)


def cmd_roots(run: RunContext) -> str:
    cm = run.cm
    roots = run.roots
    header = [f"m{i + 1}" for i in range(cm.rank)] + ["height", "kind", "norm"]
    rows = []
    for v in roots.positive_roots(run.args.max_height):
        kind = "real" if roots.is_real_root(v) else "imaginary"
        rows.append([str(m) for m in v] + [str(v.height), kind, format_rational(roots.norm(v))])
    comments = [
        f"matrix={cm.to_list()}",
        f"max_height={run.args.max_height}",
        "negative roots are the negatives of the listed positive roots",
    ]
    return csv_table(header, rows, comments=comments)


def cmd_weyl(run: RunContext) -> str:
    cm = run.cm
    weyl = WeylGroup(cm, run.roots)
    max_length = run.max_length()
    shells = []
    for shell in weyl.enumerate_shells(max_length, run.threads):
        record: Dict = {"length": shell.length, "count": shell.count}
        if not run.args.count_only:
            record["elements"] = [
                {"word": list(w.word), "phi": [list(alpha) for alpha in weyl.phi_w(w)]}
                for w in shell.elements
            ]
        shells.append(record)
    return dumps_json({"matrix": cm.to_list(), "max_length": max_length, "shells": shells})


def cmd_property_check(run: RunContext) -> str:
    checker = run.checker()
    max_length = run.max_length()
    if max_length < 1:
        raise ConfigError("max_length", "must be >= 1")
    report = checker.check_property(max_length, run.threads)
    return dumps_json(report.model_dump())


def cmd_property_admissible(run: RunContext) -> str:
    checker = run.checker()
    letters = _word(run.args.word, run.cm.rank)
    w = checker.weyl.from_word(letters)
    admissible = checker.admissible_word(w)
    return dumps_json({
        "matrix": run.cm.to_list(),
        "element": list(w.word),
        "word": admissible.word,
        "commutation_condition": checker.verify_commutation_condition(admissible.word),
    })


def cmd_constant_term(run: RunContext) -> str:
    table = run.evaluator().constant_term(
        run.spectral_parameter(), run.point(), run.max_length(), force=run.args.force
    )
    return _table_output(table, run.args.json)


def cmd_dominating(run: RunContext) -> str:
    m = _real(run.args.M, "--M") if run.args.M is not None else run.require_job().m_value
    if m is None:
        raise ConfigError("M", "give --M or set M in the configuration")
    table = run.evaluator().dominating_series(
        run.spectral_parameter(), run.point(), m, run.max_length(), force=run.args.force
    )
    return _table_output(table, run.args.json)


def cmd_majorant(run: RunContext) -> str:
    table = run.evaluator().godement_majorant(
        run.spectral_parameter(), run.point(), run.max_length(), force=run.args.force
    )
    return _table_output(table, run.args.json)


def cmd_looijenga(run: RunContext) -> str:
    job = run.require_job()
    n_bound = _real(run.args.N, "--N") if run.args.N is not None else job.n_value
    if n_bound is None:
        raise ConfigError("N", "give --N or set N in the configuration")
    if n_bound <= 0:
        raise ConfigError("N", "must be positive")
    if job.mu is None:
        raise ConfigError("mu", "this command needs mu.coroot_pairings")
    points = job.sample_points()
    if not points:
        raise ConfigError("point", "this command needs point or points")
    result = run.evaluator().looijenga_count(job.mu.values, points, n_bound, run.args.cap_length)
    payload = result.to_dict()
    payload["N"] = format_rational(n_bound)
    payload["mu"] = list(job.mu.coroot_pairings)
    return dumps_json(payload)


def cmd_rank1(run: RunContext) -> str:
    s = _real(run.args.s, "--s")
    a = _real(run.args.a, "--a")
    x = _real(run.args.x, "--x")
    bound = rank1_sum_bound(s, a, x, run.ctx)
    return dumps_json({
        "s": run.args.s,
        "a_alpha": run.args.a,
        "x0": run.args.x,
        "lhs": run.decimal(bound.lhs),
        "lhs_upper": run.decimal(bound.lhs_upper),
        "rhs": run.decimal(bound.rhs),
        "truncation": bound.truncation,
        "holds": bound.holds,
    })


def cmd_zeta_ratio(run: RunContext) -> str:
    return run.decimal(xi_ratio(_real(run.args.s, "--s"), run.ctx)) + "\n"


def cmd_c_infinity(run: RunContext) -> str:
    return run.decimal(c_infinity(_real(run.args.s, "--s"), run.ctx)) + "\n"


def cmd_xi_threshold(run: RunContext) -> str:
    report = xi_ratio_threshold(run.ctx, _real(run.args.lo, "--lo"), _real(run.args.hi, "--hi"))
    return dumps_json({
        "threshold": run.decimal(report.threshold),
        "sweep_points": report.sweep_points,
        "sweep_max": run.decimal(report.sweep_max),
        "holds_on_sweep": report.holds_on_sweep,
        "note": "empirical real-axis crossing of xi(s)/xi(s+1) = 1; not a proven constant",
    })


def cmd_prop43(run: RunContext) -> str:
    report = verify_prop43_claims(run.args.a, run.args.b, run.args.n)
    payload = report.model_dump()
    payload["holds"] = report.holds
    return dumps_json(payload)


def cmd_prop42(run: RunContext) -> str:
    report = verify_prop42_claims(run.cm, run.max_length(), run.string_cap)
    payload = report.model_dump()
    payload["holds"] = report.holds
    return dumps_json(payload)


def cmd_verify_certificate(run: RunContext) -> str:
    try:
        with open(run.args.certificate, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise ConfigError(run.args.certificate, f"cannot read certificate: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(run.args.certificate, f"invalid JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(run.args.certificate, "certificate must be a JSON object")
    cm = validate_gcm(data.get("matrix", []))
    PropertyChecker(cm, WeylGroup(cm, RootSystem(cm, string_cap=run.string_cap))).verify_certificate(data)
    return dumps_json({"valid": True, "status": data.get("status"), "length": data.get("length")})


def cmd_history(run: RunContext) -> str:
    url = run.args.archive or run.settings.database_url
    if not url:
        raise ConfigError("--archive", "no archive configured (set KMEIS_DATABASE_URL or pass --archive)")
    try:
        archive = RunArchive(url)
    except SQLAlchemyError as e:
        raise ConfigError("--archive", f"cannot open archive: {e}") from e
    try:
        return dumps_json(archive.recent(run.args.limit))
    finally:
        archive.close()


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Job configuration (JSON)")
    common.add_argument("--digits", type=int, help="Working decimal digits (>= 10)")
    common.add_argument("--threads", type=int, help="Worker threads for shell-parallel work")
    common.add_argument("--archive", help="SQLAlchemy URL of the run archive")
    common.add_argument("--log-level", dest="log_level", help="Logging level (stderr)")

    parser = argparse.ArgumentParser(
        prog="kmeis",
        description="Kac-Moody root systems, Weyl groups and Eisenstein constant terms",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, help_text: str, **kwargs) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text, **kwargs)
        sub.set_defaults(handler=handler)
        return sub

    add("validate", cmd_validate, "Validate the configuration and report its data")

    sub = add("roots", cmd_roots, "List positive roots up to a height (CSV)")
    sub.add_argument("--max-height", dest="max_height", type=int, required=True)

    sub = add("weyl", cmd_weyl, "Enumerate Weyl group shells (JSON)")
    sub.add_argument("--max-length", dest="max_length", type=int)
    sub.add_argument("--count-only", dest="count_only", action="store_true")

    prop = commands.add_parser("property", help="Property 1 checks")
    prop_commands = prop.add_subparsers(dest="property_command", required=True)
    sub = prop_commands.add_parser("check", parents=[common], help="Bounded Property 1 check (JSON certificate)")
    sub.add_argument("--max-length", dest="max_length", type=int)
    sub.set_defaults(handler=cmd_property_check)
    sub = prop_commands.add_parser("admissible", parents=[common], help="Admissible word for an element")
    sub.add_argument("--word", required=True, help="Comma-separated generator indices, e.g. 1,2,1")
    sub.set_defaults(handler=cmd_property_admissible)

    for name, handler, help_text in (
        ("constant-term", cmd_constant_term, "Constant-term shell table"),
        ("dominating", cmd_dominating, "Dominating-series shell table"),
        ("majorant", cmd_majorant, "Majorant of the full series, shell table"),
    ):
        sub = add(name, handler, help_text)
        sub.add_argument("--max-length", dest="max_length", type=int)
        sub.add_argument("--force", action="store_true", help="Evaluate even outside the Tits-cone interior")
        sub.add_argument("--json", action="store_true", help="JSON instead of CSV")
        if name == "dominating":
            sub.add_argument("--M", dest="M", help="Weight base M > 0")

    sub = add("looijenga", cmd_looijenga, "Orbit count #{w mu : <w mu, H> >= -N} (JSON)")
    sub.add_argument("--N", dest="N")
    sub.add_argument("--cap-length", dest="cap_length", type=int)

    sub = add("rank1", cmd_rank1, "Rank-one sum bound (JSON)")
    sub.add_argument("--s", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--x", required=True)

    sub = add("zeta-ratio", cmd_zeta_ratio, "xi(s)/xi(s+1)")
    sub.add_argument("--s", required=True)
    sub = add("c-infinity", cmd_c_infinity, "c_inf(s) = Gamma_R(s)/Gamma_R(s+1)")
    sub.add_argument("--s", required=True)

    sub = add("xi-threshold", cmd_xi_threshold, "Empirical crossing of xi(s)/xi(s+1) = 1 (JSON)")
    sub.add_argument("--lo", default="3/2")
    sub.add_argument("--hi", default="100")

    sub = add("prop43", cmd_prop43, "Rank-2 family claims for [[2,-b],[-a,2]] (JSON)")
    sub.add_argument("--a", type=int, required=True)
    sub.add_argument("--b", type=int, required=True)
    sub.add_argument("--n", type=int, default=20)

    sub = add("prop42", cmd_prop42, "Symmetric |a_ij| >= 2 family claims (JSON)")
    sub.add_argument("--max-length", dest="max_length", type=int)

    sub = add("verify-certificate", cmd_verify_certificate, "Re-check a property certificate")
    sub.add_argument("certificate")

    sub = add("history", cmd_history, "List archived runs (JSON)")
    sub.add_argument("--limit", type=int, default=20)

    return parser


# ============================================================================
# Entry point
# ============================================================================

def _archive_run(run: RunContext, argv: List[str], output: str, code: int) -> None:
    url = getattr(run.args, "archive", None) or run.settings.database_url
    if not url or run.args.command == "history":
        return
    try:
        archive = RunArchive(url)
    except SQLAlchemyError as e:
        logger.error("run not archived, cannot open %s: %s", url, e)
        return
    try:
        archive.record(" ".join(argv), run.config_text, output, code)
    finally:
        archive.close()


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        settings = Settings.from_env()
    except ValidationError as e:
        print(f"ConfigError: invalid KMEIS_* environment: {e}", file=sys.stderr)
        return 2
    args = build_parser().parse_args(argv)
    level = (args.log_level or settings.log_level).upper()
    if level not in LOG_LEVELS:
        print(f"ConfigError: --log-level: must be one of {', '.join(LOG_LEVELS)}", file=sys.stderr)
        return 2
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    run = RunContext(args=args, settings=settings)

    output = ""
    try:
        output = args.handler(run)
        code = 0
    except ConfigError as e:
        print(f"ConfigError: {e}", file=sys.stderr)
        code = 2
    except ValidationError as e:
        print(f"ConfigError: {e}", file=sys.stderr)
        code = 2
    except KacMoodyError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        code = 1
    sys.stdout.write(output)
    _archive_run(run, argv, output, code)
    return code
