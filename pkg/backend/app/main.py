import argparse
import logging
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app.config import get_settings, setup_logging
from app.errors import ConsistencyError, SearchCapExceeded, UsageError
from app.field_arith import (
    BaseField,
    FieldIdeal,
    class_groups,
    fundamental_unit,
    make_field,
    narrow_class_index,
    parse_ideal,
    render_elem,
    render_ideal,
    zeta_minus_one,
)
from app.genus_enum import (
    get_algebra_data,
    genus_mass,
    genus_representatives,
    integral_rescaling,
    is_a_maximal,
    norm_class_table,
    siegel_mass,
    trace_lattice_minimum,
    verify_algebra,
)
from app.class_sets import (
    eichler_mass,
    mass_per_narrow_class,
    narrow_class_mass,
    two_sided_class_number,
)
from app.linalg import common_denominator
from app.models import (
    AlgebraReport,
    CheckResult,
    CheckStatus,
    FieldKind,
    FieldReport,
    GenusClassReport,
    GenusResults,
    GramReport,
    IdealClassResults,
    IdealClassRow,
    IdealReport,
    JobSpec,
    MassResults,
    OrderResults,
    OutputFormat,
    Report,
    Target,
    TypeRow,
    rational_str,
)
from app.quat_algebra import QuatAlgebra, make_algebra
from app.zlattice import maximal_order

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONSISTENCY = 2
EXIT_SEARCH_CAP = 3
EXIT_USAGE = 64


class JobArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = JobArgumentParser(
        prog="quaternary-genus",
        description=f"{settings.APP_NAME}: enumerate genera of maximal quaternary lattices via quaternion ideals",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="target", required=True)
    helps = {
        Target.GENUS: "proper isometry classes of a-maximal lattices",
        Target.IDEAL_CLASSES: "right ideal classes of a maximal order",
        Target.ORDERS: "types of maximal orders with unit and normalizer data",
        Target.MASS: "Eichler and Siegel masses",
        Target.VERIFY: "run every consistency check",
    }
    for target, text in helps.items():
        sub = subparsers.add_parser(target.value, help=text)
        sub.add_argument("--field", choices=[k.value for k in FieldKind], default=FieldKind.RATIONALS.value)
        sub.add_argument("--d", type=int, default=None, help="squarefree d > 1 for Q(sqrt d)")
        sub.add_argument("--a", default="1", help='algebra entry a of (-a,-b / K), "p+q*w" syntax')
        sub.add_argument("--b", default="1", help='algebra entry b of (-a,-b / K), "p+q*w" syntax')
        sub.add_argument("--ideal", default="unit", help='"unit", "prime:p^e*q.k^f" or "class:k"')
        sub.add_argument("--output", choices=[o.value for o in OutputFormat], default=OutputFormat.JSON.value)
        sub.add_argument("--denominator-cap", type=int, default=settings.DENOMINATOR_CAP)
        sub.add_argument("--threads", type=int, default=settings.THREADS)
        sub.add_argument("--seed", type=int, default=None, help="reserved; results do not depend on it")
        sub.add_argument("--log-level", default=None)
    return parser


def parse_job(argv: Optional[List[str]] = None) -> tuple[JobSpec, Optional[str]]:
    """Parse command line arguments into a validated JobSpec

    Raises:
        UsageError: On unknown flags or values JobSpec rejects
    """
    args = build_parser().parse_args(argv)
    if args.log_level and not isinstance(logging.getLevelName(args.log_level.upper()), int):
        raise UsageError(f"unknown log level {args.log_level!r}")
    try:
        spec = JobSpec(
            field=args.field,
            d=args.d,
            a=args.a,
            b=args.b,
            target=args.target,
            ideal=args.ideal,
            output=args.output,
            denominator_cap=args.denominator_cap,
            threads=args.threads,
            seed=args.seed,
        )
    except ValidationError as e:
        raise UsageError(str(e))
    return spec, args.log_level


# -- report pieces -----------------------------------------------------------

def ideal_report(a: FieldIdeal, spec: Optional[str] = None) -> IdealReport:
    return IdealReport(
        spec=spec or render_ideal(a),
        norm=rational_str(a.norm),
        hnf=[list(row) for row in a.basis],
        denominator=a.denominator,
    )


def field_report(K: BaseField) -> FieldReport:
    groups = class_groups(K)
    return FieldReport(
        kind=K.kind,
        d=K.d if K.degree == 2 else None,
        discriminant=K.discriminant,
        fundamental_unit=render_elem(fundamental_unit(K)) if K.degree == 2 else None,
        class_number=groups.h,
        narrow_class_number=groups.h_plus,
        class_group=list(groups.invariants),
        narrow_reps=[ideal_report(a) for a in groups.narrow_reps],
        zeta_minus_one=rational_str(zeta_minus_one(K)),
    )


def algebra_report(Q: QuatAlgebra) -> AlgebraReport:
    M = maximal_order(Q)
    return AlgebraReport(
        a=render_elem(Q.a),
        b=render_elem(Q.b),
        ramified_primes=[ideal_report(P) for P in Q.ramified_primes],
        maximal_order=[list(row) for row in M.basis],
        maximal_order_denominator=M.denominator,
    )


def gram_report(gram) -> tuple[GramReport, Fraction]:
    den = common_denominator(gram.matrix)
    rescaled = integral_rescaling(gram)
    report = GramReport(
        matrix=[[int(x * den) for x in row] for row in gram.matrix],
        denominator=den,
        scale=rational_str(rescaled.scale),
        determinant=rescaled.determinant,
    )
    return report, rescaled.scale


def _setup(spec: JobSpec) -> tuple[BaseField, QuatAlgebra]:
    K = make_field(spec.field, spec.d)
    Q = make_algebra(K, spec.a, spec.b)
    logger.info(f"Algebra {Q}")
    return K, Q


# -- commands ----------------------------------------------------------------

def cmd_genus(spec: JobSpec) -> Report:
    K, Q = _setup(spec)
    a = parse_ideal(K, spec.ideal)
    reps = genus_representatives(Q, a, spec.threads, spec.denominator_cap)
    units = class_groups(K).totally_positive_unit_reps

    classes = []
    for index, rep in enumerate(reps):
        gram, scale = gram_report(rep.trace_gram)
        minimum = trace_lattice_minimum(rep)
        classes.append(GenusClassReport(
            index=index,
            left_type=rep.left_type,
            right_type=rep.right_type,
            unit_coset=render_elem(units[rep.unit_label]),
            weight=render_elem(rep.weight),
            x_J=str(rep.x_J),
            alpha_u=str(rep.alpha_u),
            aut_plus_order=rep.aut_plus_order,
            ideal=[list(row) for row in rep.ideal.basis],
            ideal_denominator=rep.ideal.denominator,
            trace_gram=gram,
            trace_minimum=rational_str(minimum),
            rescaled_minimum=int(minimum * scale),
        ))

    mass = genus_mass(reps)
    siegel = siegel_mass(Q, a)
    checks = [
        CheckResult(
            name="genus_mass_closure",
            status=CheckStatus.PASS if mass == siegel else CheckStatus.FAIL,
            detail=f"sum 1/|Aut+| = {mass}, Siegel mass = {siegel}",
        ),
        CheckResult(
            name="a_maximal",
            status=CheckStatus.PASS if all(is_a_maximal(rep.ideal, a) for rep in reps) else CheckStatus.FAIL,
            detail=f"{len(reps)} representatives",
        ),
    ]
    results = GenusResults(
        ideal=ideal_report(a, spec.ideal),
        class_count=len(reps),
        siegel_mass=rational_str(siegel),
        mass_sum=rational_str(mass),
        classes=classes,
    )
    return Report(spec=spec, field=field_report(K), algebra=algebra_report(Q), results=results, checks=checks)


def cmd_ideal_classes(spec: JobSpec) -> Report:
    K, Q = _setup(spec)
    data = get_algebra_data(Q)
    classes = data.classes
    rows = [
        IdealClassRow(
            index=k,
            norm=ideal_report(I.norm),
            narrow_class=narrow_class_index(I.norm),
            left_type=classes.type_index[k],
            hnf=[list(row) for row in I.basis],
            denominator=I.denominator,
        )
        for k, I in enumerate(classes.right_ideal_reps)
    ]
    total = sum((Fraction(1, k) for k in classes.left_unit_indices), Fraction(0))
    mass = eichler_mass(Q)
    checks = [CheckResult(
        name="eichler_mass_closure",
        status=CheckStatus.PASS if total == mass else CheckStatus.FAIL,
        detail=f"sum 1/[O_l(I)^*:Z_K^*] = {total}, Eichler mass = {mass}",
    )]
    results = IdealClassResults(
        class_number=classes.h,
        type_number=classes.t,
        eichler_mass=rational_str(mass),
        classes=rows,
    )
    return Report(spec=spec, field=field_report(K), algebra=algebra_report(Q), results=results, checks=checks)


def cmd_orders(spec: JobSpec) -> Report:
    K, Q = _setup(spec)
    data = get_algebra_data(Q)
    types = []
    for i, O in enumerate(data.classes.type_reps):
        ud, nd = data.units[i], data.normalizers[i]
        types.append(TypeRow(
            index=i,
            norm_one_mod_pm1=ud.norm_one_mod_pm1,
            unit_index=ud.unit_index,
            norm_image=[render_elem(w) for w in ud.norm_image_reps],
            x=ud.x_i,
            f=nd.f_i,
            normalizer_norms=[render_elem(n) for n in nd.Pi],
            two_sided_class_number=two_sided_class_number(O, nd),
        ))
    results = OrderResults(type_number=data.t, types=types, norm_classes=norm_class_table(data))
    return Report(spec=spec, field=field_report(K), algebra=algebra_report(Q), results=results)


def cmd_mass(spec: JobSpec) -> Report:
    K, Q = _setup(spec)
    a = parse_ideal(K, spec.ideal)
    data = get_algebra_data(Q)
    per_class = mass_per_narrow_class(Q, a)
    direct = narrow_class_mass(data.classes, a)
    checks = [CheckResult(
        name="narrow_class_mass",
        status=CheckStatus.PASS if direct == per_class else CheckStatus.FAIL,
        detail=f"direct sum {direct}, Mass(M)/h+ = {per_class}",
    )]
    results = MassResults(
        eichler_mass=rational_str(eichler_mass(Q)),
        mass_per_narrow_class=rational_str(per_class),
        siegel_mass=rational_str(siegel_mass(Q, a)),
        direct_mass=rational_str(direct),
    )
    return Report(spec=spec, field=field_report(K), algebra=algebra_report(Q), results=results, checks=checks)


def cmd_verify(spec: JobSpec) -> Report:
    K, Q = _setup(spec)
    checks = verify_algebra(Q, spec.threads, spec.denominator_cap)
    passed = sum(1 for check in checks if check.status == CheckStatus.PASS)
    results = {"passed": f"{passed}/{len(checks)}"}
    return Report(spec=spec, field=field_report(K), algebra=algebra_report(Q), results=results, checks=checks)


COMMANDS: Dict[Target, Callable[[JobSpec], Report]] = {
    Target.GENUS: cmd_genus,
    Target.IDEAL_CLASSES: cmd_ideal_classes,
    Target.ORDERS: cmd_orders,
    Target.MASS: cmd_mass,
    Target.VERIFY: cmd_verify,
}


def run(spec: JobSpec) -> Report:
    started = time.perf_counter()
    report = COMMANDS[spec.target](spec)
    if get_settings().REPORT_TIMINGS:
        report.timings = {"total_seconds": round(time.perf_counter() - started, 3)}
    return report


# -- output ------------------------------------------------------------------

def format_table(report: Report) -> str:
    lines = [
        f"field: {report.field.kind.value}" + (f" d={report.field.d}" if report.field.d else ""),
        f"algebra: (-({report.algebra.a}),-({report.algebra.b}))"
        f"  ramified: {[p.spec for p in report.algebra.ramified_primes] or 'none'}",
    ]
    results = report.results
    if isinstance(results, GenusResults):
        lines.append(f"ideal {results.ideal.spec}: {results.class_count} classes, mass {results.mass_sum} (Siegel {results.siegel_mass})")
        lines.append(f"{'#':>3} {'left':>4} {'right':>5} {'unit':>8} {'|Aut+|':>8} {'min':>6} {'scaled':>6}")
        for row in results.classes:
            lines.append(
                f"{row.index:>3} {row.left_type:>4} {row.right_type:>5} {row.unit_coset:>8} "
                f"{row.aut_plus_order:>8} {row.trace_minimum:>6} {row.rescaled_minimum:>6}"
            )
    elif isinstance(results, IdealClassResults):
        lines.append(f"h={results.class_number} t={results.type_number} Eichler mass {results.eichler_mass}")
        lines.append(f"{'#':>3} {'norm':>8} {'narrow':>6} {'type':>4}")
        for row in results.classes:
            lines.append(f"{row.index:>3} {row.norm.norm:>8} {row.narrow_class:>6} {row.left_type:>4}")
    elif isinstance(results, OrderResults):
        lines.append(f"t={results.type_number}")
        lines.append(f"{'#':>3} {'|M1/+-1|':>9} {'[M*:Z*]':>8} {'x':>2} {'f':>2} {'H':>3}  norm image / normalizer norms")
        for row in results.types:
            lines.append(
                f"{row.index:>3} {row.norm_one_mod_pm1:>9} {row.unit_index:>8} {row.x:>2} {row.f:>2} "
                f"{row.two_sided_class_number:>3}  {row.norm_image} / {row.normalizer_norms}"
            )
    elif isinstance(results, MassResults):
        lines.append(f"Eichler mass {results.eichler_mass}")
        lines.append(f"mass per narrow class {results.mass_per_narrow_class} (direct {results.direct_mass})")
        lines.append(f"Siegel mass {results.siegel_mass}")
    else:
        lines.extend(f"{key}: {value}" for key, value in results.items())
    for check in report.checks:
        lines.append(f"[{check.status.value}] {check.name} {check.detail}")
    for key, value in report.timings.items():
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def emit(report: Report) -> None:
    if report.spec.output == OutputFormat.TABLE:
        print(format_table(report))
    else:
        print(report.model_dump_json(indent=2))


def main(argv: Optional[List[str]] = None) -> int:
    try:
        spec, log_level = parse_job(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(log_level)
    try:
        get_settings().validate()
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    if spec.seed is not None:
        logger.debug(f"Seed {spec.seed} ignored; the enumeration is deterministic")

    try:
        report = run(spec)
    except SearchCapExceeded as e:
        logger.error(f"Search cap exceeded: {e}")
        return EXIT_SEARCH_CAP
    except ConsistencyError as e:
        logger.error(f"Consistency failure: {e}", exc_info=get_settings().DEBUG)
        return EXIT_CONSISTENCY
    except ValueError as e:
        logger.error(f"Invalid input: {e}", exc_info=get_settings().DEBUG)
        return EXIT_USAGE

    emit(report)
    return EXIT_CONSISTENCY if report.failed() else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
