import json
import logging
import math
import sys
from contextlib import contextmanager
from dataclasses import asdict
from enum import Enum
from typing import IO, Any, Callable, Dict, Iterator, Tuple

from torsionlab.chain_torsion import (
    betti_ranks,
    first_violation,
    read_complex,
    standard_homology_basis,
    torsion_log,
    validate_complex,
)
from torsionlab.circle_model import (
    CircleFrustum,
    analytic_torsion_circle,
    build_complex,
    cone_limit_sweep,
    cylinder_limit_sweep,
    printed_cone_limit_log,
    rtorsion_circle,
    rtorsion_closed_form,
    sign_representation_torsion,
    verify_suite,
)
from torsionlab.config import RunConfig
from torsionlab.constants import (
    TOLERANCES,
    BoundaryCondition,
    Command,
    OutputFormat,
    Representation,
    RTorsionVariant,
    ZetaMethod,
)
from torsionlab.frustum_formulas import (
    FrustumParams,
    cone_analytic_torsion_log,
    frustum_rtorsion_log,
    limit_upsilon_log,
    tau_T_reconciliation,
)
from torsionlab.schemas import validate_document
from torsionlab.spectral_zeta import (
    ZeroTable,
    analytic_torsion_closed_form,
    find_zeros,
    torsion_zeta_evaluation,
    write_zero_table,
)

logger = logging.getLogger(__name__)

Result = Tuple[Dict[str, Any], bool]

# exp() of a log torsion past this overflows a float
MAX_EXP_ARGUMENT = 700.0


def _exp(log_value: float) -> Any:
    return math.exp(log_value) if abs(log_value) < MAX_EXP_ARGUMENT else None


def _round(value: Any, digits: int) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    return value


def _parameters(config: RunConfig) -> Dict[str, Any]:
    def plain(value: Any) -> Any:
        if isinstance(value, Representation):
            return value.name.lower()
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, tuple):
            return list(value)
        return value

    return {
        k: plain(v)
        for k, v in asdict(config).items()
        if k not in ("command", "output", "output_format", "precision")
    }


def _frustum(config: RunConfig) -> CircleFrustum:
    assert config.alpha is not None
    return CircleFrustum(config.l1, config.l2, config.alpha)


def _rtorsion_complex(config: RunConfig) -> Result:
    assert config.complex_path is not None
    c, h = read_complex(config.complex_path)
    result: Dict[str, Any] = {"source": "complex", "ranks": list(c.ranks)}
    if not validate_complex(c):
        result.update(valid=False, first_violation=first_violation(c))
        return result, False
    log_tau = torsion_log(c, h if h is not None else standard_homology_basis(c))
    result.update(
        valid=True,
        betti=betti_ranks(c),
        homology_basis="given" if h is not None else "standard",
        log_tau=log_tau.value,
        tau=_exp(log_tau.value),
    )
    return result, True


def _rtorsion_frustum(config: RunConfig) -> Result:
    assert config.tau_w is not None
    params = FrustumParams(config.l1, config.l2, config.m, config.betti)
    rtorsion = frustum_rtorsion_log(params, config.tau_w)
    reconciliation = tau_T_reconciliation(params)
    result = {
        "source": "frustum",
        "printed": rtorsion.printed,
        "derived": rtorsion.derived,
        "difference": rtorsion.difference,
        "tau_T": {
            "printed": reconciliation.printed,
            "derived": reconciliation.derived,
        },
        "reconciliation_exponent": float(reconciliation.exponent),
        "reconciliation_exponent_exact": str(reconciliation.exponent),
    }
    return result, True


def _rtorsion_circle(config: RunConfig) -> Result:
    f = _frustum(config)
    c = build_complex(f, config.preset, config.representation)
    result: Dict[str, Any] = {
        "source": "circle",
        "preset": config.preset.value,
        "representation": config.representation.name.lower(),
    }
    if not validate_complex(c):
        result.update(valid=False, first_violation=first_violation(c))
        return result, False
    result["valid"] = True
    if config.representation is Representation.SIGN:
        log_tau = sign_representation_torsion(f).value
        result.update(log_tau=log_tau, tau=_exp(log_tau))
        return result, True
    log_tau = rtorsion_circle(f, config.variant).value
    closed = {
        RTorsionVariant.ABS: rtorsion_closed_form(f),
        RTorsionVariant.REL: -rtorsion_closed_form(f),
        RTorsionVariant.PAIR_W2: 0.0,
    }[config.variant]
    formula = frustum_rtorsion_log(f.params, f.section_log_torsion)
    reconciliation = tau_T_reconciliation(f.params)
    result.update(
        variant=config.variant.value,
        log_tau=log_tau,
        tau=_exp(log_tau),
        closed_form=closed,
        frustum_formula={"printed": formula.printed, "derived": formula.derived},
        reconciliation_exponent=float(reconciliation.exponent),
    )
    return result, abs(log_tau - closed) <= TOLERANCES["chain_closed_form"]


def _rtorsion(config: RunConfig) -> Result:
    if config.complex_path is not None:
        return _rtorsion_complex(config)
    if config.tau_w is not None:
        return _rtorsion_frustum(config)
    return _rtorsion_circle(config)


def _analytic(config: RunConfig) -> Result:
    f = _frustum(config)
    closed = torsion_zeta_evaluation(f.nu, f.l1, f.l2, ZetaMethod.CLOSED_FORM)
    semi = torsion_zeta_evaluation(
        f.nu,
        f.l1,
        f.l2,
        ZetaMethod.CONTINUATION_ORACLE,
        K=config.zero_count,
        tol=config.tol,
    )
    for evaluation in (closed, semi):
        validate_document("zeta-evaluation", evaluation.to_dict())
    difference = abs(closed.value_at_0_derivative - semi.value_at_0_derivative)
    result = {
        "closed_form": closed.to_dict(),
        "semi_numeric": semi.to_dict(),
        "difference": difference,
        "formula": analytic_torsion_closed_form(f.nu, f.l1, f.l2),
        "log_T": {
            "abs": closed.value_at_0_derivative,
            "rel": -closed.value_at_0_derivative,
            "mixed": analytic_torsion_circle(f, BoundaryCondition.MIXED),
        },
    }
    return result, difference <= TOLERANCES["semi_numeric"]


def _zero_table(config: RunConfig) -> ZeroTable:
    return find_zeros(
        config.kind, config.nu_n, config.l1, config.l2, config.zero_count, config.tol
    )


def _zeros(config: RunConfig) -> Result:
    table = _zero_table(config)
    violations = table.spacing_violations()
    result = {
        "kind": table.kind.value,
        "nu_n": table.order,
        "l1": table.l1,
        "l2": table.l2,
        "tol": table.tol,
        "zeros": list(table.zeros),
        "spacing_violations": violations,
    }
    return result, not violations


def _verify(config: RunConfig) -> Result:
    report = verify_suite(
        _frustum(config),
        semi_numeric=config.method is ZetaMethod.CONTINUATION_ORACLE,
        K=config.zero_count,
        tol=config.tol,
    )
    document = report.to_dict()
    validate_document("verification-report", document)
    return document, report.passed


def _limits(config: RunConfig) -> Result:
    f = _frustum(config)
    cone = cone_limit_sweep(f)
    cylinder = cylinder_limit_sweep(
        f.l1 * f.sin_alpha, (f.l2 - f.l1) * math.cos(f.alpha)
    )
    derived = limit_upsilon_log(f.params, f.section_log_torsion)
    result: Dict[str, Any] = {
        "cone": dict(
            cone.to_dict(),
            derived_limit=derived,
            printed_limit=printed_cone_limit_log(f),
        ),
        "cylinder": cylinder.to_dict(),
    }
    passed = (
        cone.decreasing
        and cone.rate_exponent >= TOLERANCES["cone_rate"]
        and abs(cone.limit_estimate - derived) <= TOLERANCES["cone_limit"]
        and cylinder.decreasing
        and cylinder.increments[-1] <= TOLERANCES["cylinder_limit"]
    )
    if config.tau_w is not None:
        params = FrustumParams(config.l1, config.l2, config.m, config.betti)
        section = {
            "limit_upsilon": limit_upsilon_log(params, config.tau_w),
            "cone_analytic_torsion": cone_analytic_torsion_log(params, config.tau_w),
        }
        result["section"] = section
        if params.is_poincare_symmetric():
            passed = passed and (
                abs(section["limit_upsilon"] - section["cone_analytic_torsion"])
                <= TOLERANCES["chain_closed_form"]
            )
    return result, bool(passed)


def _report(config: RunConfig) -> Result:
    result: Dict[str, Any] = {}
    passed = True
    for command in (Command.RTORSION, Command.ANALYTIC, Command.VERIFY, Command.LIMITS):
        part, ok = HANDLERS[command](config)
        result[command.value] = dict(part, **{"pass": ok})
        passed = passed and ok
    return result, passed


HANDLERS: Dict[Command, Callable[[RunConfig], Result]] = {
    Command.RTORSION: _rtorsion,
    Command.ANALYTIC: _analytic,
    Command.ZEROS: _zeros,
    Command.VERIFY: _verify,
    Command.LIMITS: _limits,
    Command.REPORT: _report,
}


@contextmanager
def _open_output(config: RunConfig) -> Iterator[IO[str]]:
    if config.output is None:
        yield sys.stdout
    else:
        with open(config.output, "w", encoding="utf-8") as stream:
            yield stream


def run(config: RunConfig) -> int:
    """Runs one command and writes its artifact.

    Args:
        config (RunConfig): The validated invocation.

    Returns:
        int: 0 if every check of the command passed, 1 otherwise.
    """
    from torsionlab import __version__

    if config.output_format is OutputFormat.CSV:
        table = _zero_table(config)
        with _open_output(config) as stream:
            write_zero_table(table, stream)
        passed = not table.spacing_violations()
    else:
        result, passed = HANDLERS[config.command](config)
        with _open_output(config) as stream:
            document = {
                "command": config.command.value,
                "version": __version__,
                "parameters": _parameters(config),
                "result": _round(result, config.precision),
                "pass": passed,
            }
            validate_document("run-report", document)
            json.dump(document, stream, indent=2, ensure_ascii=False)
            stream.write("\n")
    if config.output is not None:
        logger.info(f"Wrote {config.command.value} output to {config.output}")
    if not passed:
        logger.warning(f"{config.command.value}: one or more checks failed")
    return 0 if passed else 1
