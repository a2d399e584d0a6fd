import logging
from typing import Any, Callable, Optional

import click
from click import Command, Group

from torsionlab.chain_torsion import ChainComplexError
from torsionlab.circle_model import CircleModelError
from torsionlab.config import ConfigError, RunConfig, alpha_from_nu, parse_betti
from torsionlab.constants import (
    DEFAULT_PRECISION,
    DEFAULT_ZERO_COUNT,
    DEFAULT_ZERO_TOL,
    Command as TorsionCommand,
    CrossProductKind,
    OutputFormat,
    Preset,
    Representation,
    RTorsionVariant,
    ZetaMethod,
)
from torsionlab.frustum_formulas import FrustumError
from torsionlab.runner import run
from torsionlab.schemas import SchemaError
from torsionlab.spectral_zeta import SpectralError

logger = logging.getLogger(__name__)

Decorator = Callable[[Callable[..., Any]], Callable[..., Any]]


def _compose(*decorators: Decorator) -> Decorator:
    def apply(f: Callable[..., Any]) -> Callable[..., Any]:
        for decorator in reversed(decorators):
            f = decorator(f)
        return f

    return apply


radius_options = _compose(
    click.option(
        "--l1", type=float, default=1.0, show_default=True, help="Inner radius."
    ),
    click.option(
        "--l2", type=float, default=2.0, show_default=True, help="Outer radius."
    ),
)

frustum_options = _compose(
    radius_options,
    click.option("--alpha", type=float, help="Cone angle α in radians."),
    click.option("--nu", type=float, help="ν = 1/sin α, instead of --alpha."),
)

section_options = _compose(
    click.option(
        "--m", type=int, default=1, show_default=True, help="Section dimension."
    ),
    click.option(
        "--betti",
        default="1,1",
        show_default=True,
        help="Comma-separated Betti numbers.",
    ),
    click.option("--tau-w", type=float, help="log τ_R(W, g) of the section."),
)

zero_options = _compose(
    click.option(
        "-K",
        "--K",
        "zero_count",
        type=int,
        default=DEFAULT_ZERO_COUNT,
        show_default=True,
        help="Number of zeros per cross product.",
    ),
    click.option(
        "--tol",
        type=float,
        default=DEFAULT_ZERO_TOL,
        show_default=True,
        help="Absolute tolerance of zero refinement.",
    ),
)

output_options = _compose(
    click.option("-o", "--output", help="File to write; standard output otherwise."),
    click.option(
        "--precision",
        type=int,
        default=DEFAULT_PRECISION,
        show_default=True,
        help="Significant digits of floats in JSON output.",
    ),
)


def _build_config(
    command: TorsionCommand,
    alpha: Optional[float] = None,
    nu: Optional[float] = None,
    betti: Optional[str] = None,
    **kwargs: Any,
) -> RunConfig:
    try:
        if alpha is not None and nu is not None:
            raise ConfigError("Give either --alpha or --nu, not both")
        if nu is not None:
            alpha = alpha_from_nu(nu)
        if betti is not None:
            kwargs["betti"] = parse_betti(betti)
        return RunConfig(command=command, alpha=alpha, **kwargs)
    except ConfigError as e:
        raise click.UsageError(str(e)) from e


def _execute(config: RunConfig) -> None:
    try:
        status = run(config)
    except ConfigError as e:
        raise click.UsageError(str(e)) from e
    except (
        ChainComplexError,
        CircleModelError,
        FrustumError,
        SpectralError,
        SchemaError,
        OSError,
    ) as e:
        raise click.ClickException(str(e)) from e
    if status:
        raise click.exceptions.Exit(status)


def _variant(name: str) -> RTorsionVariant:
    return next(v for v in RTorsionVariant if v.value.lower() == name.lower())


def create_torsionlab_command(cli: Group) -> Command:
    """Creates a command group for torsion computations on conical frusta."""

    @cli.group(
        "torsionlab",
        short_help="Commands for Reidemeister and analytic torsion of frusta.",
    )
    def torsionlab() -> None:
        pass

    @torsionlab.command(
        "rtorsion",
        short_help="Computes Reidemeister torsion of a complex or a frustum.",
    )
    @frustum_options
    @section_options
    @click.option(
        "-c",
        "--complex",
        "complex_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Chain complex JSON document.",
    )
    @click.option(
        "--preset",
        type=click.Choice([p.value for p in Preset], case_sensitive=False),
        default=Preset.PRODUCT_CW.value,
        show_default=True,
        help="Cell structure of the circle frustum.",
    )
    @click.option(
        "--representation",
        type=click.Choice(["trivial", "sign"], case_sensitive=False),
        default="trivial",
        show_default=True,
        help="Rank-one representation of π1.",
    )
    @click.option(
        "--variant",
        type=click.Choice([v.value for v in RTorsionVariant], case_sensitive=False),
        default=RTorsionVariant.ABS.value,
        show_default=True,
        help="Absolute, relative, or the pair (F, W2).",
    )
    @output_options
    def rtorsion_cmd(
        preset: str, representation: str, variant: str, **kwargs: Any
    ) -> None:
        """\b
        Computes log τ_R. With --complex, of the given chain complex (standard
        homology basis unless the document lists one). With --tau-w, of the
        frustum over a section with the given Betti numbers, printed and
        derived forms side by side. Otherwise of the circle frustum with angle
        --alpha or --nu.
        """
        config = _build_config(
            TorsionCommand.RTORSION,
            preset=Preset(preset.lower()),
            representation=Representation[representation.upper()],
            variant=_variant(variant),
            **kwargs,
        )
        _execute(config)

    @torsionlab.command(
        "analytic",
        short_help="Computes analytic torsion of the circle frustum.",
    )
    @frustum_options
    @zero_options
    @output_options
    def analytic_cmd(**kwargs: Any) -> None:
        """Evaluates log T_abs in closed form and from computed Bessel zeros."""
        _execute(_build_config(TorsionCommand.ANALYTIC, **kwargs))

    @torsionlab.command(
        "zeros",
        short_help="Tabulates zeros of the Bessel cross products.",
    )
    @radius_options
    @click.option(
        "--kind",
        type=click.Choice([k.value for k in CrossProductKind], case_sensitive=False),
        default=CrossProductKind.F.value,
        show_default=True,
        help="F (Dirichlet) or Ftilde (Neumann) cross product.",
    )
    @click.option(
        "--nu-n", type=float, default=0.0, show_default=True, help="Bessel order."
    )
    @zero_options
    @click.option(
        "--format",
        "output_format",
        type=click.Choice([f.value for f in OutputFormat], case_sensitive=False),
        default=OutputFormat.CSV.value,
        show_default=True,
        help="Table format.",
    )
    @output_options
    def zeros_cmd(kind: str, output_format: str, **kwargs: Any) -> None:
        """Writes the first K positive zeros a_1 < ... < a_K."""
        config = _build_config(
            TorsionCommand.ZEROS,
            kind=next(k for k in CrossProductKind if k.value.lower() == kind.lower()),
            output_format=OutputFormat(output_format.lower()),
            **kwargs,
        )
        _execute(config)

    @torsionlab.command(
        "verify",
        short_help="Runs the circle frustum verification suite.",
    )
    @frustum_options
    @click.option(
        "--method",
        type=click.Choice([m.value for m in ZetaMethod], case_sensitive=False),
        default=ZetaMethod.CLOSED_FORM.value,
        show_default=True,
        help="continuation_oracle adds the semi-numeric Cheeger-Müller check.",
    )
    @zero_options
    @output_options
    def verify_cmd(method: str, **kwargs: Any) -> None:
        """\b
        Checks Cheeger-Müller, pair additivity, anomaly totals, the
        reconciliation of the frustum formula and the cone and cylinder
        limits. Exits 1 if any check fails.
        """
        config = _build_config(
            TorsionCommand.VERIFY, method=ZetaMethod(method.lower()), **kwargs
        )
        _execute(config)

    @torsionlab.command(
        "limits",
        short_help="Sweeps the cone (l1 -> 0) and cylinder (α -> 0) limits.",
    )
    @frustum_options
    @section_options
    @output_options
    def limits_cmd(**kwargs: Any) -> None:
        """Cone and cylinder limit sweeps; --tau-w adds the cone over that section."""
        _execute(_build_config(TorsionCommand.LIMITS, **kwargs))

    @torsionlab.command(
        "report",
        short_help="Aggregates rtorsion, analytic, verify and limits into one JSON.",
    )
    @frustum_options
    @zero_options
    @output_options
    def report_cmd(**kwargs: Any) -> None:
        """Runs every circle frustum computation and writes one document."""
        _execute(_build_config(TorsionCommand.REPORT, **kwargs))

    return torsionlab
