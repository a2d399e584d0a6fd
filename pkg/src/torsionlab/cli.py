import logging

import click

from torsionlab import __version__
from torsionlab.commands import create_torsionlab_command


@click.group(name="torsionlab-cli")
@click.version_option(version=__version__)
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv).")
def cli(verbose: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s"
    )


create_torsionlab_command(cli)


def run() -> None:
    cli(prog_name="torsionlab-cli")
