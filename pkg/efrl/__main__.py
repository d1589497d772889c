from __future__ import annotations

import click
import cloup

from . import __version__
from .cli.commands import compare, config_dump, evaluate, gen_dns, train
from .constants import CONTEXT_SETTINGS, EPILOG

__all__ = ["main"]


@cloup.group(
    context_settings=CONTEXT_SETTINGS,
    epilog=EPILOG,
)
@click.version_option(__version__, prog_name="efrl")
def main() -> None:
    """Evolve-Filter runs with a learned filter radius."""


main.add_command(gen_dns)
main.add_command(train)
main.add_command(evaluate)
main.add_command(compare)
main.add_command(config_dump)

if __name__ == "__main__":
    main()
