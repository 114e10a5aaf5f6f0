"""
Process entry point: `python -m app.main <subcommand> ...`
"""
import sys

from app.harness.cli import cli


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
