"""Main seriesflow executable."""

import argparse
import sys
from typing import List, Optional

from seriesflow import __version__
from seriesflow.core import config, registry
from seriesflow.core.console import console
from seriesflow.core.log_handler import LogHandler
from seriesflow.core.prints import prettyprint_yaml, print_commands
from seriesflow.util.constants import EXIT_ERROR, EXIT_OK
from seriesflow.util.misc import SeriesflowError

LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]

# Commands handled here rather than by the registry
BUILTINS = ("config", "commands")


class CustomArgumentParser(argparse.ArgumentParser):
    """ArgumentParser with custom help message and better handling of misspelled commands."""

    def __init__(self, *args, **kwargs):
        """Init parser."""
        no_help = kwargs.pop("no_help", False)
        # Don't add default help message
        kwargs["add_help"] = False
        super().__init__(*args, **kwargs)
        # Add our own help message unless the (sub)parser is created with the no_help argument
        if not no_help:
            self.add_argument("-h", "--help", action="help", help="Show this help message and exit")

    def error(self, message):
        """Exit with the input error status, keeping 2 for failed verifications."""
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")

    def _check_value(self, action, value):
        """Check if command is valid, and if not, try to guess what the user meant."""
        if action.choices is not None and value not in action.choices:
            # Check for possible misspelling
            import difflib
            close_matches = difflib.get_close_matches(value, action.choices, n=1)
            if close_matches:
                message = f"invalid choice: '{value}' - maybe you meant '{close_matches[0]}'"
            else:
                choices = ", ".join(map(repr, action.choices))
                message = f"invalid choice: '{value}' (choose from {choices})"
            raise argparse.ArgumentError(action, message)


class CustomHelpFormatter(argparse.RawDescriptionHelpFormatter):
    """Custom help formatter for argparse, silencing subparser lists."""

    def _format_action(self, action):
        result = super()._format_action(action)
        if isinstance(action, argparse._SubParsersAction):
            return ""
        return result


def build_parser() -> CustomArgumentParser:
    """Create the argument parser with one subcommand per registered command."""
    parser = CustomArgumentParser(prog="seriesflow",
                                  description="Truncated power series solutions of nonlinear differential equations, "
                                              "with exact residual verification",
                                  allow_abbrev=False,
                                  formatter_class=CustomHelpFormatter)
    parser.add_argument("-v", "--version", action="version", version=f"seriesflow v{__version__}",
                        help="Show seriesflow's version number and exit")
    parser.add_argument("--config", metavar="FILE", help="User config file, overriding $SERIESFLOW_CONFIG")
    parser.add_argument("--log", metavar="LOGLEVEL", choices=LOG_LEVELS,
                        help="Set the console log level (default: config key 'log.level')")
    parser.add_argument("--log-to-file", metavar="LOGLEVEL", const="info", nargs="?", choices=LOG_LEVELS,
                        help="Write a log file below the directory in config key 'log.dir'")
    parser.add_argument("--debug", action="store_true", help="Show tracebacks of unexpected errors")

    description = ["", "Inspecting seriesflow:",
                   "   commands         List available commands",
                   "   config           Display the resolved configuration"]
    for module_name in sorted(registry.modules):
        module_commands = sorted(registry.modules[module_name].functions.values(), key=lambda c: c.name)
        if module_commands:
            description.extend(["", f"{module_name}:"])
            description.extend(f"   {cmd.name:<16} {cmd.description}" for cmd in module_commands)
    description.extend(["", "See 'seriesflow <command> -h' for help with a specific command"])

    subparsers = parser.add_subparsers(dest="command", title="commands", metavar="<command>",
                                       description="\n".join(description))
    subparsers.required = True

    subparsers.add_parser("commands", description="List available commands.")
    config_parser = subparsers.add_parser("config", description="Display the resolved configuration.")
    config_parser.add_argument("options", nargs="*", default=[], help="Specific option(s) in config to display")

    for name in sorted(registry.commands):
        cmd = registry.commands[name]
        doc = (cmd.function.__doc__ or "").strip()
        subparser = subparsers.add_parser(name, description=f"{cmd.description}.\n\n{doc}".strip(),
                                          formatter_class=argparse.RawDescriptionHelpFormatter)
        registry.add_arguments(subparser, cmd)
    return parser


def show_config(options: List[str]):
    """Print the whole configuration or the given keys."""
    if not options:
        prettyprint_yaml(config.config)
        return
    selected = {}
    for key in options:
        value = config.get(key, SeriesflowError)
        if value is SeriesflowError:
            raise SeriesflowError(f"No config key named '{key}'.", "seriesflow", "config")
        config.set_value(key, value, config_dict=selected)
    prettyprint_yaml(selected)


def main(argv: Optional[List[str]] = None) -> None:
    """Run one seriesflow command (main entry point for seriesflow)."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        registry.find_modules()
        parser = build_parser()
        args = parser.parse_args(argv or ["--help"])
        config.load_config(args.config)
        config.validate_module_config()
        config.validate_config()
    except SeriesflowError as e:
        console.print(f"[red]{e.message}[/red]", highlight=False)
        sys.exit(EXIT_ERROR)

    log_handler = LogHandler(log_level=args.log or config.get("log.level", "warning"),
                             log_file_level=args.log_to_file or config.get("log.file_level"),
                             log_dir=config.get("log.dir", "logs"),
                             summary=args.command not in BUILTINS)
    status = EXIT_ERROR
    try:
        if args.command == "commands":
            print_commands()
            status = EXIT_OK
        elif args.command == "config":
            show_config(args.options)
            status = EXIT_OK
        else:
            status = registry.run(registry.job_from_args(args))
    except SeriesflowError as e:
        console.print(f"[red]{e.message}[/red]", highlight=False)
        status = EXIT_ERROR
    except Exception:
        if args.debug:
            console.print_exception()
        else:
            console.print("[red]An unexpected error occurred. Run with --debug to see the traceback.[/red]")
    finally:
        log_handler.stop()

    sys.exit(status)


if __name__ == "__main__":
    main()
