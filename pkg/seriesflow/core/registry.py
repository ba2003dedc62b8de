"""Builds a registry of all available command functions in seriesflow modules.

A command is a plain function decorated with ``@command``. Its command line arguments are derived from its
signature: the type hint decides how a value is parsed and a ``Config`` default is looked up in the configuration
when the option is not given.
"""
import argparse
import importlib
import inspect
import pkgutil
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

import typing_inspect

from seriesflow.core import config as seriesflow_config
from seriesflow.core import paths
from seriesflow.core.series import Backend, parse_scalar
from seriesflow.util.classes import Config, ScalarArg
from seriesflow.util.constants import EXIT_OK
from seriesflow.util.misc import InvalidParameter, SeriesflowError

modules_path = ".".join(("seriesflow", paths.modules_dir))


class Module:
    """Class holding data about seriesflow modules."""

    def __init__(self, name):
        self.name = name
        self.functions: Dict[str, "Command"] = {}
        self.description = None


@dataclass
class Command:
    """A registered command function."""

    name: str
    description: str
    function: Callable
    module_name: str
    config: List[Config] = field(default_factory=list)

    def parameters(self):
        return inspect.signature(self.function).parameters


@dataclass
class JobSpec:
    """One command invocation: the command name and its arguments as given on the command line.

    Arguments that were not given are None and get their value from the configuration or the function default.
    """

    command: str
    arguments: Dict[str, Any] = field(default_factory=dict)


# All loaded seriesflow modules with their functions
modules: Dict[str, Module] = {}

# All commands by command line name
commands: Dict[str, Command] = {}


def find_modules(no_import: bool = False) -> list:
    """Find seriesflow modules and optionally import them.

    By importing a module containing command functions, the functions will automatically be
    added to the registry.

    Args:
        no_import: Set to True to disable importing of modules.

    Returns:
        A list of available module names.
    """
    modules_full_path = paths.seriesflow_path / paths.modules_dir
    module_names = []
    for module in pkgutil.iter_modules([str(modules_full_path)]):
        module_names.append(module.name)
        if not no_import:
            m = importlib.import_module(".".join((modules_path, module.name)))
            add_module_metadata(m, module.name)
    return module_names


def add_module_metadata(module, module_name):
    """Add module metadata."""
    if module_name not in modules:
        modules[module_name] = Module(module_name)
    modules[module_name].description = getattr(module, "__description__", module.__doc__)


def _get_module_name(module_string: str) -> str:
    """Extract module name from dotted path, i.e. 'seriesflow.modules.pvi.commands' -> 'pvi'."""
    if module_string.startswith(modules_path):
        return module_string[len(modules_path) + 1:].split(".")[0]
    return module_string.split(".")[0]


def command(name: str, description: str, config: Optional[List[Config]] = None):
    """Return a decorator for command functions, adding them to the command registry.

    Args:
        name: Name of the command on the command line, e.g. 'pvi-solve'.
        description: One line description shown by 'seriesflow commands' and in the help text.
        config: List of Config instances defining config options used by the command.
    """
    def decorator(f):
        """Add wrapped function to registry."""
        _add_to_registry(Command(name=name, description=description, function=f,
                                 module_name=_get_module_name(f.__module__), config=config or []))
        return f

    return decorator


def _add_to_registry(cmd: Command):
    """Add function to command registry. Used by command."""
    if cmd.name in commands:
        if commands[cmd.name].function is cmd.function:
            return
        raise SeriesflowError(f"The command '{cmd.name}' in module '{cmd.module_name}' collides with a command "
                              f"in module '{commands[cmd.name].module_name}'.", "seriesflow", "registry")

    for c in cmd.config:
        handle_config(c, cmd.module_name, cmd.name)

    for param in cmd.parameters().values():
        if isinstance(param.default, Config):
            seriesflow_config.add_config_usage(param.default.name, cmd.name)

    if cmd.module_name not in modules:
        modules[cmd.module_name] = Module(cmd.module_name)
    modules[cmd.module_name].functions[cmd.function.__name__] = cmd
    commands[cmd.name] = cmd


def handle_config(cfg: Config, module_name: str, command_name: Optional[str] = None) -> None:
    """Handle Config instances."""
    if not cfg.name.startswith(module_name + "."):
        raise ValueError("Config option '{}' in module '{}' doesn't include module "
                         "name as prefix.".format(cfg.name, module_name))
    if not cfg.description:
        raise ValueError(f"Missing description for configuration key '{cfg.name}' in module '{module_name}'.")
    # The same key may be declared by several commands of a module, as long as they agree
    try:
        existing = seriesflow_config._get(cfg.name, seriesflow_config.config_structure)
    except KeyError:
        existing = None
    if existing is not None and existing.get("_default") != cfg.default:
        raise ValueError(f"The config variable '{cfg.name}' in '{command_name or module_name}' has already been "
                         f"declared with another default value.")
    if cfg.default is not None:
        seriesflow_config.set_default(cfg.name, cfg.default)
    if existing is None:
        seriesflow_config.add_to_structure(cfg.name, cfg.default, description=cfg.description, command=command_name)
    elif command_name:
        seriesflow_config.add_config_usage(cfg.name, command_name)


def get_type_hint_type(type_hint):
    """Given a type hint, return the type, whether it's contained in a List and whether it's Optional."""
    optional = typing_inspect.is_optional_type(type_hint)
    if optional:
        type_hint = typing_inspect.get_args(type_hint)[0]
    origin = typing_inspect.get_origin(type_hint)

    is_list = False

    if origin in (list, List, tuple, Tuple):
        is_list = True
        args = typing_inspect.get_args(type_hint)
        if args and not type(args[0]) == TypeVar:
            type_ = args[0]
        else:
            type_ = origin
    else:
        type_ = type_hint

    return type_, is_list, optional


def option_name(parameter: str) -> str:
    return "--" + parameter.replace("_", "-")


def _config_help(cfg: Config) -> str:
    try:
        return seriesflow_config.get_config_description(cfg.name) or ""
    except (KeyError, AttributeError):
        return cfg.description or ""


def add_arguments(subparser: argparse.ArgumentParser, cmd: Command) -> None:
    """Add one option per function parameter to a subparser."""
    required_args = subparser.add_argument_group("required named arguments")
    for name, param in cmd.parameters().items():
        arg_type, is_list, _ = get_type_hint_type(param.annotation) \
            if param.annotation is not inspect.Parameter.empty else (str, False, False)
        required = param.default is inspect.Parameter.empty
        f_args = {"dest": name, "default": None}
        help_text = _config_help(param.default) if isinstance(param.default, Config) else ""

        if arg_type is bool:
            f_args["action"] = "store_true"
        else:
            if arg_type is Backend:
                f_args["choices"] = [b.value for b in Backend]
            f_args["type"] = int if arg_type is int else str
            if is_list:
                f_args["nargs"] = "+"
            f_args["metavar"] = {int: "N", float: "X", ScalarArg: "P/Q", Backend: "BACKEND"}.get(arg_type, "VALUE")

        if isinstance(param.default, Config):
            help_text = f"{help_text} (default: config key '{param.default.name}')".strip()
        elif not required and param.default is not None and arg_type is not bool:
            help_text = f"{help_text} (default: {param.default})".strip()

        if required:
            required_args.add_argument(option_name(name), required=True, help=help_text or " ", **f_args)
        else:
            subparser.add_argument(option_name(name), help=help_text or " ", **f_args)


def job_from_args(args: argparse.Namespace) -> JobSpec:
    """Collect the command's own arguments from a parsed namespace."""
    cmd = commands[args.command]
    return JobSpec(cmd.name, {name: getattr(args, name, None) for name in cmd.parameters()})


def _convert(value: Any, arg_type, name: str):
    """Convert a command line or config value to the parameter type. Scalars are left for the backend pass."""
    if value is None or arg_type in (ScalarArg, inspect.Parameter.empty):
        return value
    try:
        if arg_type is Backend:
            return value if isinstance(value, Backend) else Backend(str(value))
        if arg_type is bool:
            return bool(value)
        if arg_type is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if arg_type is float:
            return float(value)
        if arg_type is str:
            return str(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"Invalid value {value!r} for '{option_name(name)}'.")
    return value


def resolve_arguments(job: JobSpec) -> Dict[str, Any]:
    """Turn a job's raw arguments into the keyword arguments of the command function.

    Missing values come from the configuration for Config defaults, and from the function default otherwise.
    ScalarArg values are parsed with the command's 'backend' argument; commands without one get the text.
    """
    if job.command not in commands:
        raise SeriesflowError(f"Unknown command '{job.command}'.", "seriesflow", "registry")
    cmd = commands[job.command]
    arguments = {}
    scalars = []
    for name, param in cmd.parameters().items():
        value = job.arguments.get(name)
        if value is None:
            if isinstance(param.default, Config):
                value = seriesflow_config.get(param.default.name, param.default.default)
            elif param.default is not inspect.Parameter.empty:
                value = param.default
            else:
                raise InvalidParameter(f"The command '{cmd.name}' needs '{option_name(name)}'.")
        arg_type, is_list, _ = get_type_hint_type(param.annotation) \
            if param.annotation is not inspect.Parameter.empty else (inspect.Parameter.empty, False, False)
        if is_list and value is not None:
            value = [_convert(v, arg_type, name) for v in value]
        else:
            value = _convert(value, arg_type, name)
        if arg_type is ScalarArg and value is not None:
            scalars.append((name, is_list))
        arguments[name] = value

    backend = arguments.get("backend")
    if isinstance(backend, Backend):
        for name, is_list in scalars:
            value = arguments[name]
            arguments[name] = [parse_scalar(v, backend) for v in value] if is_list else parse_scalar(value, backend)
    return arguments


def run(job: JobSpec) -> int:
    """Run one command and return its exit status."""
    arguments = resolve_arguments(job)
    status = commands[job.command].function(**arguments)
    return EXIT_OK if status is None else int(status)
