"""Functions for parsing the seriesflow configuration files."""

import copy
import logging
from collections import defaultdict
from functools import reduce
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from seriesflow.core import paths
from seriesflow.util.misc import SeriesflowError

log = logging.getLogger(__name__)

DEFAULT_CONFIG = paths.default_config_file

config_user = {}  # Dict holding the user config
config = {}  # Dict holding full configuration

# Dict with info about config structure, prepopulated with the module-independent keys
config_structure = {
    "backend": {
        "default": {"_source": "core", "_default": "exact",
                    "_description": "Coefficient representation when no backend is given: exact or float"}
    },
    "verify": {
        "float_tolerance": {"_source": "core", "_default": 1e-10,
                            "_description": "Relative tolerance factor of float verdicts"}
    },
    "log": {
        "level": {"_source": "core", "_default": "warning", "_description": "Console log level"},
        "file_level": {"_source": "core", "_default": None, "_description": "Log file level, no log file if unset"},
        "dir": {"_source": "core", "_default": "logs", "_description": "Directory for log files"}
    }
}

config_usage = defaultdict(set)  # For each config key, a set of commands using that key


def read_yaml(yaml_file: Union[str, Path]) -> dict:
    """Read YAML file and handle errors."""
    try:
        with open(yaml_file, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise SeriesflowError("An error occurred while reading the configuration file:\n" + str(e),
                              module="seriesflow", function="config")
    except FileNotFoundError:
        raise SeriesflowError(f"Could not find the config file '{yaml_file}'", module="seriesflow",
                              function="config")

    if data is not None and not isinstance(data, dict):
        raise SeriesflowError(f"The config file '{yaml_file}' must contain a mapping at the top level.",
                              module="seriesflow", function="config")
    return data or {}


def load_config(config_file: Optional[Union[str, Path]] = None, config_dict: Optional[dict] = None) -> None:
    """Load the default config and a user config and merge them into one config structure.

    Args:
        config_file: Path to a user config file. If None, the file named by $SERIESFLOW_CONFIG or the per-user
            config file is used when present.
        config_dict: Get user config from dictionary instead of config file.
    """
    # Read default config
    if DEFAULT_CONFIG.is_file():
        default_config = read_yaml(DEFAULT_CONFIG)
    else:
        log.warning("Default config file is missing: %s", DEFAULT_CONFIG)
        default_config = {}

    global config_user
    if config_dict is not None:
        config_user = copy.deepcopy(config_dict)
    else:
        config_file = config_file or paths.get_user_config_file()
        config_user = read_yaml(config_file) if config_file else {}

    # Merge default and user config and save to global config variable
    global config
    config = _merge_dicts(copy.deepcopy(config_user), copy.deepcopy(default_config))

    # Make sure that the root level only contains dictionaries
    for key in config:
        if not isinstance(config[key], dict):
            raise SeriesflowError(f"The config section '{key}' could not be parsed.", module="seriesflow",
                                  function="config")


def _get(name: str, config_dict=None):
    """Try to get value from config, raising an exception if key doesn't exist."""
    config_dict = config_dict if config_dict is not None else config
    # Handle dot notation
    return reduce(lambda c, k: c[k], name.split("."), config_dict)


def set_value(name: str, value: Any, overwrite=True, config_dict=None):
    """Set value in config, possibly using dot notation."""
    keys = name.split(".")
    prev = config_dict if config_dict is not None else config
    for key in keys[:-1]:
        prev.setdefault(key, {})
        prev = prev[key]
    if overwrite:
        prev[keys[-1]] = value
    else:
        prev.setdefault(keys[-1], value)


def get(name: str, default=None):
    """Get value from config, or return the supplied 'default' if key doesn't exist."""
    try:
        return _get(name)
    except (KeyError, TypeError):
        return default


def set_default(name: str, default=None):
    """Set default value for config variable."""
    # If config variable is already set to None but we get a better default value, replace the existing
    if default is not None:
        try:
            if _get(name) is None:
                set_value(name, default)
        except KeyError:
            set_value(name, default, overwrite=False)
    else:
        set_value(name, default, overwrite=False)


def _merge_dicts(user, default):
    """Merge user config with default config, letting user values override default values."""
    if isinstance(user, dict) and isinstance(default, dict):
        for k, v in default.items():
            if k not in user:
                user[k] = v
            else:
                user[k] = _merge_dicts(user[k], v)
    return user


def add_to_structure(name, default=None, description=None, command: Optional[str] = None):
    """Add config variable to config structure."""
    set_value(name,
              {"_default": default,
               "_description": description,
               "_source": "module"},
              config_dict=config_structure
              )

    if command:
        add_config_usage(name, command)


def get_config_description(name):
    """Get description for config key."""
    return _get(name, config_structure).get("_description")


def add_config_usage(config_key, command):
    """Add a command to the set of commands that are using a given config key."""
    config_usage[config_key].add(command)


def validate_module_config():
    """Make sure that commands don't try to access undeclared config keys."""
    for config_key in config_usage:
        try:
            _get(config_key, config_structure)
        except KeyError:
            commands = sorted(config_usage[config_key])
            raise SeriesflowError(
                "The command{} {} {} trying to access the config key '{}' which isn't declared anywhere.".format(
                    "s" if len(commands) > 1 else "", ", ".join(commands),
                    "are" if len(commands) > 1 else "is", config_key), "seriesflow", "config")


def validate_config(config_dict=None, structure=None, parent=""):
    """Make sure the user config doesn't contain invalid keys."""
    config_dict = config_dict if config_dict is not None else config_user
    structure = structure or config_structure
    for key in config_dict:
        path = (parent + "." + key) if parent else key
        if key not in structure:
            if not parent:
                raise SeriesflowError(f"Unknown key in config file: '{path}'. No module with that name found.",
                                      module="seriesflow", function="config")
            else:
                module_name = parent.split(".", 1)[0]
                raise SeriesflowError(f"Unknown key in config file: '{path}'. The module '{module_name}' "
                                      f"doesn't have an option with that name.",
                                      module="seriesflow", function="config")
        elif not structure[key].get("_source"):
            if not isinstance(config_dict[key], dict):
                raise SeriesflowError(f"The config key '{path}' must be a section, not a single value.",
                                      module="seriesflow", function="config")
            validate_config(config_dict[key], structure[key], path)
