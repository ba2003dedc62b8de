"""Paths used by seriesflow."""
import os
from pathlib import Path
from typing import Optional

import appdirs

# Path to the 'seriesflow' package
seriesflow_path = Path(__file__).parent.parent

# Package-internal paths
modules_dir = "modules"
resources_dir = seriesflow_path / "resources"
config_dir = resources_dir / "config"
default_config_file = config_dir / "config_default.yaml"

# Environment variable overriding the location of the user config
user_config_env = "SERIESFLOW_CONFIG"


def get_user_config_file() -> Optional[Path]:
    """Get location of the user config file, or None if there isn't one.

    The environment variable wins over the per-user config directory.
    """
    env_path = os.environ.get(user_config_env)
    if env_path:
        return Path(env_path).expanduser()
    path = Path(appdirs.user_config_dir("seriesflow"), "config.yaml")
    return path if path.is_file() else None
