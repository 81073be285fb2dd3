# src/config.py

"""
Handles toolkit configuration.

Provides default values for every tunable of the pipeline (threshold, kNN
neighbour count, cross-validation grids, parallelism) and lets a user JSON
file override them. A singleton instance `config` is exported for use across
the command line; library functions take explicit arguments and never read
the singleton themselves.
"""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional

logger = logging.getLogger(__name__)

# --- Constants ---

# Application name used for the per-user config directory
APP_NAME = "cptw"

# Name of the configuration file
CONFIG_FILE_NAME = "config.json"

# Environment overrides
CONFIG_ENV_VAR = "CPTW_CONFIG"
STOPWORDS_ENV_VAR = "CPTW_STOPWORDS"

# Project root (the parent of 'src') and the vendored SMART stopword list
PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_STOPWORDS_PATH = PROJECT_ROOT / "data" / "smart_stopwords.txt"


# --- Helper Function for Path Management ---

def get_app_dir() -> Path:
    """
    Gets the per-user configuration directory in a cross-platform way.

    - Windows: %APPDATA%/cptw
    - macOS:   ~/Library/Application Support/cptw
    - Linux:   $XDG_CONFIG_HOME/cptw or ~/.config/cptw

    Returns:
        Path: The directory that may hold `config.json`.
    """
    if sys.platform == "win32":
        app_data = os.getenv("APPDATA")
        if app_data:
            return Path(app_data) / APP_NAME
    elif sys.platform == "darwin":
        return Path.home() / "Library" / "Application Support" / APP_NAME
    else:
        xdg_config_home = os.getenv("XDG_CONFIG_HOME")
        if xdg_config_home:
            return Path(xdg_config_home) / APP_NAME
        return Path.home() / ".config" / APP_NAME

    return Path.home() / f".{APP_NAME}"


def inclusive_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive float range rounded to kill accumulation error."""
    count = int(round((stop - start) / step))
    return [round(start + i * step, 10) for i in range(count + 1)]


# --- Main Configuration Class ---

class ConfigManager:
    """
    Manages toolkit settings loaded from a JSON file over in-code defaults.

    Missing keys fall back to the defaults; unknown keys are kept so newer
    config files still load.
    """

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initializes the ConfigManager, defines defaults, and loads settings.

        Args:
            config_path: Explicit config file. Defaults to `$CPTW_CONFIG`, then
                         `config.json` inside `get_app_dir()`.
        """
        # --- Default Configuration Values ---
        self._defaults: dict[str, Any] = {
            "tau": 0.5,
            "fig1_tau": 0.4,
            "k": 5,
            "seed": 0,
            "folds": 5,
            "validation_draws": 3,
            "validation_fraction": 0.3,
            "normalize": "l2",
            "metric": "euclidean",
            "threads": 1,
            "block_size": 512,
            "min_token_len": 1,
            "idf_mode": "inside",
            "stopwords_path": None,
            "grid_k": list(range(1, 20)),
            "grid_tau": inclusive_range(0.0, 1.0, 0.05),
            "grid_k1": inclusive_range(1.0, 2.0, 0.25),
            "grid_b": inclusive_range(0.5, 1.0, 0.1),
            "grid_sif_alpha": [1e-2, 1e-3, 1e-4, 1e-5],
        }

        # --- Path Configuration ---
        if config_path is None:
            env_path = os.getenv(CONFIG_ENV_VAR)
            config_path = Path(env_path) if env_path else get_app_dir() / CONFIG_FILE_NAME
        self.config_path = Path(config_path)

        # --- Load and Apply Configuration ---
        self._config = dict(self._defaults)
        self.load_config()

    def load_config(self) -> None:
        """Loads configuration from the JSON file if it exists."""
        if not self.config_path.exists():
            return
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                user_config = json.load(f)
            if not isinstance(user_config, dict):
                raise TypeError("top-level JSON value must be an object")
            self._config.update(user_config)
            logger.debug(f"Loaded configuration from {self.config_path}")
        except (json.JSONDecodeError, TypeError, OSError) as e:
            logger.warning(f"Could not parse config file at {self.config_path} ({e}). Using defaults.")
            self._config = dict(self._defaults)

    def get(self, key: str, default=None):
        """Gets a configuration value by key."""
        return self._config.get(key, default)

    def as_dict(self) -> dict[str, Any]:
        """A copy of the resolved settings."""
        return dict(self._config)

    def stopwords_path(self, override: Optional[str] = None) -> Path:
        """
        Resolves the stopword file.

        Precedence: explicit override, `$CPTW_STOPWORDS`, the config value,
        then the vendored SMART list.
        """
        for candidate in (override, os.getenv(STOPWORDS_ENV_VAR), self.get("stopwords_path")):
            if candidate:
                return Path(candidate)
        return DEFAULT_STOPWORDS_PATH

    # --- Properties for easy, read-only access from other modules ---

    @property
    def TAU(self) -> float:
        """Default similarity threshold for build-sim, represent and iicr."""
        return float(self.get("tau"))

    @property
    def FIG1_TAU(self) -> float:
        """Threshold used by the fig1 demo."""
        return float(self.get("fig1_tau"))

    @property
    def K(self) -> int:
        """Default kNN neighbour count for the IICR sweep."""
        return int(self.get("k"))

    @property
    def SEED(self) -> int:
        return int(self.get("seed"))

    @property
    def FOLDS(self) -> int:
        return int(self.get("folds"))

    @property
    def VALIDATION_DRAWS(self) -> int:
        """Number of train/validation draws per test fold."""
        return int(self.get("validation_draws"))

    @property
    def VALIDATION_FRACTION(self) -> float:
        return float(self.get("validation_fraction"))

    @property
    def NORMALIZE(self) -> str:
        """Document vector normalization before distances ('l2' or 'none')."""
        return self.get("normalize")

    @property
    def METRIC(self) -> str:
        return self.get("metric")

    @property
    def THREADS(self) -> int:
        return int(self.get("threads"))

    @property
    def BLOCK_SIZE(self) -> int:
        """Rows per block when building the similarity matrix."""
        return int(self.get("block_size"))

    @property
    def MIN_TOKEN_LEN(self) -> int:
        return int(self.get("min_token_len"))

    @property
    def IDF_MODE(self) -> str:
        """Where CPTW_IDF applies the IDF factor ('inside' or 'outside' the log)."""
        return self.get("idf_mode")

    @property
    def GRIDS(self) -> dict[str, list]:
        """Hyperparameter grids keyed by parameter name."""
        return {
            "k": [int(v) for v in self.get("grid_k")],
            "tau": [float(v) for v in self.get("grid_tau")],
            "k1": [float(v) for v in self.get("grid_k1")],
            "b": [float(v) for v in self.get("grid_b")],
            "alpha": [float(v) for v in self.get("grid_sif_alpha")],
        }


# --- Singleton Instance ---
config = ConfigManager()
