"""
Analysis configuration.

Loads the JSON config file (sections install, dependencies, build, test,
meta_info) and overlays it on the built-in defaults. Every field is optional.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from src.core.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_BUILD_COMMANDS = ("build", "compile", "init")
DEFAULT_TEST_COMMANDS = (
    "test", "unit", "cov", "ci", "integration", "lint", "travis",
    "e2e", "bench", "mocha", "jest", "ava", "tap", "jasmine",
)

# (section, key in file) -> AnalysisConfig field
CONFIG_SCHEMA = {
    "install": {
        "timeout": "install_timeout",
    },
    "dependencies": {
        "track_deps": "track_deps",
        "include_dev_deps": "include_dev_deps",
        "timeout": "deps_timeout",
    },
    "build": {
        "track_build": "track_build",
        "tracked_build_commands": "tracked_build_commands",
        "timeout": "build_timeout",
    },
    "test": {
        "track_tests": "track_tests",
        "tracked_test_commands": "tracked_test_commands",
        "timeout": "test_timeout",
    },
    "meta_info": {
        "VERBOSE_MODE": "verbose_mode",
        "ignored_commands": "ignored_commands",
        "ignored_substrings": "ignored_substrings",
        "rm_after_cloning": "rm_after_cloning",
        "scripts_over_code": "scripts_over_code",
        "QL_queries": "ql_queries",
        "codeql_command": "codeql_command",
    },
}

TIMEOUT_FIELDS = ("install_timeout", "deps_timeout", "build_timeout", "test_timeout")
FLAG_FIELDS = (
    "track_deps", "include_dev_deps", "track_build", "track_tests",
    "verbose_mode", "rm_after_cloning",
)
# Lists where an empty string would match everything
SUBSTRING_FIELDS = (
    "tracked_build_commands", "tracked_test_commands",
    "ignored_commands", "ignored_substrings",
)
PATH_LIST_FIELDS = ("scripts_over_code", "ql_queries")


@dataclass(frozen=True)
class AnalysisConfig:
    """
    Every tunable of one analysis run. Timeouts are in milliseconds.

    Immutable after loading, so one instance is shared by all workers
    of a batch.
    """
    install_timeout: int = 600_000

    track_deps: bool = False
    include_dev_deps: bool = False
    deps_timeout: int = 300_000

    track_build: bool = True
    tracked_build_commands: tuple = DEFAULT_BUILD_COMMANDS
    build_timeout: int = 300_000

    track_tests: bool = True
    tracked_test_commands: tuple = DEFAULT_TEST_COMMANDS
    test_timeout: int = 600_000

    verbose_mode: bool = False
    ignored_commands: tuple = ()
    ignored_substrings: tuple = ()
    rm_after_cloning: bool = False
    scripts_over_code: tuple = ()
    ql_queries: tuple = ()
    codeql_command: str = "codeql"

    def __post_init__(self):
        for name in TIMEOUT_FIELDS:
            value = getattr(self, name)
            # bool is an int subclass, reject it explicitly
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer (ms), got {value!r}")

        for name in FLAG_FIELDS:
            if not isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be true or false")

        for name in SUBSTRING_FIELDS + PATH_LIST_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{name} must be a list of strings")
            if name in SUBSTRING_FIELDS and any(v == "" for v in value):
                raise ConfigError(f"{name} must not contain empty strings")
            # normalize lists coming from JSON to tuples
            object.__setattr__(self, name, tuple(value))

        if not isinstance(self.codeql_command, str) or not self.codeql_command.strip():
            raise ConfigError("codeql_command must be a nonempty string")


def _overlay_values(raw):
    """Flatten the sectioned JSON object into AnalysisConfig keyword arguments."""
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a JSON object")

    overrides = {}
    for section, body in raw.items():
        schema = CONFIG_SCHEMA.get(section)
        if schema is None:
            logger.warning("Ignoring unknown config section %r", section)
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be a JSON object")

        for key, value in body.items():
            field_name = schema.get(key)
            if field_name is None:
                logger.warning("Ignoring unknown config key %s.%s", section, key)
                continue
            # lists replace the default wholesale
            overrides[field_name] = value
    return overrides


def load_config(path=None):
    """
    Load the analysis configuration.

    Args:
        path: optional path to a JSON config file. None means all defaults.

    Returns:
        AnalysisConfig with the file's fields overlaid on the defaults.

    Raises:
        ConfigError: unreadable file, malformed JSON, or invalid values.
    """
    if path is None:
        return AnalysisConfig()

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in config file {path}: {e}") from e

    overrides = _overlay_values(raw)
    logger.debug("Loaded %d config override(s) from %s", len(overrides), path)
    return AnalysisConfig(**overrides)


def config_to_dict(cfg):
    """Serialize a config back to the sectioned file layout (load_config's inverse)."""
    doc = {}
    for section, schema in CONFIG_SCHEMA.items():
        doc[section] = {}
        for key, field_name in schema.items():
            value = getattr(cfg, field_name)
            doc[section][key] = list(value) if isinstance(value, tuple) else value
    return doc
