"""
Manifest script discovery.

Reads package.json and picks the scripts that count as build or test
commands by plain substring matching.
"""

import json
import logging
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

MANIFEST_NAME = "package.json"


@dataclass
class ManifestScripts:
    """Script name -> command string, in manifest order."""
    entries: dict = field(default_factory=dict)
    error: str | None = None

    def names(self):
        return list(self.entries)

    def __len__(self):
        return len(self.entries)


def read_manifest(wc):
    """
    Read the scripts section of the working copy's package.json.

    A missing file or missing section gives an empty map. Malformed JSON also
    gives an empty map, with the problem kept in `error` for the report.
    """
    path = wc.root / MANIFEST_NAME
    if not path.is_file():
        logger.info("No %s in %s", MANIFEST_NAME, wc.root)
        return ManifestScripts()

    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        logger.warning("Unreadable %s in %s: %s", MANIFEST_NAME, wc.root, e)
        return ManifestScripts(error=f"malformed {MANIFEST_NAME}: {e}")

    scripts = manifest.get("scripts") if isinstance(manifest, dict) else None
    if not isinstance(scripts, dict):
        return ManifestScripts()

    entries = {}
    for name, command in scripts.items():
        if isinstance(command, str):
            entries[name] = command
        else:
            logger.warning("Skipping script %r: command is not a string", name)
    return ManifestScripts(entries=entries)


def select_commands(scripts, tracked, ignored_commands=(), ignored_substrings=()):
    """
    Pick script names to run, in manifest order.

    A script is selected when some tracked substring occurs in its name, no
    ignored_commands entry occurs in its name, and no ignored_substrings entry
    occurs in its command string. Matching is case-sensitive.
    """
    selected = []
    for name, command in scripts.entries.items():
        if not any(t in name for t in tracked):
            continue
        if any(ignored in name for ignored in ignored_commands):
            continue
        if any(sub in command for sub in ignored_substrings):
            continue
        selected.append(name)
    return selected
