"""
Install phase: pick npm or yarn, install dependencies, and optionally list
what ended up in node_modules.
"""

import logging
import shlex
from dataclasses import dataclass
from enum import Enum

from src.core.executor import run_command

logger = logging.getLogger(__name__)

# How much of a failed install's output goes into the report
ERROR_TAIL_CHARS = 2000


class PackageManager(str, Enum):
    NPM = "npm"
    YARN = "yarn"


INSTALL_COMMANDS = {
    PackageManager.NPM: "npm install",
    PackageManager.YARN: "yarn",
}

# Production-mode installs leave devDependencies out of node_modules
PRODUCTION_INSTALL_COMMANDS = {
    PackageManager.NPM: "npm install --omit=dev",
    PackageManager.YARN: "yarn install --production=true",
}


@dataclass
class InstallReport:
    installer_command: PackageManager
    succeeded: bool
    timed_out: bool = False
    error_detail: str | None = None
    dependencies: list | None = None
    outcome: object = None  # ExecutionOutcome, surfaced in verbose mode

    def to_dict(self, verbose=False):
        data = {"installer_command": self.installer_command.value}
        if not self.succeeded:
            data["ERROR"] = True
            data["timed_out"] = self.timed_out
            data["error_detail"] = self.error_detail
        if verbose and self.outcome is not None:
            data["output"] = self.outcome.to_dict()
        return data


def detect_package_manager(wc):
    """yarn when the repo has a yarn.lock, npm otherwise."""
    if (wc.root / "yarn.lock").is_file():
        return PackageManager.YARN
    return PackageManager.NPM


def script_command(manager, script_name):
    """Shell command that runs one manifest script with the given manager."""
    return f"{manager.value} run {shlex.quote(script_name)}"


def install(wc, cfg, manager=None, runner=run_command):
    """
    Install the package's dependencies under cfg.install_timeout.

    Never raises for a failed install: the report records it and the later
    phases still run.
    """
    manager = manager or detect_package_manager(wc)
    logger.info("Installing %s with %s", wc.root.name, manager.value)
    outcome = runner(INSTALL_COMMANDS[manager], wc.root, cfg.install_timeout)

    if outcome.succeeded:
        return InstallReport(installer_command=manager, succeeded=True, outcome=outcome)

    if outcome.timed_out:
        detail = f"install timed out after {cfg.install_timeout} ms"
    else:
        detail = (outcome.stderr.strip() or outcome.stdout.strip())[-ERROR_TAIL_CHARS:]
        detail = detail or f"install exited with status {outcome.exit_status}"
    logger.warning("Install failed for %s: %s", wc.root.name, detail.splitlines()[-1])
    return InstallReport(
        installer_command=manager,
        succeeded=False,
        timed_out=outcome.timed_out,
        error_detail=detail,
        outcome=outcome,
    )


def list_node_modules(root):
    """Sorted top-level package names under root/node_modules, scoped ones as @scope/name."""
    modules = root / "node_modules"
    if not modules.is_dir():
        return []

    names = set()
    for entry in modules.iterdir():
        if entry.name.startswith(".") or not entry.is_dir():
            continue
        if entry.name.startswith("@"):
            for scoped in entry.iterdir():
                if scoped.is_dir() and not scoped.name.startswith("."):
                    names.add(f"{entry.name}/{scoped.name}")
        else:
            names.add(entry.name)
    return sorted(names)


def enumerate_dependencies(wc, include_dev, timeout, manager=None, runner=run_command):
    """
    List the packages installed under node_modules (top level only).

    Without include_dev the install is redone in production mode first, so
    devDependencies are pruned rather than subtracted after the fact. The
    pipeline runs this after the test phase because of that pruning.
    """
    if not include_dev:
        manager = manager or detect_package_manager(wc)
        outcome = runner(PRODUCTION_INSTALL_COMMANDS[manager], wc.root, timeout)
        if not outcome.succeeded:
            logger.warning("Production install for dependency listing failed in %s", wc.root.name)

    deps = list_node_modules(wc.root)
    logger.info("%s has %d installed dependencies", wc.root.name, len(deps))
    return deps
