"""
Build phase.

Runs the selected build scripts. A failing script goes to the back of the
queue so it can run again after scripts it may depend on. If a whole pass
over the queue produces no success we stop; the test phase runs regardless.
"""

import logging
from collections import deque
from dataclasses import dataclass, field

from src.core.executor import run_command
from src.core.install_phase import PackageManager, script_command

logger = logging.getLogger(__name__)


@dataclass
class BuildReport:
    build_script_list: list = field(default_factory=list)
    failed_scripts: list = field(default_factory=list)
    bailed: bool = False
    execution_order: list = field(default_factory=list)
    outcomes: dict = field(default_factory=dict)  # name -> last ExecutionOutcome

    def to_dict(self, verbose=False):
        data = {"build_script_list": list(self.build_script_list)}
        if self.failed_scripts:
            data["ERROR"] = True
            data["failed_scripts"] = list(self.failed_scripts)
        if self.bailed:
            data["bailed"] = True
        if verbose:
            data["build_outputs"] = {name: o.to_dict() for name, o in self.outcomes.items()}
        return data


def run_build(wc, selected, cfg, manager=PackageManager.NPM, runner=run_command):
    """
    Run build scripts with requeue-on-error.

    Each pass goes over the current queue once. Successes leave the queue,
    failures (nonzero exit or timeout) are appended again. A pass with zero
    successes ends the phase with bailed=True.

    Returns:
        BuildReport. Never raises for script failures.
    """
    report = BuildReport()
    queue = deque(dict.fromkeys(selected))

    while queue:
        progressed = False
        for _ in range(len(queue)):
            name = queue.popleft()
            outcome = runner(script_command(manager, name), wc.root, cfg.build_timeout)
            report.execution_order.append(name)
            report.outcomes[name] = outcome

            if outcome.succeeded:
                logger.info("Build script %r succeeded", name)
                report.build_script_list.append(name)
                progressed = True
            else:
                logger.info("Build script %r failed (%s), requeueing", name,
                            "timeout" if outcome.timed_out else f"exit {outcome.exit_status}")
                queue.append(name)

        if not progressed:
            report.bailed = True
            logger.warning("No build script made progress in %s, moving on to tests", wc.root.name)
            break

    report.failed_scripts = list(queue)
    return report
