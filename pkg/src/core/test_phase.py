"""
Test phase: run each selected test script, classify it, and count the
passing / failing tests it reports.
"""

import logging
from dataclasses import dataclass, field

from src.core.executor import run_command
from src.core.install_phase import PackageManager, script_command
from src.parsers.output_parsers import parse_framework_output, sniff_framework
from src.parsers.tool_catalog import classify_command

logger = logging.getLogger(__name__)

ERROR_TAIL_CHARS = 2000


@dataclass
class TestCommandReport:
    script_name: str
    num_passing: int = 0
    num_failing: int = 0
    test_infras: list = field(default_factory=list)
    linters: list = field(default_factory=list)
    coverage_tools: list = field(default_factory=list)
    nested_test_commands: list = field(default_factory=list)
    runs_new_user_tests: bool = False
    timed_out: bool = False
    error: str | None = None
    raw_output: str | None = None

    # not a pytest test class despite the name
    __test__ = False

    def to_dict(self, verbose=False):
        data = {
            "num_passing": self.num_passing,
            "num_failing": self.num_failing,
            "test_infras": list(self.test_infras),
            "linters": list(self.linters),
            "coverage_tools": list(self.coverage_tools),
            "nested_test_commands": list(self.nested_test_commands),
            "runs_new_user_tests": self.runs_new_user_tests,
            "timed_out": self.timed_out,
        }
        if self.error is not None:
            data["ERROR"] = self.error
        if verbose and self.raw_output is not None:
            data["raw_output"] = self.raw_output
        return data


def count_tests(frameworks, output):
    """
    Sum the counts from every framework's grammar.

    Returns:
        (num_passing, num_failing, recognized) where recognized means at
        least one grammar found its summary.
    """
    passing = failing = 0
    recognized = False
    for framework in frameworks:
        result = parse_framework_output(framework, output)
        if result.recognized:
            recognized = True
            passing += result.num_passing
            failing += result.num_failing
    return passing, failing, recognized


def run_test_command(wc, name, scripts, cfg, manager, runner=run_command):
    """Run and analyze a single test script."""
    command_string = scripts.entries[name]
    classification = classify_command(name, command_string, scripts.names())
    report = TestCommandReport(
        script_name=name,
        test_infras=list(classification.frameworks),
        linters=list(classification.linters),
        coverage_tools=list(classification.coverage_tools),
        nested_test_commands=list(classification.nested),
    )

    outcome = runner(script_command(manager, name), wc.root, cfg.test_timeout)
    output = outcome.combined_output
    report.timed_out = outcome.timed_out
    if cfg.verbose_mode:
        report.raw_output = output

    frameworks = list(classification.frameworks)
    if not classification.names_any_tool and not classification.nested:
        # custom runner (node ./run-tests.js): try every grammar
        sniffed = sniff_framework(output)
        if sniffed is not None:
            logger.debug("Output of %r looks like %s", name, sniffed[0])
            frameworks = [sniffed[0]]
            report.test_infras = frameworks

    passing, failing, recognized = count_tests(frameworks, output)
    report.runs_new_user_tests = recognized and passing + failing > 0
    if report.runs_new_user_tests:
        report.num_passing, report.num_failing = passing, failing

    if outcome.timed_out:
        report.error = f"timed out after {cfg.test_timeout} ms"
    elif outcome.exit_status != 0 and not recognized:
        tail = (outcome.stderr.strip() or outcome.stdout.strip())[-ERROR_TAIL_CHARS:]
        report.error = tail or f"exit status {outcome.exit_status}"

    logger.info("Test script %r: %d passing, %d failing%s", name, report.num_passing,
                report.num_failing, " (timed out)" if report.timed_out else "")
    return report


def run_tests(wc, selected, scripts, cfg, manager=PackageManager.NPM, runner=run_command):
    """
    Run every selected test script in order, one at a time.

    Returns:
        dict script name -> TestCommandReport, in run order.
    """
    reports = {}
    for name in dict.fromkeys(selected):
        reports[name] = run_test_command(wc, name, scripts, cfg, manager, runner)
    return reports
