"""
Command-line entry points.

diagnose_github_repos analyzes repository links, diagnose_npm_packages
analyzes npm package names. Both fan the work out over a thread pool and
exit 0 whenever the tool itself ran; per-package failures live in the
results files.
"""

import argparse
import logging
import os
import threading
from dataclasses import dataclass, field

from joblib import Parallel, delayed

from src.core import pipeline
from src.core.config import load_config
from src.core.errors import ConfigError, UsageError
from src.core.resolution import PackageSource
from src.utils.reporting import ResultsNamer

logger = logging.getLogger(__name__)

# Set by runDocker.sh inside the container
IN_DOCKER_ENV = "NPM_MINER_DOCKER"
DOCKER_RESULTS_DIR = "npm_filter_docker_results"
DEFAULT_WORKDIR = "TESTING_REPOS"

USAGE_EXIT = 2


def setup_logging(verbose=False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def default_output_dir():
    """
    Current directory, or the mounted results directory inside the container.

    The parallel wrapper script passes its own --output_dir.
    """
    if os.environ.get(IN_DOCKER_ENV):
        return DOCKER_RESULTS_DIR
    return "."


@dataclass
class BatchSpec:
    sources: list
    output_dir: str
    config_path: str | None = None
    parallelism: int = 1

    def __post_init__(self):
        if self.parallelism < 1:
            raise UsageError(f"parallelism must be at least 1, got {self.parallelism}")


@dataclass
class BatchSummary:
    analyzed: int = 0
    setup_failed: int = 0
    peak_in_flight: int = 0
    results_paths: list = field(default_factory=list)


class InFlightCounter:
    """Counts analyses currently running and remembers the peak."""

    def __init__(self):
        self._lock = threading.Lock()
        self.current = 0
        self.peak = 0

    def __enter__(self):
        with self._lock:
            self.current += 1
            self.peak = max(self.peak, self.current)
        return self

    def __exit__(self, *_):
        with self._lock:
            self.current -= 1


def parse_repo_list_file(path):
    """
    Read a repo list: one `<repo url> [commit sha]` per line, blank lines skipped.

    Raises:
        UsageError: unreadable file, or a line with more than two tokens.
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise UsageError(f"cannot read repo list file {path}: {e}") from e

    sources = []
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) > 2:
            raise UsageError(f"{path}:{lineno}: expected '<repo link> [commit SHA]', got {line.strip()!r}")
        try:
            sources.append(PackageSource.repo(tokens[0], tokens[1] if len(tokens) == 2 else None))
        except ValueError as e:
            raise UsageError(f"{path}:{lineno}: {e}") from e
    return sources


def run_batch(spec, cfg=None, workdir=DEFAULT_WORKDIR, html_override=None):
    """
    Analyze every source, at most spec.parallelism at a time.

    Workers are threads: the real work happens in subprocesses, and the
    results namer and the registry limiter are shared between them.

    Returns:
        BatchSummary with counts and the peak number of concurrent analyses.
    """
    cfg = cfg or load_config(spec.config_path)
    summary = BatchSummary()
    if not spec.sources:
        return summary

    namer = ResultsNamer()
    counter = InFlightCounter()

    def analyze(source):
        with counter:
            try:
                return pipeline.analyze_source(source, cfg, spec.output_dir, workdir,
                                               html_override=html_override, namer=namer)
            except Exception as e:
                # one broken package must not take the batch down
                logger.exception("Unexpected failure analyzing %s", source.package_name)
                return pipeline.record_crash(source, e, cfg, spec.output_dir, namer=namer)

    results = Parallel(n_jobs=spec.parallelism, require="sharedmem")(
        delayed(analyze)(source) for source in spec.sources
    )

    for result in results:
        summary.analyzed += 1
        if result.setup_failed:
            summary.setup_failed += 1
        if result.results_path is not None:
            summary.results_paths.append(result.results_path)
    summary.peak_in_flight = counter.peak
    return summary


def _add_common_arguments(parser):
    parser.add_argument("--config", help="path to a JSON configuration file")
    parser.add_argument("--output_dir", help="directory for results files (default: current directory)")
    parser.add_argument("-j", "--parallelism", type=int, default=os.cpu_count() or 1,
                        help="packages analyzed at once (default: number of cores)")
    parser.add_argument("--workdir", default=DEFAULT_WORKDIR,
                        help=f"where repositories are cloned (default: {DEFAULT_WORKDIR})")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def build_github_parser():
    parser = argparse.ArgumentParser(
        prog="diagnose_github_repo",
        description="Install, build and test JavaScript packages given as repository links.",
    )
    parser.add_argument("--repo_list_file", help="file with one '<repo link> [commit SHA]' per line")
    parser.add_argument("--repo_link", action="append", default=[], help="a repository to analyze")
    parser.add_argument("--repo_link_and_SHA", nargs=2, action="append", default=[],
                        metavar=("REPO_LINK", "SHA"), help="a repository pinned to a commit")
    _add_common_arguments(parser)
    return parser


def build_npm_parser():
    parser = argparse.ArgumentParser(
        prog="diagnose_npm_package",
        description="Install, build and test npm packages given by name.",
    )
    parser.add_argument("--packages", nargs="+", required=True, help="npm package names")
    parser.add_argument("--html", help="saved npm page for the package (one package only)")
    _add_common_arguments(parser)
    return parser


def _parse(parser, argv, check=None):
    """parse_args that reports usage errors as an exit status instead of exiting."""
    try:
        args = parser.parse_args(argv)
        if check is not None:
            check(parser, args)
        if args.parallelism < 1:
            parser.error("--parallelism must be at least 1")
        return args, None
    except SystemExit as e:
        return None, e.code if isinstance(e.code, int) else USAGE_EXIT


def _run(args, sources, html_override=None):
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        logger.error("%s", e)
        return USAGE_EXIT

    if not sources:
        logger.info("No packages given, nothing to do")
        return 0

    spec = BatchSpec(
        sources=sources,
        output_dir=args.output_dir or default_output_dir(),
        config_path=args.config,
        parallelism=args.parallelism,
    )
    summary = run_batch(spec, cfg, workdir=args.workdir, html_override=html_override)
    logger.info("Analyzed %d package(s), %d failed during setup; results in %s",
                summary.analyzed, summary.setup_failed, spec.output_dir)
    return 0


def diagnose_github_repos(argv=None):
    args, status = _parse(build_github_parser(), argv)
    if args is None:
        return status
    setup_logging(args.verbose)

    try:
        sources = parse_repo_list_file(args.repo_list_file) if args.repo_list_file else []
        sources += [PackageSource.repo(link) for link in args.repo_link]
        sources += [PackageSource.repo(link, sha) for link, sha in args.repo_link_and_SHA]
    except (UsageError, ValueError) as e:
        logger.error("%s", e)
        return USAGE_EXIT
    return _run(args, sources)


def _check_html(parser, args):
    if args.html and len(args.packages) != 1:
        parser.error("--html only works with exactly one package")


def diagnose_npm_packages(argv=None):
    args, status = _parse(build_npm_parser(), argv, check=_check_html)
    if args is None:
        return status
    setup_logging(args.verbose)

    try:
        sources = [PackageSource.npm(name) for name in args.packages]
    except ValueError as e:
        logger.error("%s", e)
        return USAGE_EXIT
    return _run(args, sources, html_override=args.html)
