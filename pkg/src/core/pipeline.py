"""
Analysis of one package, start to finish.

resolve -> clone -> install -> build -> test -> custom scripts/queries
-> dependency listing -> results file -> cleanup.

Only resolution and cloning can end an analysis early; every later phase
records its problems and hands over to the next one.
"""

import logging
from dataclasses import dataclass

from src.core.acquisition import cleanup, clone_repo
from src.core.build_phase import run_build
from src.core.custom_analysis import run_ql_queries, run_scripts_over_code
from src.core.discovery import read_manifest, select_commands
from src.core.errors import (
    AcquisitionError,
    ExecutorEnvironmentError,
    ReportWriteError,
    ResolutionError,
)
from src.core.install_phase import detect_package_manager, enumerate_dependencies, install
from src.core.resolution import RepoRef, normalize_repo_url, resolve_repo
from src.core.test_phase import run_tests
from src.utils.reporting import ResultsDocument, write_results

logger = logging.getLogger(__name__)


@dataclass
class AnalysisResult:
    package_name: str
    document: ResultsDocument
    results_path: object = None  # Path, None if writing failed
    setup_failed: bool = False


def _setup_error(exc):
    return f"{type(exc).__name__}: {exc}"


def _acquire(source, cfg, workdir, html_override, doc):
    """Resolve and clone. Returns the WorkingCopy, or None after recording a bail."""
    try:
        if source.kind == "npm_package":
            repo = resolve_repo(source.name, html_override=html_override)
        else:
            repo = RepoRef(url=normalize_repo_url(source.repo_url))
    except ResolutionError as e:
        logger.warning("Could not resolve %s: %s", source.package_name, e)
        doc.setup_error = _setup_error(e)
        return None

    doc.metadata["repo_link"] = repo.url
    try:
        wc = clone_repo(repo, workdir, commit_sha=source.commit_sha)
    except AcquisitionError as e:
        logger.warning("Could not acquire %s: %s", repo.url, e)
        doc.setup_error = _setup_error(e)
        return None

    if wc.commit_sha:
        doc.metadata["repo_commit_SHA"] = wc.commit_sha
    return wc


def run_phases(wc, package_name, cfg, output_dir, doc):
    """Install, build, test and custom analysis over an existing working copy."""
    scripts = read_manifest(wc)
    if scripts.error:
        doc.setup_error = scripts.error

    manager = detect_package_manager(wc)
    doc.installation = install(wc, cfg, manager)

    if cfg.track_build:
        selected = select_commands(scripts, cfg.tracked_build_commands,
                                   cfg.ignored_commands, cfg.ignored_substrings)
        logger.info("Build scripts for %s: %s", package_name, selected)
        doc.build = run_build(wc, selected, cfg, manager)

    if cfg.track_tests:
        selected = select_commands(scripts, cfg.tracked_test_commands,
                                   cfg.ignored_commands, cfg.ignored_substrings)
        logger.info("Test scripts for %s: %s", package_name, selected)
        doc.testing = run_tests(wc, selected, scripts, cfg, manager)

    if cfg.scripts_over_code:
        doc.scripts_over_code = run_scripts_over_code(wc, cfg.scripts_over_code, cfg)
    if cfg.ql_queries:
        doc.ql_queries = run_ql_queries(wc, cfg.ql_queries, package_name, output_dir, cfg)

    # last, because a production-mode reinstall prunes devDependencies
    if cfg.track_deps:
        doc.dependencies = enumerate_dependencies(wc, cfg.include_dev_deps,
                                                  cfg.deps_timeout, manager)
    return doc


def analyze_source(source, cfg, output_dir, workdir, html_override=None, namer=None):
    """
    Analyze one package and write its results file.

    Args:
        source: PackageSource.
        cfg: AnalysisConfig.
        output_dir: where results (JSON and query CSVs) go.
        workdir: parent directory for clones.
        html_override: saved npm page, single npm-package runs only.
        namer: batch-wide ResultsNamer.

    Returns:
        AnalysisResult. Package-level failures never raise.
    """
    package_name = source.package_name
    logger.info("Analyzing %s", package_name)
    doc = ResultsDocument()

    wc = _acquire(source, cfg, workdir, html_override, doc)
    setup_failed = wc is None
    if wc is not None:
        try:
            run_phases(wc, package_name, cfg, output_dir, doc)
        except ExecutorEnvironmentError as e:
            logger.error("Analysis of %s aborted: %s", package_name, e)
            doc.setup_error = _setup_error(e)
        finally:
            cleanup(wc, cfg.rm_after_cloning)

    result = AnalysisResult(package_name=package_name, document=doc, setup_failed=setup_failed)
    try:
        result.results_path = write_results(doc, package_name, output_dir,
                                             verbose=cfg.verbose_mode, namer=namer)
    except ReportWriteError as e:
        logger.error("%s", e)
    return result


def record_crash(source, exc, cfg, output_dir, namer=None):
    """Results file for an analysis that died with an unexpected exception."""
    doc = ResultsDocument(setup_error=_setup_error(exc))
    if source.repo_url:
        doc.metadata["repo_link"] = source.repo_url
    result = AnalysisResult(package_name=source.package_name, document=doc, setup_failed=True)
    try:
        result.results_path = write_results(doc, source.package_name, output_dir,
                                             verbose=cfg.verbose_mode, namer=namer)
    except ReportWriteError as e:
        logger.error("%s", e)
    return result
