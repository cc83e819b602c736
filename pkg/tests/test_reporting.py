"""Tests for the results document and results files."""

import json

import pytest

from src.core.build_phase import BuildReport
from src.core.errors import ReportWriteError
from src.core.install_phase import InstallReport, PackageManager
from src.core.test_phase import TestCommandReport
from src.utils.reporting import ResultsDocument, ResultsNamer, write_results


def full_document():
    return ResultsDocument(
        installation=InstallReport(installer_command=PackageManager.YARN, succeeded=True),
        dependencies=["tslib"],
        build=BuildReport(build_script_list=["build"]),
        testing={"test": TestCommandReport(script_name="test", num_passing=265, test_infras=["jest"],
                                           runs_new_user_tests=True, raw_output="Tests: 265 passed")},
        metadata={"repo_link": "https://github.com/streamich/memfs"},
    )


class TestResultsDocument:
    """Test document layout."""

    def test_section_order(self):
        doc = full_document()
        doc.scripts_over_code = []
        doc.ql_queries = []
        doc.setup_error = "x"
        assert list(doc.to_dict()) == ["installation", "dependencies", "build", "testing",
                                       "scripts_over_code", "QL_queries", "setup_error", "metadata"]

    def test_absent_sections_left_out(self):
        data = ResultsDocument(setup_error="NoRepoLink: nothing").to_dict()
        assert data == {"setup_error": "NoRepoLink: nothing", "metadata": {}}

    def test_verbose_only_when_asked(self):
        doc = full_document()
        assert "raw_output" not in doc.to_dict()["testing"]["test"]
        assert doc.to_dict(verbose=True)["testing"]["test"]["raw_output"] == "Tests: 265 passed"


class TestWriteResults:
    """Test results files on disk."""

    def test_writes_json(self, tmp_path):
        path = write_results(full_document(), "memfs", tmp_path)
        assert path.name == "memfs__results.json"
        data = json.loads(path.read_text())
        assert data["installation"] == {"installer_command": "yarn"}
        assert data["testing"]["test"]["num_passing"] == 265

    def test_scoped_name(self, tmp_path):
        assert write_results(ResultsDocument(), "@babel/core", tmp_path).name == "@babel-core__results.json"

    def test_creates_output_dir(self, tmp_path):
        assert write_results(ResultsDocument(), "x", tmp_path / "a" / "b").is_file()

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(ReportWriteError):
            write_results(ResultsDocument(), "x", blocker / "sub")

    def test_namer_avoids_collisions(self, tmp_path):
        namer = ResultsNamer()
        first = write_results(ResultsDocument(), "memfs", tmp_path, namer=namer)
        second = write_results(ResultsDocument(), "memfs", tmp_path, namer=namer)
        assert first.name == "memfs__results.json"
        assert second.name == "memfs_1__results.json"
