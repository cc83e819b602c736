"""Tests for turning package names and repo links into clone URLs."""

from pathlib import Path

import pytest
import requests

from src.core.errors import NetworkFailure, NoRepoLink, ParseFailure
from src.core.resolution import (
    ExponentialBackoff,
    PackageSource,
    PolitenessLimiter,
    RegistryClient,
    normalize_repo_url,
    repo_link_from_html,
    repo_link_from_metadata,
    repo_name_from_url,
    resolve_repo,
)

PAGES_DIR = Path(__file__).parent / "fixtures" / "pages"


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text="", headers=None):
        self.status_code = status_code
        self._payload = payload
        self.text = text
        self.headers = headers or {}

    def json(self):
        if self._payload is None:
            raise ValueError("not json")
        return self._payload


class FakeSession:
    """Hands out queued responses (or raises queued exceptions) per URL prefix."""

    def __init__(self, routes):
        self.routes = {prefix: list(queue) for prefix, queue in routes.items()}
        self.requested = []

    def get(self, url, timeout=None, **kwargs):
        self.requested.append(url)
        for prefix, queue in self.routes.items():
            if url.startswith(prefix):
                item = queue.pop(0) if len(queue) > 1 else queue[0]
                if isinstance(item, Exception):
                    raise item
                return item
        raise AssertionError(f"unexpected request to {url}")


def make_client(routes, sleeps=None, max_retries=3):
    sleeps = sleeps if sleeps is not None else []
    return RegistryClient(
        session=FakeSession(routes),
        limiter=PolitenessLimiter(interval=0),
        backoff=ExponentialBackoff(num_retries=3, start=1, factor=2, cap=60),
        sleep=sleeps.append,
        max_retries=max_retries,
    )


class TestNormalizeRepoUrl:
    """Test the repository URL spellings npm allows."""

    @pytest.mark.parametrize("raw, expected", [
        ("https://github.com/streamich/memfs", "https://github.com/streamich/memfs"),
        ("git+https://github.com/streamich/memfs.git", "https://github.com/streamich/memfs"),
        ("git://github.com/stevemao/left-pad.git", "https://github.com/stevemao/left-pad"),
        ("git+ssh://git@github.com/user/repo.git", "https://github.com/user/repo"),
        ("git@github.com:user/repo.git", "https://github.com/user/repo"),
        ("github:user/repo", "https://github.com/user/repo"),
        ("gitlab:group/proj", "https://gitlab.com/group/proj"),
        ("user/repo", "https://github.com/user/repo"),
        ("http://github.com/user/repo/", "https://github.com/user/repo"),
        ("https://github.com/user/repo.git#v1.0.0", "https://github.com/user/repo"),
    ])
    def test_spellings(self, raw, expected):
        assert normalize_repo_url(raw) == expected

    def test_local_paths_pass_through(self):
        assert normalize_repo_url("/tmp/repo") == "/tmp/repo"
        assert normalize_repo_url("file:///tmp/repo") == "file:///tmp/repo"

    def test_garbage_rejected(self):
        with pytest.raises(ParseFailure):
            normalize_repo_url("ftp://example.com/x")

    def test_repo_name(self):
        assert repo_name_from_url("https://github.com/streamich/memfs.git") == "memfs"
        assert repo_name_from_url("git@github.com:memfs.git") == "memfs"
        assert repo_name_from_url("/tmp/repos/fixture-pkg/") == "fixture-pkg"


class TestPackageSource:
    """Test validation of analysis inputs."""

    def test_npm_source(self):
        source = PackageSource.npm("@babel/core")
        assert source.package_name == "@babel/core"

    def test_repo_source_name(self):
        source = PackageSource.repo("https://github.com/streamich/memfs", "863f3731")
        assert source.package_name == "memfs"
        assert source.commit_sha == "863f3731"

    def test_bad_sha(self):
        with pytest.raises(ValueError):
            PackageSource.repo("https://github.com/a/b", "not-a-sha")

    def test_empty_name(self):
        with pytest.raises(ValueError):
            PackageSource.npm("")


class TestHtmlScraping:
    """Test extracting repository links from package pages."""

    def test_sidebar_link(self):
        html = (PAGES_DIR / "memfs.html").read_text(encoding="utf-8")
        assert repo_link_from_html(html) == "https://github.com/streamich/memfs"

    def test_embedded_context(self):
        html = (PAGES_DIR / "script_context.html").read_text(encoding="utf-8")
        assert repo_link_from_html(html) == "git+https://github.com/stevemao/left-pad.git"

    def test_no_repository(self):
        html = (PAGES_DIR / "no_repository.html").read_text(encoding="utf-8")
        assert repo_link_from_html(html) is None

    @pytest.mark.parametrize("html", ["", "   ", "just some text"])
    def test_not_html(self, html):
        with pytest.raises(ParseFailure):
            repo_link_from_html(html)


class TestMetadata:
    """Test reading the repository field from registry JSON."""

    def test_object_form(self):
        assert repo_link_from_metadata({"repository": {"type": "git", "url": "git+https://x.com/a/b.git"}}) \
            == "git+https://x.com/a/b.git"

    def test_string_form(self):
        assert repo_link_from_metadata({"repository": "github:a/b"}) == "github:a/b"

    def test_latest_version_fallback(self):
        metadata = {"dist-tags": {"latest": "2.0.0"},
                    "versions": {"2.0.0": {"repository": {"url": "https://github.com/a/b"}}}}
        assert repo_link_from_metadata(metadata) == "https://github.com/a/b"

    def test_missing(self):
        assert repo_link_from_metadata({"name": "x"}) is None


class TestResolveRepo:
    """Test the full name -> RepoRef resolution."""

    def test_html_override_never_touches_network(self, monkeypatch):
        def refuse(*args, **kwargs):
            raise AssertionError("network used")
        monkeypatch.setattr(requests.Session, "get", refuse)

        ref = resolve_repo("memfs", html_override=PAGES_DIR / "memfs.html")
        assert ref.url == "https://github.com/streamich/memfs"
        assert ref.source_package == "memfs"

    def test_html_override_without_link(self):
        with pytest.raises(NoRepoLink):
            resolve_repo("lonely", html_override=PAGES_DIR / "no_repository.html")

    def test_from_registry_metadata(self):
        client = make_client({"https://registry.npmjs.org/": [
            FakeResponse(payload={"repository": {"url": "git+https://github.com/streamich/memfs.git"}})]})
        assert resolve_repo("memfs", client=client).url == "https://github.com/streamich/memfs"

    def test_scoped_name_quoted(self):
        client = make_client({"https://registry.npmjs.org/": [
            FakeResponse(payload={"repository": "github:babel/babel"})]})
        resolve_repo("@babel/core", client=client)
        assert client.session.requested == ["https://registry.npmjs.org/@babel%2Fcore"]

    def test_falls_back_to_page(self):
        page = (PAGES_DIR / "memfs.html").read_text(encoding="utf-8")
        client = make_client({
            "https://registry.npmjs.org/": [FakeResponse(payload={"name": "memfs"})],
            "https://www.npmjs.com/package/": [FakeResponse(text=page)],
        })
        assert resolve_repo("memfs", client=client).url == "https://github.com/streamich/memfs"

    def test_unknown_package(self):
        client = make_client({"https://registry.npmjs.org/": [FakeResponse(status_code=404)]})
        with pytest.raises(NoRepoLink):
            resolve_repo("no-such-package-xyz", client=client)

    def test_no_repository_anywhere(self):
        page = (PAGES_DIR / "no_repository.html").read_text(encoding="utf-8")
        client = make_client({
            "https://registry.npmjs.org/": [FakeResponse(payload={"name": "lonely"})],
            "https://www.npmjs.com/package/": [FakeResponse(text=page)],
        })
        with pytest.raises(NoRepoLink):
            resolve_repo("lonely", client=client)


class TestBackoff:
    """Test retrying on rate limits and connection errors."""

    def test_delays_grow_and_cap(self):
        assert list(ExponentialBackoff(num_retries=5, start=1, factor=2, cap=6)()) == [1, 2, 4, 6, 6]

    def test_retries_rate_limit_then_succeeds(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [
            FakeResponse(status_code=429), FakeResponse(status_code=503),
            FakeResponse(payload={"repository": "a/b"})]}, sleeps)
        assert client.package_metadata("x") == {"repository": "a/b"}
        assert len(sleeps) == 2
        assert 1 <= sleeps[0] <= 1.1
        assert 2 <= sleeps[1] <= 2.2

    def test_retry_after_honored(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [
            FakeResponse(status_code=429, headers={"Retry-After": "7"}),
            FakeResponse(payload={})]}, sleeps)
        client.package_metadata("x")
        assert 7 <= sleeps[0] <= 7.7

    def test_first_try_counts_against_max_retries(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [FakeResponse(status_code=429)]}, sleeps)
        with pytest.raises(NetworkFailure, match="after 3 attempt"):
            client.package_metadata("x")
        assert len(sleeps) == 2

    def test_backoff_schedule_can_end_retries_first(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [FakeResponse(status_code=503)]}, sleeps,
                             max_retries=10)
        with pytest.raises(NetworkFailure, match="after 4 attempt"):
            client.package_metadata("x")
        assert len(sleeps) == 3

    def test_single_attempt_never_sleeps(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [FakeResponse(status_code=429)]}, sleeps,
                             max_retries=1)
        with pytest.raises(NetworkFailure, match="after 1 attempt"):
            client.package_metadata("x")
        assert sleeps == []

    def test_connection_errors_retried(self):
        sleeps = []
        client = make_client({"https://registry.npmjs.org/": [
            requests.ConnectionError("refused"), FakeResponse(payload={"repository": "a/b"})]}, sleeps)
        assert client.package_metadata("x")["repository"] == "a/b"
        assert len(sleeps) == 1

    def test_connection_failure_falls_back_then_fails(self):
        client = make_client({
            "https://registry.npmjs.org/": [requests.ConnectionError("down")],
            "https://www.npmjs.com/package/": [requests.ConnectionError("down")],
        })
        with pytest.raises(NetworkFailure):
            resolve_repo("x", client=client)
