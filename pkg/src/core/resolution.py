"""
Package name -> source repository.

Asks the registry's JSON metadata endpoint first and falls back to scraping
the package's web page. A saved copy of that page can be given instead
(the --html option), in which case nothing touches the network.
"""

import json
import logging
import random
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, urlparse

import requests
from bs4 import BeautifulSoup

from src.core.errors import NetworkFailure, NoRepoLink, ParseFailure

logger = logging.getLogger(__name__)

REGISTRY_URL = "https://registry.npmjs.org"
PACKAGE_PAGE_URL = "https://www.npmjs.com/package"
REQUEST_TIMEOUT_SECONDS = 30
RETRY_STATUSES = {429, 500, 502, 503, 504}

_HEX_RE = re.compile(r"^[0-9a-fA-F]+$")


@dataclass(frozen=True)
class PackageSource:
    """What to analyze: an npm package name, or a repo link with optional commit pin."""
    kind: str  # "npm_package" or "repo_link"
    name: str | None = None
    repo_url: str | None = None
    commit_sha: str | None = None

    def __post_init__(self):
        if self.kind == "npm_package":
            if not self.name or self.repo_url is not None:
                raise ValueError("npm_package sources need a name and no repo_url")
        elif self.kind == "repo_link":
            if not self.repo_url or self.name is not None:
                raise ValueError("repo_link sources need a repo_url and no name")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.commit_sha is not None and not _HEX_RE.match(self.commit_sha):
            raise ValueError(f"commit SHA must be a hex string, got {self.commit_sha!r}")

    @classmethod
    def npm(cls, name):
        return cls(kind="npm_package", name=name)

    @classmethod
    def repo(cls, url, commit_sha=None):
        return cls(kind="repo_link", repo_url=url, commit_sha=commit_sha)

    @property
    def package_name(self):
        """Name used for results files: the npm name, else the repo's last path segment."""
        if self.kind == "npm_package":
            return self.name
        return repo_name_from_url(self.repo_url)


@dataclass(frozen=True)
class RepoRef:
    url: str
    source_package: str | None = None


def repo_name_from_url(url):
    tail = url.rstrip("/").rsplit("/", 1)[-1]
    # scp-style remotes: git@host:user/repo.git
    tail = tail.rsplit(":", 1)[-1]
    if tail.endswith(".git"):
        tail = tail[:-4]
    return tail or "package"


def normalize_repo_url(raw):
    """
    Turn the many repository spellings npm allows into an https clone URL.

    git+https://host/x.git, git://host/x, git+ssh://git@host/x.git,
    git@host:x.git, github:user/repo and bare user/repo are all accepted.
    Local paths and file:// URLs pass through untouched.
    """
    url = raw.strip()
    if url.startswith("file://") or url.startswith("/"):
        return url

    shorthand = re.match(r"^(github|gitlab|bitbucket):(.+)$", url)
    if shorthand:
        host = {"github": "github.com", "gitlab": "gitlab.com",
                "bitbucket": "bitbucket.org"}[shorthand.group(1)]
        url = f"https://{host}/{shorthand.group(2)}"
    elif re.match(r"^[\w.-]+/[\w.-]+$", url):
        url = f"https://github.com/{url}"

    if url.startswith("git+"):
        url = url[len("git+"):]
    scp = re.match(r"^[\w.-]+@([\w.-]+):(.+)$", url)
    if scp:
        url = f"https://{scp.group(1)}/{scp.group(2)}"
    url = re.sub(r"^(git|ssh|http)://(?:[^@/]+@)?", "https://", url)
    url = url.split("#", 1)[0]
    if url.endswith(".git"):
        url = url[:-4]
    url = url.rstrip("/")

    parsed = urlparse(url)
    if parsed.scheme != "https" or not parsed.netloc:
        raise ParseFailure(f"not a usable repository URL: {raw!r}")
    return url


class PolitenessLimiter:
    """Token bucket with capacity one: at most one request per interval, process-wide."""

    def __init__(self, interval=1.0):
        self.interval = interval
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def acquire(self):
        with self._lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self.interval
        if wait > 0:
            time.sleep(wait)


class ExponentialBackoff:
    """Retry delays in seconds: start, start*factor, ... capped, num_retries of them."""

    def __init__(self, num_retries=5, start=1.0, factor=2.0, cap=60.0):
        self.num_retries = num_retries
        self.start = start
        self.factor = factor
        self.cap = cap

    def __call__(self):
        delay = self.start
        for _ in range(self.num_retries):
            yield min(delay, self.cap)
            delay *= self.factor


# Total tries per request, the first one included
MAX_REGISTRY_ATTEMPTS = 6

# One limiter per process, shared by every batch worker
REGISTRY_LIMITER = PolitenessLimiter()


class RegistryClient:
    """
    Small HTTP client for the registry that backs off on rate limiting.

    Retries on 429/5xx and connection errors. A Retry-After header wins over
    the computed delay when present, still bounded by the backoff cap.
    max_retries counts every attempt, the first one included, and the
    backoff schedule can end the retries sooner.
    """

    def __init__(self, session=None, limiter=REGISTRY_LIMITER, backoff=None, sleep=time.sleep,
                 max_retries=MAX_REGISTRY_ATTEMPTS):
        if max_retries < 1:
            raise ValueError(f"max_retries must be at least 1, got {max_retries}")
        self.max_retries = max_retries
        self.session = session or requests.Session()
        self.limiter = limiter
        self.backoff = backoff or ExponentialBackoff()
        self.sleep = sleep

    def get(self, url, **kwargs):
        delays = self.backoff()
        attempt = 0
        while True:
            attempt += 1
            self.limiter.acquire()
            try:
                response = self.session.get(url, timeout=REQUEST_TIMEOUT_SECONDS, **kwargs)
            except (requests.ConnectionError, requests.Timeout) as e:
                response, error = None, e
            else:
                error = None
                if response.status_code not in RETRY_STATUSES:
                    return response

            delay = next(delays, None) if attempt < self.max_retries else None
            if delay is None:
                detail = error or f"HTTP {response.status_code}"
                raise NetworkFailure(f"GET {url} failed after {attempt} attempt(s): {detail}")

            retry_after = response.headers.get("Retry-After") if response is not None else None
            if retry_after and retry_after.isdigit():
                delay = min(float(retry_after), self.backoff.cap)
            # a little jitter so parallel workers don't retry in lockstep
            delay = min(delay + random.uniform(0, 0.1 * delay), self.backoff.cap)
            logger.info("Registry busy for %s, retrying in %.1fs", url, delay)
            self.sleep(delay)

    def package_metadata(self, name):
        response = self.get(f"{REGISTRY_URL}/{quote(name, safe='@')}",
                            headers={"Accept": "application/json"})
        if response.status_code == 404:
            raise NoRepoLink(f"package {name!r} is not in the registry")
        if response.status_code != 200:
            raise NetworkFailure(f"registry answered HTTP {response.status_code} for {name!r}")
        try:
            return response.json()
        except ValueError as e:
            raise ParseFailure(f"registry metadata for {name!r} is not JSON") from e

    def package_page(self, name):
        response = self.get(f"{PACKAGE_PAGE_URL}/{name}")
        if response.status_code == 404:
            raise NoRepoLink(f"no npm page for package {name!r}")
        if response.status_code != 200:
            raise NetworkFailure(f"npm page answered HTTP {response.status_code} for {name!r}")
        return response.text


def _repository_field(value):
    if isinstance(value, str):
        return value
    if isinstance(value, dict) and isinstance(value.get("url"), str):
        return value["url"]
    return None


def repo_link_from_metadata(metadata):
    """Repository URL advertised in registry JSON, or None."""
    link = _repository_field(metadata.get("repository"))
    if link:
        return link
    # older documents only carry it on the version entries
    latest = metadata.get("dist-tags", {}).get("latest")
    version = metadata.get("versions", {}).get(latest, {})
    return _repository_field(version.get("repository"))


def repo_link_from_html(html):
    """
    Scrape the repository link out of an npm package page.

    Raises:
        ParseFailure: the text isn't an HTML page at all.
    """
    if not html or not html.strip():
        raise ParseFailure("empty package page")
    soup = BeautifulSoup(html, "html.parser")
    if soup.find() is None:
        raise ParseFailure("package page contains no HTML")

    # sidebar link: <a aria-labelledby="repository repository-link" href=...>
    for anchor in soup.find_all("a", href=True):
        labels = anchor.get("aria-labelledby") or ""
        if "repository" in labels.split():
            return anchor["href"]

    label = soup.find(id="repository-link")
    if label is not None:
        anchor = label.find_parent("a", href=True)
        if anchor is not None:
            return anchor["href"]
        text = label.get_text(strip=True)
        if text:
            return text

    # embedded page context JSON
    for script in soup.find_all("script"):
        match = re.search(r'"repository"\s*:\s*("(?:[^"\\]|\\.)*")', script.string or "")
        if match:
            return json.loads(match.group(1))
    return None


def resolve_repo(name, html_override=None, client=None):
    """
    Find the source repository of an npm package.

    Args:
        name: package name, scoped names included.
        html_override: path to a saved npm page; parsed instead of fetching.
        client: RegistryClient to use (tests inject one).

    Returns:
        RepoRef with a normalized https clone URL.

    Raises:
        NoRepoLink, NetworkFailure, ParseFailure.
    """
    if not name:
        raise ValueError("package name must be nonempty")

    if html_override is not None:
        html = Path(html_override).read_text(encoding="utf-8")
        link = repo_link_from_html(html)
        if not link:
            raise NoRepoLink(f"saved page {html_override} has no repository link for {name!r}")
        return RepoRef(url=normalize_repo_url(link), source_package=name)

    client = client or RegistryClient()
    link = None
    try:
        link = repo_link_from_metadata(client.package_metadata(name))
    except (NetworkFailure, ParseFailure) as e:
        logger.warning("Registry metadata lookup for %s failed (%s), trying the web page", name, e)

    if not link:
        link = repo_link_from_html(client.package_page(name))
    if not link:
        raise NoRepoLink(f"package {name!r} has no repository link")

    url = normalize_repo_url(link)
    logger.info("Resolved %s -> %s", name, url)
    return RepoRef(url=url, source_package=name)
