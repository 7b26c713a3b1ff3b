"""Download public reference-rate files into a content-addressed cache.

Layout under the cache directory::

    objects/<sha256 of content>     payload
    meta/<sha256 of url>.json       url, digest, length, ETag, Last-Modified

A cached URL is revalidated with ``If-None-Match`` / ``If-Modified-Since``
when the server supplied validators; on a network failure the cached copy is
served.
"""

from __future__ import annotations

import hashlib
import http.client
import json
import os
import socket
import tempfile
import urllib.error
import urllib.request
from pathlib import Path
from typing import Optional

from .core import DiffcastError

CACHE_ENV = "DIFFCAST_CACHE"


class FetchError(DiffcastError, OSError):
    """``cause`` is one of ``dns``, ``timeout``, ``http``, ``network``, ``integrity``."""

    def __init__(self, message: str, cause: str, status: Optional[int] = None):
        super().__init__(message)
        self.cause = cause
        self.status = status


class IntegrityError(FetchError):
    def __init__(self, message: str):
        super().__init__(message, "integrity")


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "diffcast"


def _url_key(url: str) -> str:
    return hashlib.sha256(url.encode()).hexdigest()


def _load_meta(cache: Path, url: str) -> Optional[dict]:
    meta_path = cache / "meta" / f"{_url_key(url)}.json"
    try:
        meta = json.loads(meta_path.read_text())
    except (OSError, ValueError):
        return None
    if not (cache / "objects" / meta.get("sha256", "")).is_file():
        return None
    return meta


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".part-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _classify(exc: BaseException) -> tuple[str, str]:
    reason = getattr(exc, "reason", exc)
    if isinstance(reason, socket.gaierror):
        return "dns", f"DNS lookup failed: {reason}"
    if isinstance(reason, (socket.timeout, TimeoutError)):
        return "timeout", f"timed out: {reason}"
    return "network", f"network error: {reason}"


def fetch(url: str, cache_dir=None, timeout: float = 30.0) -> Path:
    """Return a local path holding the content of ``url``."""
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    meta = _load_meta(cache, url)

    request = urllib.request.Request(url, headers={"User-Agent": "diffcast"})
    if meta:
        if meta.get("etag"):
            request.add_header("If-None-Match", meta["etag"])
        if meta.get("last_modified"):
            request.add_header("If-Modified-Since", meta["last_modified"])

    try:
        with urllib.request.urlopen(request, timeout=timeout) as resp:
            expected = resp.headers.get("Content-Length")
            try:
                body = resp.read()
            except http.client.IncompleteRead as exc:
                raise IntegrityError(
                    f"{url}: truncated download ({len(exc.partial)} bytes, "
                    f"expected {expected})"
                ) from exc
            etag = resp.headers.get("ETag")
            last_modified = resp.headers.get("Last-Modified")
    except urllib.error.HTTPError as exc:
        if exc.code == 304 and meta:
            return cache / "objects" / meta["sha256"]
        raise FetchError(f"{url}: HTTP {exc.code} {exc.reason}", "http", exc.code) from exc
    except (urllib.error.URLError, socket.timeout, TimeoutError, ConnectionError) as exc:
        cause, message = _classify(exc)
        if meta:
            return cache / "objects" / meta["sha256"]
        raise FetchError(f"{url}: {message}", cause) from exc

    if expected is not None and int(expected) != len(body):
        raise IntegrityError(f"{url}: received {len(body)} bytes, Content-Length says {expected}")

    digest = hashlib.sha256(body).hexdigest()
    obj = cache / "objects" / digest
    if not obj.is_file():
        _atomic_write(obj, body)
    new_meta = {"url": url, "sha256": digest, "length": len(body),
                "etag": etag, "last_modified": last_modified}
    _atomic_write(cache / "meta" / f"{_url_key(url)}.json",
                  json.dumps(new_meta, indent=2, sort_keys=True).encode())
    return obj
