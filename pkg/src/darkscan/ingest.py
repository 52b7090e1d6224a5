"""Page fetching and visible-text segmentation.

A "segment" is one block-level run of visible text, the unit that gets
classified downstream. Extraction is built on the stdlib error-tolerant
html.parser; script/style/noscript/template/head subtrees and elements
hidden via attributes or inline style are never emitted.
"""
from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from html.parser import HTMLParser
from pathlib import Path
from urllib import robotparser
from urllib.parse import urlparse, urlunparse

import requests

from .errors import NetworkError, NotHtml, ParseFailure, RobotsDisallowed, TooLarge


class Origin(Enum):
    LIVE = "Live"
    FILE = "File"


@dataclass(frozen=True)
class PageSource:
    """Raw HTML for one page plus where and when it came from."""

    url: str
    html: str
    fetched_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc))
    origin: Origin = Origin.FILE


@dataclass(frozen=True)
class TextSegment:
    """One normalized visible-text run in document order."""

    segment_id: str
    text: str
    dom_path: str
    order_index: int
    page_url: str


@dataclass(frozen=True)
class FetchConfig:
    timeout: float = 10.0
    user_agent: str = "darkscan/0.1"
    respect_robots: bool = True
    max_bytes: int = 5_000_000
    renderer_hook: str | None = None

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_bytes <= 0:
            raise ValueError("max_bytes must be positive")


@dataclass(frozen=True)
class SegmentationRules:
    """Knobs for what counts as a classifiable segment."""

    min_chars: int = 3
    extract_attributes: bool = True


_WS_RE = re.compile(r" +")


def normalize_text(raw: str) -> str:
    """NFC-normalize, collapse all whitespace runs to single spaces, trim,
    and strip control characters."""
    text = unicodedata.normalize("NFC", raw)
    text = "".join(" " if ch.isspace() else ch for ch in text)
    text = "".join(ch for ch in text if unicodedata.category(ch) not in ("Cc", "Cf"))
    return _WS_RE.sub(" ", text).strip()


# Elements whose subtree is never visible text.
EXCLUDED_TAGS = frozenset({"script", "style", "noscript", "template", "head", "title"})

# Elements that terminate a text run. Inline elements (span, b, a, ...) do not.
BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "body", "button", "caption",
    "dd", "details", "dialog", "div", "dl", "dt", "fieldset", "figcaption",
    "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hr", "html", "legend", "li", "main", "nav", "ol", "optgroup", "option",
    "p", "pre", "section", "select", "summary", "table", "tbody", "td",
    "textarea", "tfoot", "th", "thead", "tr", "ul", "video",
})

_VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

_HIDDEN_STYLE_RE = re.compile(r"display\s*:\s*none|visibility\s*:\s*hidden", re.I)

# Attributes whose text users see even though it is not a text node.
_TEXT_ATTRS = ("alt", "title", "placeholder")


def _is_hidden(attrs: dict[str, str | None]) -> bool:
    if "hidden" in attrs:
        return True
    if (attrs.get("aria-hidden") or "").strip().lower() == "true":
        return True
    style = attrs.get("style") or ""
    return bool(_HIDDEN_STYLE_RE.search(style))


class _Frame:
    __slots__ = ("tag", "hidden", "excluded", "child_counts", "path")

    def __init__(self, tag: str, hidden: bool, excluded: bool, path: str):
        self.tag = tag
        self.hidden = hidden
        self.excluded = excluded
        self.child_counts: dict[str, int] = {}
        self.path = path


class _SegmentCollector(HTMLParser):
    """Streams an HTML document into ordered visible-text runs."""

    def __init__(self, rules: SegmentationRules):
        super().__init__(convert_charrefs=True)
        self.rules = rules
        self.stack: list[_Frame] = [_Frame("", False, False, "")]
        self.run_parts: list[str] = []
        self.run_path: str | None = None
        self.pending_attrs: list[tuple[str, str]] = []  # (text, dom_path)
        self.out: list[tuple[str, str]] = []  # (text, dom_path)

    # -- visibility state ------------------------------------------------

    def _suppressed(self) -> bool:
        top = self.stack[-1]
        return top.hidden or top.excluded

    def _child_path(self, tag: str) -> str:
        parent = self.stack[-1]
        n = parent.child_counts.get(tag, 0) + 1
        parent.child_counts[tag] = n
        seg = tag if n == 1 else f"{tag}:nth-of-type({n})"
        return f"{parent.path} > {seg}" if parent.path else seg

    # -- run management ----------------------------------------------------

    def _flush(self) -> None:
        if self.run_parts:
            text = "".join(self.run_parts)
            self.out.append((text, self.run_path or self.stack[-1].path))
            self.run_parts = []
            self.run_path = None
        if self.pending_attrs:
            self.out.extend(self.pending_attrs)
            self.pending_attrs = []

    def _queue_attr_text(self, tag: str, path: str, attrs: dict[str, str | None]) -> None:
        if not self.rules.extract_attributes:
            return
        for name in _TEXT_ATTRS:
            value = attrs.get(name)
            if value:
                self.pending_attrs.append((value, f"{path}@{name}"))
        if tag == "input" and (attrs.get("type") or "").lower() in ("button", "submit", "reset"):
            value = attrs.get("value")
            if value:
                self.pending_attrs.append((value, f"{path}@value"))

    # -- parser callbacks --------------------------------------------------

    def handle_starttag(self, tag: str, attrlist: list[tuple[str, str | None]]) -> None:
        attrs = dict(attrlist)
        parent = self.stack[-1]
        path = self._child_path(tag)
        hidden = parent.hidden or _is_hidden(attrs)
        excluded = parent.excluded or tag in EXCLUDED_TAGS

        if tag in BLOCK_TAGS or tag == "br":
            self._flush()
        if not (hidden or excluded):
            self._queue_attr_text(tag, path, attrs)
        if tag in _VOID_TAGS:
            return
        self.stack.append(_Frame(tag, hidden, excluded, path))

    def handle_startendtag(self, tag: str, attrlist: list[tuple[str, str | None]]) -> None:
        attrs = dict(attrlist)
        parent = self.stack[-1]
        path = self._child_path(tag)
        if tag in BLOCK_TAGS or tag == "br":
            self._flush()
        if not (parent.hidden or parent.excluded or _is_hidden(attrs)):
            self._queue_attr_text(tag, path, attrs)

    def handle_endtag(self, tag: str) -> None:
        if tag in _VOID_TAGS:
            return
        # Tolerant close: pop to the nearest matching open tag, if any.
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                if tag in BLOCK_TAGS:
                    self._flush()
                del self.stack[i:]
                return
        # Unmatched close tag: still a block boundary.
        if tag in BLOCK_TAGS:
            self._flush()

    def handle_data(self, data: str) -> None:
        if self._suppressed():
            return
        if not data.strip() and not self.run_parts:
            return
        if self.run_path is None:
            self.run_path = self._nearest_block_path()
        self.run_parts.append(data)

    def _nearest_block_path(self) -> str:
        for frame in reversed(self.stack):
            if frame.tag in BLOCK_TAGS:
                return frame.path
        return self.stack[-1].path

    def close(self) -> None:  # flush trailing run at EOF
        super().close()
        self._flush()


def extract_segments(
    page: PageSource, rules: SegmentationRules | None = None
) -> list[TextSegment]:
    """Split a page into normalized visible-text segments in document order.

    Segments shorter than rules.min_chars or containing no letters are
    dropped; duplicates are kept because position matters.
    """
    rules = rules or SegmentationRules()
    if not page.html or not page.html.strip():
        raise ParseFailure(f"no HTML content for {page.url}")

    collector = _SegmentCollector(rules)
    collector.feed(page.html)
    collector.close()

    segments: list[TextSegment] = []
    for text, dom_path in collector.out:
        norm = normalize_text(text)
        if len(norm) < rules.min_chars:
            continue
        if not any(ch.isalpha() for ch in norm):
            continue
        index = len(segments)
        sid = hashlib.sha1(
            f"{page.url}|{index}|{norm}".encode("utf-8")
        ).hexdigest()[:12]
        segments.append(TextSegment(sid, norm, dom_path, index, page.url))
    return segments


def visible_text(page: PageSource, rules: SegmentationRules | None = None) -> str:
    """The page's full normalized visible text (segment runs joined by spaces).

    Reference surface for the no-invented-text invariant: every extracted
    segment is a substring of this string.
    """
    rules = rules or SegmentationRules()
    collector = _SegmentCollector(rules)
    collector.feed(page.html)
    collector.close()
    return normalize_text(" ".join(text for text, _ in collector.out))


# --- fetching -----------------------------------------------------------


def _robots_allows(url: str, cfg: FetchConfig) -> bool:
    parts = urlparse(url)
    robots_url = urlunparse((parts.scheme, parts.netloc, "/robots.txt", "", "", ""))
    try:
        resp = requests.get(
            robots_url,
            timeout=cfg.timeout,
            headers={"User-Agent": cfg.user_agent},
        )
    except requests.RequestException:
        return True  # unreachable robots.txt does not block the audit
    if resp.status_code >= 400:
        return True
    parser = robotparser.RobotFileParser()
    parser.parse(resp.text.splitlines())
    return parser.can_fetch(cfg.user_agent, url)


def _sniff_charset(body: bytes, content_type: str) -> str:
    match = re.search(r"charset=([\w\-]+)", content_type, re.I)
    if match:
        return match.group(1)
    head = body[:2048].decode("ascii", errors="ignore")
    match = re.search(r'<meta[^>]+charset=["\']?([\w\-]+)', head, re.I)
    if match:
        return match.group(1)
    return "utf-8"


def fetch_page(url: str, cfg: FetchConfig | None = None) -> PageSource:
    """Fetch a live page, honoring robots.txt and the size budget."""
    cfg = cfg or FetchConfig()
    parts = urlparse(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ValueError(f"not an http(s) URL: {url!r}")

    if cfg.respect_robots and not _robots_allows(url, cfg):
        raise RobotsDisallowed(f"robots.txt disallows {url} for {cfg.user_agent!r}")

    if cfg.renderer_hook:
        html = _render_via_hook(url, cfg)
        return PageSource(url, html, datetime.now(timezone.utc), Origin.LIVE)

    try:
        resp = requests.get(
            url,
            timeout=cfg.timeout,
            headers={"User-Agent": cfg.user_agent},
            stream=True,
        )
    except requests.RequestException as exc:
        raise NetworkError(f"fetch failed for {url}: {exc}") from exc

    with resp:
        if resp.status_code >= 400:
            raise NetworkError(f"HTTP {resp.status_code} for {url}")
        content_type = resp.headers.get("Content-Type", "")
        if content_type and not re.search(r"html|xhtml", content_type, re.I):
            raise NotHtml(f"content-type {content_type!r} for {url}")

        chunks: list[bytes] = []
        total = 0
        for chunk in resp.iter_content(chunk_size=65536):
            total += len(chunk)
            if total > cfg.max_bytes:
                raise TooLarge(f"{url} exceeds {cfg.max_bytes} bytes")
            chunks.append(chunk)

    body = b"".join(chunks)
    if not body:
        raise NetworkError(f"empty response body for {url}")
    charset = _sniff_charset(body, content_type)
    try:
        html = body.decode(charset, errors="replace")
    except LookupError:
        html = body.decode("utf-8", errors="replace")
    return PageSource(url, html, datetime.now(timezone.utc), Origin.LIVE)


def _render_via_hook(url: str, cfg: FetchConfig) -> str:
    """Ask an external headless-browser endpoint for rendered HTML.

    Wire shape: POST {"url": ...} -> 200 {"html": "..."}.
    """
    try:
        resp = requests.post(cfg.renderer_hook, json={"url": url}, timeout=cfg.timeout)
    except requests.RequestException as exc:
        raise NetworkError(f"renderer hook failed: {exc}") from exc
    if resp.status_code != 200:
        raise NetworkError(f"renderer hook returned HTTP {resp.status_code}")
    try:
        html = resp.json()["html"]
    except (ValueError, KeyError) as exc:
        raise NetworkError("renderer hook returned malformed payload") from exc
    if not isinstance(html, str) or not html:
        raise NetworkError("renderer hook returned empty html")
    return html


# --- file / corpus ingestion ---------------------------------------------


def load_page_file(path: str | Path) -> PageSource:
    """Read one saved .html file as a page (origin=File)."""
    p = Path(path)
    html = p.read_text(encoding="utf-8", errors="replace")
    return PageSource(str(p), html, datetime.now(timezone.utc), Origin.FILE)


def iter_corpus(root: str | Path) -> list[tuple[str, list[Path]]]:
    """Enumerate a corpus directory laid out as corpus/<site>/<page>.html.

    Returns (site_id, sorted page paths) pairs, sites sorted by name.
    HTML files sitting directly in root are grouped under the root's name.
    """
    rootp = Path(root)
    if not rootp.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    sites: list[tuple[str, list[Path]]] = []
    for child in sorted(rootp.iterdir()):
        if child.is_dir():
            pages = sorted(
                p for p in child.iterdir() if p.suffix.lower() in (".html", ".htm")
            )
            if pages:
                sites.append((child.name, pages))
    loose = sorted(
        p for p in rootp.iterdir() if p.suffix.lower() in (".html", ".htm")
    )
    if loose:
        sites.append((rootp.name, loose))
    return sites
