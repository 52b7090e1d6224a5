#!/usr/bin/env python3
"""Regenerate tests/fixtures/parity/expected.json.

Reference segmentation comes from the installed darkscan CLI, not from
shared code: a scan with every threshold at 0.0 flags every segment, so
the report's flags list enumerates all segment texts in document order.
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

PARITY_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "parity"

DARK_LABELS = [
    "Forced Action", "Misdirection", "Obstruction", "Scarcity",
    "Sneaking", "Social Proof", "Urgency",
]


def segment_texts(page: Path, thresholds: Path, out: Path) -> list[str]:
    subprocess.run(
        [sys.executable, "-m", "darkscan", "scan", "--file", str(page),
         "--backend", "lexical", "--thresholds", str(thresholds),
         "--out", str(out)],
        check=True, capture_output=True, text=True,
    )
    report = json.loads(out.read_text(encoding="utf-8"))
    texts = [entry["text"] for entry in report["flags"]]
    if len(texts) != report["n_segments"]:
        raise SystemExit(f"{page.name}: flags do not cover all segments")
    return texts


def main() -> None:
    pages = sorted(PARITY_DIR.glob("*.html"))
    if not pages:
        raise SystemExit(f"no fixture pages in {PARITY_DIR}")
    with tempfile.TemporaryDirectory() as tmp:
        thresholds = Path(tmp) / "zero-thresholds.json"
        thresholds.write_text(
            json.dumps({label: 0.0 for label in DARK_LABELS}), encoding="utf-8")
        expected = {
            page.name: segment_texts(page, thresholds, Path(tmp) / "report.json")
            for page in pages
        }
    target = PARITY_DIR / "expected.json"
    target.write_text(
        json.dumps(expected, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    counts = ", ".join(f"{name}: {len(texts)}" for name, texts in expected.items())
    print(f"wrote {target} ({counts})")


if __name__ == "__main__":
    main()
