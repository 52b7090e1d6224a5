"""Audit the synthetic storefront end to end.

Builds the fixture corpus in a temporary directory, scans it with the
lexical backend, and checks the flags against the corpus manifest.

    python3 demos/audit_fixture_site.py
"""
import tempfile
from pathlib import Path

from darkscan.classifier.lexical import LexicalBackend
from darkscan.corpusgen import build_corpus, manifest_recall
from darkscan.report import render_report
from darkscan.scan import scan_corpus
from darkscan.taxonomy import canonical_order


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="darkscan-demo-"))
    manifest = build_corpus(workdir, n_pages=30, seed=7)
    print(f"corpus: {len(manifest.pages)} pages in {workdir}")
    print(f"planted dark-pattern strings: {len(manifest.planted)}")

    reports = scan_corpus(workdir, LexicalBackend(), jobs=4)
    report = reports[0]
    print(f"\nscanned {report.n_segments} text segments")
    print(f"{'category':<18} {'fraction':>9}")
    for cat in canonical_order():
        print(f"{cat.display_name:<18} {report.category_fractions[cat]:>9.3f}")

    hits, total = manifest_recall(manifest, reports)
    print(f"\nflags matching the manifest: {hits}/{total}")

    out = workdir / "report.json"
    out.write_text(render_report(report), encoding="utf-8")
    print(f"full report written to {out}")


if __name__ == "__main__":
    main()
