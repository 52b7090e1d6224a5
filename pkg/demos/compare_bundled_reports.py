"""Rank the two bundled site reports against each other.

    python3 demos/compare_bundled_reports.py
"""
from pathlib import Path

from darkscan.detection import compare_sites
from darkscan.report import load_report, render_comparison

REPORTS = Path(__file__).resolve().parents[1] / "data" / "reports"


def main() -> None:
    reports = [load_report(REPORTS / "website1.json"),
               load_report(REPORTS / "website2.json")]
    print(render_comparison(compare_sites(reports), fmt="md"))


if __name__ == "__main__":
    main()
