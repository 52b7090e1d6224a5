"""Synthetic fixture generation: HTML corpus with a ground-truth manifest,
and a labeled text dataset.

Everything here is seeded and deterministic. The corpus pages carry benign
storefront copy, planted dark-pattern lines (block-level and a few in
alt/title attributes), and decoy strings inside script/style/hidden markup
that a correct extractor must never emit.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .detection import SiteReport
from .evaluation import LabeledExample
from .ingest import normalize_text
from .taxonomy import Category, parse_label

DECOY_MARKER = "DECOY"

# Statements from the qualitative walkthrough tables, with their published
# predicted categories.
STATEMENT_NOT_DARK = "me and my friends are going to buy shoes which are 20% off"
STATEMENT_SCARCITY = "Hurry! Only 2 left in stock"
STATEMENT_MISDIRECTION_WRAPPED = (
    "sdjbfksbdfgbkldsglkdflgf subscribe now or regret the offer of 20% "
    "djkbfksjbglsbdfsdbfksdbfgkjsbdkgbskdbfsdbfsd")
STATEMENT_MISDIRECTION_LONG = (
    "My name is Jin Kazama and I am in Pune, get 30% off on this bottle but "
    "you'll have to sign up first or you'll miss it, let's go have camping "
    "together")

PAPER_STATEMENTS: tuple[tuple[str, Category], ...] = (
    (STATEMENT_SCARCITY, Category.SCARCITY),
    (STATEMENT_MISDIRECTION_WRAPPED, Category.MISDIRECTION),
    (STATEMENT_MISDIRECTION_LONG, Category.MISDIRECTION),
)

_PRODUCTS = (
    "canvas backpack", "ceramic mug", "trail runner", "desk lamp",
    "wool beanie", "steel bottle", "linen shirt", "mesh office chair",
    "bamboo cutting board", "noise cancelling headphones", "yoga mat",
    "leather wallet", "mechanical keyboard", "espresso grinder",
)

_BENIGN = (
    "Crafted from recycled aluminium with a matte finish",
    "Free returns within thirty days of delivery",
    "Machine washable at forty degrees",
    "Available in four colours and three sizes",
    "Standard shipping takes three to five business days",
    "Designed in collaboration with independent studios",
    "The fabric is certified organic cotton",
    "Battery lasts up to eighteen hours of playback",
    "Compatible with most bluetooth devices",
    "Our support team answers within one business day",
    "Read the full sizing guide before ordering",
    "This model replaces the previous generation",
    "Includes a two year manufacturer warranty",
    "Rated four point five stars by verified reviewers",
    "Water resistant up to fifty metres",
    "Assembled with lead free solder",
    "The lining is made from recycled polyester",
    "Ships in plastic free packaging",
    "Firmware updates arrive quarterly",
    "Measurements are listed in the product manual",
    "In stock and ready to ship from our warehouse",
    "Browse the complete catalogue by category",
    "Gift wrapping is available at no extra cost",
    "The strap is adjustable from fourteen to twenty centimetres",
)

_NAV_LABELS = ("Home", "New arrivals", "About us", "Contact",
               "Privacy policy", "Terms of service", "Help centre")

# Every template embeds at least one phrase the default lexicon scores.
_DARK_TEMPLATES: dict[Category, tuple[str, ...]] = {
    Category.SCARCITY: (
        "Only {n} left in stock",
        "Almost sold out, grab yours before restock",
        "Limited stock remaining for the {product}",
        "Selling fast in your region",
        "While supplies last, save on the {product}",
        "Hurry, only {n} left for this colour",
    ),
    Category.URGENCY: (
        "Hurry, the clearance event is closing",
        "Offer expires at midnight",
        "Last chance to claim this deal",
        "Today only: extra savings on bundles",
        "Sale ends tonight, act fast",
        "Limited time pricing on the {product}",
    ),
    Category.SOCIAL_PROOF: (
        "{n} people are viewing this right now",
        "{n} people bought this in the past day",
        "Recently purchased by {n} shoppers",
        "Trending now across the store",
        "A best seller in its class",
    ),
    Category.MISDIRECTION: (
        "No thanks, I don't want to save money",
        "Skip this and keep missing out",
        "Decline and lose my benefits",
        "Don't miss out on member pricing",
        "Subscribe now or regret the offer",
    ),
    Category.FORCED_ACTION: (
        "Sign up to continue reading reviews",
        "You must agree to marketing emails to proceed",
        "Create an account to view the price",
        "Registration required before checkout",
        "Install the app to finish your purchase",
    ),
    Category.SNEAKING: (
        "Your plan automatically renews each month",
        "A processing fee is added at checkout",
        "The free trial converts to a paid plan automatically",
        "A convenience fee applies to small orders",
        "Shipping protection plan added for the {product}",
    ),
    Category.OBSTRUCTION: (
        "Call to cancel your membership",
        "Subscriptions cannot be cancelled online",
        "Mail a written request to close your account",
        "Contact customer service to delete your data",
        "Unsubscribe by phone during business hours",
    ),
}

_DECOY_LINES = (
    f"{DECOY_MARKER} hurry only 2 left in stock",
    f"{DECOY_MARKER} act now the offer expires",
    f"{DECOY_MARKER} 500 people bought this today",
    f"{DECOY_MARKER} sign up to continue",
)


@dataclass(frozen=True)
class PlantedString:
    page: str  # file name within the corpus
    text: str  # normalized, as the extractor should emit it
    category: Category


@dataclass
class CorpusManifest:
    site_id: str
    pages: list[str]
    planted: list[PlantedString]
    decoys: list[PlantedString] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "site_id": self.site_id,
            "pages": self.pages,
            "planted": [
                {"page": p.page, "text": p.text,
                 "category": p.category.display_name}
                for p in self.planted
            ],
            "decoys": [
                {"page": p.page, "text": p.text,
                 "category": p.category.display_name}
                for p in self.decoys
            ],
        }


def _fill(template: str, rng: random.Random) -> str:
    return template.format(n=rng.randint(2, 12), product=rng.choice(_PRODUCTS))


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _page_html(title: str, blocks: Sequence[str], attr_plant: str | None,
               decoy: str) -> str:
    nav = "".join(f"<li><a href=\"#\">{_escape(l)}</a></li>"
                  for l in _NAV_LABELS[:4])
    body_blocks = "\n".join(f"    <p>{_escape(b)}</p>" for b in blocks)
    attr_img = ""
    if attr_plant is not None:
        attr_img = (f'    <img src="product.png" alt="{_escape(attr_plant)}">\n')
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
  <title>{_escape(title)}</title>
  <meta charset="utf-8">
  <style>body {{ font-family: sans-serif; }} /* {DECOY_MARKER} style note */</style>
  <script>var tracking = "{DECOY_MARKER} script payload";</script>
</head>
<body>
  <header><nav><ul>{nav}</ul></nav></header>
  <main>
    <h1>{_escape(title)}</h1>
{body_blocks}
{attr_img}    <div hidden><p>{_escape(decoy)}</p></div>
    <div style="display: none">{_escape(decoy)} duplicate</div>
    <p><span aria-hidden="true">{_escape(decoy)} inline</span>Add to cart</p>
    <button>Checkout</button>
  </main>
  <footer><p>Privacy policy</p><p>Terms of service</p></footer>
  <template><p>{DECOY_MARKER} template row</p></template>
  <noscript>{DECOY_MARKER} noscript fallback</noscript>
</body>
</html>
"""


def build_corpus(dest: str | Path, n_pages: int = 30,
                 seed: int = 7, site_id: str = "fixturemart") -> CorpusManifest:
    """Write `page{NN}.html` files plus `manifest.json` into dest."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    categories = list(_DARK_TEMPLATES)
    manifest = CorpusManifest(site_id=site_id, pages=[], planted=[], decoys=[])
    paper_iter = iter(PAPER_STATEMENTS)
    for idx in range(n_pages):
        fname = f"page{idx:02d}.html"
        product = rng.choice(_PRODUCTS)
        blocks: list[str] = [f"The {product} fits everyday carry"]
        blocks.extend(rng.sample(_BENIGN, k=rng.randint(3, 6)))
        # pages 0-2 carry the three published dark statements verbatim
        statement = next(paper_iter, None)
        if statement is not None:
            text, category = statement
            blocks.insert(rng.randrange(1, len(blocks) + 1), text)
            manifest.planted.append(
                PlantedString(fname, normalize_text(text), category))
        if idx == 3:
            blocks.insert(1, STATEMENT_NOT_DARK)
        n_dark = rng.choice((0, 1, 1, 2, 2, 3))
        for _ in range(n_dark):
            category = rng.choice(categories)
            text = _fill(rng.choice(_DARK_TEMPLATES[category]), rng)
            blocks.insert(rng.randrange(1, len(blocks) + 1), text)
            manifest.planted.append(
                PlantedString(fname, normalize_text(text), category))
        attr_plant = None
        if idx % 9 == 4:
            category = rng.choice(categories)
            attr_plant = _fill(rng.choice(_DARK_TEMPLATES[category]), rng)
            manifest.planted.append(
                PlantedString(fname, normalize_text(attr_plant), category))
        decoy = rng.choice(_DECOY_LINES)
        manifest.decoys.append(
            PlantedString(fname, normalize_text(decoy),
                          Category.NOT_DARK_PATTERN))
        title = f"{product.title()} | Fixture Mart"
        (dest / fname).write_text(
            _page_html(title, blocks, attr_plant, decoy), encoding="utf-8")
        manifest.pages.append(fname)
    (dest / "manifest.json").write_text(
        json.dumps(manifest.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest


def manifest_recall(manifest: CorpusManifest,
                    reports: Iterable[SiteReport]) -> tuple[int, int]:
    """(hits, planted): how many planted strings appear among the flags of
    the given reports, matched by page file name + exact segment text."""
    flagged: set[tuple[str, str]] = set()
    for report in reports:
        for result in report.flagged:
            flagged.add((Path(result.segment.page_url).name,
                         result.segment.text))
    hits = sum((p.page, p.text) in flagged for p in manifest.planted)
    return hits, len(manifest.planted)


def load_manifest(path: str | Path) -> CorpusManifest:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return CorpusManifest(
        site_id=doc["site_id"],
        pages=list(doc["pages"]),
        planted=[PlantedString(e["page"], e["text"], parse_label(e["category"]))
                 for e in doc["planted"]],
        decoys=[PlantedString(e["page"], e["text"], parse_label(e["category"]))
                for e in doc.get("decoys", [])],
    )


# ------------------------------------------------------------------ dataset

_BENIGN_EXTRA = (
    "the parcel arrived two days after the order confirmation",
    "this colour matches the photos on the listing",
    "assembly took about twenty minutes with the included tools",
    "the sole feels springy on gravel paths",
    "customer service replaced the faulty zipper quickly",
    "the grinder produces an even medium roast",
    "my desk setup finally feels organised",
    "the keys have a satisfying tactile bump",
    "sound isolation works well on the train",
    "the mug keeps coffee warm through a long meeting",
    "sizing runs slightly large so order one size down",
    "the stitching held up after months of daily use",
)

_PREFIXES = ("", "", "", "by the way, ", "note: ", "reminder: ", "heads up: ")
_SUFFIXES = ("", "", "", " on the {product}", " for all orders",
             " across the store", " this season")


def build_dataset(n_per_class: int = 300,
                  seed: int = 11) -> list[LabeledExample]:
    """Labeled lines for training/evaluating text classifiers. Dark classes
    come from the template pools with randomized fill-ins and optional
    benign framing; the benign class mixes storefront copy and chatter."""
    rng = random.Random(seed)
    examples: list[LabeledExample] = []
    for category, templates in _DARK_TEMPLATES.items():
        for _ in range(n_per_class):
            core = _fill(rng.choice(templates), rng)
            prefix = rng.choice(_PREFIXES)
            suffix = _fill(rng.choice(_SUFFIXES), rng)
            examples.append(LabeledExample(
                text=normalize_text(f"{prefix}{core}{suffix}".lower()),
                label=category))
    benign_pool = tuple(b.lower() for b in _BENIGN) + _BENIGN_EXTRA
    for _ in range(n_per_class):
        parts = rng.sample(benign_pool, k=rng.choice((1, 1, 1, 2)))
        text = ", ".join(parts)
        examples.append(LabeledExample(
            text=normalize_text(text), label=Category.NOT_DARK_PATTERN))
    rng.shuffle(examples)
    return examples
