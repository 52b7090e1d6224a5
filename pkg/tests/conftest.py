import pytest

from darkscan.classifier.transformer import load_artifacts
from darkscan.evaluation import LabeledExample
from darkscan.taxonomy import Category

from toymodel import write_toy_model


@pytest.fixture(scope="session")
def toy_model_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("model")
    write_toy_model(d)
    return d


@pytest.fixture(scope="session")
def toy_artifacts(toy_model_dir):
    return load_artifacts(toy_model_dir)


@pytest.fixture()
def separable_dataset():
    """20 examples, 2 classes, disjoint keywords; trivially separable."""
    examples = []
    for i in range(10):
        examples.append(LabeledExample(
            text=f"hurry sale ends tonight item {i}", label=Category.URGENCY))
        examples.append(LabeledExample(
            text=f"our catalog lists product {i} specifications",
            label=Category.NOT_DARK_PATTERN))
    return examples
