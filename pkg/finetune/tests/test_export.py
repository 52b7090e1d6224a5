"""Graph assembly and the artifact directory contract."""
import json

import numpy as np
import pytest
import torch

from finetune import (EncoderConfig, TextEncoder, Vocabulary, build_graph,
                      export_artifacts, framework_logits, verify_export)
from finetune.errors import ExportMismatch
from finetune.onnxio import read_model, run_graph, write_model

from support import LABELS

# operator inventory the consuming runtime implements; exports must stay
# inside it
SUPPORTED_OPS = {
    "Add", "Cast", "Div", "Equal", "Gather", "Gemm", "LayerNormalization",
    "MatMul", "Mul", "Reshape", "Softmax", "ReduceSum", "Tanh", "Transpose",
    "Unsqueeze", "Where",
}

SAMPLE_TEXTS = ["only 2 left in stock", "free returns for 30 days",
                "you must register first", "5 people bought this today"]


def tiny_setup(seed=5):
    vocab = Vocabulary.build(SAMPLE_TEXTS, max_seq_len=12, min_freq=1)
    torch.manual_seed(seed)
    model = TextEncoder(EncoderConfig(
        vocab_size=len(vocab), max_seq_len=12, hidden_size=16,
        num_layers=2, num_heads=2, ffn_size=32))
    model.eval()
    return model, vocab


def test_graph_uses_only_supported_operators():
    model, _ = tiny_setup()
    ops = {node.op_type for node in build_graph(model).nodes}
    assert ops <= SUPPORTED_OPS


def test_graph_io_contract():
    model, _ = tiny_setup()
    graph = build_graph(model)
    assert [v.name for v in graph.inputs] == ["input_ids", "attention_mask"]
    assert [v.name for v in graph.outputs] == ["logits"]
    assert graph.inputs[0].shape == ("batch", 12)
    assert graph.outputs[0].shape == ("batch", 8)


def test_export_writes_artifact_directory(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    for fname in ("weights.onnx", "vocab.txt", "labels.json", "config.json"):
        assert (out / fname).is_file()
    assert json.loads((out / "labels.json").read_text()) == LABELS
    config = json.loads((out / "config.json").read_text())
    assert config["max_seq_len"] == 12
    assert config["lowercase"] is True
    arch = config["metadata"]["architecture"]
    assert arch["hidden_size"] == 16
    assert arch["num_layers"] == 2


def test_export_round_trip_within_tolerance(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    drift = verify_export(model, vocab, out, probes=tuple(SAMPLE_TEXTS))
    assert drift <= 1e-4


def test_exported_graph_matches_framework_on_fresh_inputs(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    texts = ["something completely unseen!", "only only only"]
    ids, mask = vocab.encode_batch(texts)
    got = run_graph(read_model(out / "weights.onnx"), {
        "input_ids": np.asarray(ids, dtype=np.int64),
        "attention_mask": np.asarray(mask, dtype=np.int64),
    })["logits"]
    want = framework_logits(model, vocab, texts)
    np.testing.assert_allclose(got, want, atol=1e-4)


def test_single_text_equals_batch_row(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    graph = read_model(out / "weights.onnx")

    def logits(texts):
        ids, mask = vocab.encode_batch(texts)
        return run_graph(graph, {
            "input_ids": np.asarray(ids, dtype=np.int64),
            "attention_mask": np.asarray(mask, dtype=np.int64),
        })["logits"]

    batch = logits(SAMPLE_TEXTS)
    single = logits(SAMPLE_TEXTS[2:3])
    np.testing.assert_allclose(single[0], batch[2], atol=1e-5)


def test_tampered_weights_fail_verification(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    graph = read_model(out / "weights.onnx")
    graph.initializers["head.b"] = graph.initializers["head.b"] + 1.0
    write_model(graph, out / "weights.onnx")
    with pytest.raises(ExportMismatch, match="drift"):
        verify_export(model, vocab, out, probes=tuple(SAMPLE_TEXTS))


def test_verification_catches_shape_breakage(tmp_path):
    model, vocab = tiny_setup()
    out = export_artifacts(model, vocab, LABELS, tmp_path / "model")
    # doctor the file so it emits 4 logit columns instead of 8
    graph = read_model(out / "weights.onnx")
    graph.initializers["head.w"] = graph.initializers["head.w"][:4]
    graph.initializers["head.b"] = graph.initializers["head.b"][:4]
    write_model(graph, out / "weights.onnx")
    with pytest.raises(ExportMismatch, match="shape"):
        verify_export(model, vocab, out, probes=tuple(SAMPLE_TEXTS))
