"""Turns a trained encoder into a portable model artifact directory.

The directory layout is the inference side's contract: weights.onnx
(compute graph), vocab.txt (line-per-token), labels.json (output column
order), config.json (encoding geometry plus metadata). The graph is
assembled node by node to mirror TextEncoder.forward exactly, then the
written bytes are read back and re-run on probe sentences; any logit
drift beyond tolerance fails the export rather than shipping a file
that disagrees with the network it claims to be.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import torch

from .errors import ExportMismatch
from .model import MASKED_SCORE_OFFSET, TextEncoder
from .onnxio import (DT_FLOAT, DT_INT64, WireGraph, WireNode, WireValue,
                     read_model, run_graph, write_model)
from .text import Vocabulary

WEIGHTS_FILE = "weights.onnx"
VOCAB_FILE = "vocab.txt"
LABELS_FILE = "labels.json"
CONFIG_FILE = "config.json"

LOGIT_TOLERANCE = 1e-4

PROBE_TEXTS = (
    "Hurry, the deal ends tonight",
    "Only 3 items left in stock",
    "12 people are viewing this right now",
    "Free shipping on orders over $50",
    "You must create an account to continue",
    "A small fee was added at checkout",
    "Unsubscribing takes five more steps",
    "No, I don't want to save money",
)


def _param(module: torch.nn.Module, attr: str) -> np.ndarray:
    tensor: torch.Tensor = getattr(module, attr)
    return tensor.detach().cpu().numpy().astype(np.float32)


class _GraphBuilder:
    def __init__(self) -> None:
        self.nodes: list[WireNode] = []
        self.initializers: dict[str, np.ndarray] = {}

    def init(self, name: str, array: np.ndarray) -> str:
        self.initializers[name] = array
        return name

    def scalar(self, name: str, value: float) -> str:
        return self.init(name, np.asarray(value, dtype=np.float32))

    def node(self, op: str, inputs: list[str], out: str, **attrs) -> str:
        self.nodes.append(WireNode(op, inputs, [out], attrs, name=out))
        return out

    def linear(self, x: str, module: torch.nn.Linear, prefix: str) -> str:
        """y = x @ W.T + b, with the transpose baked into the stored weight."""
        w = self.init(f"{prefix}.w", _param(module, "weight").T.copy())
        b = self.init(f"{prefix}.b", _param(module, "bias"))
        y = self.node("MatMul", [x, w], f"{prefix}.matmul")
        return self.node("Add", [y, b], f"{prefix}.out")

    def layer_norm(self, x: str, module: torch.nn.LayerNorm,
                   prefix: str) -> str:
        w = self.init(f"{prefix}.w", _param(module, "weight"))
        b = self.init(f"{prefix}.b", _param(module, "bias"))
        return self.node("LayerNormalization", [x, w, b], f"{prefix}.out",
                         epsilon=float(module.eps))


def build_graph(model: TextEncoder) -> WireGraph:
    """Compute graph equivalent to the eval-mode forward pass."""
    cfg = model.config
    g = _GraphBuilder()
    heads_shape = g.init("shape.heads", np.asarray(
        [0, 0, cfg.num_heads, cfg.head_size], dtype=np.int64))
    merge_shape = g.init("shape.merged", np.asarray(
        [0, 0, cfg.hidden_size], dtype=np.int64))
    zero = g.scalar("const.zero", 0.0)
    masked = g.scalar("const.masked", MASKED_SCORE_OFFSET)
    scale = g.scalar("const.scale", cfg.head_size ** -0.5)
    half = g.scalar("const.half", 0.5)
    one = g.scalar("const.one", 1.0)
    cubic = g.scalar("const.gelu_cubic", 0.044715)
    root = g.scalar("const.gelu_root", math.sqrt(2.0 / math.pi))

    # attention mask -> additive score offsets, shaped (batch, 1, 1, seq)
    mask_f = g.node("Cast", ["attention_mask"], "mask.float", to=DT_FLOAT)
    padded = g.node("Equal", [mask_f, zero], "mask.padded")
    padded4 = g.node("Unsqueeze", [padded], "mask.padded4", axes=[1, 2])
    additive = g.node("Where", [padded4, masked, zero], "mask.additive")

    token_table = g.init("embedding.tokens",
                         _param(model.token_embedding, "weight"))
    position_table = g.init("embedding.positions",
                            _param(model, "position_table"))
    emb = g.node("Gather", [token_table, "input_ids"], "embedding.gathered")
    emb = g.node("Add", [emb, position_table], "embedding.positioned")
    hidden = g.layer_norm(emb, model.norm_embedding, "embedding.norm")

    for i, layer in enumerate(model.layers):
        p = f"layer{i}"
        attn = layer.attention

        def split_heads(name: str, lin: str, perm: list[int]) -> str:
            shaped = g.node("Reshape", [lin, heads_shape], f"{name}.heads")
            return g.node("Transpose", [shaped], f"{name}.t", perm=perm)

        q = split_heads(f"{p}.q", g.linear(hidden, attn.query, f"{p}.query"),
                        perm=[0, 2, 1, 3])
        k = split_heads(f"{p}.k", g.linear(hidden, attn.key, f"{p}.key"),
                        perm=[0, 2, 3, 1])
        v = split_heads(f"{p}.v", g.linear(hidden, attn.value, f"{p}.value"),
                        perm=[0, 2, 1, 3])
        scores = g.node("MatMul", [q, k], f"{p}.scores")
        scores = g.node("Mul", [scores, scale], f"{p}.scores_scaled")
        scores = g.node("Add", [scores, additive], f"{p}.scores_masked")
        probs = g.node("Softmax", [scores], f"{p}.probs")
        context = g.node("MatMul", [probs, v], f"{p}.context")
        context = g.node("Transpose", [context], f"{p}.context_t",
                         perm=[0, 2, 1, 3])
        context = g.node("Reshape", [context, merge_shape],
                         f"{p}.context_merged")
        attended = g.linear(context, attn.output, f"{p}.attn_out")
        hidden = g.node("Add", [hidden, attended], f"{p}.residual1")
        hidden = g.layer_norm(hidden, layer.norm_attention, f"{p}.norm1")

        ffn = g.linear(hidden, layer.ffn_in, f"{p}.ffn_in")
        # tanh-approximated GELU: 0.5 * x * (1 + tanh(root * (x + c * x^3)))
        square = g.node("Mul", [ffn, ffn], f"{p}.gelu_sq")
        cube = g.node("Mul", [square, ffn], f"{p}.gelu_cu")
        inner = g.node("Mul", [cube, cubic], f"{p}.gelu_cu_scaled")
        inner = g.node("Add", [ffn, inner], f"{p}.gelu_inner")
        inner = g.node("Mul", [inner, root], f"{p}.gelu_arg")
        curve = g.node("Tanh", [inner], f"{p}.gelu_tanh")
        curve = g.node("Add", [curve, one], f"{p}.gelu_shift")
        curve = g.node("Mul", [curve, half], f"{p}.gelu_gate")
        ffn = g.node("Mul", [ffn, curve], f"{p}.gelu")
        ffn = g.linear(ffn, layer.ffn_out, f"{p}.ffn_out")
        hidden = g.node("Add", [hidden, ffn], f"{p}.residual2")
        hidden = g.layer_norm(hidden, layer.norm_ffn, f"{p}.norm2")

    # mean over unpadded positions, then the classification head
    mask3 = g.node("Unsqueeze", [mask_f], "pool.mask", axes=[2])
    weighted = g.node("Mul", [hidden, mask3], "pool.weighted")
    summed = g.node("ReduceSum", [weighted], "pool.sum", axes=[1], keepdims=0)
    counts = g.node("ReduceSum", [mask_f], "pool.count", axes=[1], keepdims=1)
    pooled = g.node("Div", [summed, counts], "pool.mean")
    head_w = g.init("head.w", _param(model.classifier, "weight"))
    head_b = g.init("head.b", _param(model.classifier, "bias"))
    g.node("Gemm", [pooled, head_w, head_b], "logits", transB=1)

    seq = cfg.max_seq_len
    return WireGraph(
        nodes=g.nodes,
        initializers=g.initializers,
        inputs=[WireValue("input_ids", DT_INT64, ("batch", seq)),
                WireValue("attention_mask", DT_INT64, ("batch", seq))],
        outputs=[WireValue("logits", DT_FLOAT, ("batch", cfg.num_classes))],
        name="text_classifier",
    )


def framework_logits(model: TextEncoder, vocab: Vocabulary,
                     texts: list[str]) -> np.ndarray:
    model.eval()
    ids, mask = vocab.encode_batch(texts)
    with torch.no_grad():
        logits = model(torch.tensor(ids, dtype=torch.long),
                       torch.tensor(mask, dtype=torch.long))
    return logits.numpy()


def export_artifacts(model: TextEncoder, vocab: Vocabulary,
                     labels: list[str], out_dir: str | Path,
                     metadata: dict | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_model(build_graph(model), out_dir / WEIGHTS_FILE)
    vocab.save(out_dir / VOCAB_FILE)
    (out_dir / LABELS_FILE).write_text(
        json.dumps(list(labels), indent=2) + "\n", encoding="utf-8")
    cfg = model.config
    config = {
        "max_seq_len": vocab.max_seq_len,
        "lowercase": vocab.lowercase,
        "metadata": {
            "architecture": {
                "hidden_size": cfg.hidden_size,
                "num_layers": cfg.num_layers,
                "num_heads": cfg.num_heads,
                "ffn_size": cfg.ffn_size,
                "vocab_size": cfg.vocab_size,
            },
            **(metadata or {}),
        },
    }
    (out_dir / CONFIG_FILE).write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return out_dir


def verify_export(model: TextEncoder, vocab: Vocabulary,
                  model_dir: str | Path,
                  probes: tuple[str, ...] = PROBE_TEXTS,
                  tolerance: float = LOGIT_TOLERANCE) -> float:
    """Max |logit drift| between the network and the written file.

    Raises ExportMismatch when the round trip exceeds tolerance.
    """
    texts = list(probes)
    expected = framework_logits(model, vocab, texts)
    graph = read_model(Path(model_dir) / WEIGHTS_FILE)
    ids, mask = vocab.encode_batch(texts)
    outputs = run_graph(graph, {
        "input_ids": np.asarray(ids, dtype=np.int64),
        "attention_mask": np.asarray(mask, dtype=np.int64),
    })
    actual = outputs["logits"]
    if actual.shape != expected.shape:
        raise ExportMismatch(
            f"probe logits shape {actual.shape}, expected {expected.shape}")
    worst = float(np.max(np.abs(actual - expected)))
    if worst > tolerance:
        raise ExportMismatch(
            f"probe logits drift {worst:.2e} exceeds {tolerance:.0e}")
    return worst
