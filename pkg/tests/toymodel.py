"""Hand-sized model artifacts shared across test modules."""
import json

import numpy as np

from darkscan.onnx_graph import Graph, Node, TensorSpec, save_model
from darkscan.taxonomy import canonical_order

TOY_VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "hurry", "only", "left", "in",
    "stock", "##s", "!", "free", "shipping", "today",
]


def node(op, ins, outs, **attrs):
    return Node(op_type=op, inputs=ins, outputs=outs, attrs=attrs)


def mean_pool_graph(emb, w_out, b_out):
    """Embedding lookup, mask-weighted mean pool, linear head to 8 logits."""
    return Graph(
        name="toy-pool",
        inputs=[TensorSpec("input_ids", 7, (0, 0)),
                TensorSpec("attention_mask", 7, (0, 0))],
        outputs=[TensorSpec("logits", 1, (0, 8))],
        initializers={
            "emb": emb, "w_out": w_out, "b_out": b_out,
            "axes1": np.array([1], dtype=np.int64),
            "axes2": np.array([2], dtype=np.int64),
        },
        nodes=[
            node("Gather", ["emb", "input_ids"], ["embedded"], axis=0),
            node("Cast", ["attention_mask"], ["mask_f"], to=1),
            node("Unsqueeze", ["mask_f", "axes2"], ["mask_3d"]),
            node("Mul", ["embedded", "mask_3d"], ["masked"]),
            node("ReduceSum", ["masked", "axes1"], ["summed"], keepdims=0),
            node("ReduceSum", ["mask_f", "axes1"], ["mask_n"], keepdims=1),
            node("Div", ["summed", "mask_n"], ["pooled"]),
            node("Gemm", ["pooled", "w_out", "b_out"], ["logits"]),
        ],
    )


def write_toy_model(model_dir, label_order=None, max_seq_len=16, seed=3):
    rng = np.random.default_rng(seed)
    emb = rng.normal(size=(len(TOY_VOCAB), 4)).astype(np.float32)
    w = rng.normal(size=(4, 8)).astype(np.float32)
    b = rng.normal(size=(8,)).astype(np.float32)
    model_dir.mkdir(parents=True, exist_ok=True)
    save_model(mean_pool_graph(emb, w, b), model_dir / "weights.onnx")
    (model_dir / "vocab.txt").write_text("\n".join(TOY_VOCAB) + "\n",
                                         encoding="utf-8")
    labels = label_order or [c.display_name for c in canonical_order()]
    (model_dir / "labels.json").write_text(json.dumps(labels),
                                           encoding="utf-8")
    (model_dir / "config.json").write_text(
        json.dumps({"max_seq_len": max_seq_len, "lowercase": True}),
        encoding="utf-8")
    return emb, w, b
