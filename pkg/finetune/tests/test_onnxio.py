"""Wire-format round trips and the numpy graph evaluator."""
import numpy as np
import pytest

from finetune.onnxio import (DT_FLOAT, DT_INT64, WireGraph, WireNode,
                             WireValue, read_model, run_graph, write_model)


def _round_trip(graph, tmp_path):
    path = tmp_path / "model.onnx"
    write_model(graph, path)
    return read_model(path)


def test_round_trip_preserves_everything(tmp_path):
    graph = WireGraph(
        nodes=[
            WireNode("Gemm", ["x", "w", "b"], ["y"],
                     {"transB": 1, "epsilon": 0.5, "perm": [0, 2, 1],
                      "axis": -1}, name="head"),
            WireNode("Tanh", ["y"], ["z"]),
        ],
        initializers={
            "w": np.arange(6, dtype=np.float32).reshape(2, 3),
            "b": np.asarray([1.0, -2.0], dtype=np.float32),
            "steps": np.asarray([0, 0, 4], dtype=np.int64),
            "scale": np.asarray(0.125, dtype=np.float32),
        },
        inputs=[WireValue("x", DT_INT64, ("batch", 3))],
        outputs=[WireValue("z", DT_FLOAT, ("batch", 2))],
        name="round_trip",
    )
    loaded = _round_trip(graph, tmp_path)

    assert loaded.name == "round_trip"
    assert [n.op_type for n in loaded.nodes] == ["Gemm", "Tanh"]
    head = loaded.nodes[0]
    assert head.inputs == ["x", "w", "b"]
    assert head.outputs == ["y"]
    assert head.name == "head"
    assert head.attrs["transB"] == 1
    assert head.attrs["epsilon"] == pytest.approx(0.5)
    assert head.attrs["perm"] == [0, 2, 1]
    assert head.attrs["axis"] == -1

    for name, arr in graph.initializers.items():
        np.testing.assert_array_equal(loaded.initializers[name], arr)
        assert loaded.initializers[name].dtype == arr.dtype

    assert loaded.inputs[0].name == "x"
    assert loaded.inputs[0].elem_type == DT_INT64
    assert loaded.inputs[0].shape == ("batch", 3)
    assert loaded.outputs[0].shape == ("batch", 2)


def test_read_rejects_file_without_graph(tmp_path):
    path = tmp_path / "empty.onnx"
    path.write_bytes(b"")
    with pytest.raises(ValueError, match="no compute graph"):
        read_model(path)


def _single(op, inputs, feeds, initializers=None, **attrs):
    graph = WireGraph(
        nodes=[WireNode(op, inputs, ["out"], attrs)],
        initializers=initializers or {},
        inputs=[WireValue(n) for n in feeds],
        outputs=[WireValue("out")],
    )
    return run_graph(graph, feeds)["out"]


def test_layer_norm_matches_manual_computation():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 5, 8)).astype(np.float32)
    scale = rng.normal(size=8).astype(np.float32)
    bias = rng.normal(size=8).astype(np.float32)
    got = _single("LayerNormalization", ["x", "scale", "bias"],
                  {"x": x}, {"scale": scale, "bias": bias}, epsilon=1e-5)
    mean = x.mean(axis=-1, keepdims=True)
    var = ((x - mean) ** 2).mean(axis=-1, keepdims=True)
    want = (x - mean) / np.sqrt(var + np.float32(1e-5)) * scale + bias
    np.testing.assert_allclose(got, want, atol=1e-6)


def test_softmax_is_stable_under_large_offsets():
    x = np.asarray([[0.0, -10000.0, 1.0]], dtype=np.float32)
    got = _single("Softmax", ["x"], {"x": x})
    assert np.isfinite(got).all()
    assert got[0, 1] == pytest.approx(0.0, abs=1e-30)
    assert got.sum() == pytest.approx(1.0, abs=1e-6)


def test_reshape_copies_leading_dims():
    x = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
    got = _single("Reshape", ["x", "shape"], {"x": x},
                  {"shape": np.asarray([0, 0, 2, 2], dtype=np.int64)})
    assert got.shape == (2, 3, 2, 2)
    np.testing.assert_array_equal(got.ravel(), x.ravel())


def test_unsqueeze_inserts_axes_in_order():
    x = np.ones((2, 5), dtype=np.float32)
    assert _single("Unsqueeze", ["x"], {"x": x}, axes=[1, 2]).shape \
        == (2, 1, 1, 5)
    assert _single("Unsqueeze", ["x"], {"x": x}, axes=[2]).shape == (2, 5, 1)


def test_reduce_sum_keepdims_variants():
    x = np.arange(6, dtype=np.float32).reshape(2, 3)
    flat = _single("ReduceSum", ["x"], {"x": x}, axes=[1], keepdims=0)
    kept = _single("ReduceSum", ["x"], {"x": x}, axes=[1], keepdims=1)
    np.testing.assert_array_equal(flat, [3.0, 12.0])
    assert kept.shape == (2, 1)


def test_gemm_with_transposed_weight_and_bias():
    x = np.asarray([[1.0, 2.0]], dtype=np.float32)
    w = np.asarray([[3.0, 4.0], [5.0, 6.0], [7.0, 8.0]], dtype=np.float32)
    b = np.asarray([0.5, -0.5, 0.0], dtype=np.float32)
    got = _single("Gemm", ["x", "w", "b"], {"x": x}, {"w": w, "b": b},
                  transB=1)
    np.testing.assert_allclose(got, [[11.5, 16.5, 23.0]])


def test_mask_arithmetic_chain():
    """Cast -> Equal -> Unsqueeze -> Where, the attention-mask recipe."""
    mask = np.asarray([[1, 1, 0]], dtype=np.int64)
    graph = WireGraph(
        nodes=[
            WireNode("Cast", ["mask"], ["f"], {"to": DT_FLOAT}),
            WireNode("Equal", ["f", "zero"], ["eq"]),
            WireNode("Unsqueeze", ["eq"], ["eq4"], {"axes": [1, 2]}),
            WireNode("Where", ["eq4", "offset", "zero"], ["out"]),
        ],
        initializers={"zero": np.asarray(0.0, dtype=np.float32),
                      "offset": np.asarray(-10000.0, dtype=np.float32)},
        inputs=[WireValue("mask", DT_INT64)],
        outputs=[WireValue("out")],
    )
    got = run_graph(graph, {"mask": mask})["out"]
    assert got.shape == (1, 1, 1, 3)
    np.testing.assert_array_equal(got.ravel(), [0.0, 0.0, -10000.0])


def test_gather_looks_up_embedding_rows():
    table = np.arange(12, dtype=np.float32).reshape(4, 3)
    ids = np.asarray([[3, 0]], dtype=np.int64)
    got = _single("Gather", ["table", "ids"], {"ids": ids}, {"table": table})
    np.testing.assert_array_equal(got, [[[9.0, 10.0, 11.0], [0.0, 1.0, 2.0]]])


def test_run_graph_rejects_unknown_op():
    graph = WireGraph(nodes=[WireNode("Conv", ["x"], ["y"])],
                      initializers={}, inputs=[WireValue("x")],
                      outputs=[WireValue("y")])
    with pytest.raises(ValueError, match="no evaluator"):
        run_graph(graph, {"x": np.zeros(1, dtype=np.float32)})


def test_run_graph_rejects_undefined_tensors():
    graph = WireGraph(nodes=[WireNode("Tanh", ["ghost"], ["y"])],
                      initializers={}, inputs=[],
                      outputs=[WireValue("y")])
    with pytest.raises(ValueError, match="undefined"):
        run_graph(graph, {})
