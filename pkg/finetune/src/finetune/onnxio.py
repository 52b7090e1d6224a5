"""Reading, writing, and evaluating the exported model file.

The artifact is a standard protobuf-encoded compute graph (varint keys,
length-delimited submessages), restricted to the operator set the export
actually emits. The reader and the numpy evaluator exist so the export
step can prove the bytes on disk reproduce the trained network before
anything downstream touches them; they share no code with the consumer.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

DT_FLOAT = 1
DT_INT64 = 7
_NUMPY_BY_CODE = {DT_FLOAT: np.dtype("float32"), DT_INT64: np.dtype("int64")}

IR_VERSION = 8
OPSET_VERSION = 17
PRODUCER = "darkscan-finetune"


@dataclass
class WireNode:
    op_type: str
    inputs: list[str]
    outputs: list[str]
    attrs: dict = dc_field(default_factory=dict)
    name: str = ""


@dataclass
class WireValue:
    """Declared graph input/output; dims are ints or symbolic strings."""
    name: str
    elem_type: int = DT_FLOAT
    shape: tuple = ()


@dataclass
class WireGraph:
    nodes: list[WireNode]
    initializers: dict[str, np.ndarray]
    inputs: list[WireValue]
    outputs: list[WireValue]
    name: str = "graph"


# ------------------------------------------------------------------ writing

def _varint(value: int) -> bytes:
    if value < 0:
        value += 1 << 64  # two's-complement form, 10 bytes
    out = bytearray()
    while True:
        bits = value & 0x7F
        value >>= 7
        out.append(bits | (0x80 if value else 0))
        if not value:
            return bytes(out)


def _field(fieldno: int, payload: bytes) -> bytes:
    return _varint(fieldno << 3 | 2) + _varint(len(payload)) + payload


def _field_int(fieldno: int, value: int) -> bytes:
    return _varint(fieldno << 3) + _varint(value)


def _tensor_bytes(name: str, array: np.ndarray) -> bytes:
    if array.dtype == np.float32:
        code = DT_FLOAT
    elif array.dtype == np.int64:
        code = DT_INT64
    else:
        raise TypeError(f"tensor {name!r}: unsupported dtype {array.dtype}")
    parts = [_field_int(1, d) for d in array.shape]
    parts.append(_field_int(2, code))
    if name:
        parts.append(_field(8, name.encode("utf-8")))
    parts.append(_field(9, np.ascontiguousarray(array).tobytes()))
    return b"".join(parts)


def _attr_bytes(name: str, value) -> bytes:
    parts = [_field(1, name.encode("utf-8"))]
    if isinstance(value, float):
        parts.append(_varint(2 << 3 | 5) + struct.pack("<f", value))
        parts.append(_field_int(20, 1))
    elif isinstance(value, int):
        parts.append(_field_int(3, value))
        parts.append(_field_int(20, 2))
    elif isinstance(value, (list, tuple)):
        parts.append(_field(8, b"".join(_varint(int(v)) for v in value)))
        parts.append(_field_int(20, 7))
    else:
        raise TypeError(f"attribute {name!r}: unsupported value {value!r}")
    return b"".join(parts)


def _node_bytes(node: WireNode) -> bytes:
    parts = [_field(1, s.encode("utf-8")) for s in node.inputs]
    parts += [_field(2, s.encode("utf-8")) for s in node.outputs]
    if node.name:
        parts.append(_field(3, node.name.encode("utf-8")))
    parts.append(_field(4, node.op_type.encode("utf-8")))
    parts += [_field(5, _attr_bytes(k, v)) for k, v in node.attrs.items()]
    return b"".join(parts)


def _value_bytes(value: WireValue) -> bytes:
    dims = []
    for d in value.shape:
        if isinstance(d, int):
            dims.append(_field(1, _field_int(1, d)))
        else:
            dims.append(_field(1, _field(2, str(d).encode("utf-8"))))
    tensor = _field_int(1, value.elem_type) + _field(2, b"".join(dims))
    return _field(1, value.name.encode("utf-8")) + _field(2, _field(1, tensor))


def write_model(graph: WireGraph, path: str | Path) -> None:
    parts = [_field(1, _node_bytes(n)) for n in graph.nodes]
    parts.append(_field(2, graph.name.encode("utf-8")))
    parts += [_field(5, _tensor_bytes(name, arr))
              for name, arr in graph.initializers.items()]
    parts += [_field(11, _value_bytes(v)) for v in graph.inputs]
    parts += [_field(12, _value_bytes(v)) for v in graph.outputs]
    opset = _field(1, b"") + _field_int(2, OPSET_VERSION)
    model = (_field_int(1, IR_VERSION)
             + _field(2, PRODUCER.encode("utf-8"))
             + _field(7, b"".join(parts))
             + _field(8, opset))
    Path(path).write_bytes(model)


# ------------------------------------------------------------------ reading

def _iter_fields(buf: memoryview):
    pos = 0
    while pos < len(buf):
        key, pos = _read_varint(buf, pos)
        fieldno, wire = key >> 3, key & 7
        if wire == 0:
            value, pos = _read_varint(buf, pos)
        elif wire == 2:
            length, pos = _read_varint(buf, pos)
            value = buf[pos:pos + length]
            pos += length
        elif wire == 5:
            value = bytes(buf[pos:pos + 4])
            pos += 4
        elif wire == 1:
            value = bytes(buf[pos:pos + 8])
            pos += 8
        else:
            raise ValueError(f"unsupported wire type {wire}")
        yield fieldno, wire, value


def _read_varint(buf: memoryview, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ValueError("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7


def _signed(value: int) -> int:
    return value - (1 << 64) if value >= 1 << 63 else value


def _varint_list(value, wire) -> list[int]:
    if wire == 0:
        return [_signed(int(value))]
    out = []
    pos = 0
    while pos < len(value):
        v, pos = _read_varint(value, pos)
        out.append(_signed(v))
    return out


def _read_tensor(buf: memoryview) -> tuple[str, np.ndarray]:
    dims: list[int] = []
    code = DT_FLOAT
    name = ""
    raw = b""
    for fieldno, wire, value in _iter_fields(buf):
        if fieldno == 1:
            dims.extend(_varint_list(value, wire))
        elif fieldno == 2:
            code = int(value)
        elif fieldno == 8:
            name = bytes(value).decode("utf-8")
        elif fieldno == 9:
            raw = bytes(value)
    if code not in _NUMPY_BY_CODE:
        raise ValueError(f"unsupported tensor data_type {code}")
    arr = np.frombuffer(raw, dtype=_NUMPY_BY_CODE[code]).reshape(dims).copy()
    return name, arr


def _read_attr(buf: memoryview) -> tuple[str, object]:
    name = ""
    value: object = None
    for fieldno, wire, raw in _iter_fields(buf):
        if fieldno == 1:
            name = bytes(raw).decode("utf-8")
        elif fieldno == 2:
            value = struct.unpack("<f", raw)[0]
        elif fieldno == 3:
            value = _signed(int(raw))
        elif fieldno == 8:
            existing = value if isinstance(value, list) else []
            value = existing + _varint_list(raw, wire)
    return name, value


def _read_node(buf: memoryview) -> WireNode:
    node = WireNode(op_type="", inputs=[], outputs=[])
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            node.inputs.append(bytes(value).decode("utf-8"))
        elif fieldno == 2:
            node.outputs.append(bytes(value).decode("utf-8"))
        elif fieldno == 3:
            node.name = bytes(value).decode("utf-8")
        elif fieldno == 4:
            node.op_type = bytes(value).decode("utf-8")
        elif fieldno == 5:
            key, attr = _read_attr(value)
            node.attrs[key] = attr
    return node


def _read_value(buf: memoryview) -> WireValue:
    out = WireValue(name="")
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            out.name = bytes(value).decode("utf-8")
        elif fieldno == 2:
            for f2, _w2, tensor_type in _iter_fields(value):
                if f2 != 1:
                    continue
                dims: list = []
                for f3, _w3, v3 in _iter_fields(tensor_type):
                    if f3 == 1:
                        out.elem_type = int(v3)
                    elif f3 == 2:
                        for f4, _w4, dim in _iter_fields(v3):
                            if f4 != 1:
                                continue
                            for f5, _w5, v5 in _iter_fields(dim):
                                if f5 == 1:
                                    dims.append(int(v5))
                                elif f5 == 2:
                                    dims.append(bytes(v5).decode("utf-8"))
                out.shape = tuple(dims)
    return out


def read_model(path: str | Path) -> WireGraph:
    graph = WireGraph(nodes=[], initializers={}, inputs=[], outputs=[])
    buf = memoryview(Path(path).read_bytes())
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno != 7:
            continue
        for gfield, _gwire, gvalue in _iter_fields(value):
            if gfield == 1:
                graph.nodes.append(_read_node(gvalue))
            elif gfield == 2:
                graph.name = bytes(gvalue).decode("utf-8")
            elif gfield == 5:
                name, arr = _read_tensor(gvalue)
                graph.initializers[name] = arr
            elif gfield == 11:
                graph.inputs.append(_read_value(gvalue))
            elif gfield == 12:
                graph.outputs.append(_read_value(gvalue))
    if not graph.nodes:
        raise ValueError(f"{path}: no compute graph found")
    return graph


# --------------------------------------------------------------- evaluation

def _eval_layer_norm(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    x, scale, bias = args
    eps = np.asarray(node.attrs.get("epsilon", 1e-5), dtype=x.dtype)
    axis = int(node.attrs.get("axis", -1))
    axes = tuple(range(axis % x.ndim, x.ndim))
    mean = x.mean(axis=axes, keepdims=True)
    var = np.mean((x - mean) ** 2, axis=axes, keepdims=True)
    return ((x - mean) / np.sqrt(var + eps) * scale + bias).astype(x.dtype)


def _eval_softmax(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    x = args[0]
    axis = int(node.attrs.get("axis", -1))
    z = np.exp(x - x.max(axis=axis, keepdims=True))
    return (z / z.sum(axis=axis, keepdims=True)).astype(x.dtype)


def _eval_reshape(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    data, spec = args
    shape = [data.shape[i] if s == 0 else int(s)
             for i, s in enumerate(np.asarray(spec).ravel())]
    return data.reshape(shape)


def _eval_reduce_sum(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    axes = tuple(int(a) for a in node.attrs["axes"])
    keep = bool(int(node.attrs.get("keepdims", 1)))
    return args[0].sum(axis=axes, keepdims=keep).astype(args[0].dtype)


def _eval_unsqueeze(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    x = args[0]
    rank = x.ndim + len(node.attrs["axes"])
    for axis in sorted(int(a) % rank for a in node.attrs["axes"]):
        x = np.expand_dims(x, axis)
    return x


def _eval_gemm(node: WireNode, args: list[np.ndarray]) -> np.ndarray:
    a, b = args[0], args[1]
    if int(node.attrs.get("transB", 0)):
        b = b.T
    y = a @ b
    if len(args) > 2:
        y = y + args[2]
    return y.astype(a.dtype)


_EVALUATORS = {
    "Add": lambda n, a: a[0] + a[1],
    "Mul": lambda n, a: a[0] * a[1],
    "Div": lambda n, a: a[0] / a[1],
    "MatMul": lambda n, a: a[0] @ a[1],
    "Tanh": lambda n, a: np.tanh(a[0]),
    "Gather": lambda n, a: np.take(a[0], a[1].astype(np.int64),
                                   axis=int(n.attrs.get("axis", 0))),
    "Cast": lambda n, a: a[0].astype(_NUMPY_BY_CODE[int(n.attrs["to"])]),
    "Equal": lambda n, a: np.equal(a[0], a[1]),
    "Where": lambda n, a: np.where(a[0], a[1], a[2]),
    "Transpose": lambda n, a: np.transpose(a[0], n.attrs["perm"]),
    "Reshape": _eval_reshape,
    "Unsqueeze": _eval_unsqueeze,
    "Softmax": _eval_softmax,
    "LayerNormalization": _eval_layer_norm,
    "ReduceSum": _eval_reduce_sum,
    "Gemm": _eval_gemm,
}


def run_graph(graph: WireGraph,
              feeds: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Execute nodes in file order; they are topologically sorted on write."""
    values: dict[str, np.ndarray] = dict(graph.initializers)
    values.update(feeds)
    for node in graph.nodes:
        fn = _EVALUATORS.get(node.op_type)
        if fn is None:
            raise ValueError(f"no evaluator for op {node.op_type}")
        missing = [i for i in node.inputs if i not in values]
        if missing:
            raise ValueError(f"node {node.name or node.op_type} reads "
                             f"undefined tensors {missing}")
        values[node.outputs[0]] = fn(node, [values[i] for i in node.inputs])
    return {v.name: values[v.name] for v in graph.outputs}
