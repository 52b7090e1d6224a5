"""Self-contained ONNX graph reader, writer, and numpy executor.

Covers the protobuf wire subset that model files actually use (varint and
length-delimited fields; packed and unpacked repeated scalars) and a fixed
numpy op set sufficient for transformer-style encoders. No dependency on
the onnx or onnxruntime packages.

Field numbers used here, per the public onnx.proto3 schema:
  ModelProto:     1 ir_version, 2 producer_name, 7 graph, 8 opset_import
  GraphProto:     1 node, 2 name, 5 initializer, 11 input, 12 output
  NodeProto:      1 input, 2 output, 3 name, 4 op_type, 5 attribute
  AttributeProto: 1 name, 2 f, 3 i, 4 s, 5 t, 7 floats, 8 ints, 20 type
  TensorProto:    1 dims, 2 data_type, 4 float_data, 5 int32_data,
                  7 int64_data, 8 name, 9 raw_data
  ValueInfoProto: 1 name, 2 type; TypeProto.tensor_type = 1;
                  Tensor: 1 elem_type, 2 shape; Dimension: 1 dim_value, 2 dim_param
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArtifactLoadError

_MASK64 = (1 << 64) - 1

# TensorProto.DataType codes
DT_FLOAT = 1
DT_INT32 = 6
DT_INT64 = 7
DT_BOOL = 9
DT_DOUBLE = 11

_NP_BY_CODE = {
    DT_FLOAT: np.dtype("<f4"),
    DT_INT32: np.dtype("<i4"),
    DT_INT64: np.dtype("<i8"),
    DT_BOOL: np.dtype("|b1"),
    DT_DOUBLE: np.dtype("<f8"),
}
_CODE_BY_KIND = {
    ("f", 4): DT_FLOAT,
    ("f", 8): DT_DOUBLE,
    ("i", 4): DT_INT32,
    ("i", 8): DT_INT64,
    ("b", 1): DT_BOOL,
}


def _dtype_code(arr: np.ndarray) -> int:
    key = (arr.dtype.kind, arr.dtype.itemsize)
    if key not in _CODE_BY_KIND:
        raise ArtifactLoadError(f"unsupported tensor dtype {arr.dtype}")
    return _CODE_BY_KIND[key]


# ---------------------------------------------------------------- wire layer

def _varint(value: int) -> bytes:
    value &= _MASK64
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _read_varint(buf: memoryview, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ArtifactLoadError("truncated varint")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise ArtifactLoadError("varint too long")


def _signed(value: int) -> int:
    return value - (1 << 64) if value >= (1 << 63) else value


def _tag(fieldno: int, wire: int) -> bytes:
    return _varint((fieldno << 3) | wire)


def _len_field(fieldno: int, payload: bytes) -> bytes:
    return _tag(fieldno, 2) + _varint(len(payload)) + payload


def _int_field(fieldno: int, value: int) -> bytes:
    return _tag(fieldno, 0) + _varint(value)


def _float_field(fieldno: int, value: float) -> bytes:
    return _tag(fieldno, 5) + struct.pack("<f", value)


def _iter_fields(buf: memoryview):
    pos = 0
    end = len(buf)
    while pos < end:
        key, pos = _read_varint(buf, pos)
        fieldno, wire = key >> 3, key & 7
        if wire == 0:
            value, pos = _read_varint(buf, pos)
        elif wire == 1:
            value = bytes(buf[pos:pos + 8])
            pos += 8
        elif wire == 2:
            length, pos = _read_varint(buf, pos)
            if pos + length > end:
                raise ArtifactLoadError("truncated length-delimited field")
            value = buf[pos:pos + length]
            pos += length
        elif wire == 5:
            value = bytes(buf[pos:pos + 4])
            pos += 4
        else:
            raise ArtifactLoadError(f"unsupported wire type {wire}")
        yield fieldno, wire, value


def _packed_varints(value, wire) -> list[int]:
    """A repeated integer field arrives packed (one blob) or one-by-one."""
    if wire == 0:
        return [_signed(value)]
    out = []
    pos = 0
    view = memoryview(value)
    while pos < len(view):
        v, pos = _read_varint(view, pos)
        out.append(_signed(v))
    return out


def _packed_floats(value, wire) -> list[float]:
    if wire == 5:
        return [struct.unpack("<f", value)[0]]
    blob = bytes(value)
    return list(struct.unpack(f"<{len(blob) // 4}f", blob))


# ------------------------------------------------------------- model object

@dataclass
class Node:
    op_type: str
    inputs: list[str]
    outputs: list[str]
    attrs: dict = field(default_factory=dict)
    name: str = ""


@dataclass
class TensorSpec:
    """Declared graph input/output: dims may be ints or symbolic strings."""
    name: str
    elem_type: int = DT_FLOAT
    shape: tuple = ()


@dataclass
class Graph:
    nodes: list[Node]
    initializers: dict[str, np.ndarray]
    inputs: list[TensorSpec]
    outputs: list[TensorSpec]
    name: str = "graph"

    @property
    def output_names(self) -> list[str]:
        return [o.name for o in self.outputs]


# ----------------------------------------------------------------- encoding

def _encode_tensor(name: str, arr: np.ndarray) -> bytes:
    code = _dtype_code(arr)
    arr = np.ascontiguousarray(arr, dtype=_NP_BY_CODE[code])
    parts = [_int_field(1, d) for d in arr.shape]
    parts.append(_int_field(2, code))
    if name:
        parts.append(_len_field(8, name.encode("utf-8")))
    parts.append(_len_field(9, arr.tobytes()))
    return b"".join(parts)


def _encode_attribute(name: str, value) -> bytes:
    parts = [_len_field(1, name.encode("utf-8"))]
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, float):
        parts.append(_float_field(2, value))
        parts.append(_int_field(20, 1))
    elif isinstance(value, int):
        parts.append(_int_field(3, value))
        parts.append(_int_field(20, 2))
    elif isinstance(value, str):
        parts.append(_len_field(4, value.encode("utf-8")))
        parts.append(_int_field(20, 3))
    elif isinstance(value, bytes):
        parts.append(_len_field(4, value))
        parts.append(_int_field(20, 3))
    elif isinstance(value, np.ndarray):
        parts.append(_len_field(5, _encode_tensor("", value)))
        parts.append(_int_field(20, 4))
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], float):
        packed = struct.pack(f"<{len(value)}f", *value)
        parts.append(_len_field(7, packed))
        parts.append(_int_field(20, 6))
    elif isinstance(value, (list, tuple)):
        packed = b"".join(_varint(int(v)) for v in value)
        parts.append(_len_field(8, packed))
        parts.append(_int_field(20, 7))
    else:
        raise ArtifactLoadError(f"cannot encode attribute {name}={value!r}")
    return b"".join(parts)


def _encode_node(node: Node) -> bytes:
    parts = []
    parts.extend(_len_field(1, s.encode("utf-8")) for s in node.inputs)
    parts.extend(_len_field(2, s.encode("utf-8")) for s in node.outputs)
    if node.name:
        parts.append(_len_field(3, node.name.encode("utf-8")))
    parts.append(_len_field(4, node.op_type.encode("utf-8")))
    parts.extend(_len_field(5, _encode_attribute(k, v))
                 for k, v in node.attrs.items())
    return b"".join(parts)


def _encode_value_info(spec: TensorSpec) -> bytes:
    dims = []
    for d in spec.shape:
        if isinstance(d, int):
            dims.append(_len_field(1, _int_field(1, d)))
        else:
            dims.append(_len_field(1, _len_field(2, str(d).encode("utf-8"))))
    shape = b"".join(dims)
    tensor = _int_field(1, spec.elem_type) + _len_field(2, shape)
    type_proto = _len_field(1, tensor)
    return _len_field(1, spec.name.encode("utf-8")) + _len_field(2, type_proto)


def save_model(graph: Graph, path: str | Path, opset: int = 17) -> None:
    gparts = []
    gparts.extend(_len_field(1, _encode_node(n)) for n in graph.nodes)
    gparts.append(_len_field(2, graph.name.encode("utf-8")))
    gparts.extend(_len_field(5, _encode_tensor(name, arr))
                  for name, arr in graph.initializers.items())
    gparts.extend(_len_field(11, _encode_value_info(s)) for s in graph.inputs)
    gparts.extend(_len_field(12, _encode_value_info(s)) for s in graph.outputs)
    opset_entry = _len_field(1, b"") + _int_field(2, opset)
    model = (_int_field(1, 8)  # ir_version
             + _len_field(2, b"darkscan")
             + _len_field(7, b"".join(gparts))
             + _len_field(8, opset_entry))
    Path(path).write_bytes(model)


# ----------------------------------------------------------------- decoding

def _decode_tensor(buf: memoryview) -> tuple[str, np.ndarray]:
    dims: list[int] = []
    code = DT_FLOAT
    name = ""
    raw: bytes | None = None
    floats: list[float] = []
    ints: list[int] = []
    for fieldno, wire, value in _iter_fields(buf):
        if fieldno == 1:
            dims.extend(_packed_varints(value, wire))
        elif fieldno == 2:
            code = int(value)
        elif fieldno == 4:
            floats.extend(_packed_floats(value, wire))
        elif fieldno in (5, 7):
            ints.extend(_packed_varints(value, wire))
        elif fieldno == 8:
            name = bytes(value).decode("utf-8")
        elif fieldno == 9:
            raw = bytes(value)
    if code not in _NP_BY_CODE:
        raise ArtifactLoadError(f"unsupported tensor data_type {code}")
    dtype = _NP_BY_CODE[code]
    if raw is not None:
        arr = np.frombuffer(raw, dtype=dtype).reshape(dims).copy()
    elif floats:
        arr = np.asarray(floats, dtype=dtype).reshape(dims)
    elif ints:
        arr = np.asarray(ints, dtype=dtype).reshape(dims)
    else:
        arr = np.zeros(dims, dtype=dtype)
    return name, arr


def _decode_attribute(buf: memoryview) -> tuple[str, object]:
    name = ""
    value: object = None
    for fieldno, wire, raw in _iter_fields(buf):
        if fieldno == 1:
            name = bytes(raw).decode("utf-8")
        elif fieldno == 2:
            value = struct.unpack("<f", raw)[0]
        elif fieldno == 3:
            value = _signed(raw)
        elif fieldno == 4:
            value = bytes(raw).decode("utf-8", errors="replace")
        elif fieldno == 5:
            value = _decode_tensor(raw)[1]
        elif fieldno == 7:
            if not isinstance(value, list):
                value = []
            value.extend(_packed_floats(raw, wire))
        elif fieldno == 8:
            if not isinstance(value, list):
                value = []
            value.extend(_packed_varints(raw, wire))
    return name, value


def _decode_node(buf: memoryview) -> Node:
    node = Node(op_type="", inputs=[], outputs=[])
    for fieldno, wire, value in _iter_fields(buf):
        if fieldno == 1:
            node.inputs.append(bytes(value).decode("utf-8"))
        elif fieldno == 2:
            node.outputs.append(bytes(value).decode("utf-8"))
        elif fieldno == 3:
            node.name = bytes(value).decode("utf-8")
        elif fieldno == 4:
            node.op_type = bytes(value).decode("utf-8")
        elif fieldno == 5:
            k, v = _decode_attribute(value)
            node.attrs[k] = v
    return node


def _decode_value_info(buf: memoryview) -> TensorSpec:
    spec = TensorSpec(name="")
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            spec.name = bytes(value).decode("utf-8")
        elif fieldno == 2:
            for f2, _w2, v2 in _iter_fields(value):
                if f2 != 1:  # tensor_type
                    continue
                elem = DT_FLOAT
                dims: list = []
                for f3, w3, v3 in _iter_fields(v2):
                    if f3 == 1:
                        elem = int(v3)
                    elif f3 == 2:
                        for f4, _w4, v4 in _iter_fields(v3):
                            if f4 != 1:
                                continue
                            dim: object = -1
                            for f5, _w5, v5 in _iter_fields(v4):
                                if f5 == 1:
                                    dim = _signed(v5)
                                elif f5 == 2:
                                    dim = bytes(v5).decode("utf-8")
                            dims.append(dim)
                spec.elem_type = elem
                spec.shape = tuple(dims)
    return spec


def load_model(path: str | Path) -> Graph:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ArtifactLoadError(f"cannot read model file {path}: {exc}") from exc
    graph_buf = None
    for fieldno, _wire, value in _iter_fields(memoryview(blob)):
        if fieldno == 7:
            graph_buf = value
    if graph_buf is None:
        raise ArtifactLoadError(f"{path} contains no graph")
    graph = Graph(nodes=[], initializers={}, inputs=[], outputs=[])
    for fieldno, _wire, value in _iter_fields(graph_buf):
        if fieldno == 1:
            graph.nodes.append(_decode_node(value))
        elif fieldno == 2:
            graph.name = bytes(value).decode("utf-8")
        elif fieldno == 5:
            name, arr = _decode_tensor(value)
            graph.initializers[name] = arr
        elif fieldno == 11:
            graph.inputs.append(_decode_value_info(value))
        elif fieldno == 12:
            graph.outputs.append(_decode_value_info(value))
    unsupported = sorted({n.op_type for n in graph.nodes} - set(_OPS))
    if unsupported:
        raise ArtifactLoadError(
            f"graph uses unsupported ops: {', '.join(unsupported)}")
    return graph


# ----------------------------------------------------------------- executor

def _axes_arg(node: Node, args: list, pos: int) -> tuple | None:
    """Reduce-style ops carry axes as an attribute or a trailing input
    depending on opset; accept either."""
    if len(args) > pos and args[pos] is not None:
        return tuple(int(a) for a in np.asarray(args[pos]).ravel())
    if "axes" in node.attrs:
        return tuple(int(a) for a in node.attrs["axes"])
    return None


def _op_gemm(node: Node, args):
    a, b = args[0], args[1]
    alpha = float(node.attrs.get("alpha", 1.0))
    beta = float(node.attrs.get("beta", 1.0))
    if int(node.attrs.get("transA", 0)):
        a = a.T
    if int(node.attrs.get("transB", 0)):
        b = b.T
    y = alpha * (a @ b)
    if len(args) > 2 and args[2] is not None:
        y = y + beta * args[2]
    return (y.astype(a.dtype, copy=False),)


def _op_softmax(node: Node, args):
    x = args[0]
    axis = int(node.attrs.get("axis", -1))
    z = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(z)
    return ((e / np.sum(e, axis=axis, keepdims=True)).astype(x.dtype, copy=False),)


def _op_layer_norm(node: Node, args):
    x, scale = args[0], args[1]
    bias = args[2] if len(args) > 2 and args[2] is not None else None
    axis = int(node.attrs.get("axis", -1))
    eps = np.asarray(node.attrs.get("epsilon", 1e-5), dtype=x.dtype)
    start = axis if axis >= 0 else x.ndim + axis
    axes = tuple(range(start, x.ndim))
    mean = x.mean(axis=axes, keepdims=True)
    var = np.mean((x - mean) ** 2, axis=axes, keepdims=True)
    y = (x - mean) / np.sqrt(var + eps) * scale
    if bias is not None:
        y = y + bias
    return (y.astype(x.dtype, copy=False),)


def _op_reduce(fn):
    def run(node: Node, args):
        x = args[0]
        axes = _axes_arg(node, args, 1)
        keep = bool(int(node.attrs.get("keepdims", 1)))
        return (fn(x, axis=axes, keepdims=keep).astype(x.dtype, copy=False),)
    return run


def _op_reshape(node: Node, args):
    data, shape = args[0], [int(s) for s in np.asarray(args[1]).ravel()]
    # 0 copies the input dim at that position; a single -1 is inferred
    resolved = [data.shape[i] if s == 0 else s for i, s in enumerate(shape)]
    return (data.reshape(resolved),)


def _op_unsqueeze(node: Node, args):
    x = args[0]
    axes = _axes_arg(node, args, 1) or ()
    out_rank = x.ndim + len(axes)
    norm = sorted(a % out_rank for a in axes)
    for a in norm:
        x = np.expand_dims(x, a)
    return (x,)


def _op_slice(node: Node, args):
    data = args[0]
    starts = [int(v) for v in np.asarray(args[1]).ravel()]
    ends = [int(v) for v in np.asarray(args[2]).ravel()]
    if len(args) > 3 and args[3] is not None:
        axes = [int(v) for v in np.asarray(args[3]).ravel()]
    else:
        axes = list(range(len(starts)))
    if len(args) > 4 and args[4] is not None:
        steps = [int(v) for v in np.asarray(args[4]).ravel()]
    else:
        steps = [1] * len(starts)
    sl: list = [slice(None)] * data.ndim
    for ax, st, en, sp in zip(axes, starts, ends, steps):
        if sp == 0:
            raise ArtifactLoadError("Slice step of 0")
        sl[ax % data.ndim] = slice(st, en, sp)
    return (data[tuple(sl)],)


def _op_cast(node: Node, args):
    code = int(node.attrs["to"])
    if code not in _NP_BY_CODE:
        raise ArtifactLoadError(f"Cast to unsupported data_type {code}")
    return (args[0].astype(_NP_BY_CODE[code]),)


def _op_expand(node: Node, args):
    x, shape = args[0], tuple(int(s) for s in np.asarray(args[1]).ravel())
    target = np.broadcast_shapes(x.shape, shape)
    return (np.broadcast_to(x, target).copy(),)


def _op_div(node: Node, args):
    a, b = args
    if a.dtype.kind in "iu" and np.asarray(b).dtype.kind in "iu":
        return (a // b,)
    return (a / b,)


_OPS = {
    "Add": lambda n, a: (a[0] + a[1],),
    "Sub": lambda n, a: (a[0] - a[1],),
    "Mul": lambda n, a: (a[0] * a[1],),
    "Div": _op_div,
    "MatMul": lambda n, a: (a[0] @ a[1],),
    "Gemm": _op_gemm,
    "Neg": lambda n, a: (-a[0],),
    "Exp": lambda n, a: (np.exp(a[0]),),
    "Sqrt": lambda n, a: (np.sqrt(a[0]),),
    "Pow": lambda n, a: (np.power(a[0], a[1]),),
    "Tanh": lambda n, a: (np.tanh(a[0]),),
    "Sigmoid": lambda n, a: (1.0 / (1.0 + np.exp(-a[0])),),
    "Relu": lambda n, a: (np.maximum(a[0], 0),),
    "Softmax": _op_softmax,
    "LayerNormalization": _op_layer_norm,
    "ReduceMean": _op_reduce(np.mean),
    "ReduceSum": _op_reduce(np.sum),
    "Reshape": _op_reshape,
    "Transpose": lambda n, a: (np.transpose(a[0], n.attrs.get("perm")),),
    "Gather": lambda n, a: (np.take(a[0], a[1].astype(np.int64),
                                    axis=int(n.attrs.get("axis", 0))),),
    "Unsqueeze": _op_unsqueeze,
    "Cast": _op_cast,
    "Concat": lambda n, a: (np.concatenate(a, axis=int(n.attrs["axis"])),),
    "Slice": _op_slice,
    "Shape": lambda n, a: (np.asarray(a[0].shape, dtype=np.int64),),
    "Where": lambda n, a: (np.where(a[0], a[1], a[2]),),
    "Equal": lambda n, a: (np.equal(a[0], a[1]),),
    "Expand": _op_expand,
    "Identity": lambda n, a: (a[0],),
    "Constant": lambda n, a: (np.asarray(n.attrs["value"]),),
}


class GraphRunner:
    """Executes a loaded graph on numpy feeds, node-by-node in file order
    (graphs are stored topologically sorted)."""

    def __init__(self, graph: Graph):
        self.graph = graph
        declared = {s.name for s in graph.inputs} | set(graph.initializers)
        available = set(declared)
        for node in graph.nodes:
            for name in node.inputs:
                if name and name not in available:
                    raise ArtifactLoadError(
                        f"node {node.op_type} reads undefined value {name!r}")
            available.update(o for o in node.outputs if o)
        missing = [o.name for o in graph.outputs if o.name not in available]
        if missing:
            raise ArtifactLoadError(f"graph outputs never produced: {missing}")

    def feed_names(self) -> list[str]:
        init = set(self.graph.initializers)
        return [s.name for s in self.graph.inputs if s.name not in init]

    def run(self, feeds: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        values: dict[str, np.ndarray] = dict(self.graph.initializers)
        for name, arr in feeds.items():
            values[name] = np.asarray(arr)
        for node in self.graph.nodes:
            args = [values[i] if i else None for i in node.inputs]
            try:
                outs = _OPS[node.op_type](node, args)
            except ArtifactLoadError:
                raise
            except Exception as exc:
                raise ArtifactLoadError(
                    f"node {node.name or node.op_type} failed: {exc}") from exc
            for out_name, out_val in zip(node.outputs, outs):
                if out_name:
                    values[out_name] = out_val
        return {name: values[name] for name in self.graph.output_names}


def supported_ops() -> frozenset[str]:
    return frozenset(_OPS)
