"""Parser and executor for nested augmentation method strings.

Grammar (whitespace-insensitive)::

    expr  := "x" | ident "(" expr ")"
    ident := GN | F | PR | CR | C | QR_X | QR_Y | QR_Z | QR_XYZ | real | abs

``QR_{Z}`` is accepted for ``QR_Z``, axis letters are case-insensitive, and a
subscript ``QR_{Z,0.15}`` pins that node's rotation bound.
"""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field

import numpy as np

from .augment import (
    AugmentParams,
    ImageBuffer,
    center_crop,
    classical_rotation,
    flip_h,
    gaussian_noise,
    minmax_renormalize,
    perfect_rotation,
    project_abs,
    project_real,
)
from .errors import InvalidInputError
from .qcore import apply_plan, apply_qrz_fast, embed, sample_plan

CLASSICAL_OPS = ("GN", "F", "PR", "CR", "C")
QUANTUM_OPS = ("QR_X", "QR_Y", "QR_Z", "QR_XYZ")
PROJECTIONS = ("real", "abs")
OPERATORS = CLASSICAL_OPS + QUANTUM_OPS + PROJECTIONS

# the catalog of methods, in the order they are usually reported
METHODS = (
    "x",
    "GN(x)",
    "F(PR(x))",
    "C(F(CR(x)))",
    "real(QR_Y(x))",
    "abs(QR_X(x))",
    "real(QR_Z(x))",
    "real(QR_XYZ(x))",
    "abs(QR_XYZ(x))",
    "QR_XYZ(x)",
    "real(QR_Z(GN(x)))",
    "real(QR_Z(F(PR(x))))",
    "real(QR_Z(C(F(CR(x)))))",
    "abs(QR_XYZ(C(F(CR(x)))))",
)


class SpecSyntaxError(InvalidInputError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class SpecSemanticError(InvalidInputError):
    pass


@dataclass(frozen=True)
class Node:
    op: str  # "x" for the leaf
    child: Node | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __str__(self):
        if self.child is None:
            return "x"
        op = self.op
        if "theta_max" in self.params:
            op = f"QR_{{{op[3:]},{self.params['theta_max']:g}}}"
        return f"{op}({self.child})"

    def chain(self) -> list[str]:
        """Operator names from the root down to the leaf."""
        node, out = self, []
        while node is not None:
            out.append(node.op)
            node = node.child
        return out

    def contains_quantum(self) -> bool:
        return any(op in QUANTUM_OPS for op in self.chain())


@dataclass(frozen=True)
class AugmentSpec:
    root: Node
    text: str = ""

    def __str__(self):
        return str(self.root)

    @property
    def is_identity(self) -> bool:
        return self.root.op == "x"


_TOKEN = re.compile(r"\s*(?:(?P<qr>QR_\{[^}]*\})|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()]))")


def _normalize_ident(raw: str, offset: int) -> tuple[str, dict]:
    params = {}
    if raw.startswith("QR_{"):
        body = raw[4:-1].replace(" ", "")
        axis, _, bound = body.partition(",")
        raw = "QR_" + axis
        if bound:
            try:
                params["theta_max"] = float(bound)
            except ValueError:
                raise SpecSyntaxError(f"bad rotation bound {bound!r}", offset) from None
    if raw[:3].upper() == "QR_":
        raw = "QR_" + raw[3:].upper()
    if raw not in OPERATORS:
        raise SpecSemanticError(f"unknown operator {raw!r} at offset {offset}")
    return raw, params


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise SpecSyntaxError(f"unexpected character {text[offset]!r}", offset)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise SpecSyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Node:
        kind, value, offset = self.peek()
        if kind == "ident" and value == "x":
            self.i += 1
            return Node("x")
        if kind not in ("ident", "qr"):
            raise SpecSyntaxError(f"expected an operator or 'x', found {value or 'end of input'!r}", offset)
        self.i += 1
        op, params = _normalize_ident(value, offset)
        self.take("punct", "(")
        child = self.expr()
        self.take("punct", ")")
        return Node(op, child, params)


def _check(node: Node, strict: bool) -> None:
    while node.child is not None:
        if node.op in PROJECTIONS:
            if not node.child.contains_quantum():
                raise SpecSemanticError(
                    f"{node.op}() of classical data is an identity; wrap a QR_* operator"
                )
            if strict and node.op == "abs" and node.child.op == "QR_Z":
                raise SpecSemanticError("abs(QR_Z(...)) is the identity on the moduli; rejected")
        node = node.child


def parse_spec(text: str, strict: bool = True) -> AugmentSpec:
    """Parse a method string.

    ``strict=False`` admits ``abs(QR_Z(...))``, which is an identity on the
    moduli but appears in compositions followed by pixel noise.
    """
    parser = _Parser(text)
    root = parser.expr()
    parser.take("end")
    _check(root, strict)
    return AugmentSpec(root, text)


def node_seed(seed: int, depth: int, op: str, image_index: int = 0) -> int:
    """Seed for the node at ``depth`` (root = 0) of a spec.

    Derived from (seed, image index, depth, operator) only, so draws of one
    node do not depend on what other nodes consumed.
    """
    ss = np.random.SeedSequence([int(seed), int(image_index), int(depth), zlib.crc32(op.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rotate_channels(channels, mode: str, theta_max: float, seed: int, projection: str | None = None,
                    renormalize: bool = True) -> tuple[np.ndarray, bool]:
    """Embed each channel, rotate with one shared plan, project, renormalize.

    Returns the new channel stack and whether it is complex-split (no
    projection: real planes first, then imaginary planes).
    """
    channels = np.asarray(channels, dtype=float)
    first = embed(channels[0])
    plan = sample_plan(first.n_qubits, mode, theta_max, seed)
    outs = []
    for channel in channels:
        state = embed(channel)
        if mode == "Z":
            state = apply_qrz_fast(state, plan.angles("Z"))
        else:
            state = apply_plan(state, plan)
        if projection == "real":
            out = project_real(state)
        elif projection == "abs":
            out = project_abs(state)
        else:
            rows, cols = state.source_shape
            out = state.amplitudes[: rows * cols].reshape(rows, cols)
        if renormalize:
            out = minmax_renormalize(out, channel)
        outs.append(out)
    if projection is None:
        outs = np.array(outs)
        return np.concatenate([outs.real, outs.imag]), True
    return np.array(outs), False


class _Executor:
    def __init__(self, params: AugmentParams, seed: int, image_index: int, renormalize: bool):
        self.params = params
        self.seed = seed
        self.image_index = image_index
        self.renormalize = renormalize

    def rng(self, depth, op):
        return np.random.default_rng(node_seed(self.seed, depth, op, self.image_index))

    def run(self, node: Node, img: ImageBuffer, depth: int = 0) -> ImageBuffer:
        op = node.op
        if op == "x":
            return img
        if op in PROJECTIONS and node.child.op in QUANTUM_OPS:
            return self.quantum(node.child, img, depth + 1, projection=op)
        if op in QUANTUM_OPS:
            return self.quantum(node, img, depth, projection=None)
        inner = self.run(node.child, img, depth + 1)
        p = self.params
        if op == "real":
            return inner
        if op == "abs":
            return inner.replace(np.abs(inner.channels))
        if op == "GN":
            return gaussian_noise(inner, p.gn_sigma, node_seed(self.seed, depth, op, self.image_index))
        if op == "F":
            return flip_h(inner) if self.rng(depth, op).random() < 0.5 else inner
        if op == "PR":
            return perfect_rotation(inner, int(self.rng(depth, op).integers(4)))
        if op == "CR":
            angle = self.rng(depth, op).uniform(-p.cr_bound_deg, p.cr_bound_deg)
            return classical_rotation(inner, angle)
        if op == "C":
            return center_crop(inner, p.crop_enlarge, p.crop_out)
        raise InvalidInputError(f"unknown operator {op!r}")

    def quantum(self, node: Node, img: ImageBuffer, depth: int, projection) -> ImageBuffer:
        inner = self.run(node.child, img, depth + 1)
        theta = node.params.get("theta_max", self.params.theta_max)
        seed = node_seed(self.seed, depth, node.op, self.image_index)
        channels, split = rotate_channels(
            inner.channels, node.op[3:], theta, seed, projection, self.renormalize
        )
        return inner.replace(channels, complex_split=split or inner.complex_split)


def run_pipeline(img: ImageBuffer, spec, params: AugmentParams | None = None, seed: int | None = None,
                 image_index: int = 0, renormalize: bool = True) -> ImageBuffer:
    """Evaluate ``spec`` innermost-first on ``img``.

    Each QR block (a QR node plus an optional enclosing projection) is
    renormalized against its own input channels unless ``renormalize`` is
    false. A QR block without projection returns a complex-split image.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    params = params or AugmentParams()
    seed = params.seed if seed is None else seed
    return _Executor(params, seed, image_index, renormalize).run(spec.root, img)
