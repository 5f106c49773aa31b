"""A small textual language for index-notation tensor expressions.

Surface syntax: tensor references subscripted with index names and ``~``
complement marks (``a(i)``, ``y(~j,i)``), the operator set
``* \\ / .* ./ .\\ .^ + - ' .' == ~= < > <= >= & |``, bracket concatenation
(``[x y]``, ``[x; y]``), and the functions ``cat``, ``trace``, ``diag``,
``isequal``, ``abs``, ``log``, ``exp``, ``conj``, ``step``, ``round``,
``ones``, ``zeros``, ``rand``.  ``*``, ``\\``, ``/`` and the dotted operators
share one left-associative level; ``+ -`` bind below them, relations below
that, and ``& |`` lowest.  ``~`` complements an index inside subscripts and is
logical NOT on a tensor.  Index names intern to one identity per session.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import ewise, lattice, pagewise
from .errors import EngineError, ExprSyntaxError, SubscriptKindError, UnknownNameError
from .indices import IndexHandle, fresh
from .tensor import Tensor, assign, from_array

__all__ = [
    "parse",
    "print_ast",
    "Environment",
    "evaluate",
    "run_script",
    "ScriptReport",
]

# -- tokens ------------------------------------------------------------------

_TWO_CHAR = (".*", "./", ".\\", ".^", ".'", "==", "~=", "<=", ">=")
_ONE_CHAR = "+-*/\\<>=&|~'(),;:[]"


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'name' | 'num' | 'op' | 'end'
    text: str
    line: int
    col: int
    spaced: bool  # whitespace immediately before this token


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i = 0
    spaced = False
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            toks.append(_Tok("op", "\n", line, col, spaced))
            line += 1
            col = 1
            i += 1
            spaced = False
            continue
        if c in " \t\r":
            i += 1
            col += 1
            spaced = True
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                j += 1
                if j < n and text[j] in "+-":
                    j += 1
                while j < n and text[j].isdigit():
                    j += 1
            toks.append(_Tok("num", text[i:j], line, start_col, spaced))
            col += j - i
            i = j
            spaced = False
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("name", text[i:j], line, start_col, spaced))
            col += j - i
            i = j
            spaced = False
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            toks.append(_Tok("op", two, line, start_col, spaced))
            i += 2
            col += 2
            spaced = False
            continue
        if c in _ONE_CHAR:
            toks.append(_Tok("op", c, line, start_col, spaced))
            i += 1
            col += 1
            spaced = False
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("end", "", line, col, spaced))
    return toks


# -- syntax tree ---------------------------------------------------------------


@dataclass(frozen=True)
class IndexSub:
    name: str
    complemented: bool = False


@dataclass(frozen=True)
class NumSub:
    value: float


@dataclass(frozen=True)
class ColonSub:
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class TensorRef:
    name: str
    subs: tuple | None = None


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' | 'pos' | 'not'
    operand: Any


@dataclass(frozen=True)
class Postfix:
    op: str  # "'" | ".'"
    operand: Any


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: Any
    rhs: Any


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Bracket:
    rows: tuple  # tuple of tuples of expressions


@dataclass(frozen=True)
class Assign:
    target: TensorRef
    value: Any


_FUNCTIONS = {
    "cat", "trace", "diag", "isequal",
    "abs", "log", "exp", "conj", "step", "round",
    "ones", "zeros", "rand",
}
_MUL_OPS = ("*", "\\", "/", ".*", "./", ".\\", ".^")
_ADD_OPS = ("+", "-")
_REL_OPS = ("==", "~=", "<", ">", "<=", ">=")
_LOGIC_OPS = ("&", "|")
_BINARY_TEXT = set(_MUL_OPS + _ADD_OPS + _REL_OPS + _LOGIC_OPS)


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise ExprSyntaxError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ExprSyntaxError(msg, t.line, t.col)

    def skip_newlines(self):
        while self.peek().text == "\n":
            self.next()

    # statement := 'assert' expr | lhs '=' expr | expr
    def statement(self):
        if self.peek().kind == "name" and self.peek().text == "assert":
            self.next()
            return ("assert", self.expr())
        node = self.expr()
        if self.peek().text == "=":
            if not isinstance(node, TensorRef):
                self.fail("assignment target must be a tensor reference")
            self.next()
            return ("assign", Assign(node, self.expr()))
        return ("expr", node)

    def expr(self):
        return self.logic_tier()

    def logic_tier(self):
        node = self.rel_tier()
        while self.peek().text in _LOGIC_OPS:
            op = self.next().text
            node = Binary(op, node, self.rel_tier())
        return node

    def rel_tier(self):
        node = self.add_tier()
        while self.peek().text in _REL_OPS:
            op = self.next().text
            node = Binary(op, node, self.add_tier())
        return node

    def add_tier(self):
        node = self.mul_tier()
        while self.peek().text in _ADD_OPS:
            op = self.next().text
            node = Binary(op, node, self.mul_tier())
        return node

    def mul_tier(self):
        node = self.prefix()
        while self.peek().text in _MUL_OPS:
            op = self.next().text
            node = Binary(op, node, self.prefix())
        return node

    def prefix(self):
        t = self.peek()
        if t.text == "-":
            self.next()
            return Unary("neg", self.prefix())
        if t.text == "+":
            self.next()
            return Unary("pos", self.prefix())
        if t.text == "~":
            self.next()
            return Unary("not", self.prefix())
        return self.postfix()

    def postfix(self):
        node = self.primary()
        while self.peek().text in ("'", ".'"):
            node = Postfix(self.next().text, node)
        return node

    def primary(self):
        t = self.peek()
        if t.kind == "num":
            self.next()
            try:
                return Num(float(t.text))
            except ValueError:
                raise ExprSyntaxError(f"malformed number {t.text!r}", t.line, t.col) from None
        if t.text == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        if t.text == "[":
            return self.bracket()
        if t.kind == "name":
            self.next()
            if self.peek().text == "(":
                if t.text in _FUNCTIONS:
                    return Call(t.text, self.call_args(t.text))
                return TensorRef(t.text, self.subscripts())
            return TensorRef(t.text, None)
        self.fail(f"unexpected token {t.text!r}")

    def subscripts(self) -> tuple:
        self.expect("(")
        items = [self.sub_item()]
        while self.peek().text == ",":
            self.next()
            items.append(self.sub_item())
        self.expect(")")
        return tuple(items)

    def sub_item(self):
        t = self.peek()
        if t.text == ":":
            self.next()
            return ColonSub()
        if t.text == "~":
            self.next()
            name = self.next()
            if name.kind != "name":
                raise ExprSyntaxError("expected an index name after '~'", name.line, name.col)
            return IndexSub(name.text, True)
        if t.kind == "name":
            self.next()
            return IndexSub(t.text, False)
        if t.kind == "num":
            self.next()
            try:
                return NumSub(float(t.text))
            except ValueError:
                raise ExprSyntaxError(f"malformed number {t.text!r}", t.line, t.col) from None
        self.fail("subscripts must be index names, numbers, or ':'")

    def call_args(self, fn: str) -> tuple:
        self.expect("(")
        args = []
        if fn == "cat":
            args.append(self.sub_item())
        else:
            args.append(self.expr())
        while self.peek().text == ",":
            self.next()
            args.append(self.expr())
        self.expect(")")
        return tuple(args)

    def bracket(self) -> Bracket:
        # items split where the next token cannot continue an expression, so
        # `[a - b]` reads as one item a-b while `[a b]` reads as two items
        start = self.expect("[")
        rows: list[list] = [[]]
        while True:
            t = self.peek()
            if t.kind == "end":
                raise ExprSyntaxError("unterminated bracket", start.line, start.col)
            if t.text == "]":
                self.next()
                break
            if t.text == ";":
                self.next()
                rows.append([])
                continue
            rows[-1].append(self.expr())
        if all(not r for r in rows):
            raise ExprSyntaxError("empty brackets", start.line, start.col)
        return Bracket(tuple(tuple(r) for r in rows if r))


def parse(text: str):
    """Parse one statement; returns ('expr'|'assign'|'assert', node)."""
    toks = [t for t in _lex(text) if t.text != "\n"]
    p = _Parser(toks)
    kind, node = p.statement()
    trailing = p.peek()
    if trailing.text == ";":
        p.next()
        trailing = p.peek()
    if trailing.kind != "end":
        raise ExprSyntaxError(
            f"unexpected trailing token {trailing.text!r}", trailing.line, trailing.col
        )
    return kind, node


# -- printing ------------------------------------------------------------------

_PRec = {op: 4 for op in _MUL_OPS}
_PRec.update({op: 3 for op in _ADD_OPS})
_PRec.update({op: 2 for op in _REL_OPS})
_PRec.update({op: 1 for op in _LOGIC_OPS})


def print_ast(node) -> str:
    """Render a parsed expression back to source text."""
    return _fmt(node, 0)


def _fmt(node, outer: int) -> str:
    if isinstance(node, Num):
        v = node.value
        return str(int(v)) if v == int(v) else repr(v)
    if isinstance(node, TensorRef):
        if node.subs is None:
            return node.name
        return f"{node.name}({','.join(_fmt_sub(s) for s in node.subs)})"
    if isinstance(node, Call):
        return f"{node.fn}({','.join(_fmt_sub(a) if isinstance(a, (IndexSub, NumSub, ColonSub)) else _fmt(a, 0) for a in node.args)})"
    if isinstance(node, Unary):
        mark = {"neg": "-", "pos": "+", "not": "~"}[node.op]
        return f"{mark}{_fmt(node.operand, 5)}"
    if isinstance(node, Postfix):
        return f"{_fmt(node.operand, 6)}{node.op}"
    if isinstance(node, Binary):
        p = _PRec[node.op]
        lhs = _fmt(node.lhs, p)
        rhs = _fmt(node.rhs, p + 1)  # left-associative
        text = f"{lhs}{node.op}{rhs}"
        return f"({text})" if p < outer else text
    if isinstance(node, Bracket):
        rows = [" ".join(_fmt(item, 0) for item in row) for row in node.rows]
        return f"[{'; '.join(rows)}]"
    if isinstance(node, Assign):
        return f"{_fmt(node.target, 0)} = {_fmt(node.value, 0)}"
    raise TypeError(f"cannot print {node!r}")


def _fmt_sub(s) -> str:
    if isinstance(s, IndexSub):
        return f"~{s.name}" if s.complemented else s.name
    if isinstance(s, NumSub):
        v = s.value
        return str(int(v)) if v == int(v) else repr(v)
    if isinstance(s, ColonSub):
        return ":"
    return _fmt(s, 0)


# -- environment and evaluation ------------------------------------------------


@dataclass
class Environment:
    """Named tensors, session-scoped index names, and the random source."""

    tensors: dict[str, Tensor] = field(default_factory=dict)
    index_table: dict[str, IndexHandle] = field(default_factory=dict)
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    @classmethod
    def with_seed(cls, seed: int) -> "Environment":
        return cls(rng=np.random.default_rng(seed))

    def index(self, name: str) -> IndexHandle:
        h = self.index_table.get(name)
        if h is None:
            h = fresh()
            self.index_table[name] = h
        return h

    def index_name(self, handle_id: int) -> str | None:
        for name, h in self.index_table.items():
            if h.id == handle_id:
                return name
        return None


def _as_value_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    if isinstance(value, (bool, np.bool_)):
        return Tensor(np.array([[bool(value)]]))
    return Tensor(np.array([[float(value)]]))


def _shape_args(args) -> tuple[int, ...]:
    dims = []
    for a in args:
        if not isinstance(a, Num) or a.value != int(a.value):
            raise SubscriptKindError("dimension sizes must be integer literals")
        dims.append(int(a.value))
    return tuple(dims)


def evaluate(node, env: Environment):
    """Evaluate a parsed expression against an environment."""
    if isinstance(node, Num):
        return Tensor(np.array([[node.value]]))
    if isinstance(node, TensorRef):
        if node.name not in env.tensors:
            raise UnknownNameError(f"unknown name {node.name!r}")
        t = env.tensors[node.name]
        if node.subs is None:
            return t
        if all(isinstance(s, IndexSub) for s in node.subs):
            handles = [
                ~env.index(s.name) if s.complemented else env.index(s.name)
                for s in node.subs
            ]
            return t.reindex(handles)
        if any(isinstance(s, IndexSub) for s in node.subs):
            raise SubscriptKindError("subscripts mix index names with numbers")
        subs = [":" if isinstance(s, ColonSub) else int(s.value) for s in node.subs]
        return from_array(t.slice(subs))[0]
    if isinstance(node, Unary):
        val = evaluate(node.operand, env)
        if node.op == "pos":
            return val
        if node.op == "neg":
            return ewise.ewise_unary("neg", _as_value_tensor(val))
        return ewise.ewise_unary("not", _as_value_tensor(val))
    if isinstance(node, Postfix):
        val = _as_value_tensor(evaluate(node.operand, env))
        if node.op == "'":
            return pagewise.page_ctranspose(val)
        return pagewise.page_transpose(val)
    if isinstance(node, Binary):
        lhs = _as_value_tensor(evaluate(node.lhs, env))
        rhs = _as_value_tensor(evaluate(node.rhs, env))
        op = node.op
        if op == "*":
            return lattice.product(lhs, rhs)
        if op == "\\":
            return lattice.solve_left(lhs, rhs)
        if op == "/":
            return lattice.solve_right(lhs, rhs)
        if op in ("+", "-", ".*", "./", ".\\", ".^", "==", "~=", "<", ">", "<=", ">="):
            return ewise.ewise_binary(op, lhs, rhs)
        if op == "&":
            return ewise.ewise_binary("and", lhs, rhs)
        if op == "|":
            return ewise.ewise_binary("or", lhs, rhs)
        raise ValueError(f"unknown operator {op!r}")
    if isinstance(node, Call):
        return _call(node, env)
    if isinstance(node, Bracket):
        row_values = []
        for row in node.rows:
            items = [_as_value_tensor(evaluate(item, env)) for item in row]
            row_values.append(items[0] if len(items) == 1 else pagewise.horzcat(*items))
        if len(row_values) == 1:
            return row_values[0]
        return pagewise.vertcat(*row_values)
    if isinstance(node, Assign):
        value = evaluate(node.value, env)
        target = node.target
        if target.subs is None:
            env.tensors[target.name] = _as_value_tensor(value)
            return env.tensors[target.name]
        if not all(isinstance(s, IndexSub) for s in target.subs):
            raise SubscriptKindError("assignment subscripts must be index names")
        handles = [
            ~env.index(s.name) if s.complemented else env.index(s.name)
            for s in target.subs
        ]
        result = assign(env.tensors.get(target.name), handles, _as_value_tensor(value))
        env.tensors[target.name] = result
        return result
    raise TypeError(f"cannot evaluate {node!r}")


def _call(node: Call, env: Environment):
    fn = node.fn
    if fn == "cat":
        where = node.args[0]
        operands = [_as_value_tensor(evaluate(a, env)) for a in node.args[1:]]
        if isinstance(where, IndexSub):
            h = env.index(where.name)
            return pagewise.concat(~h if where.complemented else h, operands)
        if isinstance(where, NumSub):
            return pagewise.concat(int(where.value) - 1, operands)
        raise SubscriptKindError("cat needs an index name or dimension number first")
    if fn == "isequal":
        return ewise.equal_all([_as_value_tensor(evaluate(a, env)) for a in node.args])
    if fn in ("ones", "zeros", "rand"):
        dims = _shape_args(node.args)
        shape = dims if len(dims) > 1 else (dims[0],)
        if fn == "ones":
            arr = np.ones(shape)
        elif fn == "zeros":
            arr = np.zeros(shape)
        else:
            arr = env.rng.uniform(size=shape)
        return from_array(arr)[0]  # fresh true-variant indices per tensor dim
    args = [evaluate(a, env) for a in node.args]
    first = _as_value_tensor(args[0])
    if fn == "trace":
        return pagewise.page_trace(first)
    if fn == "diag":
        return pagewise.page_diag(first)
    if fn == "round":
        p = 0
        if len(args) > 1:
            p = int(float(args[1].entries.ravel()[0]))
        return ewise.ewise_unary("round", first, p)
    if fn in ("abs", "log", "exp", "conj", "step"):
        return ewise.ewise_unary(fn, first)
    raise UnknownNameError(f"unknown function {fn!r}")


# -- scripts ---------------------------------------------------------------------


@dataclass
class ScriptReport:
    path: str
    statements: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _truthy(value) -> bool:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, Tensor):
        if value.entries.size == 0:
            return False
        return bool(np.all(value.entries != 0))
    return bool(value)


def summarize(value, env: Environment | None = None) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    t = value
    dims = "x".join(str(d) for d in t.entries.shape)
    flat = t.entries.ravel()
    head = ", ".join(_fmt_num(v) for v in flat[:4])
    if flat.size > 4:
        head += ", ..."
    names = []
    for h in t.indices:
        label = env.index_name(h.id) if env else None
        label = label if label is not None else f"i{h.id}"
        names.append(label if h.variant else "~" + label)
    idx = f" [{' '.join(names)}]" if names else ""
    return f"degree {t.degree}, {dims}{idx}, {t.kind}: [{head}]"


def _fmt_num(v) -> str:
    if isinstance(v, (np.bool_, bool)):
        return "1" if v else "0"
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    return f"{float(v):.6g}"


def to_json_record(value, env: Environment | None = None) -> dict:
    """JSON-friendly {value, dims, indices} record for one result."""
    if isinstance(value, (bool, np.bool_)):
        return {"value": bool(value), "dims": [], "indices": []}
    arr = value.entries
    if np.iscomplexobj(arr):
        payload = {"real": arr.real.tolist(), "imag": arr.imag.tolist()}
    else:
        payload = arr.tolist()
    indices = []
    for h in value.indices:
        label = env.index_name(h.id) if env else None
        indices.append({"name": label, "variant": bool(h.variant)})
    return {"value": payload, "dims": list(arr.shape), "indices": indices}


def run_script(path, env: Environment | None = None, emit=print, json_records=False) -> ScriptReport:
    """Execute a script of statements, one per line; stops at the first failure.

    Lines are statements; ``#`` starts a comment; ``assert <expr>`` fails the
    run when the expression is not all-true.  With ``json_records`` each
    result emits a {value, dims, indices} record instead of a summary.
    """
    import json as _json

    env = env or Environment()
    report = ScriptReport(path=str(path))
    with open(path, "r", encoding="utf-8") as f:
        lines = f.readlines()
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        report.statements += 1
        try:
            kind, node = parse(stripped)
            value = evaluate(node, env)
        except EngineError as exc:
            report.failures.append(f"{path}:{lineno}: error: {exc}")
            emit(report.failures[-1])
            break
        if kind == "assert":
            if _truthy(value):
                emit(f"{path}:{lineno}: assert ok")
            else:
                report.failures.append(f"{path}:{lineno}: assert failed: {stripped}")
                emit(report.failures[-1])
                break
        elif json_records:
            emit(_json.dumps({"line": lineno, **to_json_record(value, env)}))
        else:
            emit(f"{path}:{lineno}: {summarize(value, env)}")
    return report
