"""Small expression language for reference curves given on the command line.

Curves can be written as component expressions in the time variable t,
separated by ';' (or by top-level ','), e.g.

    "cos(t/2); sin(t/2); 0"

Parsing goes through the ast module with a strict whitelist, so only
arithmetic, the constants pi and e, and a few elementary functions can
appear.  Derivatives are taken by central differences.
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

from .curves import ReferenceCurve, velocity_bound
from .errors import UsageError

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "pow": np.power,
}

_CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def split_components(src: str) -> list[str]:
    """Split a curve source string into component expressions.

    ';' always separates components; ',' does too, but only outside
    parentheses so function arguments stay intact.
    """
    parts = []
    depth = 0
    current = []
    for ch in src:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced parentheses in {src!r}")
        if ch == ";" or (ch == "," and depth == 0):
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise UsageError(f"unbalanced parentheses in {src!r}")
    parts.append("".join(current))
    parts = [p.strip() for p in parts]
    if any(not p for p in parts):
        raise UsageError(f"empty component in curve expression {src!r}")
    return parts


def _compile_node(node: ast.AST) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, ast.Expression):
        return _compile_node(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise UsageError(f"only numeric constants allowed, got {node.value!r}")
        value = float(node.value)
        return lambda t: np.broadcast_to(value, np.shape(t))
    if isinstance(node, ast.Name):
        if node.id == "t":
            return lambda t: t
        if node.id in _CONSTANTS:
            value = _CONSTANTS[node.id]
            return lambda t: np.broadcast_to(value, np.shape(t))
        raise UsageError(f"unknown name {node.id!r} in curve expression")
    if isinstance(node, ast.UnaryOp):
        operand = _compile_node(node.operand)
        if isinstance(node.op, ast.USub):
            return lambda t: -operand(t)
        if isinstance(node.op, ast.UAdd):
            return operand
        raise UsageError(f"unary operator {type(node.op).__name__} not allowed")
    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise UsageError(f"operator {type(node.op).__name__} not allowed")
        left = _compile_node(node.left)
        right = _compile_node(node.right)
        return lambda t: op(left(t), right(t))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name):
            raise UsageError("only plain function names can be called")
        func = _FUNCTIONS.get(node.func.id)
        if func is None:
            allowed = ", ".join(sorted(_FUNCTIONS))
            raise UsageError(f"function {node.func.id!r} not allowed; "
                             f"available: {allowed}")
        if node.keywords:
            raise UsageError("keyword arguments not allowed in curve expressions")
        arity = 2 if node.func.id == "pow" else 1
        if len(node.args) != arity:
            raise UsageError(f"{node.func.id} takes {arity} argument(s), "
                             f"got {len(node.args)}")
        args = [_compile_node(a) for a in node.args]
        return lambda t: func(*(a(t) for a in args))
    raise UsageError(f"syntax element {type(node).__name__} not allowed "
                     "in curve expressions")


def compile_component(src: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile one component expression into a vectorized function of t."""
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse curve component {src!r}: {exc}") from None
    return _compile_node(tree)


def curve_from_expression(src: str, horizon: float = 40.0,
                          name: str | None = None) -> ReferenceCurve:
    """Build a ReferenceCurve from a component expression string."""
    funcs = [compile_component(p) for p in split_components(src)]
    n = len(funcs)

    def ev(t):
        t_arr = np.asarray(t, dtype=float)
        cols = [np.broadcast_to(np.asarray(f(t_arr), dtype=float), t_arr.shape)
                for f in funcs]
        return np.stack(cols, axis=-1)

    def dv(t):
        t_arr = np.asarray(t, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(t_arr))
        return (ev(t_arr + h) - ev(t_arr - h)) / (2.0 * h)[..., None]

    nu = velocity_bound(dv, horizon)
    return ReferenceCurve(n, ev, dv, nu, name=name or f"expr:{src}")
