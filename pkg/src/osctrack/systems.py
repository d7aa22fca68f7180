"""Vector fields, Lie brackets, and bracket-extended gain matrices.

A driftless control-affine system is a list of smooth vector fields
f_1, ..., f_m on an open subset of R^n; trajectories follow
dx/dt = sum_i u_i(t) f_i(x).  The feedback scheme needs, besides the
fields themselves, selected first-order brackets [f_i, f_j] and nested
brackets [[f_i, f_j], f_i], assembled column-wise into a square gain
matrix whose invertibility along the reference is the standing
assumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    RankConditionError,
    UsageError,
)

# Hard singularity threshold: smallest singular value below this multiple
# of the largest column norm means the gain matrix is treated as singular.
SINGULARITY_RTOL = 1e-12

# Condition numbers at or above this are flagged as "near singular" in
# rank-condition reports without failing them outright.
NEAR_SINGULAR_COND = 1e8


def finite_difference_jacobian(func: Callable[[np.ndarray], np.ndarray],
                               x: np.ndarray,
                               step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of ``func`` at ``x``.

    The default step scales with the magnitude of ``x`` so that the
    approximation stays balanced between truncation and round-off.
    """
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    f0 = np.asarray(func(x), dtype=float)
    jac = np.empty((f0.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        jac[:, k] = (np.asarray(func(x + e), dtype=float)
                     - np.asarray(func(x - e), dtype=float)) / (2.0 * step)
    return jac


@dataclass(frozen=True)
class VectorField:
    """A smooth vector field on R^n with an (optionally analytic) Jacobian.

    Parameters
    ----------
    dim : int
        Dimension n of the state space.
    eval : callable
        Maps a state (n,) to the field value (n,).
    jacobian : callable, optional
        Maps a state to the n-by-n Jacobian matrix.  When omitted a
        central finite-difference fallback is installed.
    name : str
        Label used in error messages.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim <= 0:
            raise UsageError(f"vector field dimension must be positive, got {self.dim}")
        if self.jacobian is None:
            func = self.eval
            object.__setattr__(
                self, "jacobian",
                lambda x, _f=func: finite_difference_jacobian(_f, x, step=1e-5),
            )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(
                f"field {self.name or '?'} expects shape ({self.dim},), got {x.shape}")
        return np.asarray(self.eval(x), dtype=float)


def lie_bracket(f: VectorField, g: VectorField, x: np.ndarray) -> np.ndarray:
    """Value of [f, g](x) = Dg(x) f(x) - Df(x) g(x)."""
    if f.dim != g.dim:
        raise DimensionMismatchError(
            f"bracket of fields with dims {f.dim} and {g.dim}")
    x = np.asarray(x, dtype=float)
    return g.jacobian(x) @ f(x) - f.jacobian(x) @ g(x)


def bracket_field(f: VectorField, g: VectorField, name: str = "") -> VectorField:
    """The bracket [f, g] packaged as a vector field of its own.

    Its Jacobian is finite-differenced; that is enough for the nested
    brackets the scheme uses, whose analytic Jacobians are rarely worth
    writing out.
    """
    if f.dim != g.dim:
        raise DimensionMismatchError(
            f"bracket of fields with dims {f.dim} and {g.dim}")
    return VectorField(
        dim=f.dim,
        eval=lambda x: lie_bracket(f, g, x),
        name=name or f"[{f.name},{g.name}]",
    )


@dataclass(frozen=True)
class ControlSystem:
    """Driftless control-affine system dx/dt = sum u_i f_i(x).

    ``domain`` is a predicate returning True while the state stays in the
    open set where the fields are defined; integration aborts when it
    turns False.
    """

    n: int
    m: int
    fields: tuple[VectorField, ...]
    domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    name: str = ""

    def __post_init__(self):
        if self.m != len(self.fields):
            raise UsageError(
                f"system declares m={self.m} but has {len(self.fields)} fields")
        if self.m <= 0 or self.n <= 0:
            raise UsageError("system dimensions must be positive")
        for f in self.fields:
            if f.dim != self.n:
                raise DimensionMismatchError(
                    f"field {f.name or '?'} has dim {f.dim}, system has n={self.n}")

    def field(self, i: int) -> VectorField:
        """1-based accessor matching the usual f_1, ..., f_m numbering."""
        if not 1 <= i <= self.m:
            raise UsageError(f"field index {i} outside 1..{self.m}")
        return self.fields[i - 1]

    def in_domain(self, x: np.ndarray) -> bool:
        return bool(self.domain(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class NestedBracketTerm:
    """A second-degree term [[f_j1, f_j2], f_j1] with its frequency pair.

    Only triples whose outer factor repeats the first inner index are
    supported by the synthesis; the two oscillation frequencies must be
    distinct positive integers.
    """

    triple: tuple[int, int, int]
    k1: int
    k2: int

    def __post_init__(self):
        if len(self.triple) != 3:
            raise UsageError(f"nested bracket triple must have 3 indices, got {self.triple}")
        j1, j2, j3 = self.triple
        if j3 != j1:
            raise UsageError(
                f"nested bracket {self.triple} is not of the form (j1, j2, j1); "
                "other triples are outside the supported synthesis")
        if j1 == j2:
            raise UsageError(f"nested bracket {self.triple} repeats its inner index")
        if not (isinstance(self.k1, int) and isinstance(self.k2, int)):
            raise UsageError("nested bracket frequencies must be integers")
        if self.k1 < 1 or self.k2 < 1 or self.k1 == self.k2:
            raise UsageError(
                f"nested bracket frequencies must be distinct positive integers, "
                f"got ({self.k1}, {self.k2})")


@dataclass(frozen=True)
class BracketScheme:
    """Which fields and brackets span the directions the feedback uses.

    ``s1`` lists direct field indices (1-based), ``s2`` lists ordered
    pairs (i, j) contributing the brackets [f_i, f_j], and ``kappa``
    gives one positive integer frequency per pair (pairwise distinct so
    the oscillations average independently).  ``degree2`` holds any
    nested-bracket terms.  The total column count must match the state
    dimension for the gain matrix to be square.
    """

    m: int
    s1: tuple[int, ...]
    s2: tuple[tuple[int, int], ...] = ()
    kappa: tuple[int, ...] = ()
    degree2: tuple[NestedBracketTerm, ...] = ()

    def __post_init__(self):
        if self.m <= 0:
            raise UsageError("scheme needs a positive number of controls")
        for i in self.s1:
            if not 1 <= i <= self.m:
                raise UsageError(f"direct index {i} outside 1..{self.m}")
        if len(set(self.s1)) != len(self.s1):
            raise UsageError("duplicate direct indices")
        for (i, j) in self.s2:
            if not (1 <= i <= self.m and 1 <= j <= self.m):
                raise UsageError(f"bracket pair ({i}, {j}) outside 1..{self.m}")
            if i == j:
                raise UsageError(f"bracket pair ({i}, {j}) is trivially zero")
        if len(set(self.s2)) != len(self.s2):
            raise UsageError("duplicate bracket pairs")
        if len(self.kappa) != len(self.s2):
            raise UsageError(
                f"{len(self.s2)} bracket pairs need {len(self.s2)} frequencies, "
                f"got {len(self.kappa)}")
        for k in self.kappa:
            if not isinstance(k, int) or k < 1:
                raise UsageError(f"bracket frequency {k} must be a positive integer")
        if len(set(self.kappa)) != len(self.kappa):
            raise UsageError("bracket frequencies must be pairwise distinct")
        for term in self.degree2:
            for idx in term.triple:
                if not 1 <= idx <= self.m:
                    raise UsageError(f"nested index {idx} outside 1..{self.m}")

    @property
    def n_columns(self) -> int:
        return len(self.s1) + len(self.s2) + len(self.degree2)

    @property
    def max_frequency(self) -> int:
        freqs = list(self.kappa)
        for term in self.degree2:
            freqs.extend((term.k1, term.k2, term.k1 + term.k2))
        return max(freqs, default=1)


def build_gain_matrix(sys: ControlSystem, scheme: BracketScheme,
                      x: np.ndarray) -> np.ndarray:
    """Columns [f_i | [f_i, f_j] | [[f_j1, f_j2], f_j1]] evaluated at x.

    Raises DomainError if x has left the system domain and
    RankConditionError if the matrix is singular to working precision.
    """
    if scheme.m != sys.m:
        raise UsageError(f"scheme is for m={scheme.m}, system has m={sys.m}")
    if scheme.n_columns != sys.n:
        raise UsageError(
            f"scheme spans {scheme.n_columns} directions, state space has n={sys.n}")
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.n,):
        raise DimensionMismatchError(f"state must have shape ({sys.n},), got {x.shape}")
    if not sys.in_domain(x):
        raise DomainError(f"state {x} outside the system domain")

    cols = []
    for i in scheme.s1:
        cols.append(sys.field(i)(x))
    for (i, j) in scheme.s2:
        cols.append(lie_bracket(sys.field(i), sys.field(j), x))
    for term in scheme.degree2:
        j1, j2, _ = term.triple
        inner = bracket_field(sys.field(j1), sys.field(j2))
        cols.append(lie_bracket(inner, sys.field(j1), x))
    gain = np.column_stack(cols)

    svals = np.linalg.svd(gain, compute_uv=False)
    col_norm = float(np.max(np.linalg.norm(gain, axis=0)))
    if svals[-1] < SINGULARITY_RTOL * max(col_norm, 1e-300):
        raise RankConditionError(
            f"gain matrix singular at state {x} "
            f"(smallest singular value {svals[-1]:.3e})", state=x)
    return gain


@dataclass(frozen=True)
class RankConditionReport:
    """Result of sampling the gain matrix over a batch of states."""

    ok: bool
    n_samples: int
    min_singular_value: float
    singular_values: np.ndarray
    failed_indices: tuple[int, ...]
    near_singular_indices: tuple[int, ...]


def check_rank_condition(sys: ControlSystem, scheme: BracketScheme,
                         samples: np.ndarray) -> RankConditionReport:
    """Evaluate the gain matrix on each sample state and grade the batch.

    Samples where the smallest singular value drops below the hard
    threshold are failures; samples whose condition number reaches
    NEAR_SINGULAR_COND are flagged but still pass.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[None, :]
    if samples.size == 0:
        raise UsageError("rank condition check needs at least one sample state")
    if samples.shape[1] != sys.n:
        raise DimensionMismatchError(
            f"samples must have {sys.n} columns, got {samples.shape[1]}")

    sigmas = np.empty(samples.shape[0])
    failed = []
    near = []
    for idx, x in enumerate(samples):
        try:
            gain = build_gain_matrix(sys, scheme, x)
        except RankConditionError:
            sigmas[idx] = 0.0
            failed.append(idx)
            continue
        svals = np.linalg.svd(gain, compute_uv=False)
        sigmas[idx] = svals[-1]
        if svals[0] >= NEAR_SINGULAR_COND * svals[-1]:
            near.append(idx)
    return RankConditionReport(
        ok=not failed,
        n_samples=samples.shape[0],
        min_singular_value=float(np.min(sigmas)),
        singular_values=sigmas,
        failed_indices=tuple(failed),
        near_singular_indices=tuple(near),
    )
