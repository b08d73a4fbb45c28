"""Baseline LT transform: column-by-column linearized-derivative maximization.

Each column of the orthogonal transform maximizes the squared derivative of
the linearized payoff with respect to one input coordinate, subject to unit
norm and orthogonality to the previous columns.  We expand at the zero
point and differentiate the smooth pre-max part of the payoff, so the
gradient is the same for every column: the first column is the normalized
gradient and every later maximization degenerates.  Degenerate columns
fall back to the next canonical direction orthonormalized against the
columns found so far, and are flagged in the result.

The optimized columns are completed to a product of k Householder
reflections, applied in O(n k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .regression import LogExpPayoffSpec
from .transforms import TransformChain, complete_first_k_columns


@dataclass
class LtConfig:
    """Number of optimized columns and the expansion point (zero only)."""

    k: int = 25
    x_tilde: np.ndarray | None = None  # None means the zero vector


@dataclass
class LtResult:
    chain: TransformChain
    columns: np.ndarray  # (n, k) optimized columns
    degenerate_columns: list[int] = field(default_factory=list)  # 1-based indices


def payoff_gradient_at_zero(spec: LogExpPayoffSpec) -> np.ndarray:
    """Gradient of the smooth part at X = 0: sum_k w_k e^{rowsum(d_k)} c_k."""
    weights = spec.w * np.exp(np.sum(spec.d, axis=1))
    return spec.c.T @ weights


def lt_transform(spec: LogExpPayoffSpec, cfg: LtConfig | None = None) -> LtResult:
    """Optimized-column transform for a log-exp payoff.

    Column i is the unit-norm maximizer of the squared linearized
    derivative, i.e. the normalized projection of the payoff gradient onto
    the orthogonal complement of columns 1..i-1.  At the zero expansion
    point the gradient never changes, so columns after the first project
    to zero and are replaced by canonical directions (flagged).
    """
    cfg = cfg or LtConfig()
    if cfg.x_tilde is not None and np.any(np.asarray(cfg.x_tilde) != 0.0):
        raise ValueError("only the zero expansion point is supported")
    n = spec.dim
    if cfg.k < 0 or cfg.k > n:
        raise ValueError("k out of range")
    if cfg.k == 0:
        return LtResult(chain=TransformChain(), columns=np.zeros((n, 0)))
    grad = payoff_gradient_at_zero(spec)
    cols: list[np.ndarray] = []
    degenerate: list[int] = []
    canon = 0
    for i in range(cfg.k):
        cand = grad.copy()
        for c in cols:
            cand -= (cand @ c) * c
        norm = np.linalg.norm(cand)
        if norm <= 1e-12 * max(1.0, float(np.linalg.norm(grad))):
            # degenerate: next canonical direction orthogonal to the rest
            while True:
                if canon >= n:
                    raise ValueError("ran out of canonical directions")
                cand = np.zeros(n)
                cand[canon] = 1.0
                canon += 1
                for c in cols:
                    cand -= (cand @ c) * c
                norm = np.linalg.norm(cand)
                if norm > 1e-8:
                    break
            degenerate.append(i + 1)
        cols.append(cand / norm)
    chain = complete_first_k_columns(cols)
    return LtResult(chain=chain, columns=np.column_stack(cols), degenerate_columns=degenerate)
