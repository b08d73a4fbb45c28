"""Householder reflections and discrete Brownian path constructions.

A Householder reflection is U = I - 2 v v^T / v^T v.  Stored with an
``offset`` k (1-based), the defining vector is supported on coordinates
k..n, so the reflection fixes the first k-1 coordinates and applies in
O(n - k) operations.

Path constructions map a standard-normal vector X to a discrete Brownian
path (B_{T/n}, ..., B_T).  Every construction realizes a matrix A with
A A^T = Sigma, Sigma_jk = (T/n) min(j, k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class HouseholderReflection:
    """Reflection I - 2 v v^T / (v^T v) supported on coordinates offset..n.

    ``v`` holds only the supported components; ``offset`` is the 1-based
    index of the first supported coordinate.  A zero (or empty) ``v`` is
    the identity.
    """

    __slots__ = ("v", "offset")

    def __init__(self, v: np.ndarray, offset: int = 1):
        if offset < 1:
            raise ValueError("offset must be >= 1")
        v = np.asarray(v, dtype=np.float64)
        nv = float(v @ v)
        # normalize once so application needs no division
        self.v = v / math.sqrt(nv) if nv > 0.0 else np.zeros(0)
        self.offset = offset

    @property
    def is_identity(self) -> bool:
        return self.v.size == 0

    def apply(self, x: np.ndarray) -> np.ndarray:
        """U x for a single vector or a (N, n) batch of row vectors."""
        x = np.asarray(x, dtype=np.float64)
        out = x.copy()
        self._apply_inplace(out[None, :] if out.ndim == 1 else out)
        return out

    def _apply_inplace(self, X: np.ndarray) -> None:
        """Reflect the rows of a writable (N, n) float64 array in place."""
        if self.is_identity:
            return
        lo = self.offset - 1
        if X.shape[1] != lo + self.v.size:
            raise ValueError("dimension mismatch")
        sub = X[:, lo : lo + self.v.size]
        coef = sub @ self.v
        coef *= 2.0
        sub -= coef[:, None] * self.v


def householder_from_target(a: np.ndarray, k: int = 1) -> HouseholderReflection:
    """Reflection mapping e_k to a/||a||, supported on coordinates k..n.

    Entries of ``a`` before index k must be zero.  ``||a|| = 0`` yields the
    identity.  The first component of the defining vector is computed in
    the cancellation-free form -(sum of squared tail)/(1 + a_k) whenever
    a_k > 0, which keeps the construction stable while preserving the
    mapping e_k -> a/||a|| exactly.
    """
    a = np.asarray(a, dtype=np.float64)
    if k < 1 or k > a.size:
        raise ValueError("k out of range")
    if np.any(a[: k - 1] != 0.0):
        raise ValueError("target not in subspace: entries before index k must be zero")
    sub = a[k - 1 :]
    norm = float(np.linalg.norm(sub))
    if norm == 0.0:
        return HouseholderReflection(np.zeros(0), offset=k)
    ahat = sub / norm
    v = ahat.copy()
    tail2 = float(ahat[1:] @ ahat[1:])
    if ahat[0] > 0.0:
        v[0] = -tail2 / (1.0 + ahat[0])
    else:
        v[0] = ahat[0] - 1.0
    return HouseholderReflection(v, offset=k)


def apply_householder(U: HouseholderReflection, x: np.ndarray) -> np.ndarray:
    """Apply a reflection to a vector or a batch of row vectors."""
    return U.apply(x)


class TransformChain:
    """Ordered product U = U_1 U_2 ... U_m of Householder reflections.

    ``apply`` computes U x (rightmost factor first), ``apply_t`` computes
    U^T x.  Individual reflections are symmetric, so only the order flips.
    """

    def __init__(self, reflections: list[HouseholderReflection] | None = None):
        self.reflections = list(reflections) if reflections else []

    def __len__(self) -> int:
        return len(self.reflections)

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.asarray(x, dtype=np.float64).copy()
        X = out[None, :] if out.ndim == 1 else out
        for refl in reversed(self.reflections):
            refl._apply_inplace(X)
        return out

    def apply_t(self, x: np.ndarray) -> np.ndarray:
        out = np.asarray(x, dtype=np.float64).copy()
        X = out[None, :] if out.ndim == 1 else out
        for refl in self.reflections:
            refl._apply_inplace(X)
        return out

    def materialize(self, n: int) -> np.ndarray:
        """Dense n x n matrix of the product, for validation at small n."""
        return self.apply(np.eye(n)).T


def complete_first_k_columns(columns: list[np.ndarray]) -> TransformChain:
    """Chain U_1 ... U_k whose product has the given orthonormal vectors as
    its first k columns.

    Sequentially, U_l is the reflection with offset l mapping e_l to the
    l-th column expressed in the frame of the previous reflections; by
    orthonormality that vector has zeros before index l.
    """
    cols = [np.asarray(c, dtype=np.float64) for c in columns]
    if not cols:
        return TransformChain()
    n = cols[0].size
    k = len(cols)
    if k > n:
        raise ValueError("more columns than dimensions")
    G = np.array([[ci @ cj for cj in cols] for ci in cols])
    if np.abs(G - np.eye(k)).max() > 1e-10:
        raise ValueError("columns not orthonormal")
    chain: list[HouseholderReflection] = []
    work = [c.copy() for c in cols]
    for l in range(k):
        w = work[l]
        # numerically tiny leakage into the fixed coordinates is dropped
        w[: l] = 0.0
        refl = householder_from_target(w, k=l + 1)
        chain.append(refl)
        for j in range(l + 1, k):
            work[j] = refl.apply(work[j])
    return TransformChain(chain)


# ---------------------------------------------------------------------------
# Path constructions


class ForwardConstruction:
    """Cumulative sums of sqrt(T/n)-scaled normals."""

    method = "forward"

    def __init__(self, n: int, T: float):
        self.n = n
        self.T = T
        self._scale = math.sqrt(T / n)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.cumsum(x, axis=-1) * self._scale


class BrownianBridgeConstruction:
    """Bisection bridge filling, midpoints at floor((l+r)/2).

    The first normal sets B_T; each further normal fills the midpoint of
    the widest remaining interval (breadth-first), with exact conditional
    mean and variance.  Works for any n, not just powers of two.
    """

    method = "brownian_bridge"

    def __init__(self, n: int, T: float):
        self.n = n
        self.T = T
        dt = T / n
        # schedule over grid indices 0..n, value at 0 pinned to zero
        mid, left, right = [], [], []
        queue = [(0, n)]
        while queue:
            l, r = queue.pop(0)
            if r - l < 2:
                continue
            m = (l + r) // 2
            mid.append(m)
            left.append(l)
            right.append(r)
            queue.append((l, m))
            queue.append((m, r))
        self._mid = np.array(mid, dtype=np.intp)
        self._left = np.array(left, dtype=np.intp)
        self._right = np.array(right, dtype=np.intp)
        span = (self._right - self._left).astype(np.float64)
        off = (self._mid - self._left).astype(np.float64)
        self._wl = (span - off) / span
        self._wr = off / span
        self._sd = np.sqrt(off * (span - off) / span * dt)
        self._sd_final = math.sqrt(T)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        X = x[None, :] if single else x
        N = X.shape[0]
        B = np.zeros((N, self.n + 1))
        B[:, self.n] = self._sd_final * X[:, 0]
        for j in range(self._mid.size):
            m, l, r = self._mid[j], self._left[j], self._right[j]
            B[:, m] = self._wl[j] * B[:, l] + self._wr[j] * B[:, r] + self._sd[j] * X[:, j + 1]
        out = B[:, 1:]
        return out[0] if single else out


def pca_factors(n: int, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenpairs of Sigma_jk = (T/n) min(j,k).

    lambda_k = (T/n) / (4 sin^2((2k-1) pi / (2(2n+1)))) with sine-shaped
    eigenvectors, eigenvalues in decreasing order.
    """
    k = np.arange(1, n + 1)
    lam = (T / n) / (4.0 * np.sin((2 * k - 1) * np.pi / (2 * (2 * n + 1))) ** 2)
    j = np.arange(1, n + 1)
    vecs = (2.0 / math.sqrt(2 * n + 1)) * np.sin(np.outer(j, 2 * k - 1) * np.pi / (2 * n + 1))
    return lam, vecs


class PcaConstruction:
    """Dense V D product with the closed-form eigendecomposition of Sigma."""

    method = "pca"

    def __init__(self, n: int, T: float):
        self.n = n
        self.T = T
        lam, vecs = pca_factors(n, T)
        self._A = vecs * np.sqrt(lam)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x @ self._A.T


class ChainConstruction:
    """Forward construction applied to a transformed normal vector."""

    method = "chain"

    def __init__(self, chain: TransformChain, n: int, T: float):
        self.chain = chain
        self.n = n
        self.T = T
        self._fwd = ForwardConstruction(n, T)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self._fwd.apply(self.chain.apply(x))


_METHODS = {
    "forward": ForwardConstruction,
    "brownian_bridge": BrownianBridgeConstruction,
    "pca": PcaConstruction,
}


def path_construction(method: str, n: int, T: float, chain: TransformChain | None = None):
    """Factory for the single-asset constructions."""
    if method == "chain":
        if chain is None:
            raise ValueError("chain method needs a TransformChain")
        return ChainConstruction(chain, n, T)
    if method not in _METHODS:
        raise ValueError(f"unknown construction method {method!r}")
    return _METHODS[method](n, T)


def construct_path(construction, x: np.ndarray) -> np.ndarray:
    """Apply a construction to one normal vector (or a batch)."""
    return construction.apply(x)


def construction_matrix(construction) -> np.ndarray:
    """Materialize the matrix A with columns A e_j, for validation."""
    return construction.apply(np.eye(construction.n)).T


# ---------------------------------------------------------------------------
# Basket (Kronecker) constructions


@dataclass
class BasketCovSpec:
    """Correlated multi-asset Brownian covariance R (x) Sigma.

    ``vols`` are the per-asset volatilities sigma_i; ``corr`` is the m x m
    correlation matrix.  R_ij = corr_ij sigma_i sigma_j carries the vol
    scaling, so the basket constructions produce the vol-scaled Brownian
    values sigma_i B^(i) directly, ordered asset-major: entry (i-1)n + k
    is asset i at time step k.
    """

    m: int
    n: int
    T: float
    vols: np.ndarray
    corr: np.ndarray

    def __post_init__(self):
        self.vols = np.asarray(self.vols, dtype=np.float64)
        self.corr = np.asarray(self.corr, dtype=np.float64)
        if self.vols.shape != (self.m,) or self.corr.shape != (self.m, self.m):
            raise ValueError("vols/corr shape mismatch")

    @property
    def dim(self) -> int:
        return self.m * self.n

    def R(self) -> np.ndarray:
        return self.corr * np.outer(self.vols, self.vols)


def jacobi_eigh(M: np.ndarray, tol: float = 1e-13, sweeps: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a small symmetric matrix.

    Returns (eigenvalues, eigenvectors) with columns as eigenvectors,
    sorted by decreasing eigenvalue.
    """
    A = np.array(M, dtype=np.float64)
    m = A.shape[0]
    if A.shape != (m, m) or np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise ValueError("matrix must be symmetric")
    V = np.eye(m)
    for _ in range(sweeps):
        off = math.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * max(1.0, np.abs(np.diag(A)).max()):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if A[p, q] == 0.0:
                    continue
                theta = 0.5 * math.atan2(2.0 * A[p, q], A[q, q] - A[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(m)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                A = rot.T @ A @ rot
                V = V @ rot
    vals = np.diag(A).copy()
    order = np.argsort(vals)[::-1]
    return vals[order], V[:, order]


def _cholesky_psd(M: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, tolerating tiny negative pivots from rounding."""
    m = M.shape[0]
    L = np.zeros_like(M, dtype=np.float64)
    for i in range(m):
        for j in range(i + 1):
            s = M[i, j] - L[i, :j] @ L[j, :j]
            if i == j:
                if s < -1e-12 * max(1.0, abs(M[i, i])):
                    raise ValueError("matrix not positive semidefinite")
                L[i, i] = math.sqrt(max(s, 0.0))
            else:
                L[i, j] = s / L[j, j] if L[j, j] > 0.0 else 0.0
    return L


class _KroneckerConstruction:
    """C = K1 (x) K2 applied without materializing the product."""

    def __init__(self, spec: BasketCovSpec, K1: np.ndarray, K2_apply):
        self.spec = spec
        self._K1 = K1
        self._K2_apply = K2_apply

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        X = x[None, :] if single else x
        N, m, n = X.shape[0], self.spec.m, self.spec.n
        Y = self._K2_apply(X.reshape(N * m, n)).reshape(N, m, n)
        out = np.matmul(self._K1, Y).reshape(N, self.spec.dim)
        return out[0] if single else out


class BasketPcaConstruction(_KroneckerConstruction):
    """(V1 D1) (x) (V2 D2) with V1 D1^2 V1^T = R and V2 D2^2 V2^T = Sigma."""

    method = "pca"

    def __init__(self, spec: BasketCovSpec):
        vals, vecs = jacobi_eigh(spec.R())
        if vals.min() < -1e-10 * max(1.0, vals.max()):
            raise ValueError("R not positive semidefinite")
        K1 = vecs * np.sqrt(np.clip(vals, 0.0, None))
        pca = PcaConstruction(spec.n, spec.T)
        super().__init__(spec, K1, pca.apply)
        self.n = spec.dim
        self.T = spec.T


class BasketForwardConstruction(_KroneckerConstruction):
    """chol(R) (x) S: forward paths per asset, correlated across assets."""

    method = "forward"

    def __init__(self, spec: BasketCovSpec):
        fwd = ForwardConstruction(spec.n, spec.T)
        super().__init__(spec, _cholesky_psd(spec.R()), fwd.apply)
        self.n = spec.dim
        self.T = spec.T


class BasketBridgeConstruction(_KroneckerConstruction):
    """chol(R) (x) (bridge matrix): bisection bridge per asset."""

    method = "brownian_bridge"

    def __init__(self, spec: BasketCovSpec):
        bb = BrownianBridgeConstruction(spec.n, spec.T)
        super().__init__(spec, _cholesky_psd(spec.R()), bb.apply)
        self.n = spec.dim
        self.T = spec.T


class BasketChainConstruction:
    """Basket forward construction applied to a transformed normal vector."""

    method = "chain"

    def __init__(self, spec: BasketCovSpec, chain: TransformChain):
        self.spec = spec
        self.chain = chain
        self._fwd = BasketForwardConstruction(spec)
        self.n = spec.dim
        self.T = spec.T

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self._fwd.apply(self.chain.apply(x))


def basket_construct(spec: BasketCovSpec, x: np.ndarray) -> np.ndarray:
    """C x with C = (V1 D1) (x) (V2 D2); C C^T = R (x) Sigma."""
    return BasketPcaConstruction(spec).apply(x)


def basket_forward_matrix(spec: BasketCovSpec) -> np.ndarray:
    """Dense chol(R) (x) S matrix; rows are payoff exponents per (asset, step)."""
    S = np.tril(np.ones((spec.n, spec.n))) * math.sqrt(spec.T / spec.n)
    return np.kron(_cholesky_psd(spec.R()), S)
