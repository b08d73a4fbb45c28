"""Expectations involving the running maximum of drifted Brownian motion.

Everything is built from two reflection-principle identities for
B^nu_t = B_t + nu t and M^nu_T = max_{0<=s<=T} B^nu_s:

  * the hitting probability P(M^nu_t >= u) in closed form, and
  * a decomposition of E(1_{M^nu_T >= u} f(B^nu_t)) into one-dimensional
    Gaussian integrals, closed-form at t = T and quadrature otherwise.

These produce the regression coefficients for barrier payoffs: the
indicator of ``max_k S_k >= u`` becomes the indicator of a drifted
Brownian maximum exceeding log(u/S0)/sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _phi(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT2PI


def _Phi(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-9, max_depth: int = 60) -> float:
    """Adaptive Simpson rule with absolute tolerance and a recursion cap."""
    if b <= a:
        return 0.0

    def simpson(lo, flo, hi, fhi, fmid):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, flo, hi, fhi, fmid, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flm = f(lmid)
        frm = f(rmid)
        left = simpson(lo, flo, mid, fmid, flm)
        right = simpson(mid, fmid, hi, fhi, frm)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{lo}, {hi}] at tol {tol}"
            )
        half = 0.5 * eps
        return recurse(lo, flo, mid, fmid, flm, left, half, depth + 1) + recurse(
            mid, fmid, hi, fhi, frm, right, half, depth + 1
        )

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = simpson(a, fa, b, fb, fm)
    return recurse(a, fa, b, fb, fm, whole, tol, 0)


@dataclass
class DriftedBMParams:
    nu: float
    t: float
    T: float
    u: float

    def __post_init__(self):
        if self.T <= 0.0 or self.t <= 0.0 or self.t > self.T:
            raise ValueError("need 0 < t <= T")


def prob_max_exceeds(u: float, nu: float, t: float) -> float:
    """P(max_{0<=s<=t} B^nu_s >= u).

    For u >= 0 this is Phi((nu t - u)/sqrt(t)) + e^{2 u nu} Phi((-u - nu t)/sqrt(t));
    for u < 0 the maximum exceeds u trivially (it is at least B_0 = 0).
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if u < 0.0:
        return 1.0
    st = math.sqrt(t)
    return _Phi((nu * t - u) / st) + math.exp(2.0 * u * nu) * _Phi((-u - nu * t) / st)


def conditional_exceed_prob(u: float, x: float, nu: float, remaining: float) -> float:
    """P(max over the remaining horizon >= u | current level x).

    By the Markov property this is the hitting probability of the shifted
    barrier u - x over the remaining time; it equals 1 once x >= u.
    """
    if remaining <= 0.0:
        raise ValueError("remaining time must be positive")
    return prob_max_exceeds(u - x, nu, remaining)


def _endpoint_moment(u: float, nu: float, t: float, f_tag: str) -> float:
    """E(1_{M^nu_t >= u} f(B^nu_t)) at the endpoint, in closed form.

    The reflection identity gives
    E(1_{B >= u} f(B)) + e^{2 u nu} E(1_{B <= -u} f(2u + B)) with B = B^nu_t.
    """
    st = math.sqrt(t)
    mu = nu * t
    zu = (mu - u) / st  # P(B >= u) = Phi(zu)
    zl = (-u - mu) / st  # P(B <= -u) = Phi(zl)
    w = math.exp(2.0 * u * nu)
    if f_tag == "one":
        return _Phi(zu) + w * _Phi(zl)
    # identity: E(1_{B>=c} B) = mu Phi((mu-c)/st) + st phi((c-mu)/st)
    #           E(1_{B<=c} B) = mu Phi((c-mu)/st) - st phi((c-mu)/st)
    first = mu * _Phi(zu) + st * _phi(zu)
    second = w * ((2.0 * u + mu) * _Phi(zl) - st * _phi(zl))
    return first + second


_F_TAGS = {"one": lambda x: 1.0, "identity": lambda x: x}


def indicator_moment(u: float, nu: float, t: float, T: float, f_tag: str = "one") -> float:
    """E(1_{M^nu_T >= u} f(B^nu_t)) for f in {one, identity}.

    At t = T the reflection identity is closed-form.  For t < T the
    conditional hit probability g(x) over the remaining horizon splits the
    expectation into three Gaussian integrals,

      E(f(B) g(B)) + E(1_{B >= u} f(B)(1 - g(B)))
                   + e^{2 u nu} E(1_{B <= -u} f(2u + B)(1 - g(2u + B))),

    each evaluated by adaptive quadrature over the N(nu t, t) density
    truncated at mean +- 8 sd.  For u <= 0 the indicator is almost surely
    one and the plain moment of B^nu_t is returned.
    """
    if T <= 0.0 or t <= 0.0 or t > T:
        raise ValueError("need 0 < t <= T")
    if f_tag not in _F_TAGS:
        raise ValueError(f"unknown f_tag {f_tag!r}")
    if u <= 0.0:
        return 1.0 if f_tag == "one" else nu * t
    if t == T:
        return _endpoint_moment(u, nu, t, f_tag)
    f = _F_TAGS[f_tag]
    tau = T - t
    st = math.sqrt(t)
    mu = nu * t
    lo, hi = mu - 8.0 * st, mu + 8.0 * st

    def dens(x: float) -> float:
        return _phi((x - mu) / st) / st

    def g(x: float) -> float:
        return prob_max_exceeds(u - x, nu, tau)

    total = adaptive_simpson(lambda x: f(x) * g(x) * dens(x), lo, hi)
    if hi > u:
        total += adaptive_simpson(
            lambda x: f(x) * (1.0 - g(x)) * dens(x), max(u, lo), hi
        )
    if -u > lo:
        w = math.exp(2.0 * u * nu)
        total += w * adaptive_simpson(
            lambda x: f(2.0 * u + x) * (1.0 - g(2.0 * u + x)) * dens(x), lo, min(-u, hi)
        )
    return total


@dataclass
class BarrierCoefficients:
    """Regression data for a payoff driven by the discrete running maximum."""

    a: np.ndarray  # coefficient vector, one entry per time step
    beta: np.ndarray  # beta_i = E(1_{M >= u_tilde} B^nu_{i T/n})
    gamma: float  # hitting probability of the continuous maximum
    nu: float
    u_tilde: float


def barrier_coefficients(
    S0: float, r: float, sigma: float, T: float, n: int, barrier: float
) -> BarrierCoefficients:
    """Coefficients a_i = E(h(X) X_i) for h = 1_{max_k S_k >= barrier}.

    The discrete stock maximum event is max_k B^nu_{kT/n} >= u_tilde with
    nu = (r - sigma^2/2)/sigma and u_tilde = log(barrier/S0)/sigma.
    Approximating the discrete by the continuous maximum,

        a = S^{-1} beta - nu sqrt(T/n) gamma 1,

    and S^{-1} beta collapses to scaled first differences because S is the
    lower-triangular matrix of sqrt(T/n) constants:
    a_i = (beta_i - beta_{i-1}) / sqrt(T/n) - nu sqrt(T/n) gamma.

    A barrier at or below spot (u_tilde <= 0) makes the continuous-time
    indicator constant: a = 0 and gamma = 1.
    """
    if S0 <= 0.0 or barrier <= 0.0:
        raise ValueError("S0 and barrier must be positive")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    dt = T / n
    nu = (r - 0.5 * sigma**2) / sigma
    u_tilde = math.log(barrier / S0) / sigma
    steps = np.arange(1, n + 1)
    if u_tilde <= 0.0:
        beta = nu * steps * dt  # indicator is a.s. one: plain E(B^nu)
        return BarrierCoefficients(
            a=np.zeros(n), beta=beta, gamma=1.0, nu=nu, u_tilde=u_tilde
        )
    beta = np.array(
        [indicator_moment(u_tilde, nu, i * dt, T, "identity") for i in steps]
    )
    gamma = prob_max_exceeds(u_tilde, nu, T)
    a = np.diff(np.concatenate([[0.0], beta])) / math.sqrt(dt) - nu * math.sqrt(dt) * gamma
    return BarrierCoefficients(a=a, beta=beta, gamma=gamma, nu=nu, u_tilde=u_tilde)


def weighted_max_expectation(
    h_prime, nu: float, t: float, T: float, f_tag: str = "one", tol: float = 1e-7
) -> float:
    """E(h(M^nu_T) f(B^nu_t)) for differentiable h with h(0) = 0.

    Layer-cake form: the expectation equals
    integral_0^inf h'(u) E(1_{M^nu_T >= u} f(B^nu_t)) du, truncated at
    u_max = |nu| T + 10 sqrt(T) where the hitting probability is negligible.
    """
    if T <= 0.0 or t <= 0.0 or t > T:
        raise ValueError("need 0 < t <= T")
    u_max = abs(nu) * T + 10.0 * math.sqrt(T)
    return adaptive_simpson(
        lambda u: h_prime(u) * indicator_moment(u, nu, t, T, f_tag), 0.0, u_max, tol=tol
    )
