"""Maximal-inequality bounds for 2D Young integrals.

Two bounds are provided: the bivariation bound, which needs the integrator
to be Hölder-controlled on rectangles, and Towghi's joint-variation bound.
The bivariation bound is evaluated both as a truncated series in the moduli
``rho, sigma, lam, mu`` and in closed form for power-law moduli.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .functions import HypothesisError, SampledFunction2D, SizeError
from .integral import corner_term, young_2d
from .variation import (JOINT_EXACT_MAX_POINTS, bivariation_x, bivariation_y,
                        check_holder_control, joint_variation)

ZETA_TERMS = 10 ** 5
K_MAIN = 16.0
K_MARGINAL = 16.0


class DivergentSeriesError(ValueError):
    pass


@functools.lru_cache(maxsize=256)
def _zeta_cached(s: float, n_terms: int) -> float:
    n = np.arange(1, n_terms + 1, dtype=float)
    partial = math.fsum(n ** -s)
    # integral tail with the first Euler-Maclaurin correction
    return partial + n_terms ** (1.0 - s) / (s - 1.0) - 0.5 * n_terms ** -s


def zeta(s: float, n_terms: int = ZETA_TERMS) -> float:
    """Riemann zeta for real ``s > 1``.

    Partial sum up to ``n_terms`` plus the tail estimate
    ``n_terms^(1-s) / (s-1) - n_terms^-s / 2``; the absolute error is
    below ``s n_terms^(-s-1) / 12``, and ``zeta_error`` reports the cruder
    ``n_terms^-s``.
    """
    if not s > 1:
        raise ValueError(f"zeta(s) diverges for s = {s} <= 1")
    return _zeta_cached(float(s), int(n_terms))


def zeta_error(s: float, n_terms: int = ZETA_TERMS) -> float:
    return float(n_terms) ** -s


@dataclass(frozen=True)
class ControlModulus:
    """Power-law moduli lam(u) = c_lambda u^(1/p_tilde), mu(u) = c_mu u^(1/q_tilde),
    rho(u) = u^alpha, sigma(u) = u^(1 - alpha)."""

    c_lambda: float
    p_tilde: float
    c_mu: float
    q_tilde: float
    alpha: float

    def __post_init__(self):
        if not (self.p_tilde > 1 and self.q_tilde > 1):
            raise ValueError("p_tilde and q_tilde must exceed 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not (self.c_lambda > 0 and self.c_mu > 0):
            raise ValueError("modulus constants must be positive")

    @property
    def holder_constant(self) -> float:
        return self.c_lambda * self.c_mu

    def lam(self, u):
        return self.c_lambda * np.asarray(u, dtype=float) ** (1.0 / self.p_tilde)

    def mu(self, u):
        return self.c_mu * np.asarray(u, dtype=float) ** (1.0 / self.q_tilde)

    def rho(self, u):
        return np.asarray(u, dtype=float) ** self.alpha

    def sigma(self, u):
        return np.asarray(u, dtype=float) ** (1.0 - self.alpha)


def exponent_conditions(p: float, q: float, mod: ControlModulus) -> dict:
    """Series exponents; the bound needs both to exceed 1."""
    return {
        "alpha/p + 1/p_tilde": mod.alpha / p + 1.0 / mod.p_tilde,
        "(1-alpha)/q + 1/q_tilde": (1.0 - mod.alpha) / q + 1.0 / mod.q_tilde,
    }


def _require_convergent(p, q, mod):
    for name, val in exponent_conditions(p, q, mod).items():
        if not val > 1:
            raise DivergentSeriesError(f"series diverge: {name} = {val:.6g} <= 1")


def _series(term: Callable, n_terms: int, decay: float | None):
    """Truncated sum of ``term(m)``, m = 1..n_terms, with a tail bound.

    With ``decay = s`` the terms are taken to be ``c m^-s`` and the tail is
    bounded by the integral comparison ``term(N) N / (s - 1)``.  Without it,
    the tail is capped by ``term(N) * n_terms``, which is not rigorous.
    """
    m = np.arange(1, n_terms + 1, dtype=float)
    vals = np.asarray(term(m), dtype=float)
    total = math.fsum(vals)
    last = float(vals[-1])
    tail = last * n_terms / (decay - 1.0) if decay is not None else last * n_terms
    return total, tail


def general_series_bound(norm1p: float, norm2q: float, p: float, q: float,
                         rho: Callable, sigma: Callable, lam: Callable, mu: Callable,
                         domain, series_terms: int = ZETA_TERMS, scaled: bool = True,
                         decay: tuple[float, float, float, float] | None = None,
                         K: float = K_MAIN, K1: float = K_MARGINAL, K2: float = K_MARGINAL):
    """Right-hand side of the bivariation maximal inequality for arbitrary moduli.

    Returns ``(value, truncation_error)``.  ``scaled`` multiplies the
    arguments ``4/m`` of ``lam`` and ``mu`` by the side lengths.  ``decay``
    gives the power-law decay exponents of the four series (mixed x, mixed
    y, marginal x, marginal y) to make the tail bounds rigorous.
    """
    (a, b), (c, d) = domain
    lx = (b - a) if scaled else 1.0
    ly = (d - c) if scaled else 1.0
    dec = decay or (None, None, None, None)
    s1, t1 = _series(lambda m: rho(norm1p / m ** (1.0 / p)) * lam(4.0 * lx / m), series_terms, dec[0])
    s2, t2 = _series(lambda m: sigma(norm2q / m ** (1.0 / q)) * mu(4.0 * ly / m), series_terms, dec[1])
    s3, t3 = _series(lambda m: norm1p / m ** (1.0 / p) * lam(4.0 * lx / m), series_terms, dec[2])
    s4, t4 = _series(lambda m: norm2q / m ** (1.0 / q) * mu(4.0 * ly / m), series_terms, dec[3])
    mu_dc = float(mu(d - c))
    lam_ba = float(lam(b - a))
    value = K * s1 * s2 + K1 * mu_dc * s3 + K2 * lam_ba * s4
    upper = K * (s1 + t1) * (s2 + t2) + K1 * mu_dc * (s3 + t3) + K2 * lam_ba * (s4 + t4)
    return value, upper - value


def powerlaw_constants(p: float, q: float, mod: ControlModulus, domain,
                       scaled: bool = True, K: float = K_MAIN, K1: float = K_MARGINAL,
                       K2: float = K_MARGINAL, n_terms: int = ZETA_TERMS) -> dict:
    """Constants of the closed-form power-law bound.

    ``K_alpha * n1^alpha * n2^(1-alpha) + K_1 * n1 + K_2 * n2``.  The mixed
    constant carries the factor ``4^(1/q_tilde)`` coming from ``mu(4/m')``,
    and every constant carries the Hölder constant ``c_lambda * c_mu``.
    """
    _require_convergent(p, q, mod)
    (a, b), (c, d) = domain
    lx = (b - a) if scaled else 1.0
    ly = (d - c) if scaled else 1.0
    C = mod.holder_constant
    ip, iq = 1.0 / mod.p_tilde, 1.0 / mod.q_tilde
    s_mix_x = mod.alpha / p + ip
    s_mix_y = (1.0 - mod.alpha) / q + iq
    s_x = 1.0 / p + ip
    s_y = 1.0 / q + iq
    return {
        "K": K, "K1": K1, "K2": K2,
        "K_alpha": K * C * (4 * lx) ** ip * (4 * ly) ** iq * zeta(s_mix_x, n_terms) * zeta(s_mix_y, n_terms),
        "K1_p": K1 * C * (4 * lx) ** ip * (d - c) ** iq * zeta(s_x, n_terms),
        "K2_q": K2 * C * (4 * ly) ** iq * (b - a) ** ip * zeta(s_y, n_terms),
        "zeta_args": (s_mix_x, s_mix_y, s_x, s_y),
    }


@dataclass
class MainBound:
    general_scaled: float
    general_literal: float
    powerlaw_scaled: float
    powerlaw_literal: float
    errors: dict
    constants: dict = field(default_factory=dict)

    @property
    def values(self) -> dict:
        return {"general_scaled": self.general_scaled, "general_literal": self.general_literal,
                "powerlaw_scaled": self.powerlaw_scaled, "powerlaw_literal": self.powerlaw_literal}

    @property
    def best(self) -> str:
        vals = self.values
        return min(vals, key=vals.get)

    @property
    def truncation_error(self) -> float:
        """Uncertainty of the smallest right-hand side."""
        return self.errors[self.best]


def main_bound(norm1p: float, norm2q: float, p: float, q: float, mod: ControlModulus,
               domain=((0.0, 1.0), (0.0, 1.0)), series_terms: int = ZETA_TERMS,
               K: float = K_MAIN, K1: float = K_MARGINAL, K2: float = K_MARGINAL) -> MainBound:
    """Bivariation maximal-inequality right-hand sides for power-law moduli.

    Both the truncated series and the closed form are computed, each with
    the side-length-scaled arguments ``lam(4 (b - a) / m)`` and with the
    literal ``lam(4 / m)``; on the unit square the two coincide.
    """
    _require_convergent(p, q, mod)
    decay = (mod.alpha / p + 1 / mod.p_tilde, (1 - mod.alpha) / q + 1 / mod.q_tilde,
             1 / p + 1 / mod.p_tilde, 1 / q + 1 / mod.q_tilde)
    out = {}
    errors = {}
    consts = {}
    for scaled, tag in ((True, "scaled"), (False, "literal")):
        val, err = general_series_bound(norm1p, norm2q, p, q, mod.rho, mod.sigma, mod.lam, mod.mu,
                                        domain, series_terms, scaled, decay, K, K1, K2)
        out[f"general_{tag}"] = val
        errors[f"general_{tag}"] = err
        cst = powerlaw_constants(p, q, mod, domain, scaled, K, K1, K2)
        consts[tag] = cst
        pl = (cst["K_alpha"] * norm1p ** mod.alpha * norm2q ** (1 - mod.alpha)
              + cst["K1_p"] * norm1p + cst["K2_q"] * norm2q)
        out[f"powerlaw_{tag}"] = pl
        # zeta values are accurate to N^-s; propagate to first order
        rel = sum(zeta_error(s) / zeta(s) for s in decay)
        errors[f"powerlaw_{tag}"] = pl * rel
    return MainBound(errors=errors, constants=consts, **out)


def towghi_coefficient(p: float, q: float, alpha: float) -> float:
    theta = 1.0 / p + 1.0 / q
    if not theta > 1:
        raise ValueError(f"theta = 1/p + 1/q = {theta} must exceed 1")
    if not 1 < alpha < theta:
        raise ValueError(f"alpha = {alpha} must lie in (1, theta = {theta})")
    return (1.0 + zeta(theta / alpha)) ** alpha * zeta(alpha) + (1.0 + zeta(theta))


def towghi_bound(VpF: float, VqG: float, p: float, q: float, alpha: float) -> float:
    """[(1 + zeta(theta/alpha))^alpha zeta(alpha) + 1 + zeta(theta)] V_p(F) V_q(G)."""
    return towghi_coefficient(p, q, alpha) * VpF * VqG


@dataclass
class BoundReport:
    lhs: float
    integral: float
    corner: float
    norm1p: float
    norm2q: float
    main_rhs_general: float
    main_rhs_general_literal: float
    main_rhs_powerlaw: float
    main_rhs_powerlaw_literal: float
    truncation_error: float
    satisfied: bool
    constants: dict
    exponent_conditions: dict
    integral_converged: bool
    holder_worst_ratio: float
    towghi_rhs: float | None = None
    towghi_lhs: float | None = None
    towghi_satisfied: bool | None = None
    towghi_exponents: tuple | None = None
    VpF: float | None = None
    VqG: float | None = None

    @property
    def main_rhs(self) -> float:
        return min(self.main_rhs_general, self.main_rhs_general_literal,
                   self.main_rhs_powerlaw, self.main_rhs_powerlaw_literal)

    @property
    def ratio(self) -> float:
        return self.lhs / self.main_rhs if self.main_rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

    @property
    def towghi_smaller(self) -> bool | None:
        if self.towghi_rhs is None:
            return None
        return self.towghi_rhs < self.main_rhs

    def to_json(self) -> dict:
        d = asdict(self)
        d["main_rhs"] = self.main_rhs
        d["ratio"] = self.ratio
        d["towghi_smaller"] = self.towghi_smaller
        return d


def check_vanishing_axes(F: SampledFunction2D, rtol: float = 1e-12) -> float:
    V = F.values
    scale = max(1.0, float(np.max(np.abs(V))))
    worst = max(float(np.max(np.abs(V[0, :]))), float(np.max(np.abs(V[:, 0]))))
    if worst > rtol * scale:
        raise HypothesisError(f"F does not vanish on x=a and y=c (max |F| = {worst:.3g})")
    return worst


def verify_main_inequality(F: SampledFunction2D, G: SampledFunction2D, p: float, q: float,
                           mod: ControlModulus, tol: float = 1e-6, max_depth: int = 11,
                           series_terms: int = ZETA_TERMS, towghi_p: float | None = None,
                           towghi_q: float = 1.0) -> BoundReport:
    """Evaluate both sides of the bivariation maximal inequality for one pair (F, G).

    Hypotheses (F vanishing on x=a, y=c; Hölder control of G with the
    modulus constants) are checked first and raise ``HypothesisError``.
    Towghi's bound is added when both grids are small enough for exact
    joint variations; it bounds ``|I|`` and is judged separately.
    """
    if (F.grid_x.points.shape != G.grid_x.points.shape
            or F.grid_y.points.shape != G.grid_y.points.shape):
        raise ValueError("F and G must share their sample grids")
    check_vanishing_axes(F)
    hold = check_holder_control(G, mod.holder_constant, mod.p_tilde, mod.q_tilde)
    if not hold.holds:
        raise HypothesisError(
            f"G violates the Hölder control (ratio {hold.worst_ratio:.4g} on {hold.worst_rectangle})")
    conds = exponent_conditions(p, q, mod)
    domain = F.domain
    res = young_2d(F, G, tol=tol, max_depth=max_depth, check_axes=False)
    corner = corner_term(F, G, domain)
    lhs = abs(res.value - corner)
    n1 = bivariation_x(F, p).value
    n2 = bivariation_y(F, q).value
    mb = main_bound(n1, n2, p, q, mod, domain, series_terms)
    rhs_min = min(mb.values.values())
    report = BoundReport(
        lhs=lhs, integral=res.value, corner=corner, norm1p=n1, norm2q=n2,
        main_rhs_general=mb.general_scaled, main_rhs_general_literal=mb.general_literal,
        main_rhs_powerlaw=mb.powerlaw_scaled, main_rhs_powerlaw_literal=mb.powerlaw_literal,
        truncation_error=mb.truncation_error,
        satisfied=bool(lhs <= rhs_min + mb.truncation_error),
        constants=mb.constants, exponent_conditions=conds,
        integral_converged=res.converged, holder_worst_ratio=hold.worst_ratio)
    small = all(len(g) <= JOINT_EXACT_MAX_POINTS for g in (F.grid_x, F.grid_y))
    if small:
        tp = p if towghi_p is None else towghi_p
        theta = 1.0 / tp + 1.0 / towghi_q
        if theta > 1:
            alpha_t = 0.5 * (1.0 + theta)
            vp = joint_variation(F, tp, "exact").value
            vq = joint_variation(G, towghi_q, "exact").value
            rhs_t = towghi_bound(vp, vq, tp, towghi_q, alpha_t)
            report.towghi_rhs = rhs_t
            report.towghi_lhs = abs(res.value)
            report.towghi_satisfied = bool(abs(res.value) <= rhs_t * (1 + 1e-12))
            report.towghi_exponents = (tp, towghi_q, alpha_t)
            report.VpF, report.VqG = vp, vq
    return report
