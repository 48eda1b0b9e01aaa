"""Asymptotic constants and limit-law evaluators.

For a family with weight generating function Phi, the structural point
tau solves Phi(tau) = tau*Phi'(tau) below the radius of convergence and
rho = tau/Phi(tau) = 1/Phi'(tau) is the dominant singularity of Y.  From
there two regimes split on whether outdegree 1 carries weight:

* w1 != 0 (exponential): with zeta = rho*Phi'(0), d = 1/zeta and
  kappa = lambda1*(1-zeta)*zeta/tau, the CDF tends to exp(-kappa*n*d^-h)
  and the mean grows like log_d(n) plus explicit constants and a tiny
  1-periodic fluctuation.

* w1 = 0 (double-exponential): with r the smallest weighted outdegree
  >= 2, lambda1 = (rho*w_r)^(-1/(r-1)), mu the limit base of the
  recursion eta_k = rho*(Phi(eta_{k-1}) - 1), d = mu^-r and
  kappa = w_r*lambda1^r/Phi(tau), the CDF tends to exp(-kappa*n*d^(-r^h))
  and the distribution concentrates on at most two values.

The singularity rho_h of the h-bounded generating functions is pinned by
a three-unknown system (the two boundary equations plus a vanishing
Jacobian determinant) and solved here by Newton iteration in
arbitrary-precision floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath as mp

from .errors import NoConvergence, NoTau, PeriodMismatch, WrongRegime
from .families import WeightFamily, family_structure

DEFAULT_PRECISION_BITS = 256
_GUARD_BITS = 24


def _frac_to_mpf(q: Fraction) -> mp.mpf:
    return mp.mpf(q.numerator) / q.denominator


# ---------------------------------------------------------------------------
# structural constants
# ---------------------------------------------------------------------------


def solve_tau_rho(
    f: WeightFamily, precision_bits: int = DEFAULT_PRECISION_BITS
) -> Tuple[mp.mpf, mp.mpf]:
    """Solve Phi(tau) = tau*Phi'(tau) below the radius; rho = tau/Phi(tau).

    H(t) = t*Phi'(t) - Phi(t) has H(0) = -1 and derivative t*Phi''(t) > 0,
    so the root is bracketed by scanning a geometric grid upward and then
    polished by Newton with a bisection safeguard.  If the scan reaches
    the radius (capped at 1e6 for entire Phi) without a sign change, the
    family has no tau and NoTau is raised.
    """
    with mp.workprec(precision_bits + _GUARD_BITS):
        def big_h(t):
            return t * f.phi_eval(t, 1) - f.phi_eval(t, 0)

        def big_h_prime(t):
            return t * f.phi_eval(t, 2)

        if math.isinf(f.radius):
            hi_cap = mp.mpf(10) ** 6
        else:
            hi_cap = mp.mpf(f.radius) * (1 - mp.mpf(10) ** -6)

        lo = mp.mpf(0)
        hi = None
        for k in range(120, -1, -1):
            t = hi_cap * mp.mpf(2) ** (-k)
            if big_h(t) > 0:
                hi = t
                break
            lo = t
        if hi is None:
            raise NoTau(
                f"{f.name}: t*Phi'(t) - Phi(t) has no sign change below the "
                f"radius of convergence; the family lacks the structural "
                f"point tau and is not analyzable here"
            )

        t = (lo + hi) / 2
        step_target = mp.mpf(2) ** (-(precision_bits + 10))
        for _ in range(400):
            ht = big_h(t)
            if ht > 0:
                hi = t
            elif ht < 0:
                lo = t
            else:
                break
            slope = big_h_prime(t)
            nt = t - ht / slope if slope != 0 else None
            if nt is None or not (lo < nt < hi):
                nt = (lo + hi) / 2
            done = abs(nt - t) <= abs(nt) * step_target
            t = nt
            if done:
                break
        tau = t
        rho = tau / f.phi_eval(tau, 0)
        return tau, rho


@dataclass(frozen=True)
class FamilyConstants:
    """Every constant of the two limit laws for one family."""

    family: str
    regime: str                       # "exponential" | "double-exponential"
    precision_bits: int
    D: int                            # period; tree sizes are 1 mod D
    tau: mp.mpf
    rho: mp.mpf
    phi_tau: mp.mpf
    phi2_tau: mp.mpf
    a: mp.mpf                         # leading singular-expansion coefficient
    lambda1: mp.mpf
    kappa: mp.mpf
    d: mp.mpf
    zeta: Optional[mp.mpf] = None     # exponential regime only
    lambda2: Optional[mp.mpf] = None  # exponential regime only
    r: Optional[int] = None           # double-exponential regime only
    mu: Optional[mp.mpf] = None       # double-exponential regime only
    errors: Dict[str, float] = field(default_factory=dict)


def _eta_step(f: WeightFamily, rho, eta, base_bits: int, r: int):
    """One step eta -> rho*(Phi(eta) - 1) of the protection recursion.

    Phi(eta) - 1 is of size eta^r while Phi(eta) is near 1, so the
    subtraction cancels about r*log2(1/eta) bits; evaluate with that many
    extra bits to keep the full relative accuracy of the result.
    """
    extra = 16
    if 0 < eta < 1:
        extra += int((r + 1) * (-mp.log(eta, 2)))
    with mp.workprec(base_bits + extra):
        return rho * (f.phi_eval(eta, 0) - 1)


def eta_sequence(c: FamilyConstants, f: WeightFamily, kmax: int) -> List[mp.mpf]:
    """eta_0 .. eta_kmax of the recursion eta_0 = tau,
    eta_k = rho*(Phi(eta_{k-1}) - 1); strictly decreasing to 0."""
    bits = c.precision_bits + _GUARD_BITS
    r = c.r if c.r is not None else 1
    with mp.workprec(bits):
        out = [c.tau]
        for _ in range(kmax):
            out.append(_eta_step(f, c.rho, out[-1], bits, r))
        return out


def constants_exponential(
    f: WeightFamily, precision_bits: int = DEFAULT_PRECISION_BITS
) -> FamilyConstants:
    """Constants of the exponential regime (requires w1 != 0)."""
    struct = family_structure(f)
    if struct.w1_zero:
        raise WrongRegime(f"{f.name}: w1 = 0, use constants_doubleexp")
    with mp.workprec(precision_bits + _GUARD_BITS):
        tau, rho = solve_tau_rho(f, precision_bits)
        w1 = _frac_to_mpf(f.weight(1))
        zeta = rho * w1
        d = 1 / zeta

        # lambda1 = lim zeta^-k eta_k; geometric convergence, so the
        # relative change of successive iterates is the error estimate.
        tol1 = mp.mpf(10) ** -25
        eta = tau
        q = tau
        scale = mp.mpf(1)
        delta1 = mp.mpf(1)
        for _ in range(5000):
            eta = rho * (f.phi_eval(eta, 0) - 1)
            scale = scale / zeta
            q_new = scale * eta
            delta1 = abs(q_new / q - 1)
            q = q_new
            if delta1 < tol1:
                break
        else:
            raise NoConvergence(f"{f.name}: lambda1 iteration did not stabilize")
        lam1 = q

        # lambda2 = prod_{j>=1} Phi'(eta_j)/Phi'(0)
        tol2 = mp.mpf(10) ** -30
        lam2 = mp.mpf(1)
        eta = tau
        delta2 = mp.mpf(1)
        for _ in range(5000):
            eta = rho * (f.phi_eval(eta, 0) - 1)
            factor = f.phi_eval(eta, 1) / w1
            lam2 *= factor
            delta2 = abs(factor - 1)
            if delta2 < tol2:
                break
        else:
            raise NoConvergence(f"{f.name}: lambda2 product did not stabilize")

        kappa = lam1 * (1 - zeta) * zeta / tau
        phi_tau = f.phi_eval(tau, 0)
        phi2_tau = f.phi_eval(tau, 2)
        a = -mp.sqrt(2 * phi_tau / phi2_tau)
        return FamilyConstants(
            family=f.name,
            regime="exponential",
            precision_bits=precision_bits,
            D=struct.D,
            tau=tau,
            rho=rho,
            phi_tau=phi_tau,
            phi2_tau=phi2_tau,
            a=a,
            lambda1=lam1,
            kappa=kappa,
            d=d,
            zeta=zeta,
            lambda2=lam2,
            errors={"lambda1": float(delta1), "lambda2": float(delta2)},
        )


def constants_doubleexp(
    f: WeightFamily, precision_bits: int = DEFAULT_PRECISION_BITS
) -> FamilyConstants:
    """Constants of the double-exponential regime (requires w1 = 0).

    mu is evaluated through the telescoping sum
    log(mu) = log(eta_0/lambda1) + sum_j theta_j / r^(j+1) with
    theta_{k-1} = log(eta_k/lambda1) - r*log(eta_{k-1}/lambda1); the raw
    r^k-th root of eta_k/lambda1 would lose precision catastrophically,
    while these terms decay doubly exponentially.
    """
    struct = family_structure(f)
    if not struct.w1_zero:
        raise WrongRegime(f"{f.name}: w1 != 0, use constants_exponential")
    r = struct.r
    with mp.workprec(precision_bits + _GUARD_BITS):
        tau, rho = solve_tau_rho(f, precision_bits)
        w_r = _frac_to_mpf(f.weight(r))
        lam1 = (rho * w_r) ** (mp.mpf(-1) / (r - 1))
        log_lam1 = mp.log(lam1)

        tol = mp.mpf(10) ** -30
        base_bits = precision_bits + _GUARD_BITS
        eta = tau
        log_ratio = mp.log(tau) - log_lam1
        total = log_ratio
        rpow = mp.mpf(r)
        last_term = mp.mpf(1)
        for j in range(500):
            eta = _eta_step(f, rho, eta, base_bits, r)
            new_log_ratio = mp.log(eta) - log_lam1
            theta = new_log_ratio - r * log_ratio
            term = theta / rpow
            total += term
            rpow *= r
            log_ratio = new_log_ratio
            last_term = abs(term)
            # theta_j = O(eta_j), so once eta is below the tolerance the
            # remaining tail of the sum is below it too
            if last_term < tol and eta < tol:
                break
        else:
            raise NoConvergence(f"{f.name}: mu telescoping sum did not stabilize")
        mu = mp.e ** total
        if not (0 < mu < 1):
            raise NoConvergence(f"{f.name}: mu = {mu} is outside (0, 1)")

        d = mu ** (-r)
        phi_tau = f.phi_eval(tau, 0)
        phi2_tau = f.phi_eval(tau, 2)
        kappa = w_r * lam1**r / phi_tau
        a = -mp.sqrt(2 * phi_tau / phi2_tau)
        return FamilyConstants(
            family=f.name,
            regime="double-exponential",
            precision_bits=precision_bits,
            D=struct.D,
            tau=tau,
            rho=rho,
            phi_tau=phi_tau,
            phi2_tau=phi2_tau,
            a=a,
            lambda1=lam1,
            kappa=kappa,
            d=d,
            r=r,
            mu=mu,
            errors={"mu": float(last_term)},
        )


_CONSTANTS_CACHE: Dict[Tuple[str, int], FamilyConstants] = {}


def family_constants(
    f: WeightFamily, precision_bits: int = DEFAULT_PRECISION_BITS
) -> FamilyConstants:
    """Regime-dispatching constants computation, cached per family."""
    key = (f.cache_key, precision_bits)
    hit = _CONSTANTS_CACHE.get(key)
    if hit is not None:
        return hit
    if family_structure(f).w1_zero:
        c = constants_doubleexp(f, precision_bits)
    else:
        c = constants_exponential(f, precision_bits)
    _CONSTANTS_CACHE[key] = c
    return c


# ---------------------------------------------------------------------------
# limit-law evaluators
# ---------------------------------------------------------------------------


def cdf_asymptotic(c: FamilyConstants, n: int, h: int) -> mp.mpf:
    """Regime-appropriate double-exponential CDF value in [0, 1]."""
    with mp.workprec(c.precision_bits + _GUARD_BITS):
        if c.regime == "exponential":
            exponent = -c.kappa * n * c.d ** mp.mpf(-h)
        else:
            exponent = -c.kappa * n * c.d ** (-mp.mpf(c.r) ** h)
        return mp.e**exponent


# Lanczos approximation, g = 7 with 9 coefficients; together with the
# reflection formula this covers the whole complex plane and is accurate
# to ~1e-13 relative on the imaginary arguments needed below.
_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z) -> mp.mpc:
    """Gamma function for complex arguments (Lanczos plus reflection)."""
    z = mp.mpc(z)
    if z.real < 0.5:
        return mp.pi / (mp.sin(mp.pi * z) * complex_gamma(1 - z))
    z -= 1
    acc = mp.mpc(_LANCZOS_COEFFS[0])
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + mp.mpf(1) / 2
    return mp.sqrt(2 * mp.pi) * t ** (z + mp.mpf(1) / 2) * mp.e ** (-t) * acc


def psi_fluctuation(d, x, kmax: int = 10) -> mp.mpf:
    """The 1-periodic fluctuation
    -(1/log d) * sum_{k != 0} Gamma(-2*pi*i*k/log d) * e^{2*pi*i*k*x},
    truncated at |k| <= kmax.  Conjugate terms are paired, so only the
    real parts of k >= 1 enter."""
    ln_d = mp.log(d)
    two_pi = 2 * mp.pi
    total = mp.mpf(0)
    for k in range(1, kmax + 1):
        g = complex_gamma(mp.mpc(0, -two_pi * k / ln_d))
        phase = mp.e ** mp.mpc(0, two_pi * k * x)
        total += 2 * (g * phase).real
    return -total / ln_d


def expectation_asymptotic(c: FamilyConstants, n: int, kmax: int = 10) -> mp.mpf:
    """Mean of the maximum protection number, exponential regime:
    log_d(n) + log_d(kappa) + gamma/log(d) + 1/2 + psi_d(log_d(kappa*n))."""
    if c.regime != "exponential":
        raise WrongRegime(
            f"{c.family}: the expectation formula applies to the exponential "
            f"regime only (w1 != 0)"
        )
    with mp.workprec(c.precision_bits + _GUARD_BITS):
        ln_d = mp.log(c.d)
        log_d_n = mp.log(n) / ln_d
        log_d_kappa = mp.log(c.kappa) / ln_d
        x = log_d_n + log_d_kappa
        return (
            log_d_n
            + log_d_kappa
            + mp.euler / ln_d
            + mp.mpf(1) / 2
            + psi_fluctuation(c.d, x, kmax)
        )


def count_asymptotic(c: FamilyConstants, n: int) -> mp.mpf:
    """Leading-order estimate of the total weight y_n:
    D * (-a/(2*sqrt(pi))) * n^(-3/2) * rho^-n for n = 1 mod D."""
    if (n - 1) % c.D != 0:
        raise PeriodMismatch(
            f"{c.family}: y_n = 0 for n != 1 mod {c.D}; no asymptotic applies"
        )
    with mp.workprec(c.precision_bits + _GUARD_BITS):
        return c.D * (-c.a) / (2 * mp.sqrt(mp.pi)) * mp.mpf(n) ** mp.mpf("-1.5") * c.rho ** (-n)


def _predictor_round(m) -> int:
    """floor(m) when the fractional part is <= 1/2 (inclusive), else ceil."""
    fl = mp.floor(m)
    return int(fl) if m - fl <= mp.mpf(1) / 2 else int(fl) + 1


def two_point_predictor(c: FamilyConstants, n: int) -> Tuple[int, mp.mpf]:
    """The concentration point h_n with m_n = log_r(log_d(n)) in the
    double-exponential regime; the maximum is h_n or h_n + 1 w.h.p."""
    if c.regime != "double-exponential":
        raise WrongRegime(f"{c.family}: two-point concentration needs w1 = 0")
    with mp.workprec(c.precision_bits + _GUARD_BITS):
        log_d_n = mp.log(n) / mp.log(c.d)
        if not log_d_n > 1:
            raise ValueError(f"need log_d(n) > 1, got {float(log_d_n)} at n = {n}")
        m = mp.log(log_d_n) / mp.log(c.r)
        return _predictor_round(m), m


# ---------------------------------------------------------------------------
# the singularity system for rho_h
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RhoHSolution:
    """Solution of the three-unknown singularity system at level h."""

    family: str
    h: int
    precision_bits: int
    rho_h: mp.mpf
    eta: Tuple[mp.mpf, ...]           # eta_{h,0} .. eta_{h,h}
    s: mp.mpf                         # = Phi(eta_{h,h})
    residuals: Tuple[mp.mpf, mp.mpf, mp.mpf]


def _solve_3x3(jac, rhs):
    """Gaussian elimination with partial pivoting on a 3x3 mpf system."""
    a = [row[:] + [rhs[i]] for i, row in enumerate(jac)]
    n = 3
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(a[i][col]))
        if a[piv][col] == 0:
            raise ZeroDivisionError("singular Jacobian")
        a[col], a[piv] = a[piv], a[col]
        for i in range(col + 1, n):
            fac = a[i][col] / a[col][col]
            for j in range(col, n + 1):
                a[i][j] -= fac * a[col][j]
    x = [mp.mpf(0)] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        x[i] = acc / a[i][i]
    return x


def solve_rho_h(
    f: WeightFamily, h: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> RhoHSolution:
    """Newton solve for the dominant singularity rho_h of the h-bounded
    generating functions.

    Unknowns (rho_h, eta_{h,0}, s): the remaining eta_{h,k} propagate
    forward via eta_{h,1} = eta_{h,0} - rho_h and
    eta_{h,k} = rho_h*Phi(eta_{h,k-1}) - rho_h*s.  Residuals are the
    closure s = Phi(eta_{h,h}), the k = 1 equation folded with the
    root-level one, and the factored Jacobian-determinant condition

      prod_{j=1..h} rho_h*Phi'(eta_{h,j})
        + (1 - rho_h*Phi'(eta_{h,0})) * (1 + sum_{k=2..h} prod_{j=k..h} ...).

    The Newton Jacobian is taken by finite differences with step
    2^(-precision_bits/3); the initial guess (rho, tau, 1) converges for
    h >= 2 on all builtin families.
    """
    if h < 2:
        raise ValueError("h must be >= 2")
    with mp.workprec(precision_bits + _GUARD_BITS):
        tau, rho = solve_tau_rho(f, precision_bits)

        def phi(t):
            return f.phi_eval(t, 0)

        def dphi(t):
            return f.phi_eval(t, 1)

        def propagate(rho_h, eta0, s):
            etas = [eta0, eta0 - rho_h]
            for _ in range(2, h + 1):
                etas.append(rho_h * phi(etas[-1]) - rho_h * s)
            return etas

        def residuals(u):
            rho_h, eta0, s = u
            etas = propagate(rho_h, eta0, s)
            r1 = s - phi(etas[h])
            r2 = eta0 - rho_h * (phi(eta0) - s + 1)
            pj = [rho_h * dphi(etas[j]) for j in range(1, h + 1)]
            prod_all = mp.mpf(1)
            for p in pj:
                prod_all *= p
            tail_sum = mp.mpf(1)
            acc = mp.mpf(1)
            for j in range(h, 1, -1):
                acc *= pj[j - 1]
                tail_sum += acc
            r3 = prod_all + (1 - rho_h * dphi(eta0)) * tail_sum
            return [r1, r2, r3], etas

        u = [rho, tau, mp.mpf(1)]
        fd_step = mp.mpf(2) ** (-(precision_bits // 3))
        tol = mp.mpf(2) ** (-(precision_bits // 2))
        res, etas = residuals(u)
        for _ in range(120):
            norm = max(abs(v) for v in res)
            if norm < tol:
                break
            jac = [[mp.mpf(0)] * 3 for _ in range(3)]
            for i in range(3):
                du = fd_step * max(mp.mpf(1), abs(u[i]))
                bumped = u[:]
                bumped[i] += du
                res_i, _ = residuals(bumped)
                for row in range(3):
                    jac[row][i] = (res_i[row] - res[row]) / du
            try:
                delta = _solve_3x3(jac, res)
            except ZeroDivisionError as exc:
                raise NoConvergence(
                    f"{f.name}, h = {h}: singular Newton Jacobian", tuple(u)
                ) from exc
            u = [u[i] - delta[i] for i in range(3)]
            res, etas = residuals(u)
        else:
            raise NoConvergence(
                f"{f.name}, h = {h}: Newton did not reach the residual target "
                f"2^-{precision_bits // 2}",
                tuple(u),
            )

        rho_h, eta0, s = u
        slack = mp.mpf(2) ** (-(precision_bits // 4))
        if rho_h < rho - slack or any(
            etas[k] < etas[k + 1] - slack for k in range(h)
        ):
            raise NoConvergence(
                f"{f.name}, h = {h}: converged to a spurious root", tuple(u)
            )
        return RhoHSolution(
            family=f.name,
            h=h,
            precision_bits=precision_bits,
            rho_h=rho_h,
            eta=tuple(etas),
            s=s,
            residuals=tuple(res),
        )
