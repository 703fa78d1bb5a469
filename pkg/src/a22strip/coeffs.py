"""Scalar trigonometric data of the dilute A2(2) loop model.

Everything scalar lives here: model parameters, the nine face weights, the
boundary weight functions, the inhomogeneity product f(u), the boundary
w-tables, the fusion-hierarchy coefficient functions (alpha, beta, mu, nu,
tau, eta), and the closure constants/functions used at roots of unity.

All functions are plain evaluations of the defining formulas; there is no
symbolic layer.  Shift notation: ``u_k`` means ``u + k*lam`` throughout, and
the "crossed" point of a fused label (m, n) is ``(4 - 2m - 2n)*lam - u``.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

# Loop-model boundary condition labels.
SINE = "S"
COSINE = "C"


def _sin(x):
    return cmath.sin(x) if isinstance(x, complex) else math.sin(x)


def _cos(x):
    return cmath.cos(x) if isinstance(x, complex) else math.cos(x)


@dataclass(frozen=True)
class ModelParams:
    """Global configuration: strip width, crossing parameter, inhomogeneities
    and the boundary condition pair (left, right), each 'S' or 'C'."""

    n_sites: int
    lam: float
    xi: tuple = ()
    left_bc: str = SINE
    right_bc: str = COSINE

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.left_bc not in (SINE, COSINE) or self.right_bc not in (SINE, COSINE):
            raise ValueError("boundary conditions must be 'S' or 'C'")
        xi = tuple(self.xi)
        if len(xi) == 0:
            xi = (0.0,) * self.n_sites
        if len(xi) != self.n_sites:
            raise ValueError("need one inhomogeneity per site")
        object.__setattr__(self, "xi", xi)

    @property
    def beta(self) -> float:
        """Fugacity of contractible loops, beta = -2 cos(4 lam)."""
        return -2.0 * math.cos(4.0 * self.lam)

    @property
    def bc(self) -> str:
        return self.left_bc + self.right_bc

    @property
    def is_identical(self) -> bool:
        """True for SS and CC, False for the mixed pairs SC and CS."""
        return self.left_bc == self.right_bc

    def with_(self, **kwargs) -> "ModelParams":
        data = {
            "n_sites": self.n_sites,
            "lam": self.lam,
            "xi": self.xi,
            "left_bc": self.left_bc,
            "right_bc": self.right_bc,
        }
        data.update(kwargs)
        return ModelParams(**data)

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.n_sites, "lambda": self.lam, "xi": list(self.xi), "bc": self.bc},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "ModelParams":
        data = json.loads(text)
        if "lambda" in data:
            lam = float(data["lambda"])
        else:
            lam = lambda_ab(int(data["a"]), int(data["b"]))
        bc = data.get("bc", "SC")
        return ModelParams(
            n_sites=int(data["N"]),
            lam=lam,
            xi=tuple(data.get("xi", ())),
            left_bc=bc[0],
            right_bc=bc[1],
        )


def lambda_ab(a: int, b: int) -> float:
    """Root-of-unity crossing parameter lam_{a,b} = pi (b - a) / (2 b)."""
    if b < 2 or math.gcd(a, b) != 1:
        raise ValueError("need b >= 2 and gcd(a, b) = 1")
    return math.pi * (b - a) / (2 * b)


@dataclass(frozen=True)
class RootOfUnity:
    """Rational crossing parameter lam = pi (b - a) / (2 b), gcd(a, b) = 1."""

    a: int
    b: int

    def __post_init__(self):
        lambda_ab(self.a, self.b)  # validates

    @property
    def lam(self) -> float:
        return lambda_ab(self.a, self.b)

    @property
    def beta(self) -> float:
        return -2.0 * math.cos(4.0 * self.lam)

    def is_critical(self, d: int) -> bool:
        """A defect number d is critical when q^{2(d+1)} = 1, i.e. b | (d+1)."""
        return (d + 1) % self.b == 0


# ----------------------------------------------------------------------
# Face and boundary weights
# ----------------------------------------------------------------------

def rho(i: int, u, p: ModelParams):
    """The nine local face weights rho_1..rho_9 at spectral parameter u."""
    lam = p.lam
    if i == 1:
        return _sin(2 * lam) * _sin(3 * lam) + _sin(u) * _sin(3 * lam - u)
    if i in (2, 3):
        return _sin(2 * lam) * _sin(3 * lam - u)
    if i in (4, 5):
        return _sin(2 * lam) * _sin(u)
    if i in (6, 7):
        return _sin(u) * _sin(3 * lam - u)
    if i == 8:
        return _sin(2 * lam - u) * _sin(3 * lam - u)
    if i == 9:
        return -_sin(u) * _sin(lam - u)
    raise ValueError(f"face weight index must be 1..9, got {i}")


def boundary_delta(kind: str, barred: bool, u):
    """Boundary weight delta(u) (sin for S, cos for C); barred swaps the pair."""
    if kind == SINE:
        return _cos(u) if barred else _sin(u)
    if kind == COSINE:
        return _sin(u) if barred else _cos(u)
    raise ValueError(f"boundary kind must be 'S' or 'C', got {kind!r}")


def vartheta(kind: str) -> int:
    """Sign in the boundary braid operator: -1 for S, +1 for C."""
    return -1 if kind == SINE else 1


def f(u, p: ModelParams):
    """Inhomogeneity product f(u) = prod_j sin(u - xi_j) sin(u + xi_j)."""
    out = 1.0 + 0.0j
    for xi in p.xi:
        out *= _sin(u - xi) * _sin(u + xi)
    return out


@dataclass(frozen=True)
class WTable:
    """The four boundary-condition weight functions w, wbar, w^(m), wbar^(n).

    For SS: w = sin, wbar = cos, w^(m)(u) = sin(u + m pi/2),
    wbar^(n)(u) = cos(u + n pi/2).  CC swaps sin and cos.  For the mixed
    pairs SC and CS every entry is identically 1.
    """

    bc: str

    @property
    def trivial(self) -> bool:
        return self.bc in ("SC", "CS")

    def w(self, u):
        if self.trivial:
            return 1.0
        return _sin(u) if self.bc == "SS" else _cos(u)

    def wbar(self, u):
        if self.trivial:
            return 1.0
        return _cos(u) if self.bc == "SS" else _sin(u)

    def w_m(self, m: int, u):
        if self.trivial:
            return 1.0
        return self.w(u + m * math.pi / 2)

    def wbar_n(self, n: int, u):
        if self.trivial:
            return 1.0
        return self.wbar(u + n * math.pi / 2)


def w_table(p: ModelParams) -> WTable:
    return WTable(p.bc)


# ----------------------------------------------------------------------
# Fusion hierarchy coefficient functions
# ----------------------------------------------------------------------

def _s2(u, k, lam):
    """sin(2 u_k) shorthand."""
    return _sin(2 * (u + k * lam))


def crossed(m: int, n: int, u, lam):
    """The crossed point of the fused label (m, n): (4 - 2m - 2n) lam - u."""
    return (4 - 2 * m - 2 * n) * lam - u


def alpha0(u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    return wt.w(u - 1.5 * lam) * wt.wbar(u + 0.5 * lam) * f(u - 2 * lam, p)


def alpha1(m: int, u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    return (
        _s2(u, m - 2, lam)
        * _s2(u, 2 * m - 5, lam)
        * wt.w_m(m, u + (m - 2.5) * lam)
        * wt.wbar_n(-1, u + (2 * m - 4.5) * lam)
        * f(u + (2 * m - 5) * lam, p)
        * f(u + (2 * m - 4) * lam, p)
    )


def alpha2(m: int, u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    return (
        _s2(u, m - 4, lam)
        * _s2(u, 2 * m - 3, lam)
        * wt.w_m(m - 1, u + (m - 3.5) * lam)
        * wt.wbar(u + (2 * m - 3.5) * lam)
    )


def alpha3(m: int, u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    return (
        _s2(u, m - 5, lam)
        * _s2(u, 2 * m - 2, lam)
        * wt.wbar(u + (2 * m - 4.5) * lam)
        * wt.w(u + (2 * m - 2.5) * lam)
        * f(u + (2 * m - 2) * lam, p)
    )


def beta0(m: int, u, p: ModelParams):
    lam = p.lam
    return f(u + 2 * m * lam, p) * f(u + (2 * m + 1) * lam, p)


def beta1(m: int, n: int, u, p: ModelParams):
    lam = p.lam
    ub = crossed(m, n, u, lam)
    return _s2(u, m + n - 2, lam) * _s2(ub, 2 * n - 2, lam) * f(u + (2 * m - 2) * lam, p)


def beta2(m: int, n: int, u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    ub = crossed(m, n, u, lam)
    return (
        _s2(u, m - 2, lam)
        * _s2(ub, n - 2, lam)
        * wt.w_m(m, u + (m - 2.5) * lam)
        * wt.w_m(n, ub + (n - 2.5) * lam)
    )


def beta3(m: int, n: int, u, p: ModelParams):
    wt, lam = w_table(p), p.lam
    ub = crossed(m, n, u, lam)
    return (
        _s2(u, m - 4, lam)
        * _s2(ub, n - 4, lam)
        * wt.wbar_n(m, u + (m - 3.5) * lam)
        * wt.wbar_n(n, ub + (n - 3.5) * lam)
        * wt.wbar(u + (2 * m - 1.5) * lam)
        * wt.wbar(ub + (2 * n - 1.5) * lam)
        * wt.w(u + (2 * m - 0.5) * lam)
        * wt.w(ub + (2 * n - 0.5) * lam)
    )


def mu(i: int, m: int, u, p: ModelParams):
    """Coefficients of the first three-term reduction identity for D^{m,0}."""
    wt, lam = w_table(p), p.lam

    def s2(k):
        return _s2(u, k, lam)

    def fk(k):
        return f(u + k * lam, p)

    if i == 1:
        return (
            wt.w(u + (2 * m - 4.5) * lam)
            * wt.w_m(m, u + (m - 2.5) * lam)
            * s2(m - 3) * s2(m - 2) * s2(2 * m - 6) * s2(2 * m - 5)
            * fk(2 * m - 6) * fk(2 * m - 5) * fk(2 * m - 4)
        )
    if i == 2:
        return (
            wt.w_m(1, u + (2 * m - 3.5) * lam)
            * wt.w_m(m - 1, u + (m - 3.5) * lam)
            * s2(m - 4) * s2(m - 3) * s2(2 * m - 6) * s2(2 * m - 3)
            * fk(2 * m - 6)
        )
    if i == 3:
        return (
            wt.w(u + (2 * m - 2.5) * lam)
            * wt.wbar(u + (2 * m - 4.5) * lam)
            * wt.w_m(1, u + (2 * m - 4.5) * lam)
            * wt.w_m(m - 2, u + (m - 4.5) * lam)
            * s2(m - 5) * s2(m - 4) * s2(2 * m - 5) * s2(2 * m - 2)
            * fk(2 * m - 2)
        )
    if i == 4:
        return (
            wt.w(u + (2 * m - 7.5) * lam)
            * wt.w(u + (2 * m - 4.5) * lam)
            * wt.w(u + (2 * m - 3.5) * lam)
            * wt.w(u + (2 * m - 2.5) * lam)
            * wt.wbar(u + (2 * m - 6.5) * lam)
            * wt.wbar(u + (2 * m - 5.5) * lam)
            * wt.wbar(u + (2 * m - 4.5) * lam)
            * wt.w_m(m - 3, u + (m - 5.5) * lam)
            * s2(m - 6) * s2(m - 5) * s2(2 * m - 3) * s2(2 * m - 2)
            * fk(2 * m - 4) * fk(2 * m - 3) * fk(2 * m - 2)
        )
    raise ValueError(f"mu index must be 1..4, got {i}")


def nu(i: int, m: int, u, p: ModelParams):
    """Coefficients of the second (crossed) three-term reduction identity."""
    wt, lam = w_table(p), p.lam

    def s2(k):
        return _s2(u, k, lam)

    def fk(k):
        return f(u + k * lam, p)

    if i == 1:
        return (
            wt.w(u - 0.5 * lam)
            * wt.w_m(m, u + (m - 2.5) * lam)
            * s2(0) * s2(1) * s2(m - 3) * s2(m - 2)
            * fk(-1) * fk(0) * fk(1)
        )
    if i == 2:
        return (
            wt.w_m(1, u - 1.5 * lam)
            * wt.w_m(m - 1, u + (m - 1.5) * lam)
            * s2(-2) * s2(1) * s2(m - 2) * s2(m - 1)
            * fk(1)
        )
    if i == 3:
        return (
            wt.w(u - 2.5 * lam)
            * wt.wbar(u - 0.5 * lam)
            * wt.w_m(1, u - 0.5 * lam)
            * wt.w_m(m - 2, u + (m - 0.5) * lam)
            * s2(-3) * s2(0) * s2(m - 1) * s2(m)
            * fk(-3)
        )
    if i == 4:
        return (
            wt.w(u - 2.5 * lam)
            * wt.w(u - 1.5 * lam)
            * wt.w(u - 0.5 * lam)
            * wt.w(u + 2.5 * lam)
            * wt.wbar(u - 0.5 * lam)
            * wt.wbar(u + 0.5 * lam)
            * wt.wbar(u + 1.5 * lam)
            * wt.w_m(m - 3, u + (m + 0.5) * lam)
            * s2(-3) * s2(-2) * s2(m) * s2(m + 1)
            * fk(-3) * fk(-2) * fk(-1)
        )
    raise ValueError(f"nu index must be 1..4, got {i}")


def tau(i: int, m: int, k: int, u, p: ModelParams):
    """Coefficients of the five-term relation for D^{m,0}, 2 <= k <= m-2."""
    wt, lam = w_table(p), p.lam

    def s2(j):
        return _s2(u, j, lam)

    def fj(j):
        return f(u + j * lam, p)

    if i == 1:
        return (
            s2(m - 2) * s2(m - 3) * s2(2 * k - 4) * s2(2 * k - 3) * s2(2 * k - 2) * s2(2 * k - 1)
            * wt.w(u + (2 * k - 2.5) * lam)
            * wt.w_m(m, u + (m - 2.5) * lam)
            * fj(2 * k - 4) * fj(2 * k - 3) * fj(2 * k - 2) * fj(2 * k - 1)
        )
    if i == 2:
        return (
            s2(k - 3) * s2(k - 2) * s2(2 * k - 4) * s2(2 * k - 1) * s2(m + k - 3) * s2(m + k - 2)
            * wt.w_m(m - k, u + (m + k - 2.5) * lam)
            * wt.w_m(k, u + (k - 2.5) * lam)
            * fj(2 * k - 4) * fj(2 * k - 1)
        )
    if i == 3:
        return (
            s2(k - 4) * s2(k - 3) * s2(2 * k - 4) * s2(2 * k - 3) * s2(m + k - 1) * s2(m + k)
            * wt.w(u + (2 * k - 3.5) * lam)
            * wt.w(u + (2 * k - 2.5) * lam)
            * wt.w(u + (2 * k + 0.5) * lam)
            * wt.wbar(u + (2 * k - 2.5) * lam)
            * wt.wbar(u + (2 * k - 1.5) * lam)
            * wt.wbar(u + (2 * k - 0.5) * lam)
            * wt.w_m(m - k - 2, u + (m + k - 0.5) * lam)
            * wt.w_m(k - 1, u + (k - 3.5) * lam)
            * fj(2 * k - 4) * fj(2 * k - 3)
        )
    if i == 4:
        return (
            -s2(k - 4) * s2(k - 3) * s2(2 * k - 3) * s2(2 * k - 2) * s2(m + k - 2) * s2(m + k - 1)
            * wt.wbar(u + (2 * k - 2.5) * lam)
            * wt.w_m(m - k - 1, u + (m + k - 1.5) * lam)
            * wt.w_m(1, u + (2 * k - 2.5) * lam)
            * wt.w_m(k - 1, u + (k - 3.5) * lam)
        )
    if i == 5:
        return (
            s2(k - 5) * s2(k - 4) * s2(2 * k - 2) * s2(2 * k - 1) * s2(m + k - 2) * s2(m + k - 1)
            * wt.w(u + (2 * k - 5.5) * lam)
            * wt.w(u + (2 * k - 2.5) * lam)
            * wt.w(u + (2 * k - 1.5) * lam)
            * wt.wbar(u + (2 * k - 4.5) * lam)
            * wt.wbar(u + (2 * k - 3.5) * lam)
            * wt.wbar(u + (2 * k - 2.5) * lam)
            * wt.w_m(m - k - 1, u + (m + k - 1.5) * lam)
            * wt.w_m(k - 2, u + (k - 4.5) * lam)
            * fj(2 * k - 2) * fj(2 * k - 1)
        )
    raise ValueError(f"tau index must be 1..5, got {i}")


def eta(i: int, m: int, n: int, u, p: ModelParams):
    """Coefficients of the T-system identity expressing D^{m,n} through D^{m+n,0}."""
    wt, lam = w_table(p), p.lam
    ub = crossed(m, n, u, lam)

    def s2(j):
        return _s2(u, j, lam)

    if i == 1:
        out = s2(m - 3) * s2(2 * m + 2 * n) * wt.w(u + (2 * m + 2 * n - 0.5) * lam)
        out *= f(u + (2 * m + 2 * n) * lam, p)
        for j in range(0, n):
            out *= wt.wbar(ub + (2 * j - 1.5) * lam)
        for j in range(0, n - 1):
            out *= wt.w(ub + (2 * j - 0.5) * lam)
        return out
    if i == 2:
        return (
            s2(m + n - 3) * s2(2 * m + n)
            * wt.w_m(m + n, u + (m + n - 2.5) * lam)
            * wt.w_m(n, u + (2 * m + n - 0.5) * lam)
        )
    if i == 3:
        return (
            s2(m + n - 1) * s2(2 * m + n - 2)
            * wt.w_m(m + n + 1, u + (m + n - 1.5) * lam)
            * wt.w_m(n - 1, u + (2 * m + n - 1.5) * lam)
        )
    raise ValueError(f"eta index must be 1..3, got {i}")


_COEFF_DISPATCH = {
    "alpha0": lambda args, u, p: alpha0(u, p),
    "alpha1": lambda args, u, p: alpha1(args[0], u, p),
    "alpha2": lambda args, u, p: alpha2(args[0], u, p),
    "alpha3": lambda args, u, p: alpha3(args[0], u, p),
    "beta0": lambda args, u, p: beta0(args[0], u, p),
    "beta1": lambda args, u, p: beta1(args[0], args[1], u, p),
    "beta2": lambda args, u, p: beta2(args[0], args[1], u, p),
    "beta3": lambda args, u, p: beta3(args[0], args[1], u, p),
    "mu1": lambda args, u, p: mu(1, args[0], u, p),
    "mu2": lambda args, u, p: mu(2, args[0], u, p),
    "mu3": lambda args, u, p: mu(3, args[0], u, p),
    "mu4": lambda args, u, p: mu(4, args[0], u, p),
    "nu1": lambda args, u, p: nu(1, args[0], u, p),
    "nu2": lambda args, u, p: nu(2, args[0], u, p),
    "nu3": lambda args, u, p: nu(3, args[0], u, p),
    "nu4": lambda args, u, p: nu(4, args[0], u, p),
    "tau1": lambda args, u, p: tau(1, args[0], args[1], u, p),
    "tau2": lambda args, u, p: tau(2, args[0], args[1], u, p),
    "tau3": lambda args, u, p: tau(3, args[0], args[1], u, p),
    "tau4": lambda args, u, p: tau(4, args[0], args[1], u, p),
    "tau5": lambda args, u, p: tau(5, args[0], args[1], u, p),
    "eta1": lambda args, u, p: eta(1, args[0], args[1], u, p),
    "eta2": lambda args, u, p: eta(2, args[0], args[1], u, p),
    "eta3": lambda args, u, p: eta(3, args[0], args[1], u, p),
}


def fusion_coeffs(name: str, args, u, p: ModelParams):
    """Evaluate a named fusion coefficient function, e.g. ('alpha2', (2,))."""
    try:
        fn = _COEFF_DISPATCH[name]
    except KeyError:
        raise ValueError(f"unknown coefficient function {name!r}") from None
    return fn(tuple(args), u, p)


# ----------------------------------------------------------------------
# Dressed determinant scalars
# ----------------------------------------------------------------------

def det_scalar_d(u, p: ModelParams):
    """Scalar dressing of the fundamental tangle in the determinant family:
    the determinant entry is this scalar times the fundamental transfer matrix."""
    wt, lam = w_table(p), p.lam
    return (
        _s2(u, -4, lam) * _s2(u, 1, lam)
        * wt.wbar(u - 1.5 * lam)
        * wt.w_m(1, u - 1.5 * lam)
    )


def det_scalar_f(u, p: ModelParams):
    """The scalar (times identity) off-diagonal entry of the determinant family."""
    wt, lam = w_table(p), p.lam
    return (
        _s2(u, -4, lam) * _s2(u, 3, lam)
        * wt.w(u - 2.5 * lam) * wt.w(u + 1.5 * lam)
        * wt.wbar(u - 1.5 * lam) * wt.wbar(u + 0.5 * lam)
        * f(u - 3 * lam, p) * f(u + 2 * lam, p)
    )


def det_prefactor_m0(m: int, u, p: ModelParams):
    """Scalar relating det(m,0)(u) to D^{m,0}(u):
    det(m,0) = prefactor * D^{m,0}."""
    wt, lam = w_table(p), p.lam
    out = _s2(u, -4, lam) * _s2(u, 2 * m - 1, lam) * wt.w_m(m, u + (m - 2.5) * lam)
    for j in range(0, m - 1):
        out *= _s2(u, j, lam)
    for j in range(m - 3, 2 * m - 4):
        out *= _s2(u, j, lam)
    for l in range(-1, 2 * m - 3):
        out *= f(u + l * lam, p)
    for k in range(0, m):
        out *= wt.wbar(u + (2 * k - 1.5) * lam)
    for k in range(0, m - 1):
        out *= wt.w(u + (2 * k - 0.5) * lam)
    return out


# ----------------------------------------------------------------------
# Closure scalars at roots of unity
# ----------------------------------------------------------------------

def epsilon(p: ModelParams) -> int:
    """Braid eigenvalue sign: -1 for identical boundaries, +1 for mixed."""
    return -1 if p.is_identical else 1


@dataclass(frozen=True)
class ClosureScalars:
    """Scalar functions and constants entering root-of-unity closure relations."""

    root: RootOfUnity
    params: ModelParams

    def __post_init__(self):
        if abs(self.root.lam - self.params.lam) > 1e-12:
            raise ValueError("params.lam must equal the root-of-unity value")

    def U(self, u):
        wt, lam, b = w_table(self.params), self.params.lam, self.root.b
        out = 1.0 + 0.0j
        for j in range(b):
            out *= wt.wbar(u + (2 * j + 0.5) * lam) * wt.w(u + (2 * j + 1.5) * lam)
        return out

    def V(self, u):
        wt, lam, b = w_table(self.params), self.params.lam, self.root.b
        out = 1.0 + 0.0j
        for j in range(b):
            out *= wt.wbar(u + (2 * j + 1.5) * lam) * wt.w(u + (2 * j + 0.5) * lam)
        return out

    def Lambda(self, u):
        wt, lam, b = w_table(self.params), self.params.lam, self.root.b
        out = 1.0 + 0.0j
        for j in range(2 * b):
            out *= _s2(u, j, lam) * f(u + j * lam, self.params)
        for l in range(b):
            out *= wt.wbar(u + (2 * l + 0.5) * lam) * wt.w(u + (2 * l + 1.5) * lam)
        return out

    def ratio_VU(self, u):
        """V(u)/U(u); closed forms exist per boundary pair and parity of a."""
        return self.V(u) / self.U(u)

    @property
    def kappa(self) -> int:
        a, b = self.root.a, self.root.b
        if self.params.is_identical:
            return (-1) ** (a - 1) * (2 + (-1) ** b)
        return -3

    @property
    def sigma(self) -> int:
        if self.params.is_identical:
            return (-1) ** (self.root.b - self.root.a)
        return 1

    @property
    def iota(self) -> int:
        return (-1) ** self.root.b if self.params.is_identical else 1

    @property
    def epsilon(self) -> int:
        return epsilon(self.params)

    @property
    def delta_braid(self) -> int:
        """Constant term of the braid closure: 1 + 2(-1)^b identical, 3 mixed."""
        if self.params.is_identical:
            return 1 + 2 * (-1) ** self.root.b
        return 3

    def gamma(self, u):
        """Braid-limit normalising function: -w(u) w(3 lam - u), or 1 when mixed."""
        wt = w_table(self.params)
        if wt.trivial:
            return 1.0
        return -wt.w(u) * wt.w(3 * self.params.lam - u)


def closure_scalars(root: RootOfUnity, p: ModelParams) -> ClosureScalars:
    return ClosureScalars(root, p)


def gamma_braid(u, p: ModelParams):
    """Braid normalising function gamma(u) for any params (no root needed)."""
    wt = w_table(p)
    if wt.trivial:
        return 1.0
    return -wt.w(u) * wt.w(3 * p.lam - u)


# ----------------------------------------------------------------------
# Sampling helpers for generic-parameter tests
# ----------------------------------------------------------------------

_LAMBDA_EXCLUSIONS = (
    math.pi / 6, math.pi / 5, math.pi / 4, math.pi / 3, math.pi / 2, 2 * math.pi / 5,
)


def sample_generic_lambda(rng) -> float:
    """Draw a crossing parameter away from low-order roots of unity."""
    while True:
        lam = rng.uniform(0.15, 1.0)
        if all(abs(lam - x) > 1e-3 for x in _LAMBDA_EXCLUSIONS):
            return lam


def sample_generic_xi(rng, n: int) -> tuple:
    """Draw pairwise-distinct inhomogeneities in [0.05, 0.3]."""
    while True:
        xi = sorted(rng.uniform(0.05, 0.3) for _ in range(n))
        if all(b - a >= 0.02 for a, b in zip(xi, xi[1:])):
            return tuple(rng.permutation(xi)) if hasattr(rng, "permutation") else tuple(xi)
