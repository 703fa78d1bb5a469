"""The fused transfer-matrix hierarchy.

Fused matrices are produced by the coefficient-weighted recursions seeded by
the fundamental transfer matrix and its lambda-shifts, with a memoising cache
keyed on the quantised spectral parameter.  A second, independent route goes
through the determinant family (band determinants in the dressed fundamental),
used for cross-validation, the T/Y-systems and the closure relations.  The
diagrammatic two-row-pair definitions exist for the first two fused levels
and are compared against the recursion directly.

The crossing map u -> (4 - 2m - 2n) lam - u does not commute with shifting;
``cross_then_shift`` and ``shift_then_cross`` make the order explicit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import coeffs as ck
from .coeffs import ModelParams, crossed, f, w_table
from .dtl import Representation, representation_matrix
from .local_ops import (
    FACE_B,
    FACE_L,
    FACE_R,
    FACE_T,
    P_LB,
    P_LT,
    P_RB,
    P_RT,
    boundary_tile,
    face_tile,
    projector,
)
from .planar import Network, Tile, tile_to_element
from .transfer import PoleError, braid_transfer, normalisation, transfer_polynomial


def cross_then_shift(m: int, n: int, u, k: int, lam: float):
    """First cross u for the label (m, n), then shift by k lam."""
    return crossed(m, n, u, lam) + k * lam


def shift_then_cross(m: int, n: int, u, k: int, lam: float):
    """First shift u by k lam, then cross for the label (m, n)."""
    return crossed(m, n, u + k * lam, lam)


def _ukey(u) -> tuple:
    z = complex(u)
    return (round(z.real * 1e12), round(z.imag * 1e12))


def _guard(value, scale, name: str):
    """Reject divisions by a vanishing hierarchy coefficient.

    Polynomiality makes every such zero removable, so the evaluation point is
    rejected rather than interpolated through.  The threshold is relative to
    the companion coefficient of the same relation; deliberate two-sided
    limit evaluations at distance ~1e-5 from a zero stay well above it.
    """
    if abs(value) <= 1e-12 * max(abs(scale), 1e-300):
        raise PoleError(f"vanishing coefficient {name} at the sampled point")
    return value


@dataclass
class FusedCache:
    """Memoised fused matrices for one parameter set and representation."""

    params: ModelParams
    rep: Representation
    _fund: dict = field(default_factory=dict)
    _fused: dict = field(default_factory=dict)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.rep.dimension, dtype=complex)

    def fundamental(self, u) -> np.ndarray:
        key = _ukey(u)
        mat = self._fund.get(key)
        if mat is None:
            raw = transfer_polynomial(self.params).raw_at(u)
            mat = representation_matrix(raw, self.rep, self.params.beta)
            mat = mat / normalisation(u, self.params)
            self._fund[key] = mat
        return mat

    def fused(self, m: int, n: int, u) -> np.ndarray:
        return fused(m, n, u, self)


def fused(m: int, n: int, u, cache: FusedCache) -> np.ndarray:
    """D^{m,n}(u) through the fusion hierarchy recursions."""
    p, lam = cache.params, cache.params.lam
    if m < 0 or n < 0:
        return np.zeros((cache.rep.dimension, cache.rep.dimension), dtype=complex)
    key = (m, n, _ukey(u))
    hit = cache._fused.get(key)
    if hit is not None:
        return hit

    if (m, n) == (0, 0):
        out = f(u - 2 * lam, p) * f(u - 3 * lam, p) * cache.identity
    elif (m, n) == (1, 0):
        out = cache.fundamental(u)
    elif (m, n) == (0, 1):
        out = cache.fundamental(u + lam)
    elif (m, n) == (2, 0):
        a1 = _guard(ck.alpha1(2, u, p), ck.alpha2(2, u, p), "alpha1(2,u)")
        out = (
            ck.alpha2(2, u, p) * fused(1, 0, u, cache) @ fused(1, 0, u + 2 * lam, cache)
            - ck.alpha3(2, u, p) * ck.alpha0(u - lam, p) * fused(0, 1, u, cache)
        ) / a1
    elif (m, n) == (0, 2):
        ub = crossed(0, 2, u, lam)
        a1 = _guard(ck.alpha1(2, ub, p), ck.alpha2(2, ub, p), "alpha1(2,ub)")
        out = (
            ck.alpha2(2, ub, p) * fused(0, 1, u, cache) @ fused(0, 1, u + 2 * lam, cache)
            - ck.alpha3(2, ub, p) * ck.alpha0(ub - lam, p) * fused(1, 0, u + 2 * lam, cache)
        ) / a1
    elif (m, n) == (1, 1):
        b1 = _guard(ck.beta1(1, 1, u, p), ck.beta2(1, 1, u, p), "beta1(1,1,u)")
        ub = crossed(1, 1, u, lam)
        out = (
            ck.beta2(1, 1, u, p) * fused(1, 0, u, cache) @ fused(0, 1, u + 2 * lam, cache)
            - ck.beta3(1, 1, u, p) * ck.beta0(1, u, p) * ck.beta0(1, ub, p) * cache.identity
        ) / b1
    elif n == 0 and m > 2:
        a1 = _guard(ck.alpha1(m, u, p), ck.alpha2(m, u, p), f"alpha1({m},u)")
        out = (
            ck.alpha2(m, u, p) * fused(m - 1, 0, u, cache) @ fused(1, 0, u + (2 * m - 2) * lam, cache)
            - ck.alpha3(m, u, p) * fused(m - 2, 1, u, cache)
        ) / a1
    elif m == 0 and n > 2:
        ub = crossed(0, n, u, lam)
        a1 = _guard(ck.alpha1(n, ub, p), ck.alpha2(n, ub, p), f"alpha1({n},ub)")
        out = (
            ck.alpha2(n, ub, p) * fused(0, 1, u, cache) @ fused(0, n - 1, u + 2 * lam, cache)
            - ck.alpha3(n, ub, p) * fused(1, n - 2, u + 2 * lam, cache)
        ) / a1
    elif n == 1 and m > 1:
        b1 = _guard(ck.beta1(m, 1, u, p), ck.beta2(m, 1, u, p), f"beta1({m},1,u)")
        out = (
            ck.beta2(m, 1, u, p) * fused(m, 0, u, cache) @ fused(0, 1, u + 2 * m * lam, cache)
            - ck.beta3(m, 1, u, p) * ck.beta0(m, u, p) * fused(m - 1, 0, u, cache)
        ) / b1
    elif m == 1 and n > 1:
        ub = crossed(1, n, u, lam)
        b1 = _guard(ck.beta1(n, 1, ub, p), ck.beta2(n, 1, ub, p), f"beta1({n},1,ub)")
        out = (
            ck.beta2(n, 1, ub, p) * fused(1, 0, u, cache) @ fused(0, n, u + 2 * lam, cache)
            - ck.beta3(n, 1, ub, p) * ck.beta0(n, ub, p) * fused(0, n - 1, u + 4 * lam, cache)
        ) / b1
    else:
        b1 = _guard(ck.beta1(m, n, u, p), ck.beta2(m, n, u, p), f"beta1({m},{n},u)")
        out = (
            ck.beta2(m, n, u, p) * fused(m, 0, u, cache) @ fused(0, n, u + 2 * m * lam, cache)
            - ck.beta3(m, n, u, p) * fused(m - 1, 0, u, cache) @ fused(0, n - 1, u + (2 * m + 2) * lam, cache)
        ) / b1

    cache._fused[key] = out
    return out


# ----------------------------------------------------------------------
# Diagrammatic definitions for the first fused levels
# ----------------------------------------------------------------------

def _z20(u, p: ModelParams):
    lam = p.lam
    dl = lambda x: ck.boundary_delta(p.left_bc, False, x)
    dr = lambda x: ck.boundary_delta(p.right_bc, False, x)
    out = (
        4 * cmath.sin(2 * (u - lam)) * cmath.sin(2 * u)
        * dl(u - 1.5 * lam) * dl(u - 0.5 * lam) * dr(u - 0.5 * lam) * dr(u + 0.5 * lam)
        * f(u - lam, p) * f(u, p)
    )
    if p.is_identical:
        return -out
    return out * dl(u - 2.5 * lam) * dl(u + 0.5 * lam) * dr(u - 1.5 * lam) * dr(u + 1.5 * lam)


def _z11(u, p: ModelParams):
    lam = p.lam
    dl = lambda x: ck.boundary_delta(p.left_bc, False, x)
    dr = lambda x: ck.boundary_delta(p.right_bc, False, x)
    out = 4 * cmath.sin(2 * u) ** 2 * dl(1.5 * lam - u) * dr(1.5 * lam + u) * f(u, p)
    if p.is_identical:
        return -out
    return out * (
        dl(0.5 * lam + u) * dr(0.5 * lam - u)
        * dl(1.5 * lam + u) * dr(1.5 * lam - u)
        * dl(2.5 * lam - u) * dr(2.5 * lam + u)
    )


def _transpose_ports(tile: Tile) -> Tile:
    """Swap the left and right port pairs of a 4-port projector tile."""
    perm = {P_LB: P_RB, P_LT: P_RT, P_RT: P_LT, P_RB: P_LB}
    terms = {}
    for pairing, x in tile.terms.items():
        new = [-1] * 4
        for i, j in enumerate(pairing):
            if j != -1:
                new[perm[i]] = perm[j]
        terms[tuple(new)] = terms.get(tuple(new), 0.0) + x
    return Tile(4, terms)


# Orientation of the fusion projector inside the two-row-pair assembly,
# frozen after a one-time comparison with the recursion.
PROJECTOR_FLIPPED = False


def _two_row_assembly(which: str, u, p: ModelParams, every_column: bool = False):
    """The two-row-pair network defining the first fused transfer matrices."""
    lam, n = p.lam, p.n_sites
    top_shift = 2 * lam if which == "P20" else 3 * lam
    left_dia_arg = (2 * u - lam) if which == "P20" else 2 * u
    right_dia_arg = (lam - 2 * u) if which == "P20" else -2 * u

    ptile = projector(which, lam).tile
    if PROJECTOR_FLIPPED:
        ptile = _transpose_ports(ptile)

    net = Network(p.beta)
    lt0 = net.add(boundary_tile(p.left_bc, 3 * lam - u, lam))
    lt2 = net.add(boundary_tile(p.left_bc, 3 * lam - u - top_shift, lam))
    ld = net.add(face_tile(left_dia_arg, p, rot=3))
    pid = net.add(ptile)
    rows = []
    for j in range(n):
        xi = p.xi[j]
        r1 = net.add(face_tile(u - xi, p))
        r2 = net.add(face_tile(u + top_shift - xi, p))
        r3 = net.add(face_tile(3 * lam - u - xi, p))
        r4 = net.add(face_tile(3 * lam - u - top_shift - xi, p))
        rows.append((r1, r2, r3, r4))
        net.glue((r1, FACE_T), (r2, FACE_B))
        net.glue((r2, FACE_T), (r3, FACE_B))
        net.glue((r3, FACE_T), (r4, FACE_B))
        if j:
            prev = rows[j - 1]
            if every_column and which == "P20":
                q_low = net.add(ptile)
                net.glue((prev[0], FACE_R), (q_low, P_LB))
                net.glue((prev[1], FACE_R), (q_low, P_LT))
                net.glue((q_low, P_RB), (r1, FACE_L))
                net.glue((q_low, P_RT), (r2, FACE_L))
                q_up = net.add(_transpose_ports(ptile))
                net.glue((prev[2], FACE_R), (q_up, P_LB))
                net.glue((prev[3], FACE_R), (q_up, P_LT))
                net.glue((q_up, P_RB), (r3, FACE_L))
                net.glue((q_up, P_RT), (r4, FACE_L))
            else:
                net.glue((prev[0], FACE_R), (r1, FACE_L))
                net.glue((prev[1], FACE_R), (r2, FACE_L))
                net.glue((prev[2], FACE_R), (r3, FACE_L))
                net.glue((prev[3], FACE_R), (r4, FACE_L))
    rd = net.add(face_tile(right_dia_arg, p, rot=3))
    rt0 = net.add(boundary_tile(p.right_bc, u, lam))
    rt2 = net.add(boundary_tile(p.right_bc, u + top_shift, lam))
    # left complex
    net.glue((lt0, 1), (ld, FACE_L))     # diamond lower-left
    net.glue((lt2, 0), (ld, FACE_T))     # diamond upper-left
    net.glue((lt0, 0), (pid, P_LB))
    net.glue((ld, FACE_B), (pid, P_LT))  # diamond lower-right
    net.glue((pid, P_RB), (rows[0][0], FACE_L))
    net.glue((pid, P_RT), (rows[0][1], FACE_L))
    net.glue((ld, FACE_R), (rows[0][2], FACE_L))  # diamond upper-right
    net.glue((lt2, 1), (rows[0][3], FACE_L))
    # right complex
    net.glue((rows[-1][1], FACE_R), (rd, FACE_L))
    net.glue((rows[-1][2], FACE_R), (rd, FACE_T))
    net.glue((rt0, 0), (rows[-1][0], FACE_R))
    net.glue((rt0, 1), (rd, FACE_B))
    net.glue((rt2, 0), (rd, FACE_R))
    net.glue((rt2, 1), (rows[-1][3], FACE_R))
    ext = [(rows[j][0], FACE_B) for j in range(n)]
    ext += [(rows[j][3], FACE_T) for j in reversed(range(n))]
    net.set_externals(ext)
    return tile_to_element(net.contract(), n)


def fused_diagrammatic(which, u, p: ModelParams, rep: Representation,
                       every_column: bool = False) -> np.ndarray:
    """D^{2,0}(u) or D^{1,1}(u) from the projector-dressed two-row pair."""
    label = "P20" if tuple(which) == (2, 0) else "P11" if tuple(which) == (1, 1) else None
    if label is None:
        raise ValueError("diagrammatic definition exists for (2,0) and (1,1) only")
    z = _z20(u, p) if label == "P20" else _z11(u, p)
    if abs(z) < 1e-10:
        raise PoleError(f"normalisation Z^{which} vanishes at the sampled point")
    element = _two_row_assembly(label, u, p, every_column=every_column)
    return representation_matrix(element, rep, p.beta) / z


# ----------------------------------------------------------------------
# Determinant family
# ----------------------------------------------------------------------

class DetFamily:
    """Band determinants over the dressed fundamental transfer matrix."""

    def __init__(self, cache: FusedCache):
        self.cache = cache
        self.p = cache.params
        self._memo = {}

    def d_entry(self, u) -> np.ndarray:
        return ck.det_scalar_d(u, self.p) * self.cache.fundamental(u)

    def f_entry(self, u) -> complex:
        return ck.det_scalar_f(u, self.p)

    def det_m0(self, m: int, u) -> np.ndarray:
        """det(m,0)(u) through its three-step recursion."""
        if m < 0:
            return np.zeros((self.cache.rep.dimension,) * 2, dtype=complex)
        key = (m, _ukey(u))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        lam = self.p.lam
        ident = self.cache.identity
        if m == 0:
            out = ident.copy()
        elif m == 1:
            out = self.d_entry(u)
        else:
            sh = lambda k: u + k * lam
            out = self.d_entry(sh(2 * m - 2)) @ self.det_m0(m - 1, u)
            inner = self.d_entry(sh(2 * m - 3)) @ self.det_m0(m - 2, u)
            if m >= 3:
                inner = inner - (
                    self.f_entry(sh(2 * m - 6)) * self.f_entry(sh(2 * m - 5))
                ) * self.det_m0(m - 3, u)
            out = out - self.f_entry(sh(2 * m - 4)) * inner
        self._memo[key] = out
        return out

    def det(self, m: int, n: int, u) -> np.ndarray:
        """det(m,n)(u) for m, n >= 0 (conjugacy used on the (0, n) edge)."""
        lam = self.p.lam
        if m < 0 or n < 0:
            return np.zeros((self.cache.rep.dimension,) * 2, dtype=complex)
        if n == 0:
            return self.det_m0(m, u)
        if m == 0:
            return self.det_m0(n, u + lam)
        a = self.det_m0(m, u) @ self.det(0, n, u + 2 * m * lam)
        b = (
            self.f_entry(u + (2 * m - 2) * lam) * self.f_entry(u + (2 * m - 1) * lam)
        ) * (self.det_m0(m - 1, u) @ self.det(0, n - 1, u + (2 * m + 2) * lam))
        return a - b

    def det_m0_leibniz(self, m: int, u) -> np.ndarray:
        """Direct expansion of the m x m band determinant (cross-check)."""
        lam = self.p.lam
        ident = self.cache.identity
        size = m
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                k = 2 * (m - 1 - i)
                if j == i:
                    row.append(self.d_entry(u + k * lam))
                elif j == i + 1:
                    row.append(self.d_entry(u + (k - 1) * lam))
                elif j == i + 2:
                    row.append(self.f_entry(u + (k - 3) * lam) * ident)
                elif j == i - 1:
                    row.append(self.f_entry(u + k * lam) * ident)
                else:
                    row.append(None)
            rows.append(row)

        def expand(idx_rows, idx_cols):
            if not idx_rows:
                return ident.copy()
            i = idx_rows[0]
            total = np.zeros_like(ident)
            for pos, j in enumerate(idx_cols):
                entry = rows[i][j]
                if entry is None:
                    continue
                minor = expand(idx_rows[1:], idx_cols[:pos] + idx_cols[pos + 1:])
                total = total + (-1) ** pos * (entry @ minor)
            return total

        return expand(tuple(range(size)), tuple(range(size)))


def det_D(m: int, n: int, u, cache: FusedCache) -> np.ndarray:
    """Determinant-family evaluation of the fused label (m, n)."""
    return DetFamily(cache).det(m, n, u)


def det_prefactor_residual(m: int, u, cache: FusedCache) -> float:
    """Compare det(m,0) against its scalar prefactor times D^{m,0}."""
    fam = DetFamily(cache)
    lhs = fam.det_m0(m, u)
    rhs = ck.det_prefactor_m0(m, u, cache.params) * fused(m, 0, u, cache)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
    return float(np.abs(lhs - rhs).max() / scale)


# ----------------------------------------------------------------------
# Reductions and braid limits
# ----------------------------------------------------------------------

def _fused_with_limit(m, n, u, cache, step=1e-5):
    """Evaluate the fused matrix, averaging around removable singularities."""
    try:
        return fused(m, n, u, cache)
    except PoleError:
        h = step * cmath.exp(0.37j)
        return 0.5 * (fused(m, n, u + h, cache) + fused(m, n, u - h, cache))


def reduction_closed_form(m: int, r: int, p: ModelParams):
    """Scalar value of D^{m,0} at u = (4 - m) lam + r pi/2."""
    lam, wt = p.lam, w_table(p)
    uh = (4 - m) * lam + r * math.pi / 2

    def sh(k):
        return uh + k * lam

    out = f(sh(2 * m - 3), p) * f(sh(2 * m - 2), p)
    out *= cmath.sin(2 * sh(2 * m - 3)) * cmath.sin(2 * sh(2 * m - 2))
    out /= cmath.sin(2 * sh(m - 3)) * cmath.sin(2 * sh(m - 2))
    out *= wt.w(sh(2 * m - 2.5)) / wt.w_m(m, sh(m - 2.5))
    for j in range(m):
        out *= wt.w(-sh(2 * j - 1.5)) * wt.wbar(-sh(2 * j - 2.5))
    return out


def reduction_check(m: int, r: int, p: ModelParams, rep: Representation) -> dict:
    """Residuals of the reduction relations at the special points.

    Checks (i) the closed scalar form of D^{m,0}((4-m) lam + r pi/2), and
    (ii) the two three-term reductions lowering m by 3.
    """
    cache = FusedCache(p, rep)
    lam = p.lam
    uh = (4 - m) * lam + r * math.pi / 2
    lhs = _fused_with_limit(m, 0, uh, cache)
    pred = reduction_closed_form(m, r, p) * cache.identity
    scale = max(np.abs(lhs).max(), np.abs(pred).max(), 1e-300)
    out = {"closed_form": float(np.abs(lhs - pred).max() / scale)}

    if m >= 3:
        mu1, mu4 = ck.mu(1, m, uh, p), ck.mu(4, m, uh, p)
        rhs = (mu4 / mu1) * _fused_with_limit(m - 3, 0, uh, cache)
        scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
        out["three_term_mu"] = float(np.abs(lhs - rhs).max() / scale)
        vh = (1 - m) * lam + r * math.pi / 2
        lhs_v = _fused_with_limit(m, 0, vh, cache)
        nu1, nu4 = ck.nu(1, m, vh, p), ck.nu(4, m, vh, p)
        rhs_v = (nu4 / nu1) * _fused_with_limit(m - 3, 0, vh + 6 * lam, cache)
        scale = max(np.abs(lhs_v).max(), np.abs(rhs_v).max(), 1e-300)
        out["three_term_nu"] = float(np.abs(lhs_v - rhs_v).max() / scale)
    return out


class BraidFamily:
    """Braid limits of the fused hierarchy, built from the braid tangle."""

    def __init__(self, p: ModelParams, rep: Representation):
        self.p = p
        self.rep = rep
        self.base = representation_matrix(braid_transfer(p, 1), rep, p.beta)
        self._memo = {}

    def fused(self, m: int, n: int) -> np.ndarray:
        ident = np.eye(self.rep.dimension, dtype=complex)
        if m < 0 or n < 0:
            return np.zeros_like(ident)
        if n > m:
            m, n = n, m  # conjugacy of braid tangles
        key = (m, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if (m, n) == (0, 0):
            out = ident
        elif (m, n) == (1, 0):
            out = self.base
        elif n == 0:
            out = self.fused(m - 1, 0) @ self.base - self.fused(m - 2, 1)
        elif n == 1:
            out = self.fused(m, 0) @ self.base - self.fused(m - 1, 0)
        else:
            out = self.fused(m, 0) @ self.fused(n, 0) - self.fused(m - 1, 0) @ self.fused(n - 1, 0)
        self._memo[key] = out
        return out


def braid_limit(m: int, n: int, p: ModelParams, rep: Representation) -> np.ndarray:
    """The u-independent braid tangle of the fused label (m, n)."""
    return BraidFamily(p, rep).fused(m, n)


def braid_limit_consistency(m: int, p: ModelParams, rep: Representation,
                            u=12j) -> float:
    """Compare the large-imaginary-u limit of D^{m,0} to the braid tangle."""
    cache = FusedCache(p, rep)
    lam = p.lam
    direct = fused(m, 0, u, cache)
    denom = f(u - 3 * lam, p) * f(u - 2 * lam, p)
    for j in range(m):
        denom *= ck.gamma_braid(u + 2 * j * lam, p)
    approx = cmath.exp(4j * lam * m * p.n_sites) * direct / denom
    target = braid_limit(m, 0, p, rep)
    scale = max(np.abs(target).max(), 1e-300)
    return float(np.abs(approx - target).max() / scale)
