"""Extremal operators over rotation-closed matrix families, and their
discretizations.

The continuous objects: for a family A of symmetric matrices with eigenvalues
in [lam, Lam] containing the identity,

    F-(M) = inf_{A in A} tr(A M),      F+(M) = sup_{A in A} tr(A M),

which for the full ellipticity class reduce to the Pucci extremal operators

    M-(M) = lam * sum(e_i > 0) + Lam * sum(e_i < 0),
    M+(M) = Lam * sum(e_i > 0) + lam * sum(e_i < 0),

and the regularized scalar operator

    G_eps(u) = H_eps(u) F-(D^2 u) + (1 - H_eps(u)) F+(D^2 u)

with H_eps a cubic smoothstep ramping 0 -> 1 on [-eps, eps].

Supported families: the full Pucci class, the identity alone (trace), the
Frobenius ball ||A - I||_F <= r0 (closed form tr(M) -+ r0 ||M||_F), and
explicit finite sets.  Finite sets are not rotation closed and cannot be used
with the wide stencil.

Discretization: either the 9-point central Hessian (u_xy by the four-corner
average) or a wide stencil with K direction pairs at angles k pi / (2K).
Wide-stencil directional second differences use bilinear off-grid samples at
x +- h v; the raw difference of bilinear samples carries a known O(1) bias
-( fx(1-fx) u_xx + fy(1-fy) u_yy ) with fx, fy the sample cell fractions, so
the exact-coefficient axis-difference correction is added back.  All
off-center stencil weights stay nonnegative, so the corrected scheme remains
degenerate-elliptic monotone, with consistency O(h^2 + 1/K^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .grid import GridField

OP_SELECTORS = ("F_minus", "F_plus", "G_eps", "M_minus", "M_plus", "laplacian")
FAMILY_KINDS = ("full_pucci", "identity_only", "frobenius_ball", "finite_set")


@dataclass(frozen=True)
class SymMat2:
    """Symmetric 2x2 matrix [[a, b], [b, c]]."""

    a: float
    b: float
    c: float

    def trace(self) -> float:
        return self.a + self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])


@dataclass(frozen=True)
class Ellipticity:
    """Ellipticity bounds 0 < lam <= 1 <= Lam.

    Lam = 1 is admitted (the Laplacian limit); the normalization pins the
    identity inside the band.
    """

    lam: float
    Lam: float

    def __post_init__(self):
        if not (0.0 < self.lam <= 1.0):
            raise ConfigurationError(f"lambda must satisfy 0 < lambda <= 1, got {self.lam!r}")
        if not (self.Lam >= 1.0) or not np.isfinite(self.Lam):
            raise ConfigurationError(f"Lambda must satisfy Lambda >= 1, got {self.Lam!r}")


def eig2(m: SymMat2) -> tuple[float, float]:
    """Eigenvalues of a symmetric 2x2 matrix, ascending, by the closed form."""
    mean = 0.5 * (m.a + m.c)
    rad = math.hypot(0.5 * (m.a - m.c), m.b)
    return (mean - rad, mean + rad)


def _eig2_arrays(a, b, c):
    mean = 0.5 * (a + c)
    rad = np.sqrt((0.5 * (a - c)) ** 2 + b * b)
    return mean - rad, mean + rad


def pucci_eval(m: SymMat2, ell: Ellipticity, branch: str) -> float:
    """Pucci extremal value M-(m) (branch="minus") or M+(m) (branch="plus")."""
    if branch not in ("minus", "plus"):
        raise ConfigurationError(f"branch must be 'minus' or 'plus', got {branch!r}")
    e1, e2 = eig2(m)
    lo, hi = (ell.lam, ell.Lam) if branch == "minus" else (ell.Lam, ell.lam)
    return lo * (max(e1, 0.0) + max(e2, 0.0)) + hi * (min(e1, 0.0) + min(e2, 0.0))


def _pucci_arrays(e1, e2, ell: Ellipticity, branch: str):
    lo, hi = (ell.lam, ell.Lam) if branch == "minus" else (ell.Lam, ell.lam)
    return lo * (np.maximum(e1, 0.0) + np.maximum(e2, 0.0)) + hi * (
        np.minimum(e1, 0.0) + np.minimum(e2, 0.0)
    )


@dataclass(frozen=True)
class MatrixFamily:
    """A rotation-closed family of symmetric matrices (finite sets excepted).

    kind: one of "full_pucci", "identity_only", "frobenius_ball", "finite_set".
    r0:   Frobenius radius for "frobenius_ball" (0 < r0 < 1, and the
          ellipticity band must cover [1 - r0, 1 + r0]).
    members: the matrices of a "finite_set"; must contain the identity and
          keep all eigenvalues inside [lam, Lam].
    """

    kind: str
    ell: Ellipticity
    r0: float | None = None
    members: tuple[SymMat2, ...] | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ConfigurationError(f"unknown family kind {self.kind!r}")
        if self.kind == "frobenius_ball":
            if self.r0 is None or not (0.0 < self.r0 < 1.0):
                raise ConfigurationError(f"frobenius_ball needs 0 < r0 < 1, got {self.r0!r}")
            if self.ell.lam > 1.0 - self.r0 or self.ell.Lam < 1.0 + self.r0:
                raise ConfigurationError(
                    f"frobenius_ball r0={self.r0} needs lam <= {1 - self.r0:g} and "
                    f"Lam >= {1 + self.r0:g}, got ({self.ell.lam}, {self.ell.Lam})"
                )
        if self.kind == "finite_set":
            if not self.members:
                raise ConfigurationError("finite_set family must not be empty")
            has_id = False
            for mm in self.members:
                e1, e2 = eig2(mm)
                if e1 < self.ell.lam - 1e-12 or e2 > self.ell.Lam + 1e-12:
                    raise ConfigurationError(
                        f"finite_set member {mm} has eigenvalues ({e1:g}, {e2:g}) "
                        f"outside [{self.ell.lam}, {self.ell.Lam}]"
                    )
                if abs(mm.a - 1.0) < 1e-12 and abs(mm.b) < 1e-12 and abs(mm.c - 1.0) < 1e-12:
                    has_id = True
            if not has_id:
                raise ConfigurationError("finite_set family must contain the identity")


def family_extremal(fam: MatrixFamily, m: SymMat2, mode: str) -> float:
    """inf (mode="inf") or sup (mode="sup") of tr(A m) over the family."""
    if mode not in ("inf", "sup"):
        raise ConfigurationError(f"mode must be 'inf' or 'sup', got {mode!r}")
    a = np.asarray(m.a, dtype=float)
    out = _family_extremal_arrays(fam, a, np.asarray(m.b, float), np.asarray(m.c, float), mode)
    return float(out)


def _family_extremal_arrays(fam: MatrixFamily, a, b, c, mode: str):
    if fam.kind == "full_pucci":
        e1, e2 = _eig2_arrays(a, b, c)
        return _pucci_arrays(e1, e2, fam.ell, "minus" if mode == "inf" else "plus")
    if fam.kind == "identity_only":
        return a + c
    if fam.kind == "frobenius_ball":
        fro = np.sqrt(a * a + 2.0 * b * b + c * c)
        return (a + c) - fam.r0 * fro if mode == "inf" else (a + c) + fam.r0 * fro
    # finite_set: tr(A M) = A.a m.a + 2 A.b m.b + A.c m.c for symmetric A, M
    vals = np.stack([mm.a * a + 2.0 * mm.b * b + mm.c * c for mm in fam.members])
    return vals.min(axis=0) if mode == "inf" else vals.max(axis=0)


@dataclass(frozen=True)
class OperatorPair:
    """The (F-, F+) pair sharing one ellipticity band."""

    minus: MatrixFamily
    plus: MatrixFamily

    def __post_init__(self):
        if self.minus.ell != self.plus.ell:
            raise ConfigurationError(
                f"operator pair must share ellipticity, got {self.minus.ell} vs {self.plus.ell}"
            )

    @property
    def ell(self) -> Ellipticity:
        return self.minus.ell

    @staticmethod
    def pucci(ell: Ellipticity) -> "OperatorPair":
        fam = MatrixFamily("full_pucci", ell)
        return OperatorPair(fam, fam)

    @staticmethod
    def identity(ell: Ellipticity) -> "OperatorPair":
        fam = MatrixFamily("identity_only", ell)
        return OperatorPair(fam, fam)

    @staticmethod
    def frobenius(ell: Ellipticity, r0: float) -> "OperatorPair":
        fam = MatrixFamily("frobenius_ball", ell, r0=r0)
        return OperatorPair(fam, fam)


def heaviside_smooth(t, eps: float):
    """Cubic smoothstep regularization of the Heaviside function.

    H_eps(t) = 3 s^2 - 2 s^3 with s = clamp((t + eps) / (2 eps), 0, 1), so
    H(-eps) = 0, H(0) = 1/2, H(eps) = 1, C^1 across the clamps.
    """
    if not (eps > 0.0):
        raise ConfigurationError(f"eps must be positive, got {eps!r}")
    t = np.asarray(t, dtype=float)
    s = np.clip((t + eps) / (2.0 * eps), 0.0, 1.0)
    out = s * s * (3.0 - 2.0 * s)
    return float(out) if out.ndim == 0 else out


def g_epsilon_eval(m: SymMat2, u_value: float, pair: OperatorPair, eps: float) -> float:
    """Pointwise G_eps = H_eps(u) F-(m) + (1 - H_eps(u)) F+(m)."""
    hh = heaviside_smooth(u_value, eps)
    fm = family_extremal(pair.minus, m, "inf")
    fp = family_extremal(pair.plus, m, "sup")
    return hh * fm + (1.0 - hh) * fp


@dataclass(frozen=True)
class SchemeSpec:
    """Finite-difference scheme: 9-point central Hessian or wide stencil.

    kind "central": eigenvalue formulas on the central discrete Hessian.
    kind "wide": K direction pairs at angles k pi / (2K), k = 0..K-1, each
    paired with its orthogonal complement; K even, K >= 4.
    """

    kind: str = "central"
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("central", "wide"):
            raise ConfigurationError(f"scheme kind must be 'central' or 'wide', got {self.kind!r}")
        if self.kind == "wide":
            if not isinstance(self.k, (int, np.integer)) or self.k < 4 or self.k % 2 != 0:
                raise ConfigurationError(
                    f"wide stencil needs an even direction-pair count K >= 4, got {self.k!r}"
                )


def central_hessian(u: np.ndarray, h: float):
    """Interior discrete Hessian entries (u_xx, u_yy, u_xy), shape (nx-2, nx-2).

    u_xy is the four-corner average
    (u[i+1,j+1] - u[i+1,j-1] - u[i-1,j+1] + u[i-1,j-1]) / (4 h^2).
    """
    h2 = h * h
    uxx = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / h2
    uyy = (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / h2
    uxy = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4.0 * h2)
    return uxx, uyy, uxy


def _resolve(op: str, pair: OperatorPair | None, ell: Ellipticity | None, eps):
    """Normalize the (pair, ell) arguments for a selector."""
    if op not in OP_SELECTORS:
        raise ConfigurationError(f"unknown operator selector {op!r}; choose from {OP_SELECTORS}")
    if op in ("F_minus", "F_plus", "G_eps"):
        if pair is None:
            raise ConfigurationError(f"selector {op!r} needs an operator pair")
        ell = pair.ell
    if op in ("M_minus", "M_plus"):
        if ell is None:
            if pair is None:
                raise ConfigurationError(f"selector {op!r} needs ellipticity bounds")
            ell = pair.ell
    if op == "G_eps" and not (eps is not None and eps > 0.0):
        raise ConfigurationError("selector 'G_eps' needs eps > 0")
    return pair, ell


def _central_selector(op, pair, ell, eps, u_int, uxx, uyy, uxy):
    if op == "laplacian":
        return uxx + uyy
    if op in ("M_minus", "M_plus"):
        e1, e2 = _eig2_arrays(uxx, uxy, uyy)
        return _pucci_arrays(e1, e2, ell, "minus" if op == "M_minus" else "plus")
    if op == "F_minus":
        return _family_extremal_arrays(pair.minus, uxx, uxy, uyy, "inf")
    if op == "F_plus":
        return _family_extremal_arrays(pair.plus, uxx, uxy, uyy, "sup")
    # G_eps
    fm = _family_extremal_arrays(pair.minus, uxx, uxy, uyy, "inf")
    fp = _family_extremal_arrays(pair.plus, uxx, uxy, uyy, "sup")
    hh = heaviside_smooth(u_int, eps)
    return hh * fm + (1.0 - hh) * fp


def _dir_second_diff(u: np.ndarray, h: float, dx: float, dy: float, dxx, dyy):
    """Corrected directional second difference along v = (dx, dy), |v| = 1.

    Bilinear samples at x +- h v, plus the closed-form bias correction
    fx(1-fx) dxx + fy(1-fy) dyy (dxx, dyy: axis second differences).
    """
    n = u.shape[0]

    def sample(sx, sy):
        # base offset in {-1, 0} keeps all four corner blocks inside the array
        bx = min(int(math.floor(sx + 1e-12)), 0)
        by = min(int(math.floor(sy + 1e-12)), 0)
        fx = sx - bx
        fy = sy - by
        if fx < 1e-12:
            fx = 0.0
        elif fx > 1.0 - 1e-12:
            fx = 1.0
        if fy < 1e-12:
            fy = 0.0
        elif fy > 1.0 - 1e-12:
            fy = 1.0
        block = lambda ox, oy: u[1 + bx + ox : n - 1 + bx + ox, 1 + by + oy : n - 1 + by + oy]
        return (
            (1 - fx) * (1 - fy) * block(0, 0)
            + fx * (1 - fy) * block(1, 0)
            + (1 - fx) * fy * block(0, 1)
            + fx * fy * block(1, 1)
        ), fx, fy

    plus, fx, fy = sample(dx, dy)
    minus, _, _ = sample(-dx, -dy)
    raw = (plus + minus - 2.0 * u[1:-1, 1:-1]) / (h * h)
    return raw - fx * (1.0 - fx) * dxx - fy * (1.0 - fy) * dyy


def _wide_frames(k: int):
    """Direction pairs (v, v_perp) at angles theta = i pi / (2K)."""
    out = []
    for i in range(k):
        th = i * math.pi / (2 * k)
        c, s = math.cos(th), math.sin(th)
        out.append(((c, s), (-s, c)))
    return out


def _wide_selector(op, pair, ell, eps, u, h, scheme):
    n = u.shape[0]
    h2 = h * h
    dxx = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / h2
    dyy = (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / h2
    if op == "laplacian":
        return dxx + dyy

    def fam_combo(fam: MatrixFamily, mode: str):
        if fam.kind == "finite_set":
            raise ConfigurationError("finite_set families are not rotation closed; "
                                     "wide stencils are unsupported")
        acc = None
        for v, w in _wide_frames(scheme.k):
            d1 = _dir_second_diff(u, h, v[0], v[1], dxx, dyy)
            d2 = _dir_second_diff(u, h, w[0], w[1], dxx, dyy)
            if fam.kind == "identity_only":
                val = d1 + d2
            elif fam.kind == "frobenius_ball":
                fro = np.sqrt(d1 * d1 + d2 * d2)
                val = (d1 + d2) - fam.r0 * fro if mode == "inf" else (d1 + d2) + fam.r0 * fro
            else:  # full_pucci
                lo, hi = (fam.ell.lam, fam.ell.Lam) if mode == "inf" else (fam.ell.Lam, fam.ell.lam)
                val = (
                    lo * (np.maximum(d1, 0.0) + np.maximum(d2, 0.0))
                    + hi * (np.minimum(d1, 0.0) + np.minimum(d2, 0.0))
                )
            if acc is None:
                acc = val
            else:
                acc = np.minimum(acc, val) if mode == "inf" else np.maximum(acc, val)
        return acc

    if op in ("M_minus", "M_plus"):
        fam = MatrixFamily("full_pucci", ell)
        return fam_combo(fam, "inf" if op == "M_minus" else "sup")
    if op == "F_minus":
        return fam_combo(pair.minus, "inf")
    if op == "F_plus":
        return fam_combo(pair.plus, "sup")
    fm = fam_combo(pair.minus, "inf")
    fp = fam_combo(pair.plus, "sup")
    hh = heaviside_smooth(u[1:-1, 1:-1], eps)
    return hh * fm + (1.0 - hh) * fp


def residual_interior(
    u: np.ndarray,
    h: float,
    op: str,
    scheme: SchemeSpec,
    pair: OperatorPair | None = None,
    ell: Ellipticity | None = None,
    eps: float | None = None,
    telemetry: dict | None = None,
) -> np.ndarray:
    """Residual of the selected operator on the interior block, shape (nx-2, nx-2).

    The wide stencil samples at x +- h v, which fits inside the one-node
    Dirichlet ring for every interior node; if a configured step ever needed
    a wider margin, the outer interior band would fall back to the central
    scheme and the affected node count is reported in the telemetry.
    """
    pair, ell = _resolve(op, pair, ell, eps)
    uxx, uyy, uxy = central_hessian(u, h)
    u_int = u[1:-1, 1:-1]
    if scheme.kind == "central":
        if telemetry is not None:
            telemetry["wide_fallback_nodes"] = telemetry.get("wide_fallback_nodes", 0)
        return _central_selector(op, pair, ell, eps, u_int, uxx, uyy, uxy)

    margin = 1  # max sample offset is one node at unit step
    band = margin - 1
    res = _wide_selector(op, pair, ell, eps, u, h, scheme)
    fallback = 0
    if band > 0:
        central = _central_selector(op, pair, ell, eps, u_int, uxx, uyy, uxy)
        m = np.zeros_like(res, dtype=bool)
        m[:band, :] = m[-band:, :] = True
        m[:, :band] = m[:, -band:] = True
        res = np.where(m, central, res)
        fallback = int(m.sum())
    if telemetry is not None:
        telemetry["wide_fallback_nodes"] = telemetry.get("wide_fallback_nodes", 0) + fallback
    return res


def discrete_residual(
    fld: GridField,
    op: str,
    scheme: SchemeSpec,
    pair: OperatorPair | None = None,
    ell: Ellipticity | None = None,
    eps: float | None = None,
    telemetry: dict | None = None,
) -> GridField:
    """Residual field of the selected operator; zero on the Dirichlet ring."""
    if not np.all(np.isfinite(fld.values)):
        raise InputError("field contains non-finite values")
    out = np.zeros_like(fld.values)
    out[1:-1, 1:-1] = residual_interior(
        fld.values, fld.spec.h, op, scheme, pair=pair, ell=ell, eps=eps, telemetry=telemetry
    )
    return GridField(fld.spec, out)
