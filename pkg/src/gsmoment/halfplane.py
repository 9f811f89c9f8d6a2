"""Holomorphic extensions of half-line test functions.

f(z) = integral over (0, inf) of phi(t) e^{itz} dt is holomorphic on the
open upper half plane and continuous up to the boundary; its derivatives
come from differentiating under the integral, f^(p)(z) = integral of
(it)^p phi(t) e^{itz} dt, never from finite differences. At z = 0 this
collapses to i^p times the p-th moment of phi, which ties the boundary
jet of f to a moment sequence.

Evaluation uses adaptive quadrature on the real and imaginary parts; for
strongly oscillatory arguments (|Re z| large) it switches to the Fourier
weight integrator. A separate arbitrary-precision path exists for
stencil checks whose budgets sit below quadrature noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from mpmath import mp
from scipy.integrate import IntegrationWarning, quad

from .atoms import FLAT, TestFunction
from .errors import (ExtrapolationDivergence, InvalidParameter,
                     UnsupportedSupport)
from .solver import MomentSolution, SequenceTarget, solve_moments
from .transforms import sign_twist

DERIVATIVE_CAP = 32
_OSCILLATORY_CUT = 5.0
_SPLIT_POINT = 100.0
_INNER_POINTS = (1.0, 5.0, 25.0, 80.0)

_I_POWER = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _quad_pair(fn, oscillation, extra_points=()):
    """Integrate fn over (0, inf) against cos(w t) and sin(w t).

    The integrand is renormalized to unit peak first; QUADPACK's absolute
    error floor would otherwise accept garbage for integrals whose whole
    scale is far from 1."""
    pts = sorted(set(_INNER_POINTS) | {p for p in extra_points
                                       if 0.0 < p < _SPLIT_POINT})
    probes = np.concatenate([np.geomspace(1e-4, 99.0, 40), np.array(pts)])
    peak = max(abs(fn(t)) for t in probes)
    if peak == 0.0 or not math.isfinite(peak):
        return 0.0, 0.0
    scaled = lambda t: fn(t) / peak
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if abs(oscillation) > _OSCILLATORY_CUT:
            c, _ = quad(scaled, 0.0, np.inf, weight="cos", wvar=oscillation,
                        limit=400)
            s, _ = quad(scaled, 0.0, np.inf, weight="sin", wvar=oscillation,
                        limit=400)
            return peak * c, peak * s
        if oscillation == 0.0:
            c1, _ = quad(scaled, 0.0, _SPLIT_POINT, points=pts, limit=400)
            c2, _ = quad(scaled, _SPLIT_POINT, np.inf, limit=200)
            return peak * (c1 + c2), 0.0
        cos_fn = lambda t: scaled(t) * math.cos(oscillation * t)
        sin_fn = lambda t: scaled(t) * math.sin(oscillation * t)
        out = []
        for g in (cos_fn, sin_fn):
            v1, _ = quad(g, 0.0, _SPLIT_POINT, points=pts, limit=400)
            v2, _ = quad(g, _SPLIT_POINT, np.inf, limit=200)
            out.append(peak * (v1 + v2))
        return out[0], out[1]


class HalfPlaneFunction:
    """f(z) = integral of phi(t) e^{itz} over (0, inf), Im z >= 0."""

    def __init__(self, source):
        if isinstance(source, MomentSolution):
            self._solution = source
            phi = source.function
        else:
            self._solution = None
            phi = source
        if not isinstance(phi, TestFunction):
            raise InvalidParameter("source must be a test function or a "
                                   "moment solution")
        if phi.support != "halfline":
            raise UnsupportedSupport(
                "the transform needs a function supported on (0, inf)")
        self.phi = phi

    # -------------------------------------------------------- float path

    def eval_derivative(self, z, p=0):
        """f^(p)(z) by quadrature of the differentiated integrand."""
        z = complex(z)
        if z.imag < 0.0:
            raise InvalidParameter("the domain is the closed upper half plane")
        if not isinstance(p, int) or p < 0:
            raise InvalidParameter("derivative order must be an integer >= 0")
        if p > DERIVATIVE_CAP:
            raise InvalidParameter(
                "derivative order %d beyond cap %d" % (p, DERIVATIVE_CAP))
        x, y = z.real, z.imag
        phi = self.phi

        def part(selector):
            def fn(t):
                return (t ** p) * selector(complex(phi(t))) * math.exp(-y * t)
            return fn

        extra = ()
        if y > 50.0:
            # strong vertical decay concentrates the mass near 1/sqrt(y)
            spike = 1.0 / math.sqrt(y)
            extra = (0.25 * spike, spike, 4.0 * spike)
        cr, sr = _quad_pair(part(_re), x, extra)
        if phi.is_real:
            inner = complex(cr, sr)
        else:
            ci, si = _quad_pair(part(_im), x, extra)
            inner = complex(cr, sr) + 1j * complex(ci, si)
        return _i_power(p) * inner

    def __call__(self, z):
        return self.eval_derivative(z, 0)

    def modulus_bound(self):
        """integral of |phi|, a uniform bound for |f| on the half plane."""
        total = 0.0
        for atom, coeff in self.phi.atoms:
            bare = TestFunction([(atom.kind, atom.k, 1.0, 0.0)])
            total += abs(coeff) * bare.moment(0)
        return total

    # ---------------------------------------------------- boundary values

    def boundary_derivative(self, p):
        """f^(p)(0) = i^p mu_p(phi), closed form."""
        if self._solution is not None:
            mu = complex(self._solution.moment_closed(p))
        else:
            mu = self.phi.moment(p)
        return _i_power(p) * mu

    def boundary_borel(self, p, start=0.05, steps=6, tolerance=1e-5):
        """Extrapolate f^(p)(i y) down the imaginary axis to y = 0 and
        cross-check the closed boundary value. Polynomial (Neville)
        extrapolation over y_j = start * 2^-j."""
        ys = [start * (0.5 ** j) for j in range(steps)]
        vals = [self.eval_derivative(complex(0.0, y), p) for y in ys]
        limit = _neville_at_zero(ys, vals)
        closed = self.boundary_derivative(p)
        gap = abs(limit - closed) / max(1.0, abs(closed))
        if gap > tolerance:
            raise ExtrapolationDivergence(
                "boundary extrapolation off by %.3e (tolerance %.1e)"
                % (gap, tolerance))
        return {"order": p, "extrapolated": limit, "closed_form": closed,
                "relative_gap": gap}

    # ------------------------------------------------- high-precision path

    def eval_mp(self, z, p=0, dps=30):
        """f^(p)(z) by arbitrary-precision quadrature."""
        zc = complex(z)
        if zc.imag < 0.0:
            raise InvalidParameter("the domain is the closed upper half plane")
        sol = self._solution
        atoms = self.phi.atoms
        with mp.workdps(dps):
            zm = mp.mpc(zc)

            def phi_mp(t):
                if sol is not None:
                    return sol.eval_mp(t)
                if t <= 0:
                    return mp.mpf(0)
                env = mp.exp(-t - 1 / t)
                acc = mp.mpf(0)
                for atom, coeff in atoms:
                    acc += mp.mpc(coeff) * t ** atom.k
                return acc * env

            def integrand(t):
                return (1j * t) ** p * phi_mp(t) * mp.exp(1j * t * zm)

            pts = [0, 1, 5, 25, 90, mp.inf]
            degree = 6
            if zc.imag > 50.0:
                # mass concentrates in a bump near 1/sqrt(Im z) whose
                # relative width shrinks like Im(z)^(-1/4); tanh-sinh
                # aliases narrow interior peaks, so subdivide until the
                # peak fills its segment at every scale
                spike = 1.0 / math.sqrt(zc.imag)
                w = zc.imag ** -0.25 / math.sqrt(2.0)
                offs = [1.0 - 6 * w, 1.0 - 2.5 * w, 1.0 - w,
                        1.0 + w, 1.0 + 2.5 * w, 1.0 + 6 * w]
                local = {f * spike for f in [0.25, 4.0] + offs if f > 0.0}
                pts = sorted({p for p in pts[:-1] if p > 4.0 * spike}
                             | {0.0} | local) + [mp.inf]
                degree = 8
            return mp.quad(integrand, pts, maxdegree=degree)


def _re(v):
    return v.real


def _im(v):
    return v.imag


def _i_power(p):
    return _I_POWER[p % 4]


def _neville_at_zero(xs, ys):
    vals = list(ys)
    n = len(vals)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            vals[i] = (x1 * vals[i] - x0 * vals[i + 1]) / (x1 - x0)
    return vals[0]


def holomorphy_residual(f, z, delta=5e-5, dps=30):
    """Central-difference Cauchy-Riemann defect at z; for the transform
    this equals delta^2 f'''(z) / 3 up to higher order, so it vanishes
    with delta exactly when f is holomorphic there. Uses the
    high-precision path because the defect sits far below float
    quadrature noise."""
    zc = complex(z)
    if zc.imag - delta < 0.0:
        raise InvalidParameter("stencil dips below the boundary; raise Im z "
                               "or shrink delta")
    with mp.workdps(dps):
        d = mp.mpf(delta)
        fx1 = f.eval_mp(zc + delta, 0, dps=dps)
        fx0 = f.eval_mp(zc - delta, 0, dps=dps)
        fy1 = f.eval_mp(complex(zc.real, zc.imag + delta), 0, dps=dps)
        fy0 = f.eval_mp(complex(zc.real, zc.imag - delta), 0, dps=dps)
        res = (fx1 - fx0) / (2 * d) + 1j * (fy1 - fy0) / (2 * d)
        return complex(res)


def uhf_norm(f, ws, h, p_cap=8, radii=None, angles=32):
    """sup over p <= p_cap and a polar grid in the open half plane of
    h^p |f^(p)(z)| / M_p."""
    if p_cap > DERIVATIVE_CAP:
        raise InvalidParameter("order cap beyond %d" % DERIVATIVE_CAP)
    if radii is None:
        radii = np.geomspace(1e-3, 1e3, 12)
    lnh = math.log(h)
    logw = [float(ws.log_weight(p)) for p in range(p_cap + 1)]
    best = -math.inf
    for p in range(p_cap + 1):
        for r in radii:
            for j in range(angles):
                theta = math.pi * (j + 0.5) / angles
                z = complex(r * math.cos(theta), r * math.sin(theta))
                v = abs(f.eval_derivative(z, p))
                if v <= 0.0:
                    continue
                best = max(best, p * lnh - logw[p] + math.log(v))
    return 0.0 if best == -math.inf else float(np.exp(best))


@dataclass
class BorelRittResult:
    function: HalfPlaneFunction
    solution: MomentSolution
    residuals: tuple

    def to_dict(self):
        return {"solution": self.solution.to_dict(),
                "residuals": list(self.residuals)}


def borel_ritt_solve(entries, ws, h=1.0, override_gamma2=False,
                     tolerance=1e-5):
    """Construct f on the half plane with boundary jet f^(p)(0) = a_p.

    The quarter-turn twist maps the jet to a moment target: solving
    moments for (-i)^p a_p and transforming gives i^p mu_p = a_p. The
    boundary jet is then verified by arbitrary-precision quadrature."""
    entries = tuple(complex(v) for v in entries)
    twisted = sign_twist(entries)
    target = SequenceTarget(tuple(twisted), h=h)
    sol = solve_moments(target, ws, override_gamma2=override_gamma2)
    f = HalfPlaneFunction(sol)
    residuals = []
    for p, a_p in enumerate(entries):
        mu = sol.moment_quadrature(p)
        with mp.workdps(40):
            got = mp.mpc(_i_power(p)) * mu
            rel = float(abs(got - mp.mpc(a_p))) / max(1.0, abs(a_p))
        residuals.append(rel)
    worst = max(residuals)
    if worst > tolerance:
        raise ExtrapolationDivergence(
            "boundary jet residual %.3e above tolerance %.1e"
            % (worst, tolerance))
    return BorelRittResult(f, sol, tuple(residuals))
