"""Weight sequences, log-domain caching, and the associated function.

A weight sequence is (M_p) with M_0 = 1 whose ratio sequence
m_p = M_p / M_{p-1} tends to infinity. Everything here is stored and
computed as log M_p: the interesting families (q-geometric ones above all,
where log M_p grows like p^2) overflow double precision before p reaches
a few dozen, while their logarithms stay modest.

The associated function

    M(t) = sup_p log(t^p / M_p),  M(0) = 0,

is evaluated by the counting formula sum_{p: m_p <= t} (log t - log m_p),
which agrees with the brute-force supremum whenever the sequence is
log-convex; tests enforce that agreement against an independent scan.
"""

from __future__ import annotations

import math
import sys

import numpy as np
from scipy.special import gammaln

from .errors import (
    HorizonExceeded,
    IndexOutOfHorizon,
    InvalidParameter,
    NotAWeightSequence,
    RequiresLogConvexity,
)

DEFAULT_HORIZON = 4096
MIN_HORIZON = 64
LC_TOL = 1e-12

# factor the final ratio must exceed the first by, as divergence evidence
_DIVERGENCE_WITNESS = math.log(10.0)
_EXP_OVERFLOW = math.log(sys.float_info.max)

_EXPR_NAMESPACE = {
    "log": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "lgamma": lambda x: gammaln(x),
    "pow": np.power,
    "pi": math.pi,
    "e": math.e,
}


class WeightSequence:
    """A weight sequence cached up to a finite horizon.

    Closed-form kinds (gevrey, qgevrey, expr, interpolated) carry a
    vectorized rule p -> log M_p and may be evaluated beyond the cache;
    table-backed sequences are exactly their data.
    """

    def __init__(self, kind, params, horizon=DEFAULT_HORIZON, log_weight_vec=None,
                 log_values=None):
        if not isinstance(horizon, (int, np.integer)):
            raise InvalidParameter("horizon must be an integer")
        horizon = int(horizon)
        if horizon < MIN_HORIZON:
            raise InvalidParameter(
                "horizon %d below minimum %d" % (horizon, MIN_HORIZON))
        self.kind = str(kind)
        self.params = dict(params)
        self.horizon = horizon
        self._vec = log_weight_vec
        if log_weight_vec is not None:
            values = np.asarray(log_weight_vec(np.arange(horizon + 1, dtype=float)),
                                dtype=float)
        elif log_values is not None:
            values = np.asarray(log_values, dtype=float).copy()
            if values.ndim != 1 or len(values) < horizon + 1:
                raise InvalidParameter(
                    "need at least horizon+1 log-weight values")
            values = values[: horizon + 1]
        else:
            raise InvalidParameter("either a rule or explicit values required")
        self._validate(values)
        self.log_values = values
        self.log_values.flags.writeable = False
        self._log_ratios = np.diff(values)
        self._log_ratios.flags.writeable = False
        self._assoc = None

    def _validate(self, values):
        if not np.all(np.isfinite(values)):
            raise NotAWeightSequence("log-weights must be finite")
        if abs(values[0]) > 1e-12:
            raise NotAWeightSequence(
                "normalization M_0 = 1 violated: log M_0 = %r" % values[0])
        values[0] = 0.0
        ratios = np.diff(values)
        if ratios[-1] <= ratios[0] + _DIVERGENCE_WITNESS:
            raise NotAWeightSequence(
                "ratio sequence does not witness divergence over the horizon "
                "(final/first ratio factor below 10); enlarge the horizon or "
                "check the sequence")

    @property
    def closed_form(self):
        return self._vec is not None

    @property
    def log_ratios(self):
        """log m_p for p = 1..horizon, as an array indexed by p-1."""
        return self._log_ratios

    def log_weight(self, p):
        """log M_p. Beyond the horizon only closed-form kinds can answer."""
        if p < 0:
            raise IndexOutOfHorizon("negative index %d" % p)
        if p <= self.horizon:
            return float(self.log_values[p])
        if self._vec is None:
            raise IndexOutOfHorizon(
                "index %d beyond horizon %d of a table-backed sequence"
                % (p, self.horizon))
        return float(self._vec(np.asarray(float(p))))

    def log_weight_array(self, idx):
        """Vectorized log M over an integer index array."""
        idx = np.asarray(idx)
        if np.any(idx < 0):
            raise IndexOutOfHorizon("negative index")
        if idx.size and int(idx.max()) > self.horizon:
            if self._vec is None:
                raise IndexOutOfHorizon(
                    "index %d beyond horizon %d of a table-backed sequence"
                    % (int(idx.max()), self.horizon))
            return np.asarray(self._vec(idx.astype(float)), dtype=float)
        return self.log_values[idx]

    def ratio(self, p):
        """log m_p = log M_p - log M_{p-1}, defined for p >= 1."""
        if p < 1:
            raise IndexOutOfHorizon("ratios start at p = 1, got %d" % p)
        if p <= self.horizon:
            return float(self._log_ratios[p - 1])
        return self.log_weight(p) - self.log_weight(p - 1)

    def descriptor(self):
        """JSON-ready description: kind, parameters, horizon."""
        params = {}
        for key, val in self.params.items():
            if isinstance(val, np.ndarray):
                params[key] = [float(v) for v in val]
            else:
                params[key] = val
        return {"kind": self.kind, "params": params, "horizon": self.horizon}

    def associated(self):
        """The associated function of this sequence (requires log-convexity)."""
        if self._assoc is None:
            self._assoc = AssociatedFunction(self)
        return self._assoc

    def __repr__(self):
        return "WeightSequence(kind=%r, params=%r, horizon=%d)" % (
            self.kind, self.params, self.horizon)


def lc_second_differences(ws):
    """Second differences of log M_p, whose sign decides log-convexity."""
    lv = ws.log_values
    return lv[2:] - 2.0 * lv[1:-1] + lv[:-2]


def is_log_convex(ws, tol=None):
    """Log-convexity up to rounding: second differences of log M are
    computed in float, so the slack scales with the largest magnitude."""
    d2 = lc_second_differences(ws)
    if tol is None:
        scale = float(np.max(np.abs(ws.log_values))) if len(ws.log_values) else 1.0
        tol = LC_TOL + 16.0 * np.finfo(float).eps * max(1.0, scale)
    return bool(d2.min() >= -tol)


class AssociatedFunction:
    """M(t) = sup_p log(t^p / M_p), evaluated by the counting formula.

    Under log-convexity the supremum is attained at the number of ratios
    not exceeding t, so M(t) = k log t - log M_k with k = #{p: m_p <= t}.
    Arguments beyond the largest cached ratio are refused rather than
    silently truncated.
    """

    def __init__(self, ws):
        if not is_log_convex(ws):
            raise RequiresLogConvexity(
                "associated function needs a log-convex sequence")
        self.owner = ws
        # ratios are nondecreasing up to the lc tolerance; make the search
        # key exactly monotone so searchsorted is well defined
        self._keys = np.maximum.accumulate(ws.log_ratios)
        self._top = float(self._keys[-1])

    @property
    def max_argument(self):
        """Largest admissible t (the final cached ratio). Steep sequences
        push the last ratio past float range; every float is admissible
        then and the bound reads infinite."""
        if self._top >= _EXP_OVERFLOW:
            return math.inf
        return math.exp(self._top)

    def value(self, t):
        if not (t >= 0.0):
            raise InvalidParameter("associated function needs t >= 0")
        if t == 0.0:
            return 0.0
        lnt = math.log(t)
        if lnt > self._top:
            raise HorizonExceeded(
                "t = %g beyond the largest cached ratio exp(%g)" % (t, self._top))
        k = int(np.searchsorted(self._keys, lnt, side="right"))
        return k * lnt - float(self.owner.log_values[k])

    def values(self, ts):
        """Vectorized evaluation over an array of admissible arguments."""
        ts = np.asarray(ts, dtype=float)
        if np.any(ts < 0.0):
            raise InvalidParameter("associated function needs t >= 0")
        out = np.zeros_like(ts)
        pos = ts > 0.0
        lnt = np.log(ts[pos])
        if lnt.size and lnt.max() > self._top:
            raise HorizonExceeded("argument beyond the largest cached ratio")
        k = np.searchsorted(self._keys, lnt, side="right")
        out[pos] = k * lnt - self.owner.log_values[k]
        return out

    def __call__(self, t):
        return self.value(t)


def associated_function(ws, t):
    """Value of the associated function of ws at t."""
    return ws.associated().value(t)


def gevrey(alpha, horizon=DEFAULT_HORIZON):
    """Factorial-power sequence M_p = (p!)^alpha, alpha > 0."""
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise InvalidParameter("gevrey exponent must be positive, got %r" % alpha)
    vec = lambda ps: alpha * gammaln(np.asarray(ps) + 1.0)
    return WeightSequence("gevrey", {"alpha": alpha}, horizon, log_weight_vec=vec)


def q_gevrey(q, horizon=DEFAULT_HORIZON):
    """Geometric-square sequence M_p = q^(p^2), q > 1."""
    q = float(q)
    if not (math.isfinite(q) and q > 1.0):
        raise InvalidParameter("qgevrey base must exceed 1, got %r" % q)
    lnq = math.log(q)
    vec = lambda ps: np.square(np.asarray(ps, dtype=float)) * lnq
    return WeightSequence("qgevrey", {"q": q}, horizon, log_weight_vec=vec)


def from_table(log_values, horizon=None):
    """Sequence given by explicit log M_p values (index 0..horizon)."""
    log_values = np.asarray(log_values, dtype=float)
    if horizon is None:
        horizon = len(log_values) - 1
    return WeightSequence("table", {"log_values": log_values}, horizon,
                          log_values=log_values)


def from_expr(expression, horizon=DEFAULT_HORIZON):
    """Sequence given by a closed-form rule for log M_p in the variable p.

    The rule is evaluated with numpy semantics in a namespace restricted to
    log, exp, sqrt, lgamma, pow, pi, e. Example: "2*lgamma(p+1)".
    """
    code = compile(str(expression), "<weight-rule>", "eval")
    names = set(code.co_names) - set(_EXPR_NAMESPACE) - {"p"}
    if names:
        raise InvalidParameter(
            "unknown names in weight rule: %s" % ", ".join(sorted(names)))

    def vec(ps):
        env = dict(_EXPR_NAMESPACE)
        env["p"] = np.asarray(ps, dtype=float)
        return np.asarray(eval(code, {"__builtins__": {}}, env), dtype=float)

    return WeightSequence("expr", {"expression": str(expression)}, horizon,
                          log_weight_vec=vec)


def make_sequence(descriptor, horizon=None):
    """Build a sequence from a config descriptor {kind, params, horizon?}."""
    if not isinstance(descriptor, dict):
        raise InvalidParameter("sequence descriptor must be a mapping")
    kind = descriptor.get("kind")
    params = descriptor.get("params", {})
    if horizon is None:
        horizon = descriptor.get("horizon", DEFAULT_HORIZON)
    if kind == "gevrey":
        return gevrey(params["alpha"], horizon)
    if kind == "qgevrey":
        return q_gevrey(params["q"], horizon)
    if kind == "table":
        values = params.get("log_values")
        if values is None:
            raise InvalidParameter("table sequences need params.log_values")
        return from_table(values, min(horizon, len(values) - 1))
    if kind == "expr":
        return from_expr(params["expression"], horizon)
    raise InvalidParameter("unknown sequence kind %r" % kind)
