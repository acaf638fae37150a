"""Special functions and Gauss-Laguerre quadrature.

Everything that feeds a quadrature sum is kept in log space: for D = 300 the
smallest Laguerre weights are below 1e-500 and tau^alpha/Gamma(alpha+1) with
alpha near 18 overflows long before the sum is formed.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._backend import core
from .errors import DomainError, InvalidArgumentError, NumericalError

MAX_ORDER = 512
DEFAULT_ORDER = 300

# eigenvector weights are used where they carry full relative precision
_EIGVEC_WEIGHT_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """D-point Gauss-Laguerre rule for integrals of f(t) e^{-t} over [0, inf)."""

    order: int
    nodes: np.ndarray
    log_weights: np.ndarray

    @property
    def weights(self):
        return np.exp(self.log_weights)

    def integrate(self, log_f):
        """log of sum_d G_d exp(log_f(tau_d))."""
        return log_sum_exp(self.log_weights + log_f(self.nodes))


def gauss_laguerre(order):
    """Nodes and log-weights of the `order`-point Gauss-Laguerre rule.

    Nodes come from the Jacobi matrix of the Laguerre recurrence (diagonal
    2i+1, off-diagonal i) and are polished by Newton steps on L_D. Weights
    are the squared first eigenvector components where those are large and
    tau / (D L_{D-1}(tau))^2 (evaluated with a rescaled recurrence) in the
    tail, where the eigenvector components underflow.
    """
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)):
        raise InvalidArgumentError(f"quadrature order must be an integer, got {order!r}")
    if not 1 <= order <= MAX_ORDER:
        raise InvalidArgumentError(f"quadrature order must be in [1, {MAX_ORDER}], got {order}")
    return _gauss_laguerre(int(order))


@lru_cache(maxsize=32)
def _gauss_laguerre(n):
    if n == 1:
        nodes = np.array([1.0])
        logw = np.array([0.0])
    else:
        i = np.arange(n, dtype=np.float64)
        nodes, vecs = eigh_tridiagonal(2.0 * i + 1.0, i[1:])
        w_eig = vecs[0] ** 2
        for _ in range(3):
            ln, lm, _ = core.laguerre_pair(n, nodes)
            nodes = nodes - nodes * ln / (n * (ln - lm))
        _, lm, lscale = core.laguerre_pair(n, nodes)
        logw = np.log(nodes) - 2.0 * math.log(n) - 2.0 * (np.log(np.abs(lm)) + lscale)
        big = w_eig > _EIGVEC_WEIGHT_FLOOR
        logw[big] = np.log(w_eig[big])
    nodes.setflags(write=False)
    logw.setflags(write=False)
    return QuadratureRule(n, nodes, logw)


def ln_gamma(a):
    """log Gamma(a) for a > 0 (Lanczos approximation)."""
    a = float(a)
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"ln_gamma requires a > 0, got {a}")
    return core.ln_gamma(a)


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Series below x = a + 1, continued fraction above. `x` may be an array.
    """
    a = float(a)
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"reg_lower_gamma requires a > 0, got {a}")
    if np.ndim(x) == 0:
        x = float(x)
        if not x >= 0.0:
            raise DomainError(f"reg_lower_gamma requires x >= 0, got {x}")
        if math.isinf(x):
            return 1.0
        out = core.reg_lower_gamma(a, x)
        if math.isnan(out):
            raise NumericalError(f"P({a}, {x}) did not converge")
        return out
    x = np.asarray(x, dtype=np.float64)
    if not np.all(x >= 0.0):
        raise DomainError("reg_lower_gamma requires x >= 0")
    out = core.reg_lower_gamma_vec(a, np.minimum(x, 1e300))
    if np.isnan(out).any():
        raise NumericalError(f"P({a}, x) did not converge for some x")
    return out


def ln_bessel_k_scaled(order, x):
    """log(e^x K_order(x)) for integer order >= 0 and x > 0; `x` may be an array."""
    order = _check_order(order)
    if np.ndim(x) == 0:
        x = float(x)
        if not x > 0.0:
            raise DomainError(f"Bessel K needs x > 0, got {x}")
        out = core.ln_bessel_k_scaled(order, x)
        if math.isnan(out):
            raise NumericalError(f"K_{order}({x}) did not converge")
        return out
    x = np.asarray(x, dtype=np.float64)
    if not np.all(x > 0.0):
        raise DomainError("Bessel K needs x > 0")
    out = core.ln_bessel_k_scaled_vec(order, x)
    if np.isnan(out).any():
        raise NumericalError(f"K_{order}(x) did not converge for some x")
    return out


def bessel_k_scaled(order, x):
    """e^x K_order(x).

    K_0 and K_1 come from the power series (x <= 2) or Steed's continued
    fraction (x > 2); higher orders from the upward recurrence
    K_{v+1} = K_{v-1} + (2v/x) K_v.
    """
    return np.exp(ln_bessel_k_scaled(order, x)) if np.ndim(x) else math.exp(ln_bessel_k_scaled(order, x))


def _check_order(order):
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 0:
        raise DomainError(f"Bessel order must be a nonnegative integer, got {order!r}")
    return int(order)


def log_sum_exp(terms):
    """log(sum(exp(terms))) without overflow or underflow."""
    terms = np.asarray(terms, dtype=np.float64)
    if terms.size == 0:
        raise InvalidArgumentError("log_sum_exp of an empty array")
    return core.log_sum_exp(terms)
