"""Scenario configuration, unit conversion, geometry and power model.

Internally every power is linear mW and every variance linear; dB/dBm only
appear in the Scenario fields and in config files.
"""
from dataclasses import dataclass, fields, replace
import math
from typing import Optional

from .errors import ConfigError, DomainError, InvalidArgumentError

# Fixed node positions for the RIS placement sweep (metres)
BS_POS = (0.0, 0.0)
LU_POS = (20.0, 0.0)
EVE_POS = (30.0, 0.0)
RIS_HEIGHT = 2.0
X_RIS_RANGE = (0.0, 30.0)


@dataclass(frozen=True)
class Scenario:
    M: int = 12
    P: int = 2
    Q: int = 6
    kappa: float = 0.5
    varpi: float = 0.01
    lambda_: float = 2.0
    eta_db: float = -30.0
    d_sr: float = 20.0
    d_ru: float = 10.0
    d_su: float = 20.0
    d_se: float = 30.0
    d_re: float = 20.0
    sigma_u_dbm: float = -90.0
    sigma_e_dbm: float = -90.0
    ps_dbm: float = 30.0
    rho_e_db: Optional[float] = 20.0
    r_u: float = 0.5
    r_c: float = 0.1
    omega_ipu_dbm: float = -90.0
    omega_ipe_dbm: float = -90.0
    theta_amp: float = 0.32
    p_u_dbm: float = 10.0
    p_s_hw_dbm: float = 4.0
    p_ris_hw_dbm: float = 10.0
    p_ambc_hw_dbm: float = -31.0
    quad_d: int = 300
    trials: int = 1_000_000
    seed: int = 20240611

    def __post_init__(self):
        for name in ("M", "P", "Q", "quad_d", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InvalidArgumentError(f"{name} must be a positive integer, got {v!r}")
        if self.M != self.P * self.Q:
            raise InvalidArgumentError(f"M = {self.M} must equal P*Q = {self.P * self.Q}")
        if not 0.0 < self.kappa < 1.0:
            raise InvalidArgumentError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not 0.0 <= self.varpi <= 1.0:
            raise InvalidArgumentError(f"varpi must lie in [0, 1], got {self.varpi}")
        if not 0.0 < self.lambda_ <= 6.0:
            raise InvalidArgumentError(f"path-loss exponent must lie in (0, 6], got {self.lambda_}")
        for name in ("d_sr", "d_ru", "d_su", "d_se", "d_re"):
            d = getattr(self, name)
            if not (d > 0.0 and math.isfinite(d)):
                raise InvalidArgumentError(f"{name} must be a positive distance, got {d}")
        if not (self.r_u >= 0.0 and self.r_c >= 0.0):
            raise InvalidArgumentError("target rates must be nonnegative")
        if self.quad_d > 512:
            raise InvalidArgumentError(f"quad_d must be at most 512, got {self.quad_d}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise InvalidArgumentError(f"seed must be a nonnegative integer, got {self.seed!r}")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and math.isnan(v):
                raise InvalidArgumentError(f"{f.name} is NaN")


@dataclass(frozen=True)
class DerivedParams:
    Omega_u: float
    Omega_sr: float
    Omega_ru: float
    Omega_e: float
    Omega_re: float
    Omega_ipu: float
    Omega_ipe: float
    rho: float
    rho_e: float
    alpha: float
    beta: float
    sigma_u_mw: float
    sigma_e_mw: float
    ps_mw: float


def dbm_to_mw(x_dbm):
    """10^(x/10) mW."""
    return 10.0 ** (x_dbm / 10.0)


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def path_gain(d, eta_db, lam):
    """Large-scale variance eta * d^-lambda (1 m reference distance)."""
    if not d > 0.0:
        raise DomainError(f"distance must be positive, got {d}")
    return db_to_linear(eta_db) * d ** (-lam)


def gamma_fit(M, Omega_sr, Omega_ru):
    """(alpha, beta) of the Gamma approximation to sum_m |h_sr^m||h_ru^m|.

    Moment matching: each product of unit Rayleighs has mean pi/4 and
    variance 1 - pi^2/16 (times sqrt(Omega_sr Omega_ru)).
    """
    pi2 = math.pi ** 2
    alpha = pi2 * M / (16.0 - pi2) - 1.0
    beta = (4.0 / math.pi - math.pi / 4.0) * math.sqrt(Omega_sr * Omega_ru)
    return alpha, beta


def derive(s: Scenario) -> DerivedParams:
    g = lambda d: path_gain(d, s.eta_db, s.lambda_)
    Omega_sr, Omega_ru = g(s.d_sr), g(s.d_ru)
    alpha, beta = gamma_fit(s.M, Omega_sr, Omega_ru)
    sig_u = dbm_to_mw(s.sigma_u_dbm)
    sig_e = dbm_to_mw(s.sigma_e_dbm)
    ps = dbm_to_mw(s.ps_dbm)
    rho_e = db_to_linear(s.rho_e_db) if s.rho_e_db is not None else ps / sig_e
    return DerivedParams(
        Omega_u=g(s.d_su), Omega_sr=Omega_sr, Omega_ru=Omega_ru,
        Omega_e=g(s.d_se), Omega_re=g(s.d_re),
        Omega_ipu=dbm_to_mw(s.omega_ipu_dbm), Omega_ipe=dbm_to_mw(s.omega_ipe_dbm),
        rho=ps / sig_u, rho_e=rho_e, alpha=alpha, beta=beta,
        sigma_u_mw=sig_u, sigma_e_mw=sig_e, ps_mw=ps,
    )


def ris_position_geometry(x_ris):
    """(d_sr, d_ru, d_re) for an RIS at (x_ris, 2) with BS, LU, Eve on the x axis."""
    lo, hi = X_RIS_RANGE
    if not lo <= x_ris <= hi:
        raise InvalidArgumentError(f"x_ris must lie in [{lo}, {hi}], got {x_ris}")
    ris = (x_ris, RIS_HEIGHT)
    return math.dist(BS_POS, ris), math.dist(ris, LU_POS), math.dist(ris, EVE_POS)


def with_ris_position(s: Scenario, x_ris) -> Scenario:
    d_sr, d_ru, d_re = ris_position_geometry(x_ris)
    return replace(s, d_sr=d_sr, d_ru=d_ru, d_re=d_re)


def with_elements(s: Scenario, M) -> Scenario:
    """Resize the RIS keeping the number of on-off blocks P."""
    if M % s.P:
        raise InvalidArgumentError(f"M = {M} is not a multiple of P = {s.P}")
    return replace(s, M=M, Q=M // s.P)


def total_power(s: Scenario):
    """Total consumption in mW: P_s/theta plus the four static terms."""
    if not s.theta_amp > 0.0:
        raise DomainError(f"amplifier efficiency must be positive, got {s.theta_amp}")
    static = (s.p_u_dbm, s.p_s_hw_dbm, s.p_ris_hw_dbm, s.p_ambc_hw_dbm)
    return dbm_to_mw(s.ps_dbm) / s.theta_amp + sum(dbm_to_mw(p) for p in static)


# ---------------------------------------------------------------------------
# key = value config files

_INT_KEYS = {"M", "P", "Q", "quad_d", "trials", "seed"}
# the path-loss exponent is spelled `lambda` in config files
_KEY_ALIAS = {"lambda": "lambda_"}
_FIELD_KEY = {v: k for k, v in _KEY_ALIAS.items()}


def _parse_value(key, raw):
    if key == "rho_e_db" and raw.lower() in ("", "none"):
        return None
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number") from None
    if key in _INT_KEYS:
        if not v.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        return int(v)
    return v


def parse_config(text, base: Optional[Scenario] = None) -> Scenario:
    """Scenario from `key = value` lines; unset keys keep the base (default) values."""
    known = {f.name for f in fields(Scenario)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (p.strip() for p in line.split("=", 1))
        name = _KEY_ALIAS.get(key, key)
        if name not in known or key in _FIELD_KEY:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[name] = _parse_value(key, raw)
    try:
        return replace(base or Scenario(), **values)
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e


def load_config(path, base: Optional[Scenario] = None) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text, base)


def format_config(s: Scenario) -> str:
    """Inverse of parse_config (repr keeps floats exact)."""
    lines = []
    for f in fields(s):
        v = getattr(s, f.name)
        lines.append(f"{_FIELD_KEY.get(f.name, f.name)} = {'none' if v is None else repr(v)}")
    return "\n".join(lines) + "\n"
