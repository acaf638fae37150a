"""Parameter sweeps over analytic, asymptotic and Monte Carlo estimators."""
import csv
from dataclasses import dataclass, replace
import io
import math
import os
import tempfile
from typing import Optional, Sequence, Union

from .. import analytic as an
from .. import model
from .. import montecarlo as mc
from ..errors import ConfigError, DomainError, FormatError, InvalidArgumentError, NumericalError
from ..specfun import gauss_laguerre

SWEEP_VARS = ("ps_dbm", "m_elements", "x_ris", "kappa", "varpi")
METRICS = ("sop_data", "sop_backscatter", "sop_system", "throughput", "energy_eff")
METHODS = ("analytic", "asymptotic", "mc")
SICS = ("ipsic", "psic")
BASELINES = ("no_ris",)
SOP_METRICS = ("sop_data", "sop_backscatter", "sop_system")

CSV_COLUMNS = ("sweep_var", "value", "metric", "method", "signal", "sic",
               "estimate", "std_err", "trials", "seed")

_SIGNAL = {"sop_data": "data", "sop_backscatter": "backscatter", "sop_system": "system",
           "throughput": "network", "energy_eff": "network"}


@dataclass(frozen=True)
class SweepSpec:
    sweep_var: str
    values: tuple
    metrics: tuple
    methods: tuple = ("analytic", "mc")
    sic: tuple = ("ipsic",)
    baseline: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for name in ("metrics", "methods", "sic", "baseline"):
            object.__setattr__(self, name, tuple(dict.fromkeys(getattr(self, name))))
        if self.sweep_var not in SWEEP_VARS:
            raise InvalidArgumentError(f"sweep variable must be one of {SWEEP_VARS}, got {self.sweep_var!r}")
        if not self.values:
            raise InvalidArgumentError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise InvalidArgumentError("sweep values must be strictly ascending")
        if any(not math.isfinite(v) for v in self.values):
            raise InvalidArgumentError("sweep values must be finite")
        for name, allowed in (("metrics", METRICS), ("methods", METHODS), ("sic", SICS), ("baseline", BASELINES)):
            got = getattr(self, name)
            bad = [g for g in got if g not in allowed]
            if bad:
                raise InvalidArgumentError(f"unknown {name}: {bad}; allowed {allowed}")
        if not self.metrics:
            raise InvalidArgumentError("sweep needs at least one metric")
        if not self.methods:
            raise InvalidArgumentError("sweep needs at least one method")
        if not self.sic:
            raise InvalidArgumentError("sweep needs at least one SIC level")


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    value: float
    metric: str
    method: str
    signal: str
    sic: str
    estimate: float
    std_err: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def sort_key(self):
        return (self.value, self.metric, self.method, self.signal, self.sic)

    def as_fields(self):
        opt = lambda v: "" if v is None else repr(v)
        return [self.sweep_var, repr(self.value), self.metric, self.method, self.signal,
                self.sic, repr(self.estimate), opt(self.std_err), opt(self.trials), opt(self.seed)]


def apply_sweep_value(s, var, value):
    """Scenario with one sweep coordinate set."""
    try:
        if var == "ps_dbm":
            return replace(s, ps_dbm=value)
        if var == "m_elements":
            if not float(value).is_integer():
                raise InvalidArgumentError(f"M must be an integer, got {value}")
            return model.with_elements(s, int(value))
        if var == "x_ris":
            return model.with_ris_position(s, value)
        if var == "kappa":
            return replace(s, kappa=value)
        if var == "varpi":
            return replace(s, varpi=value)
    except DomainError as e:
        raise InvalidArgumentError(str(e)) from e
    raise InvalidArgumentError(f"unknown sweep variable {var!r}")


def _analytic_rows(s, spec, value, method, rule):
    dp = model.derive(s)
    out = []
    asym = method == "asymptotic"

    def emit(metric, sic, fn):
        try:
            est = fn()
        except (NumericalError, DomainError):
            # e.g. the pSIC series at low SNR, or the ipSIC floor at varpi = 0
            return
        signal = "system_indep" if metric == "sop_system" else _SIGNAL[metric]
        out.append(ResultRow(spec.sweep_var, value, metric, method, signal, sic, float(est)))

    def p_data():
        return an.asym_sop_data(s, dp, rule) if asym else an.sop_data(s, dp, rule)

    def p_back(sic):
        return an.asym_sop_backscatter(s, dp, sic, rule) if asym else an.sop_backscatter(s, dp, sic, rule)

    def thr(sic):
        return (1.0 - p_data()) * s.r_u + (1.0 - p_back(sic)) * s.r_c

    for metric in spec.metrics:
        if metric == "sop_data":
            emit(metric, "none", p_data)
            continue
        for sic in spec.sic:
            if metric == "sop_backscatter":
                emit(metric, sic, lambda: p_back(sic))
            elif metric == "sop_system":
                if not asym:
                    emit(metric, sic, lambda: an.sop_system_indep(s, dp, sic, rule))
            elif metric == "throughput":
                emit(metric, sic, lambda: thr(sic))
            elif metric == "energy_eff":
                emit(metric, sic, lambda: thr(sic) / (model.total_power(s) / 1000.0))
    return out


def _mc_rows(s, spec, value, method, counts):
    out = []
    kw = dict(trials=counts.trials, seed=counts.seed)
    watts = model.total_power(s) / 1000.0

    def add(metric, signal, sic, est, se):
        out.append(ResultRow(spec.sweep_var, value, metric, method, signal, sic, float(est), float(se), **kw))

    for metric in spec.metrics:
        if metric == "sop_data":
            e = counts.estimate("data")
            add(metric, "data", "none", e.p_hat, e.std_err)
            continue
        for sic in spec.sic:
            if metric in ("sop_backscatter", "sop_system"):
                e = counts.estimate(_SIGNAL[metric], sic)
                add(metric, _SIGNAL[metric], sic, e.p_hat, e.std_err)
            else:
                t, se = mc.throughput_estimate(counts, s.r_u, s.r_c, sic)
                if metric == "energy_eff":
                    t, se = t / watts, se / watts
                add(metric, "network", sic, t, se)
    return out


def sweep_rows(s, spec, workers=1):
    """All result rows for a sweep, sorted by (value, metric, method, signal, sic)."""
    rule = gauss_laguerre(s.quad_d)
    rows = []
    for value in spec.values:
        sv = apply_sweep_value(s, spec.sweep_var, value)
        for method in spec.methods:
            if method == "mc":
                counts = mc.simulate_outages(sv, workers=workers)
                rows += _mc_rows(sv, spec, value, "mc", counts)
                if "no_ris" in spec.baseline:
                    counts = mc.simulate_outages(sv, workers=workers, no_ris=True)
                    rows += _mc_rows(sv, spec, value, "mc_no_ris", counts)
            else:
                rows += _analytic_rows(sv, spec, value, method, rule)
    rows.sort(key=ResultRow.sort_key)
    return rows


def format_csv(rows, s=None):
    buf = io.StringIO()
    if s is not None:
        buf.write(f"# quad_d={s.quad_d} trials={s.trials} seed={s.seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.as_fields())
    return buf.getvalue()


def write_atomic(path, text):
    """Write via a temp file in the target directory and rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_sweep(config: Union[str, os.PathLike, model.Scenario], spec: SweepSpec, out_path=None,
              workers=1, overrides=None):
    """Evaluate the sweep and (optionally) write the CSV atomically."""
    s = config if isinstance(config, model.Scenario) else model.load_config(config)
    if overrides:
        try:
            s = replace(s, **overrides)
        except InvalidArgumentError as e:
            raise ConfigError(str(e)) from e
    rows = sweep_rows(s, spec, workers)
    if out_path is not None:
        write_atomic(out_path, format_csv(rows, s))
    return rows


def _opt(conv, v):
    return None if v == "" else conv(v)


def read_csv(path) -> Sequence[ResultRow]:
    """Parse a result CSV; raises FormatError on any schema mismatch."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise FormatError(f"{path}: header must be {','.join(CSV_COLUMNS)}")
    rows = []
    for n, rec in enumerate(reader, 2):
        if len(rec) != len(CSV_COLUMNS):
            raise FormatError(f"{path}:{n}: expected {len(CSV_COLUMNS)} fields, got {len(rec)}")
        try:
            rows.append(ResultRow(rec[0], float(rec[1]), rec[2], rec[3], rec[4], rec[5], float(rec[6]),
                                  _opt(float, rec[7]), _opt(int, rec[8]), _opt(int, rec[9])))
        except ValueError as e:
            raise FormatError(f"{path}:{n}: {e}") from e
    return rows
