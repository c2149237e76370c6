"""Asymptotic decoy-state BB84 secret-key rate versus total channel loss.

Channel model (loss in dB, detector efficiency kept in the device)::

    eta   = eta_det * 10**(-loss/10)
    Q_mu  = Y0 + 1 - exp(-eta*mu)
    E_mu  = (e0*Y0 + e_det*(1 - exp(-eta*mu))) / Q_mu
    Q_1   = (Y0 + eta) * mu * exp(-mu)
    e_1   = (e0*Y0 + e_det*eta) / (Y0 + eta)
    R     = max(0, q_sift * (Q_1*(1 - h2(e_1)) - f*Q_mu*h2(E_mu)))

with ``e0 = 1/2``.  Rates are secret bits per emitted pulse.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path
from typing import NamedTuple

E0 = 0.5
LOSS_CEILING_DB = 60.0
RESOLUTION_DB = 0.01


class InvalidLoss(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class SystemNonviable(RuntimeError):
    pass


@dataclass(frozen=True)
class QkdSystemParams:
    mu: float
    eta_det: float
    y0: float
    e_det: float
    f: float = 1.22
    q_sift: float = 0.5
    alpha_db_km: float = 0.2
    name: str = "custom"

    def __post_init__(self):
        for attr in ("eta_det", "y0", "e_det", "q_sift"):
            v = getattr(self, attr)
            if not 0.0 <= v <= 1.0:
                raise InvalidParams(f"{attr} must be a probability, got {v}")
        if self.mu <= 0:
            raise InvalidParams(f"mu must be positive, got {self.mu}")
        if self.f < 1:
            raise InvalidParams(f"f must be >= 1, got {self.f}")
        if self.alpha_db_km < 0:
            raise InvalidParams("alpha_db_km must be non-negative")


class ChannelStats(NamedTuple):
    eta: float
    gain: float
    qber: float
    single_photon_gain: float
    single_photon_error: float


@dataclass(frozen=True)
class RatePoint:
    loss: float
    rate: float
    qber: float


class LossCutoff(NamedTuple):
    loss_db: float
    capped: bool


def _param_fields() -> list[str]:
    return [f.name for f in fields(QkdSystemParams) if f.name != "name"]


def load_presets(path: str | Path | None = None) -> dict[str, QkdSystemParams]:
    """Read every section of a preset INI file (the bundled one by default)."""
    parser = configparser.ConfigParser()
    if path is None:
        text = resources.files("wtrnet.data").joinpath("presets.ini").read_text()
    else:
        text = Path(path).read_text()
    parser.read_string(text)
    out = {}
    known = set(_param_fields())
    for section in parser.sections():
        items = dict(parser[section])
        unknown = set(items) - known
        if unknown:
            raise InvalidParams(f"preset {section!r}: unknown keys {sorted(unknown)}")
        out[section] = QkdSystemParams(name=section, **{k: float(v) for k, v in items.items()})
    return out


def preset(name: str) -> QkdSystemParams:
    presets = load_presets()
    try:
        return presets[name]
    except KeyError:
        raise InvalidParams(f"unknown preset {name!r}; available: {', '.join(presets)}") from None


def h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def channel_stats(params: QkdSystemParams, loss_db: float) -> ChannelStats:
    if loss_db < 0 or math.isnan(loss_db):
        raise InvalidLoss(f"loss must be >= 0 dB, got {loss_db}")
    eta = params.eta_det * 10 ** (-loss_db / 10)
    clicks = -math.expm1(-eta * params.mu)
    gain = params.y0 + clicks
    qber = (E0 * params.y0 + params.e_det * clicks) / gain if gain > 0 else 0.0
    y1 = params.y0 + eta
    q1 = y1 * params.mu * math.exp(-params.mu)
    e1 = (E0 * params.y0 + params.e_det * eta) / y1 if y1 > 0 else 0.0
    return ChannelStats(eta, gain, qber, q1, e1)


def secret_key_rate(params: QkdSystemParams, loss_db: float) -> float:
    s = channel_stats(params, loss_db)
    r = params.q_sift * (s.single_photon_gain * (1 - h2(s.single_photon_error)) - params.f * s.gain * h2(s.qber))
    return max(0.0, r)


def rate_curve(params: QkdSystemParams, loss_min: float, loss_max: float, step: float) -> list[RatePoint]:
    if step <= 0:
        raise InvalidLoss(f"step must be positive, got {step}")
    if loss_min > loss_max or loss_min < 0:
        raise InvalidLoss(f"invalid loss range [{loss_min}, {loss_max}]")
    n = int(math.floor((loss_max - loss_min) / step + 1e-9))
    out = []
    for i in range(n + 1):
        loss = round(loss_min + i * step, 10)
        out.append(RatePoint(loss, secret_key_rate(params, loss), channel_stats(params, loss).qber))
    return out


def max_tolerable_loss(params: QkdSystemParams, ceiling: float = LOSS_CEILING_DB, resolution: float = RESOLUTION_DB) -> LossCutoff:
    """Largest loss with a positive key rate, by bisection.

    ``capped`` is set when the rate is still positive at ``ceiling``.
    """
    if secret_key_rate(params, 0.0) <= 0:
        raise SystemNonviable(f"{params.name}: no secret key even at zero loss")
    if secret_key_rate(params, ceiling) > 0:
        return LossCutoff(ceiling, True)
    lo, hi = 0.0, ceiling
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if secret_key_rate(params, mid) > 0:
            lo = mid
        else:
            hi = mid
    return LossCutoff(lo, False)


def key_rate_per_second(params: QkdSystemParams, loss_db: float, frequency_hz: float) -> float:
    """Secret bits per second for an emitter pulsing at ``frequency_hz``."""
    return secret_key_rate(params, loss_db) * frequency_hz


def with_overrides(params: QkdSystemParams, **overrides) -> QkdSystemParams:
    return replace(params, **{k: v for k, v in overrides.items() if v is not None})


def curve_to_csv(points: list[RatePoint], cutoff: LossCutoff | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["loss_db", "rate_bits_per_qubit", "qber"])
    for p in points:
        w.writerow([f"{p.loss:g}", f"{p.rate:.6e}", f"{p.qber:.6f}"])
    if cutoff is not None:
        suffix = " (ceiling)" if cutoff.capped else ""
        buf.write(f"# cutoff_db={cutoff.loss_db:.2f}{suffix}\n")
    return buf.getvalue()
