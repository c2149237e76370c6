"""Insertion-loss catalog for passive optical components."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

CATALOG_ENV = "WTRNET_CATALOG"

KINDS = (
    "fiber",
    "splitter_1x2",
    "splitter_1x4",
    "cwdm_oadm",
    "dwdm_oadm",
    "bandpass_filter",
    "circulator",
    "connector_pair",
    "awg",
)


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class OpticalComponent:
    """One catalog line: loss per unit (per km for fiber, per pair for connectors)."""

    kind: str
    name: str
    insertion_loss_db: float
    unit: str = "dB"
    passband: tuple[tuple[float, float], ...] = ()
    channels: int | None = None
    window_nm: float | None = None

    def __post_init__(self):
        if self.insertion_loss_db < 0:
            raise CatalogError(f"{self.kind}: negative insertion loss")
        for lo, hi in self.passband:
            if not lo < hi:
                raise CatalogError(f"{self.kind}: passband ({lo}, {hi}) is not ordered")

    def in_band(self, wavelength_nm: float) -> bool:
        """True when the operating range admits ``wavelength_nm`` (empty range admits all)."""
        if not self.passband:
            return True
        return any(lo <= wavelength_nm <= hi for lo, hi in self.passband)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "name": self.name,
            "insertion_loss_db": self.insertion_loss_db,
            "unit": self.unit,
            "passband_nm": [list(p) for p in self.passband],
        }
        if self.channels is not None:
            d["channels"] = self.channels
        if self.window_nm is not None:
            d["window_nm"] = self.window_nm
        return d


def _entry(raw: dict) -> OpticalComponent:
    try:
        return OpticalComponent(
            kind=raw["kind"],
            name=raw.get("name", raw["kind"]),
            insertion_loss_db=float(raw["insertion_loss_db"]),
            unit=raw.get("unit", "dB"),
            passband=tuple((float(lo), float(hi)) for lo, hi in raw.get("passband_nm", [])),
            channels=raw.get("channels"),
            window_nm=raw.get("window_nm"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad catalog entry {raw!r}: {exc}") from exc


def parse_catalog(doc: dict) -> dict[str, OpticalComponent]:
    entries = doc.get("components")
    if not isinstance(entries, list):
        raise CatalogError("catalog document needs a 'components' list")
    out = {}
    for raw in entries:
        e = _entry(raw)
        if e.kind not in KINDS:
            raise CatalogError(f"unknown component kind {e.kind!r}")
        out[e.kind] = e
    return out


def default_catalog() -> list[OpticalComponent]:
    """The bundled insertion-loss table, in table order."""
    doc = json.loads(resources.files("wtrnet.data").joinpath("catalog.json").read_text())
    return list(parse_catalog(doc).values())


def load_catalog(path: str | Path | None = None) -> dict[str, OpticalComponent]:
    """Default table, overlaid with entries from ``path`` or ``$WTRNET_CATALOG``.

    Override files may list only the kinds they change.
    """
    table = {c.kind: c for c in default_catalog()}
    path = path or os.environ.get(CATALOG_ENV)
    if path:
        table.update(parse_catalog(json.loads(Path(path).read_text())))
    return table
