"""Annual time-series dataset: loading, validation, and variable transforms.

A dataset is a named collection of contiguous year-indexed series loaded from
a CSV bundle (a directory with one ``year,<name>`` file per series, or a single
wide file).  Model variables are expressed as :class:`Term` objects — a base
series name plus a transform (level, ln, first difference, log difference) and
an optional lag — evaluated against the dataset.
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "AnnualSeries",
    "Dataset",
    "DatasetError",
    "ProvenanceNote",
    "Term",
    "TermError",
    "apply_term",
    "bundled_dataset_path",
    "estimate_tax_benefit",
    "load_dataset",
    "parse_term",
    "real_interest_rate",
    "serialize_dataset",
]

_TRANSFORMS = ("level", "ln", "diff", "diff_ln")


class DatasetError(Exception):
    """Raised for malformed bundles, unknown series, or invalid series data."""


class TermError(Exception):
    """Raised when a term cannot be parsed or evaluated."""


@dataclass(frozen=True)
class AnnualSeries:
    """A contiguous annual series: value ``values[i]`` belongs to ``start_year + i``."""

    name: str
    start_year: int
    values: tuple[float, ...]
    unit: str = ""

    def __post_init__(self):
        if not self.values:
            raise DatasetError(f"series {self.name!r} is empty")
        if not all(math.isfinite(v) for v in self.values):
            raise DatasetError(f"series {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)

    def __len__(self) -> int:
        return len(self.values)

    def value_in(self, year: int) -> float:
        if not self.start_year <= year <= self.end_year:
            raise DatasetError(f"series {self.name!r} has no value for {year}")
        return self.values[year - self.start_year]

    def window(self, first_year: int, last_year: int) -> "AnnualSeries":
        """Restrict to [first_year, last_year]; errors if the window is empty."""
        lo = max(first_year, self.start_year)
        hi = min(last_year, self.end_year)
        if lo > hi:
            raise DatasetError(
                f"series {self.name!r}: window {first_year}-{last_year} does not "
                f"overlap {self.start_year}-{self.end_year}"
            )
        return AnnualSeries(
            self.name, lo, self.values[lo - self.start_year : hi - self.start_year + 1], self.unit
        )


@dataclass(frozen=True)
class ProvenanceNote:
    """One curated cell: what the source printed and what the bundle ships."""

    series: str
    year: int
    printed: str
    curated: str
    reason: str


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of named series plus curation notes and a checksum."""

    series: dict[str, AnnualSeries]
    provenance: tuple[ProvenanceNote, ...] = ()
    checksum: str = ""

    def get(self, name: str) -> AnnualSeries:
        try:
            return self.series[name]
        except KeyError:
            raise DatasetError(f"unknown series {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.series

    def names(self) -> tuple[str, ...]:
        return tuple(self.series)

    def notes_for(self, name: str) -> tuple[ProvenanceNote, ...]:
        return tuple(n for n in self.provenance if n.series == name)

    def with_series(self, extra: AnnualSeries) -> "Dataset":
        """A new dataset with one series added (used for the optional benefit data)."""
        if extra.name in self.series:
            raise DatasetError(f"duplicate series name {extra.name!r}")
        merged = dict(self.series)
        merged[extra.name] = extra
        return Dataset(merged, self.provenance, _checksum({**self.series, extra.name: extra}))


@dataclass(frozen=True)
class Term:
    """A model variable: a transform of a base series, optionally lagged.

    ``transform`` is one of ``level``, ``ln``, ``diff``, ``diff_ln``; ``lag``
    shifts the result ``lag`` years back.  Differences are always first order.
    """

    base: str
    transform: str = "level"
    lag: int = 0
    label: str | None = None

    def __post_init__(self):
        if self.transform not in _TRANSFORMS:
            raise TermError(f"unknown transform {self.transform!r}")
        if self.lag < 0:
            raise TermError("lag order must be >= 1 when present")

    @property
    def shift(self) -> int:
        """Years lost at the start of the sample: lags plus differences."""
        return self.lag + (1 if self.transform in ("diff", "diff_ln") else 0)

    def rendered_label(self) -> str:
        if self.label:
            return self.label
        core = {
            "level": self.base,
            "ln": f"Ln({self.base})",
            "diff": f"d_{self.base}",
            "diff_ln": f"d_Ln({self.base})",
        }[self.transform]
        return f"{core}(-{self.lag})" if self.lag else core


_TERM_RE = re.compile(
    r"^\s*(?:(?P<fn>ln|diff|dln)\s*\(\s*(?P<inner>ln\s*\(\s*(?P<nested>[^()@]+?)\s*\)|[^()@]+?)\s*\)|(?P<plain>[^()@]+?))"
    r"\s*(?:@\s*(?P<lag>\d+))?\s*(?:\bas\s+(?P<label>.+?))?\s*$",
    re.IGNORECASE,
)


def parse_term(text: str) -> Term:
    """Parse the manifest term grammar.

    Examples: ``Exports``, ``ln(Exports)``, ``dln(GDP)``, ``diff(ln(GDP))``,
    ``ln(Exports)@1`` (one-year lag), ``dln(Total investment) as d_Ln(K)``.
    """
    m = _TERM_RE.match(text)
    if not m:
        raise TermError(f"cannot parse term {text!r}")
    lag = int(m.group("lag") or 0)
    label = m.group("label")
    if m.group("plain") is not None:
        return Term(m.group("plain").strip(), "level", lag, label)
    fn = m.group("fn").lower()
    inner = m.group("inner").strip()
    nested = m.group("nested")
    if nested is not None:
        if fn != "diff":
            raise TermError(f"cannot parse term {text!r}: only diff(ln(...)) may nest")
        return Term(nested.strip(), "diff_ln", lag, label)
    transform = {"ln": "ln", "diff": "diff", "dln": "diff_ln"}[fn]
    return Term(inner, transform, lag, label)


def apply_term(dataset: Dataset, term: Term) -> AnnualSeries:
    """Evaluate a term against the dataset.

    The returned series starts ``term.shift`` years after the base series and
    is shorter by the same amount.  ``ln`` requires strictly positive values.
    """
    base = dataset.get(term.base)
    values = list(base.values)
    start = base.start_year
    unit = base.unit
    if term.transform in ("ln", "diff_ln"):
        bad = [start + i for i, v in enumerate(values) if v <= 0.0]
        if bad:
            raise TermError(
                f"ln of non-positive value in series {term.base!r} (first at {bad[0]})"
            )
        values = [math.log(v) for v in values]
        unit = f"ln({unit})" if unit else "ln"
    if term.transform in ("diff", "diff_ln"):
        values = [b - a for a, b in zip(values, values[1:])]
        start += 1
    # a lag leaves values untouched and re-dates them forward
    start += term.lag
    if not values:
        raise TermError(f"term {term.rendered_label()!r} evaluates to an empty series")
    return AnnualSeries(term.rendered_label(), start, tuple(values), unit)


def real_interest_rate(nominal: AnnualSeries, inflation: AnnualSeries) -> AnnualSeries:
    """Element-wise nominal rate minus inflation over the overlapping years."""
    lo = max(nominal.start_year, inflation.start_year)
    hi = min(nominal.end_year, inflation.end_year)
    if lo > hi:
        raise DatasetError("real_interest_rate: series have no overlapping years")
    vals = tuple(nominal.value_in(y) - inflation.value_in(y) for y in range(lo, hi + 1))
    return AnnualSeries("Real interest rate", lo, vals, "percent")


def estimate_tax_benefit(own_funds: float, fixed_asset_investment: float) -> float:
    """Benefit granted: the lower of 100% own funds and 100% fixed-asset investment."""
    if own_funds < 0 or fixed_asset_investment < 0:
        raise ValueError("tax benefit inputs must be non-negative")
    return min(own_funds, fixed_asset_investment)


# ---------------------------------------------------------------------------
# CSV bundle I/O
# ---------------------------------------------------------------------------

def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def _format_value(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def _serialize_series(s: AnnualSeries) -> bytes:
    lines = [f"year,{s.name}"]
    if s.unit:
        lines.append(f"# unit: {s.unit}")
    for year, v in zip(s.years, s.values):
        lines.append(f"{year},{_format_value(v)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_dataset(dataset: Dataset) -> dict[str, bytes]:
    """Canonical CSV bytes per series file (the checksum fixed point)."""
    return {f"{_slug(name)}.csv": _serialize_series(s) for name, s in sorted(dataset.series.items())}


def _checksum(series: dict[str, AnnualSeries]) -> str:
    h = hashlib.sha256()
    for fname, payload in sorted(serialize_dataset(Dataset(dict(series))).items()):
        h.update(fname.encode("utf-8"))
        h.update(payload)
    return h.hexdigest()


def _parse_series_csv(text: str, origin: str) -> AnnualSeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("year,"):
        raise DatasetError(f"{origin}: first row must be 'year,<series-name>'")
    name = lines[0].split(",", 1)[1].strip()
    if not name:
        raise DatasetError(f"{origin}: missing series name in header")
    unit = ""
    rows = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            m = re.match(r"#\s*unit:\s*(.*)", ln)
            if m:
                unit = m.group(1).strip()
            continue
        parts = ln.split(",")
        if len(parts) != 2:
            raise DatasetError(f"{origin}: malformed row {ln!r}")
        try:
            year = int(parts[0])
            value = float(parts[1])
        except ValueError:
            raise DatasetError(f"{origin}: non-numeric cell in row {ln!r}") from None
        rows.append((year, value))
    if not rows:
        raise DatasetError(f"{origin}: series {name!r} has no rows")
    years = [y for y, _ in rows]
    for a, b in zip(years, years[1:]):
        if b != a + 1:
            raise DatasetError(f"{origin}: non-contiguous years {a} -> {b} in series {name!r}")
    return AnnualSeries(name, years[0], tuple(v for _, v in rows), unit)


def _parse_wide_csv(text: str, origin: str) -> list[AnnualSeries]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split(",")
    if header[0].strip() != "year" or len(header) < 2:
        raise DatasetError(f"{origin}: wide file must start with a 'year' column")
    names = [h.strip() for h in header[1:]]
    columns: list[list[float]] = [[] for _ in names]
    years = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise DatasetError(f"{origin}: malformed row {ln!r}")
        try:
            years.append(int(parts[0]))
            for col, cell in zip(columns, parts[1:]):
                col.append(float(cell))
        except ValueError:
            raise DatasetError(f"{origin}: non-numeric cell in row {ln!r}") from None
    for a, b in zip(years, years[1:]):
        if b != a + 1:
            raise DatasetError(f"{origin}: non-contiguous years {a} -> {b}")
    if not years:
        raise DatasetError(f"{origin}: no data rows")
    return [AnnualSeries(n, years[0], tuple(col)) for n, col in zip(names, columns)]


def _parse_provenance(text: str) -> tuple[ProvenanceNote, ...]:
    notes = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split(",", 4)
        if len(parts) != 5:
            raise DatasetError(f"malformed provenance line {ln!r}")
        notes.append(ProvenanceNote(parts[0], int(parts[1]), parts[2], parts[3], parts[4]))
    return tuple(notes)


def bundled_dataset_path() -> Path:
    """Directory of the curated data bundle shipped with the package."""
    return Path(__file__).resolve().parent / "data"


def load_dataset(path: str | Path | None = None) -> Dataset:
    """Load and validate a CSV bundle.

    ``path`` may be a bundle directory (one CSV per series, plus an optional
    ``provenance.txt``), a single wide CSV file, or ``None`` for the bundled
    curated dataset.
    """
    p = bundled_dataset_path() if path is None else Path(path)
    if not p.exists():
        raise DatasetError(f"dataset path {p} does not exist")
    series: dict[str, AnnualSeries] = {}
    provenance: tuple[ProvenanceNote, ...] = ()
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix == ".csv")
        if not files:
            raise DatasetError(f"no CSV files in bundle {p}")
        for f in files:
            s = _parse_series_csv(f.read_text("utf-8"), f.name)
            if s.name in series:
                raise DatasetError(f"duplicate series name {s.name!r}")
            series[s.name] = s
        prov = p / "provenance.txt"
        if prov.exists():
            provenance = _parse_provenance(prov.read_text("utf-8"))
    else:
        for s in _parse_wide_csv(p.read_text("utf-8"), p.name):
            if s.name in series:
                raise DatasetError(f"duplicate series name {s.name!r}")
            series[s.name] = s
    return Dataset(series, provenance, _checksum(series))
