"""Horizons-format ephemeris ingestion: file parser and HTTP client.

The vector-record text format is one record per line:

    A.D. 2017-Feb-17 00:00:00.0000, x, y, z, vx, vy, vz

with positions in AU and velocities in AU/day. Lines that are empty or
start with '#' are skipped. The fetch client talks to the public JPL
Horizons API, requires an explicit network flag, and caches raw payloads
on disk keyed by the request parameters.
"""
import datetime
import hashlib
import json
import os
from dataclasses import dataclass

from .errors import MalformedRecord, NetworkUnavailable, UpstreamFormatChange

_MONTHS = {name: i + 1 for i, name in enumerate(
    ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
     "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"))}

FIXTURE_PATH = os.path.join(os.path.dirname(__file__), "data",
                            "jupiter_horizons_2017_2028.txt")
FIXTURE_ENV = "ERTBP_FIXTURE"
CACHE_ENV = "ERTBP_CACHE_DIR"
DEFAULT_ENDPOINT = "https://ssd.jpl.nasa.gov/api/horizons.api"


@dataclass(frozen=True)
class EphemerisRecord:
    """One dated state: position in AU, velocity in AU/ut and AU/day."""
    date: datetime.datetime
    position: tuple
    velocity_ut: tuple
    velocity_day: tuple


def _parse_date(text, line_number):
    # "A.D. YYYY-Mon-DD HH:MM:SS.ffff"
    body = text.strip()
    if body.startswith("A.D."):
        body = body[4:].strip()
    try:
        datepart, timepart = body.split()
        year, mon, day = datepart.split("-")
        month = _MONTHS[mon]
        hh, mm, ss = timepart.split(":")
        sec = float(ss)
        return datetime.datetime(int(year), month, int(day), int(hh), int(mm),
                                 int(sec), int(round((sec % 1) * 1e6)))
    except (ValueError, KeyError) as exc:
        raise MalformedRecord(f"unparseable date {text.strip()!r}", line_number) from exc


def horizons_parse(text, ut_days=None):
    """Parse Horizons vector-record text into EphemerisRecord objects.

    Velocities are stored as read (AU/day) with the AU-per-time-unit form
    derived; pass ut_days to override the default days-per-ut constant.
    A bad line raises MalformedRecord with its 1-based line number.
    """
    from .frames import days_per_ut  # deferred: frames imports are heavier
    if ut_days is None:
        ut_days = float(days_per_ut())
    records = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 7:
            raise MalformedRecord(
                f"expected date + 6 numeric fields, got {len(parts)} fields", line_number)
        date = _parse_date(parts[0], line_number)
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise MalformedRecord(f"non-numeric field in {line!r}", line_number) from exc
        velocity_day = tuple(values[3:])
        records.append(EphemerisRecord(
            date=date,
            position=tuple(values[:3]),
            velocity_ut=tuple(v * ut_days for v in velocity_day),
            velocity_day=velocity_day,
        ))
    return records


def fixture_path():
    """Path of the committed Jupiter fixture, overridable by environment."""
    return os.environ.get(FIXTURE_ENV, FIXTURE_PATH)


def load_fixture(path=None):
    """Parse the committed (or overridden) Jupiter ephemeris fixture."""
    with open(path or fixture_path()) as fh:
        return horizons_parse(fh.read())


def _cache_dir():
    return os.environ.get(CACHE_ENV, os.path.join(os.path.expanduser("~"),
                                                  ".cache", "ertbp"))


def _cache_key(params):
    blob = json.dumps(params, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:24] + ".txt"


def horizons_fetch(body_id="5", start="2017-02-17", stop="2028-12-28",
                   step="1 d", endpoint_url=DEFAULT_ENDPOINT,
                   allow_network=False, cache_dir=None):
    """Fetch vector records for one body, with a disk cache.

    Returns raw text suitable for horizons_parse. A cache hit replays
    bit-identically without touching the network; a cold cache with
    allow_network=False raises NetworkUnavailable. A payload that does
    not parse raises UpstreamFormatChange (the response is not cached).
    """
    params = {
        "COMMAND": str(body_id),
        "EPHEM_TYPE": "VECTORS",
        "CENTER": "500@0",
        "START_TIME": start,
        "STOP_TIME": stop,
        "STEP_SIZE": step,
        "REF_PLANE": "ECLIPTIC",
        "REF_SYSTEM": "J2000",
        "OUT_UNITS": "AU-D",
        "VEC_TABLE": "2",
        "CSV_FORMAT": "YES",
        "format": "text",
        "endpoint": endpoint_url,
    }
    cache = cache_dir or _cache_dir()
    path = os.path.join(cache, _cache_key(params))
    if os.path.exists(path):
        with open(path) as fh:
            return fh.read()
    if not allow_network:
        raise NetworkUnavailable(
            "cache is cold and network access was not enabled (pass allow_network=True)")
    import requests
    query = {k: v for k, v in params.items() if k != "endpoint"}
    try:
        response = requests.get(endpoint_url, params=query, timeout=120)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise NetworkUnavailable(f"fetch failed: {exc}") from exc
    text = _extract_vectors(response.text)
    try:
        records = horizons_parse(text)
    except MalformedRecord as exc:
        raise UpstreamFormatChange(f"fetched payload no longer parses: {exc}") from exc
    if not records:
        raise UpstreamFormatChange("fetched payload contained no vector records")
    os.makedirs(cache, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def _extract_vectors(payload):
    """Reduce a raw Horizons API response to bare vector-record lines.

    The CSV table sits between $$SOE and $$EOE markers with fields
    JDTDB, calendar date, x, y, z, vx, vy, vz; the Julian-date column is
    dropped to match the record format handled by horizons_parse.
    """
    if "$$SOE" not in payload or "$$EOE" not in payload:
        raise UpstreamFormatChange("response is missing the $$SOE/$$EOE table markers")
    table = payload.split("$$SOE", 1)[1].split("$$EOE", 1)[0]
    lines = []
    for raw in table.splitlines():
        line = raw.strip().rstrip(",")
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) >= 8:
            parts = parts[1:8]  # drop JDTDB, keep date + 6 components
        lines.append(", ".join(parts))
    return "\n".join(lines) + "\n"
