"""Geodesic and geohash primitives shared by the rest of the pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels

EARTH_RADIUS_M = 6_371_000.0

GEOHASH_ALPHABET = "0123456789bcdefghjkmnpqrstuvwxyz"
_CHAR_INDEX = {c: i for i, c in enumerate(GEOHASH_ALPHABET)}
_BITS = (16, 8, 4, 2, 1)


@dataclass(frozen=True)
class Coordinate:
    """WGS84 position in degrees. Longitude is normalized to [-180, 180)."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        lat = float(self.lat)
        lon = float(self.lon)
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise ValueError(f"coordinate must be finite, got ({self.lat}, {self.lon})")
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude {lat} outside [-90, 90]")
        if not -180.0 <= lon < 180.0:
            lon = ((lon + 180.0) % 360.0) - 180.0
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)


class Polyline:
    """Ordered vertex chain (>= 2 vertices, no consecutive duplicates).

    Vertex arrays and per-edge arc lengths are precomputed once so that
    point projection stays cheap inside the matching hot loop.
    """

    __slots__ = ("lats", "lons", "lats_rad", "lons_rad", "edge_len_m", "cum_len_m", "length_m")

    def __init__(self, vertices: Sequence[Coordinate]) -> None:
        if len(vertices) < 2:
            raise ValueError("polyline needs at least 2 vertices")
        for a, b in zip(vertices, vertices[1:]):
            if a.lat == b.lat and a.lon == b.lon:
                raise ValueError("polyline has consecutive duplicate vertices")
        self.lats = np.array([v.lat for v in vertices], dtype=np.float64)
        self.lons = np.array([v.lon for v in vertices], dtype=np.float64)
        self.lats_rad = np.radians(self.lats)
        self.lons_rad = np.radians(self.lons)
        self.edge_len_m = _haversine_rad(
            self.lats_rad[:-1], self.lons_rad[:-1], self.lats_rad[1:], self.lons_rad[1:]
        )
        self.cum_len_m = np.concatenate(([0.0], np.cumsum(self.edge_len_m)))
        self.length_m = float(self.cum_len_m[-1])

    def __len__(self) -> int:
        return len(self.lats)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polyline):
            return NotImplemented
        return np.array_equal(self.lats, other.lats) and np.array_equal(self.lons, other.lons)

    def __repr__(self) -> str:
        return f"Polyline({len(self.lats)} vertices, {self.length_m:.1f} m)"

    @property
    def vertices(self) -> tuple[Coordinate, ...]:
        return tuple(Coordinate(float(la), float(lo)) for la, lo in zip(self.lats, self.lons))

    def point_at_fraction(self, fraction: float) -> Coordinate:
        """Coordinate at the given arc-length fraction along the line."""
        pos = min(max(fraction, 0.0), 1.0) * self.length_m
        i = int(np.searchsorted(self.cum_len_m, pos, side="right")) - 1
        i = min(max(i, 0), len(self.edge_len_m) - 1)
        edge_len = float(self.edge_len_m[i])
        t = (pos - float(self.cum_len_m[i])) / edge_len if edge_len > 0 else 0.0
        t = min(max(t, 0.0), 1.0)
        lat = float(self.lats[i]) + t * (float(self.lats[i + 1]) - float(self.lats[i]))
        lon = float(self.lons[i]) + t * _wrap_deg(float(self.lons[i + 1]) - float(self.lons[i]))
        return Coordinate(lat, lon)

    def slice_fraction(self, f0: float, f1: float) -> "Polyline":
        """Sub-polyline between two arc-length fractions (f0 < f1)."""
        if not 0.0 <= f0 < f1 <= 1.0:
            raise ValueError(f"invalid slice fractions ({f0}, {f1})")
        a = f0 * self.length_m
        b = f1 * self.length_m
        pts: list[Coordinate] = [self.point_at_fraction(f0)]
        for i in range(1, len(self.lats) - 1):
            c = float(self.cum_len_m[i])
            if a < c < b:
                pts.append(Coordinate(float(self.lats[i]), float(self.lons[i])))
        pts.append(self.point_at_fraction(f1))
        deduped = [pts[0]]
        for p in pts[1:]:
            if p.lat != deduped[-1].lat or p.lon != deduped[-1].lon:
                deduped.append(p)
        if len(deduped) < 2:
            raise ValueError("slice is degenerate (zero length)")
        return Polyline(deduped)


@dataclass(frozen=True)
class PolylineProjection:
    distance_m: float
    foot: Coordinate
    arc_fraction: float


def geohash_encode(c: Coordinate, precision: int) -> str:
    """Standard base-32 geohash of a coordinate (longitude bit first)."""
    if not isinstance(precision, int) or not 1 <= precision <= 12:
        raise ValueError(f"precision must be an integer in [1, 12], got {precision}")
    return _bits_to_code(int(_kernels.geohash_bits(c.lat, c.lon, precision)), precision)


def _bits_to_code(bits: int, precision: int) -> str:
    return "".join(
        GEOHASH_ALPHABET[(bits >> shift) & 31] for shift in range((precision - 1) * 5, -1, -5)
    )


def geohash_bounds(code: str) -> tuple[float, float, float, float]:
    """Decode a geohash to its cell (lat_min, lat_max, lon_min, lon_max)."""
    if not code:
        raise ValueError("empty geohash")
    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    even = True
    for c in code:
        idx = _CHAR_INDEX.get(c)
        if idx is None:
            raise ValueError(f"invalid geohash character {c!r} in {code!r}")
        for bit in _BITS:
            if even:
                mid = (lon_lo + lon_hi) / 2.0
                if idx & bit:
                    lon_lo = mid
                else:
                    lon_hi = mid
            else:
                mid = (lat_lo + lat_hi) / 2.0
                if idx & bit:
                    lat_lo = mid
                else:
                    lat_hi = mid
            even = not even
    return lat_lo, lat_hi, lon_lo, lon_hi


def geohash_cell_indices(code: str) -> tuple[int, int]:
    """Integer (lat, lon) grid indices of a geohash cell."""
    i_lat = 0
    i_lon = 0
    even = True
    for c in code:
        idx = _CHAR_INDEX.get(c)
        if idx is None:
            raise ValueError(f"invalid geohash character {c!r} in {code!r}")
        for bit in _BITS:
            b = 1 if idx & bit else 0
            if even:
                i_lon = (i_lon << 1) | b
            else:
                i_lat = (i_lat << 1) | b
            even = not even
    return i_lat, i_lon


def geohash_neighbors(code: str) -> set[str]:
    """The cell itself plus its existing grid neighbors (9 for interior cells).

    Longitude wraps at the antimeridian; rows beyond the poles are dropped.
    """
    return set(_neighbors_cached(code))


@lru_cache(maxsize=65536)
def _neighbors_cached(code: str) -> tuple[str, ...]:
    i_lat, i_lon = geohash_cell_indices(code)
    precision = len(code)
    lat_bits = (5 * precision) // 2
    lon_bits = 5 * precision - lat_bits
    out: list[str] = []
    for dy in (-1, 0, 1):
        ny = i_lat + dy
        if not 0 <= ny < (1 << lat_bits):
            continue
        for dx in (-1, 0, 1):
            nx = (i_lon + dx) % (1 << lon_bits)
            bits = int(_kernels.interleave_bits(ny, nx, lat_bits, lon_bits))
            out.append(_bits_to_code(bits, precision))
    return tuple(sorted(set(out)))


def great_circle_distance(a: Coordinate, b: Coordinate) -> float:
    """Haversine distance in meters on a sphere of radius 6,371,000 m."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def point_to_polyline(p: Coordinate, line: Polyline) -> PolylineProjection:
    """Closest point on a polyline: distance, foot coordinate and arc fraction."""
    i, d, t = _kernels.project_polyline(
        math.radians(p.lat), math.radians(p.lon), line.lats_rad, line.lons_rad
    )
    i = int(i)
    t = float(t)
    lat = float(line.lats[i]) + t * (float(line.lats[i + 1]) - float(line.lats[i]))
    lon = float(line.lons[i]) + t * _wrap_deg(float(line.lons[i + 1]) - float(line.lons[i]))
    arc = (float(line.cum_len_m[i]) + t * float(line.edge_len_m[i])) / line.length_m
    return PolylineProjection(
        distance_m=float(d),
        foot=Coordinate(lat, lon),
        arc_fraction=min(max(arc, 0.0), 1.0),
    )


def _haversine_rad(lat1, lon1, lat2, lon2):
    sdlat = np.sin((lat2 - lat1) * 0.5)
    sdlon = np.sin((lon2 - lon1) * 0.5)
    h = sdlat * sdlat + np.cos(lat1) * np.cos(lat2) * sdlon * sdlon
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(h, 1.0)))


def _wrap_deg(x: float) -> float:
    if x > 180.0:
        return x - 360.0
    if x < -180.0:
        return x + 360.0
    return x
