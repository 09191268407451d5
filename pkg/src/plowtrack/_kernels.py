"""Numeric kernels for the matching hot path.

One scalar per-edge routine is the single source of truth for point-to-edge
distance; the polyline projection, the candidate-block scan and any external
verification code all call it, so distances agree bit for bit across paths.
Kernels are numba-compiled when numba is importable and plain Python
otherwise (same code, slower).
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

EARTH_RADIUS_M = 6_371_000.0
_TWO_PI = 2.0 * math.pi


def _haversine_impl(plat, plon, cos_plat, lat, lon):
    sdlat = math.sin((lat - plat) * 0.5)
    sdlon = math.sin((lon - plon) * 0.5)
    h = sdlat * sdlat + cos_plat * math.cos(lat) * sdlon * sdlon
    if h > 1.0:
        h = 1.0
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def _wrap_impl(x):
    if x > math.pi:
        return x - _TWO_PI
    if x < -math.pi:
        return x + _TWO_PI
    return x


def _edge_dt_impl(plat, plon, cos_plat, la1, lo1, la2, lo2):
    """Distance (m) and clamped parameter t for one edge, all in radians.

    The foot comes from a local equirectangular projection about the edge's
    mean latitude; the returned distance is the haversine to the best of
    {foot, first vertex, second vertex} so a vertex is never beaten by an
    interior foot that is actually farther.
    """
    d_a = _haversine(plat, plon, cos_plat, la1, lo1)
    d_b = _haversine(plat, plon, cos_plat, la2, lo2)
    coslat = math.cos(0.5 * (la1 + la2))
    x1 = _wrap_pi(lo1 - plon) * coslat
    y1 = la1 - plat
    x2 = _wrap_pi(lo2 - plon) * coslat
    y2 = la2 - plat
    dx = x2 - x1
    dy = y2 - y1
    len2 = dx * dx + dy * dy
    if len2 > 0.0:
        t = -(x1 * dx + y1 * dy) / len2
    else:
        t = 0.0
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    flat = la1 + t * (la2 - la1)
    flon = lo1 + t * _wrap_pi(lo2 - lo1)
    d = _haversine(plat, plon, cos_plat, flat, flon)
    if d_a < d:
        d = d_a
        t = 0.0
    if d_b < d:
        d = d_b
        t = 1.0
    return d, t


def _project_polyline_impl(plat, plon, lats, lons):
    """Index, distance and t of the closest edge of one polyline."""
    cos_plat = math.cos(plat)
    best_i = 0
    best_d = math.inf
    best_t = 0.0
    for i in range(lats.shape[0] - 1):
        d, t = _edge_dt(plat, plon, cos_plat, lats[i], lons[i], lats[i + 1], lons[i + 1])
        if d < best_d:
            best_d = d
            best_t = t
            best_i = i
    return best_i, best_d, best_t


def _select_block_impl(
    plat, plon, lat1, lon1, lat2, lon2, starts, seg_class,
    limit_interstate, limit_state, limit_local,
):
    """Hierarchy selection over a candidate block.

    Segments are contiguous edge runs given by ``starts`` and ordered by
    segment id, so the strict '<' keeps the smallest id on distance ties.
    Returns (segment index or -1, distance, winning edge index, edge t).
    """
    n_seg = starts.shape[0]
    n_edge = lat1.shape[0]
    cos_plat = math.cos(plat)
    class_d = np.full(3, np.inf)
    class_seg = np.full(3, -1, dtype=np.int64)
    class_edge = np.zeros(3, dtype=np.int64)
    class_t = np.zeros(3)
    for s in range(n_seg):
        e0 = starts[s]
        e1 = starts[s + 1] if s + 1 < n_seg else n_edge
        seg_d = math.inf
        seg_e = e0
        seg_t = 0.0
        for e in range(e0, e1):
            d, t = _edge_dt(plat, plon, cos_plat, lat1[e], lon1[e], lat2[e], lon2[e])
            if d < seg_d:
                seg_d = d
                seg_e = e
                seg_t = t
        c = seg_class[s]
        if seg_d < class_d[c]:
            class_d[c] = seg_d
            class_seg[c] = s
            class_edge[c] = seg_e
            class_t[c] = seg_t
    if class_seg[0] >= 0 and class_d[0] <= limit_interstate:
        return class_seg[0], class_d[0], class_edge[0], class_t[0]
    if class_seg[1] >= 0 and class_d[1] <= limit_state:
        return class_seg[1], class_d[1], class_edge[1], class_t[1]
    if class_seg[2] >= 0 and class_d[2] <= limit_local:
        return class_seg[2], class_d[2], class_edge[2], class_t[2]
    return np.int64(-1), 0.0, np.int64(-1), 0.0


def _geohash_bits_impl(lat, lon, precision):
    """Interleaved geohash bits (longitude first) as one integer."""
    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    bits = 0
    even = True
    for _ in range(5 * precision):
        bits <<= 1
        if even:
            mid = (lon_lo + lon_hi) * 0.5
            if lon >= mid:
                bits |= 1
                lon_lo = mid
            else:
                lon_hi = mid
        else:
            mid = (lat_lo + lat_hi) * 0.5
            if lat >= mid:
                bits |= 1
                lat_lo = mid
            else:
                lat_hi = mid
        even = not even
    return bits


def _interleave_bits_impl(i_lat, i_lon, lat_bits, lon_bits):
    """Cell indices back to interleaved geohash bits (longitude first)."""
    bits = 0
    even = True
    li = lon_bits
    la = lat_bits
    for _ in range(lat_bits + lon_bits):
        bits <<= 1
        if even:
            li -= 1
            bits |= (i_lon >> li) & 1
        else:
            la -= 1
            bits |= (i_lat >> la) & 1
        even = not even
    return bits


if njit is not None:
    _haversine = njit(cache=True)(_haversine_impl)
    _wrap_pi = njit(cache=True)(_wrap_impl)
    _edge_dt = njit(cache=True)(_edge_dt_impl)
    project_polyline = njit(cache=True)(_project_polyline_impl)
    select_block = njit(cache=True)(_select_block_impl)
    geohash_bits = njit("int64(float64, float64, int64)", cache=True)(_geohash_bits_impl)
    interleave_bits = njit("int64(int64, int64, int64, int64)", cache=True)(_interleave_bits_impl)
else:  # pragma: no cover
    _haversine = _haversine_impl
    _wrap_pi = _wrap_impl
    _edge_dt = _edge_dt_impl
    project_polyline = _project_polyline_impl
    select_block = _select_block_impl
    geohash_bits = _geohash_bits_impl
    interleave_bits = _interleave_bits_impl

edge_dt = _edge_dt


def warmup() -> None:
    """Force kernel compilation so timed sections measure steady state."""
    lats = np.array([0.6981, 0.6982])
    lons = np.array([-1.5097, -1.5096])
    project_polyline(0.6981, -1.5096, lats, lons)
    select_block(
        0.6981, -1.5096, lats[:1], lons[:1], lats[1:], lons[1:],
        np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
        200.0, 100.0, 50.0,
    )
    geohash_bits(40.0, -86.5, 5)
    interleave_bits(3, 5, 12, 13)
