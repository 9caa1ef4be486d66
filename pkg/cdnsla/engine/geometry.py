"""Planar coverage model of a CDN's surrogate servers.

A request can be served by server i within the latency bound psi only if it
originates within the serving radius r_i = speed*(psi - (n_i+1)/mu_i) of the
server, n_i being the server's queue length. The disks of all servers cut
the service region into elementary regions, each labelled by the exact
subset of servers that can reach it. Regions reached by a single server are
its exclusive area, regions reached by two or more are common areas.

Areas are computed either exactly (at most three disks, clipped to the
region) or by Monte Carlo on a stratified point set that is reused for every
state of one computation.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import math

import numpy as np

from cdnsla.utils.messages import verbosity, info
from cdnsla.utils.mathtools import popcount
from cdnsla.utils.prng import Random


__all__ = ['ServerLayout', 'CoverageState', 'AreaDecomposition', 'SamplePoints', 'queue_bound', 'members',
           'radius', 'coverage_state', 'membership', 'union_area', 'decompose',
           'sample_points', 'DEFAULT_SAMPLES']


DEFAULT_SAMPLES = 400000
MAX_EXACT_SERVERS = 3


def queue_bound(psi, mu):
    """Largest admissible queue length ceil(psi*mu - 1), never negative."""

    x = psi * mu - 1.0
    # guards against psi*mu landing a rounding error above an integer
    return max(0, int(math.ceil(x - 1.0e-9 * max(1.0, abs(x)))))


class ServerLayout(object):

    """Positions and rates of the surrogate servers of one CDN.

    Attributes:
       positions: An (m, 2) array of server coordinates.
       service_rates: Service rates mu_i, requests per unit time.
       psi: Required latency, in time units.
       region: Rectangle (xmin, ymin, xmax, ymax) requests originate from.
       areal_rate: Request rate per unit area.
       speed_factor: Distance travelled per unit of transmission time.
    """

    def __init__(self, positions, service_rates, psi, region, areal_rate, speed_factor=1.0):
        """Initialises ServerLayout.

        Raises:
           ValueError: Raised on non-positive rates, latency or area, on a
              negative areal rate, or on mismatched positions and rates.
        """

        self.positions = np.array(positions, dtype=float).reshape((-1, 2))
        self.service_rates = np.array(service_rates, dtype=float).flatten()
        self.psi = float(psi)
        self.region = tuple(float(x) for x in region)
        self.areal_rate = float(areal_rate)
        self.speed_factor = float(speed_factor)

        if len(self.positions) < 1:
            raise ValueError("A layout needs at least one server")
        if len(self.positions) != len(self.service_rates):
            raise ValueError("Got %d server positions but %d service rates" % (len(self.positions), len(self.service_rates)))
        if np.any(self.service_rates <= 0.0):
            raise ValueError("Service rates must be positive")
        if not self.psi > 0.0:
            raise ValueError("Latency bound psi must be positive")
        if len(self.region) != 4 or not self.region_area > 0.0:
            raise ValueError("Region must be (xmin, ymin, xmax, ymax) with positive area")
        if self.areal_rate < 0.0:
            raise ValueError("Areal request rate must be non-negative")
        if not self.speed_factor > 0.0:
            raise ValueError("Speed factor must be positive")

    @property
    def nserver(self):
        return len(self.service_rates)

    @property
    def region_area(self):
        xmin, ymin, xmax, ymax = self.region
        return max(0.0, xmax - xmin) * max(0.0, ymax - ymin)

    @property
    def total_rate(self):
        """Request rate over the whole region."""

        return self.areal_rate * self.region_area

    @property
    def queue_bounds(self):
        """The largest admissible queue length of every server."""

        return np.array([queue_bound(self.psi, mu) for mu in self.service_rates], dtype=int)

    def radii(self, queue_lengths):
        """Serving radii at the given queue lengths, floored at 0."""

        n = np.asarray(queue_lengths, dtype=float)
        return np.maximum(0.0, self.speed_factor * (self.psi - (n + 1.0) / self.service_rates))

    def radii_of(self, server, queue_lengths):
        """Serving radii of one server over an array of queue lengths."""

        n = np.asarray(queue_lengths, dtype=float)
        return np.maximum(0.0, self.speed_factor * (self.psi - (n + 1.0) / self.service_rates[server]))

    def scaled(self, c):
        """The layout with request and service rates multiplied by c.

        Latency bound and region are kept, so serving radii at the empty state
        grow towards speed*psi as c grows.
        """

        if not c > 0.0:
            raise ValueError("Scaling factor must be positive, got %g" % c)
        return ServerLayout(self.positions, self.service_rates * c, self.psi, self.region,
                            self.areal_rate * c, self.speed_factor)

    def to_dict(self):
        return {"positions": self.positions.tolist(), "service_rates": self.service_rates.tolist(),
                "psi": self.psi, "region": list(self.region), "areal_rate": self.areal_rate,
                "speed_factor": self.speed_factor}

    @staticmethod
    def from_dict(d):
        return ServerLayout(d["positions"], d["service_rates"], d["psi"], d["region"],
                            d["areal_rate"], d.get("speed_factor", 1.0))


class CoverageState(object):

    """Queue lengths of all servers and the resulting serving radii.

    Attributes:
       queue_lengths: Integer queue length of every server.
       radii: Serving radius of every server.
    """

    def __init__(self, queue_lengths, radii):
        self.queue_lengths = np.asarray(queue_lengths, dtype=int)
        self.radii = np.asarray(radii, dtype=float)


def radius(layout, server, queue):
    """Serving radius max(0, speed*(psi - (queue+1)/mu)) of one server.

    Raises:
       ValueError: Raised on a negative queue length.
    """

    if queue < 0:
        raise ValueError("Queue length must be non-negative, got %d" % queue)
    return max(0.0, layout.speed_factor * (layout.psi - (queue + 1.0) / layout.service_rates[server]))


def coverage_state(layout, queue_lengths=None):
    """Builds the CoverageState of a layout, by default the empty state.

    Raises:
       ValueError: Raised if a queue length is negative or above its bound.
    """

    if queue_lengths is None:
        queue_lengths = np.zeros(layout.nserver, dtype=int)
    n = np.asarray(queue_lengths, dtype=int)
    if n.shape != (layout.nserver,):
        raise ValueError("Expected %d queue lengths, got %s" % (layout.nserver, str(n.shape)))
    if np.any(n < 0) or np.any(n > layout.queue_bounds):
        raise ValueError("Queue lengths %s outside the admissible range [0, %s]" % (str(n.tolist()), str(layout.queue_bounds.tolist())))
    return CoverageState(n, layout.radii(n))


class AreaDecomposition(object):

    """Covered area split by the exact subset of servers reaching each point.

    Attributes:
       nserver: Number of servers m.
       areas: Dictionary from subset bitmask (bit i for server i) to area.
          Only non-empty subsets with positive area are kept.
       areal_rate: Request rate per unit area.
       mode: "exact" or "montecarlo".
       standard_error: Standard error of the covered area (0 when exact).
    """

    def __init__(self, nserver, areas, areal_rate, mode="exact", standard_error=0.0):
        self.nserver = nserver
        self.areas = dict((int(k), float(v)) for k, v in areas.items() if k != 0 and v > 0.0)
        self.areal_rate = float(areal_rate)
        self.mode = mode
        self.standard_error = float(standard_error)

    @property
    def exclusive_rates(self):
        """Phi_i, the rate of requests only server i can reach."""

        phi = np.zeros(self.nserver)
        for i in range(self.nserver):
            phi[i] = self.areas.get(1 << i, 0.0) * self.areal_rate
        return phi

    @property
    def common_masks(self):
        """Bitmasks of the common regions, in increasing order."""

        return sorted(k for k in self.areas if popcount(k) >= 2)

    @property
    def common_regions(self):
        """List of (server subset, rate phi_z) for regions reached by >= 2 servers."""

        return [(members(z), self.areas[z] * self.areal_rate) for z in self.common_masks]

    @property
    def total_covered_rate(self):
        return sum(self.areas.values()) * self.areal_rate

    @property
    def union_area(self):
        return sum(self.areas.values())

    def rate(self, mask):
        """Rate of the elementary region with the given bitmask."""

        return self.areas.get(int(mask), 0.0) * self.areal_rate

    def to_dict(self):
        return {"nserver": self.nserver, "mode": self.mode, "areal_rate": self.areal_rate,
                "standard_error": self.standard_error,
                "exclusive_rates": self.exclusive_rates.tolist(),
                "common_regions": [{"servers": list(s), "rate": r} for s, r in self.common_regions],
                "areas": dict((str(k), v) for k, v in sorted(self.areas.items()))}

    @staticmethod
    def from_dict(d):
        return AreaDecomposition(d["nserver"], dict((int(k), v) for k, v in d["areas"].items()),
                                 d["areal_rate"], d.get("mode", "exact"), d.get("standard_error", 0.0))


def members(mask):
    """Zero-based server indices set in a bitmask."""

    return tuple(i for i in range(int(mask).bit_length()) if (mask >> i) & 1)


class SamplePoints(object):

    """A stratified uniform point set over a rectangle.

    The rectangle is cut into a grid of about npoint square-ish cells and one
    uniform point is drawn in each cell.

    Attributes:
       region: The rectangle (xmin, ymin, xmax, ymax).
       points: An (N, 2) array of points.
       area: The area of the rectangle.
    """

    def __init__(self, region, npoint=DEFAULT_SAMPLES, seed=0):
        xmin, ymin, xmax, ymax = region
        w, h = xmax - xmin, ymax - ymin
        nx = max(1, int(round(math.sqrt(npoint * w / h))))
        ny = max(1, int(round(npoint / float(nx))))
        u = Random(seed).uvec((nx * ny, 2))
        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        self.points = np.empty((nx * ny, 2))
        self.points[:, 0] = xmin + (ix.flatten() + u[:, 0]) * (w / nx)
        self.points[:, 1] = ymin + (iy.flatten() + u[:, 1]) * (h / ny)
        self.region = tuple(region)
        self.area = w * h
        self._dist = {}

    @property
    def npoint(self):
        return len(self.points)

    def distances(self, positions):
        """(N, m) distances from every point to every server, cached per layout."""

        key = tuple(np.asarray(positions, dtype=float).flatten())
        if key not in self._dist:
            pos = np.asarray(positions, dtype=float).reshape((-1, 2))
            diff = self.points[:, np.newaxis, :] - pos[np.newaxis, :, :]
            self._dist[key] = np.sqrt(np.sum(diff ** 2, axis=2))
        return self._dist[key]


_point_cache = {}


def sample_points(region, npoint=DEFAULT_SAMPLES, seed=0):
    """Returns the shared SamplePoints for (region, npoint, seed)."""

    key = (tuple(float(x) for x in region), int(npoint), int(seed))
    if key not in _point_cache:
        info(" @GEOMETRY: drawing %d stratified sample points" % npoint, verbosity.debug)
        _point_cache[key] = SamplePoints(region, npoint, seed)
    return _point_cache[key]


def membership(layout, radii, points):
    """Bitmask of the disks containing each point.

    Args:
       layout: A ServerLayout.
       radii: Serving radius of every server.
       points: A SamplePoints object, or an (N, 2) array of coordinates.

    Returns:
       An integer array with bit i set when the point is within radii[i] of
       server i.
    """

    if isinstance(points, SamplePoints):
        d = points.distances(layout.positions)
    else:
        pts = np.asarray(points, dtype=float).reshape((-1, 2))
        d = np.sqrt(np.sum((pts[:, np.newaxis, :] - layout.positions[np.newaxis, :, :]) ** 2, axis=2))
    radii = np.asarray(radii, dtype=float)
    inside = (d <= radii[np.newaxis, :]) & (radii[np.newaxis, :] > 0.0)
    return np.dot(inside.astype(np.int64), 1 << np.arange(layout.nserver, dtype=np.int64))


def _arc_integral(cx, cy, r, t1, t2):
    """Green's theorem term (1/2) int (x dy - y dx) along a ccw circle arc."""

    return 0.5 * (r * r * (t2 - t1) + r * (cx * (math.sin(t2) - math.sin(t1)) - cy * (math.cos(t2) - math.cos(t1))))


def _segment_integral(p, q):
    """Green's theorem term (1/2) int (x dy - y dx) along a straight segment."""

    return 0.5 * (p[0] * q[1] - q[0] * p[1])


def _tolerance(r):
    return 1.0e-9 * max(1.0, r)


def _contains_circle(outer, inner):
    """True when the whole circle of `inner` lies in the closed disk `outer`."""

    d = math.hypot(inner[0] - outer[0], inner[1] - outer[1])
    return d + inner[2] <= outer[2] + _tolerance(outer[2])


def _crosses(a, b):
    """True when the circles of a and b cross at two distinct points."""

    d = math.hypot(b[0] - a[0], b[1] - a[1])
    tol = _tolerance(max(a[2], b[2]))
    return abs(a[2] - b[2]) + tol < d < a[2] + b[2] - tol


def _in_region(px, py, region):
    xmin, ymin, xmax, ymax = region
    tol = _tolerance(max(abs(xmin), abs(xmax), abs(ymin), abs(ymax)))
    return xmin - tol <= px <= xmax + tol and ymin - tol <= py <= ymax + tol


def _edges(region):
    """The four sides of the region, counter-clockwise."""

    xmin, ymin, xmax, ymax = region
    corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
    return list(zip(corners, corners[1:] + corners[:1]))


def _circle_line_angles(disk, p, q):
    """Angles on the circle of `disk` where it meets the line through p and q."""

    cx, cy, r = disk
    out = []
    if p[0] == q[0]:
        c = (p[0] - cx) / r
        if abs(c) <= 1.0:
            a = math.acos(c)
            out = [a, -a]
    else:
        s = (p[1] - cy) / r
        if abs(s) <= 1.0:
            a = math.asin(s)
            out = [a, math.pi - a]
    return [t % (2.0 * math.pi) for t in out]


def _boundary_area(disks, inside, region):
    """Area bounded by the arcs of the given disks, clipped to a rectangle.

    With inside=True the boundary of the intersection of all the disks with
    the region is followed: arcs of each disk inside all the others and
    region sides inside every disk. With inside=False the boundary of the
    union is followed instead: arcs outside all the others and region sides
    inside some disk. Disks must be distinct.

    A pair of circles that does not cross properly (disjoint, nested or
    tangent) is classified as a whole, so tangent points never decide an arc.
    """

    total = 0.0
    edges = _edges(region)
    for i, disk in enumerate(disks):
        cx, cy, r = disk
        others = [d for j, d in enumerate(disks) if j != i]
        crossing = [o for o in others if _crosses(disk, o)]
        whole = [_contains_circle(o, disk) for o in others if not _crosses(disk, o)]
        if inside and not all(whole):
            continue
        if not inside and any(whole):
            continue

        angles = []
        for (ox, oy, orad) in crossing:
            dx, dy = ox - cx, oy - cy
            d = math.hypot(dx, dy)
            a = math.atan2(dy, dx)
            c = (r * r + d * d - orad * orad) / (2.0 * r * d)
            alpha = math.acos(max(-1.0, min(1.0, c)))
            angles.extend([(a - alpha) % (2.0 * math.pi), (a + alpha) % (2.0 * math.pi)])
        for p, q in edges:
            angles.extend(_circle_line_angles(disk, p, q))
        if len(angles) == 0:
            bounds = [0.0, 2.0 * math.pi]
        else:
            angles.sort()
            bounds = angles + [angles[0] + 2.0 * math.pi]

        for t1, t2 in zip(bounds[:-1], bounds[1:]):
            if t2 - t1 <= 0.0:
                continue
            tm = 0.5 * (t1 + t2)
            px, py = cx + r * math.cos(tm), cy + r * math.sin(tm)
            if not _in_region(px, py, region):
                continue
            flags = [math.hypot(px - ox, py - oy) < orad for (ox, oy, orad) in crossing]
            if (inside and all(flags)) or (not inside and not any(flags)):
                total += _arc_integral(cx, cy, r, t1, t2)

    for p, q in edges:
        ex, ey = q[0] - p[0], q[1] - p[1]
        length2 = ex * ex + ey * ey
        cuts = [0.0, 1.0]
        for disk in disks:
            for t in _circle_line_angles(disk, p, q):
                x, y = disk[0] + disk[2] * math.cos(t), disk[1] + disk[2] * math.sin(t)
                s = ((x - p[0]) * ex + (y - p[1]) * ey) / length2
                if 0.0 < s < 1.0:
                    cuts.append(s)
        cuts.sort()
        for s1, s2 in zip(cuts[:-1], cuts[1:]):
            if s2 - s1 <= 0.0:
                continue
            sm = 0.5 * (s1 + s2)
            mx, my = p[0] + sm * (q[0] - p[0]), p[1] + sm * (q[1] - p[1])
            flags = [math.hypot(mx - ox, my - oy) <= orad for (ox, oy, orad) in disks]
            if (inside and all(flags)) or (not inside and any(flags)):
                a = (p[0] + s1 * (q[0] - p[0]), p[1] + s1 * (q[1] - p[1]))
                b = (p[0] + s2 * (q[0] - p[0]), p[1] + s2 * (q[1] - p[1]))
                total += _segment_integral(a, b)
    return total


def _distinct(disks):
    out = []
    for d in disks:
        if not any(abs(d[0] - e[0]) < 1.0e-12 and abs(d[1] - e[1]) < 1.0e-12 and abs(d[2] - e[2]) < 1.0e-12 for e in out):
            out.append(d)
    return out


def _exact_areas(layout, radii):
    """Exact elementary-region areas by inclusion-exclusion.

    The area of the intersection of every subset of disks with the region
    comes from its boundary, then the area of "exactly this subset" follows
    by Moebius inversion over supersets.

    Raises:
       ValueError: Raised if there are too many servers.
    """

    m = layout.nserver
    if m > MAX_EXACT_SERVERS:
        raise ValueError("Exact geometry supports at most %d servers, got %d; use montecarlo mode" % (MAX_EXACT_SERVERS, m))

    nmask = 1 << m
    inter = np.zeros(nmask)
    for mask in range(1, nmask):
        idx = members(mask)
        if any(radii[i] <= 0.0 for i in idx):
            continue
        disks = _distinct([(layout.positions[i][0], layout.positions[i][1], radii[i]) for i in idx])
        inter[mask] = max(0.0, _boundary_area(disks, True, layout.region))

    areas = {}
    for mask in range(1, nmask):
        a = 0.0
        for sup in range(mask, nmask):
            if sup & mask == mask:
                a += (-1) ** (popcount(sup) - popcount(mask)) * inter[sup]
        areas[mask] = max(0.0, a)
    return areas

def _check_mode(mode):
    if mode not in ("exact", "montecarlo"):
        raise ValueError("Unsupported geometry mode '%s'" % str(mode))


def decompose(layout, state=None, mode="exact", seed=0, nsamples=DEFAULT_SAMPLES, points=None):
    """Splits the covered part of the region into elementary regions.

    Args:
       layout: A ServerLayout.
       state: A CoverageState; the empty state by default.
       mode: "exact" or "montecarlo".
       seed: Seed of the Monte Carlo point set.
       nsamples: Size of the Monte Carlo point set.
       points: An explicit SamplePoints object, overriding seed and nsamples.

    Returns:
       An AreaDecomposition.

    Raises:
       ValueError: Raised on an unsupported mode, or on more servers than
          the exact mode handles.
    """

    _check_mode(mode)
    if state is None:
        state = coverage_state(layout)
    radii = state.radii

    if mode == "exact":
        return AreaDecomposition(layout.nserver, _exact_areas(layout, radii), layout.areal_rate, "exact", 0.0)

    if points is None:
        points = sample_points(layout.region, nsamples, seed)
    masks = membership(layout, radii, points)
    counts = np.bincount(masks, minlength=1 << layout.nserver)
    scale = points.area / points.npoint
    areas = dict((k, counts[k] * scale) for k in range(1, len(counts)) if counts[k] > 0)
    f = float(np.sum(counts[1:])) / points.npoint
    se = points.area * math.sqrt(f * (1.0 - f) / points.npoint)
    return AreaDecomposition(layout.nserver, areas, layout.areal_rate, "montecarlo", se)


def union_area(layout, state=None, mode="exact", seed=0, nsamples=DEFAULT_SAMPLES):
    """Area of the union of the serving disks, clipped to the region.

    See decompose for the arguments.
    """

    _check_mode(mode)
    if state is None:
        state = coverage_state(layout)
    if mode == "exact":
        radii = state.radii
        if layout.nserver > MAX_EXACT_SERVERS:
            _exact_areas(layout, radii)
        disks = _distinct([(layout.positions[i][0], layout.positions[i][1], radii[i])
                           for i in range(layout.nserver) if radii[i] > 0.0])
        if len(disks) == 0:
            return 0.0
        return max(0.0, _boundary_area(disks, False, layout.region))
    return decompose(layout, state, mode, seed, nsamples).union_area
