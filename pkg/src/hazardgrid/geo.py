"""County polygons and the line-to-county intersection index.

Geometry is planar in raw (longitude, latitude) degrees. A line is the
straight segment between its endpoint buses. Boundary contact counts as an
intersection, and holes are handled with the even-odd rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import DuplicateIdError, SchemaError
from .network import Network

Point = tuple[float, float]
Ring = tuple[Point, ...]
# first ring is the outer boundary, the rest are holes
Polygon = tuple[Ring, ...]
BBox = tuple[float, float, float, float]


@dataclass(frozen=True)
class Region:
    fips: str
    polygons: tuple[Polygon, ...]

    @property
    def bbox(self) -> BBox:
        xs = [x for poly in self.polygons for ring in poly for x, _ in ring]
        ys = [y for poly in self.polygons for ring in poly for _, y in ring]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class RegionSet:
    regions: dict[str, Region]
    bboxes: dict[str, BBox]

    @classmethod
    def from_regions(cls, regions: Iterable[Region]) -> "RegionSet":
        out: dict[str, Region] = {}
        for region in regions:
            if region.fips in out:
                raise DuplicateIdError("duplicate fips", entity=region.fips)
            out[region.fips] = region
        ordered = {f: out[f] for f in sorted(out)}
        return cls(ordered, {f: r.bbox for f, r in ordered.items()})

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions.values())


LineRegionIndex = dict[str, tuple[str, ...]]


def _ring(coords: Any, loc: str) -> Ring:
    if not isinstance(coords, list):
        raise SchemaError("ring must be an array of positions", locator=loc)
    pts = []
    for pos in coords:
        if (
            not isinstance(pos, list)
            or len(pos) < 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pos[:2])
        ):
            raise SchemaError("position must be [longitude, latitude]", locator=loc)
        pts.append((float(pos[0]), float(pos[1])))
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        raise SchemaError(f"degenerate ring with {len(pts)} distinct vertices", locator=loc)
    return tuple(pts)


def _polygon(coords: Any, loc: str) -> Polygon:
    if not isinstance(coords, list) or not coords:
        raise SchemaError("polygon must be a nonempty array of rings", locator=loc)
    return tuple(_ring(r, f"{loc} ring {j}") for j, r in enumerate(coords))


def parse_regions(text: str) -> RegionSet:
    """Parse a GeoJSON FeatureCollection whose features carry a string ``fips``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", locator=f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise SchemaError("expected a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise SchemaError("FeatureCollection.features must be an array")

    regions: list[Region] = []
    seen: set[str] = set()
    for i, feat in enumerate(features):
        loc = f"features[{i}]"
        if not isinstance(feat, dict):
            raise SchemaError("feature must be an object", locator=loc)
        props = feat.get("properties") or {}
        fips = props.get("fips") if isinstance(props, dict) else None
        if not isinstance(fips, str) or not fips:
            raise SchemaError("missing string property 'fips'", locator=loc)
        if fips in seen:
            raise DuplicateIdError("duplicate fips", locator=loc, entity=fips)
        seen.add(fips)
        geom = feat.get("geometry")
        if not isinstance(geom, dict):
            raise SchemaError("missing geometry", locator=loc, entity=fips)
        kind, coords = geom.get("type"), geom.get("coordinates")
        if kind == "Polygon":
            polys = (_polygon(coords, loc),)
        elif kind == "MultiPolygon":
            if not isinstance(coords, list) or not coords:
                raise SchemaError("MultiPolygon needs at least one polygon", locator=loc, entity=fips)
            polys = tuple(_polygon(c, f"{loc} polygon {j}") for j, c in enumerate(coords))
        else:
            raise SchemaError(f"unsupported geometry type {kind!r}", locator=loc, entity=fips)
        regions.append(Region(fips, polys))
    return RegionSet.from_regions(regions)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    """p is collinear with a-b and lies within its bounding box."""
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Closed-segment intersection test, touching and collinear overlap included."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    return (
        (d1 == 0 and _on_segment(q1, q2, p1))
        or (d2 == 0 and _on_segment(q1, q2, p2))
        or (d3 == 0 and _on_segment(p1, p2, q1))
        or (d4 == 0 and _on_segment(p1, p2, q2))
    )


def _edges(ring: Ring):
    n = len(ring)
    for i in range(n):
        yield ring[i], ring[(i + 1) % n]


def point_in_polygon(pt: Point, polygon: Polygon) -> bool:
    """Even-odd test over all rings; points on any ring count as inside."""
    x, y = pt
    inside = False
    for ring in polygon:
        for a, b in _edges(ring):
            if _orient(a, b, pt) == 0 and _on_segment(a, b, pt):
                return True
            if (a[1] > y) != (b[1] > y):
                x_cross = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
                if x < x_cross:
                    inside = not inside
    return inside


def point_in_region(pt: Point, region: Region) -> bool:
    return any(point_in_polygon(pt, poly) for poly in region.polygons)


def _bbox_disjoint(p1: Point, p2: Point, box: BBox) -> bool:
    return (
        max(p1[0], p2[0]) < box[0]
        or min(p1[0], p2[0]) > box[2]
        or max(p1[1], p2[1]) < box[1]
        or min(p1[1], p2[1]) > box[3]
    )


def segment_intersects_region(p1: Point, p2: Point, region: Region, bbox: BBox | None = None) -> bool:
    """True if the closed segment p1-p2 touches the closed region at all."""
    if _bbox_disjoint(p1, p2, bbox if bbox is not None else region.bbox):
        return False
    if point_in_region(p1, region) or point_in_region(p2, region):
        return True
    for poly in region.polygons:
        for ring in poly:
            for a, b in _edges(ring):
                if segments_intersect(p1, p2, a, b):
                    return True
    return False


def line_segment(network: Network, line_id: str) -> tuple[Point, Point]:
    line = network.lines[line_id]
    a, b = network.buses[line.from_bus], network.buses[line.to_bus]
    return (a.longitude, a.latitude), (b.longitude, b.latitude)


def map_lines_to_counties(network: Network, regions: RegionSet) -> LineRegionIndex:
    """Map each line id to the sorted fips codes its segment intersects."""
    index: LineRegionIndex = {}
    for line_id in network.lines:
        p1, p2 = line_segment(network, line_id)
        index[line_id] = tuple(
            fips for fips, region in regions.regions.items()
            if segment_intersects_region(p1, p2, region, regions.bboxes[fips])
        )
    return index
