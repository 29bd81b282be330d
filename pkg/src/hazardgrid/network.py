"""Transmission network data model, JSON parsing, and island detection.

All powers are MW and all angles radians. Line susceptance is given in
MW/rad, so the DC flow on a line is simply ``-b * (theta_from - theta_to)``.
Conversion from per-unit case data is left to whoever prepares the file.

Network file layout::

    {
      "buses":      [{"id": "B1", "latitude": 30.5, "longitude": -99.5}, ...],
      "lines":      [{"id": "L1", "from_bus": "B1", "to_bus": "B2",
                      "susceptance": 800.0, "flow_limit": 120.0,
                      "angle_min": -0.5236, "angle_max": 0.5236}, ...],
      "generators": [{"id": "G1", "bus": "B1", "p_min": 0.0, "p_max": 300.0}, ...],
      "loads":      [{"bus": "B1", "base_demand": 50.0}, ...]
    }

``angle_min``/``angle_max`` are optional and default to -pi/6 and pi/6.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import DataRangeError, DuplicateIdError, ReferenceIntegrityError, SchemaError, UnknownDayError

DEFAULT_ANGLE_LIMIT = math.pi / 6
HOURS_PER_DAY = 24


@dataclass(frozen=True)
class Bus:
    id: str
    latitude: float
    longitude: float


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    susceptance: float
    flow_limit: float
    angle_min: float = -DEFAULT_ANGLE_LIMIT
    angle_max: float = DEFAULT_ANGLE_LIMIT


@dataclass(frozen=True)
class Generator:
    id: str
    bus: str
    p_min: float
    p_max: float


@dataclass(frozen=True)
class LoadPoint:
    bus: str
    base_demand: float


@dataclass(frozen=True)
class Network:
    """Validated network. Collections are keyed by id and ordered by id.

    Treat instances as read-only; they are shared between worker processes
    and solver calls.
    """

    buses: dict[str, Bus]
    lines: dict[str, Line]
    generators: dict[str, Generator]
    loads: dict[str, LoadPoint]
    lines_from: dict[str, tuple[str, ...]] = field(compare=False, repr=False)
    lines_to: dict[str, tuple[str, ...]] = field(compare=False, repr=False)
    generators_at: dict[str, tuple[str, ...]] = field(compare=False, repr=False)

    @classmethod
    def build(
        cls,
        buses: Iterable[Bus],
        lines: Iterable[Line],
        generators: Iterable[Generator],
        loads: Iterable[LoadPoint],
    ) -> "Network":
        """Assemble and validate a network from typed records.

        Loads on the same bus are summed into one :class:`LoadPoint`.
        """
        bus_map: dict[str, Bus] = {}
        for i, bus in enumerate(buses):
            loc = f"buses[{i}]"
            if not bus.id:
                raise SchemaError("bus id must be nonempty", locator=loc)
            if bus.id in bus_map:
                raise DuplicateIdError("duplicate bus id", locator=loc, entity=bus.id)
            if not -90.0 <= bus.latitude <= 90.0:
                raise DataRangeError(f"latitude {bus.latitude} outside [-90, 90]", locator=loc, entity=bus.id)
            if not -180.0 <= bus.longitude <= 180.0:
                raise DataRangeError(f"longitude {bus.longitude} outside [-180, 180]", locator=loc, entity=bus.id)
            bus_map[bus.id] = bus

        line_map: dict[str, Line] = {}
        for i, line in enumerate(lines):
            loc = f"lines[{i}]"
            if not line.id:
                raise SchemaError("line id must be nonempty", locator=loc)
            if line.id in line_map:
                raise DuplicateIdError("duplicate line id", locator=loc, entity=line.id)
            for end in (line.from_bus, line.to_bus):
                if end not in bus_map:
                    raise ReferenceIntegrityError(f"unknown bus {end!r}", locator=loc, entity=line.id)
            if line.from_bus == line.to_bus:
                raise SchemaError("from_bus and to_bus must differ", locator=loc, entity=line.id)
            if not line.susceptance > 0:
                raise DataRangeError("susceptance must be > 0", locator=loc, entity=line.id)
            if not line.flow_limit >= 0:
                raise DataRangeError("flow_limit must be >= 0", locator=loc, entity=line.id)
            if not line.angle_min <= 0.0 <= line.angle_max:
                raise DataRangeError("need angle_min <= 0 <= angle_max", locator=loc, entity=line.id)
            line_map[line.id] = line

        gen_map: dict[str, Generator] = {}
        for i, gen in enumerate(generators):
            loc = f"generators[{i}]"
            if not gen.id:
                raise SchemaError("generator id must be nonempty", locator=loc)
            if gen.id in gen_map:
                raise DuplicateIdError("duplicate generator id", locator=loc, entity=gen.id)
            if gen.bus not in bus_map:
                raise ReferenceIntegrityError(f"unknown bus {gen.bus!r}", locator=loc, entity=gen.id)
            if not 0.0 <= gen.p_min <= gen.p_max:
                raise DataRangeError("need 0 <= p_min <= p_max", locator=loc, entity=gen.id)
            gen_map[gen.id] = gen

        demand: dict[str, float] = {}
        for i, load in enumerate(loads):
            loc = f"loads[{i}]"
            if load.bus not in bus_map:
                raise ReferenceIntegrityError(f"unknown bus {load.bus!r}", locator=loc, entity=load.bus)
            if not load.base_demand >= 0:
                raise DataRangeError("base_demand must be >= 0", locator=loc, entity=load.bus)
            demand[load.bus] = demand.get(load.bus, 0.0) + load.base_demand

        bus_ids = sorted(bus_map)
        line_ids = sorted(line_map)
        gen_ids = sorted(gen_map)
        lines_from: dict[str, list[str]] = {b: [] for b in bus_ids}
        lines_to: dict[str, list[str]] = {b: [] for b in bus_ids}
        generators_at: dict[str, list[str]] = {b: [] for b in bus_ids}
        for l in line_ids:
            lines_from[line_map[l].from_bus].append(l)
            lines_to[line_map[l].to_bus].append(l)
        for g in gen_ids:
            generators_at[gen_map[g].bus].append(g)
        return cls(
            buses={b: bus_map[b] for b in bus_ids},
            lines={l: line_map[l] for l in line_ids},
            generators={g: gen_map[g] for g in gen_ids},
            loads={b: LoadPoint(b, demand[b]) for b in sorted(demand)},
            lines_from={b: tuple(v) for b, v in lines_from.items()},
            lines_to={b: tuple(v) for b, v in lines_to.items()},
            generators_at={b: tuple(v) for b, v in generators_at.items()},
        )

    def base_demand(self, bus: str) -> float:
        load = self.loads.get(bus)
        return load.base_demand if load is not None else 0.0

    def total_base_demand(self) -> float:
        return math.fsum(load.base_demand for load in self.loads.values())


def _field(record: Mapping[str, Any], name: str, kind: str, loc: str, entity: str | None = None, default=None):
    if name not in record:
        if default is not None:
            return default
        raise SchemaError(f"missing field {name!r}", locator=loc, entity=entity)
    value = record[name]
    if kind == "str":
        if not isinstance(value, str):
            raise SchemaError(f"field {name!r} must be a string", locator=loc, entity=entity)
        return value
    # bool is an int subclass; refuse it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(f"field {name!r} must be a finite number", locator=loc, entity=entity)
    return float(value)


def _records(doc: Mapping[str, Any], key: str) -> list:
    if key not in doc:
        raise SchemaError(f"missing top-level array {key!r}")
    items = doc[key]
    if not isinstance(items, list):
        raise SchemaError(f"top-level {key!r} must be an array")
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaError("record must be an object", locator=f"{key}[{i}]")
    return items


def network_from_dict(doc: Mapping[str, Any]) -> Network:
    if not isinstance(doc, dict):
        raise SchemaError("network document must be an object")
    buses = []
    for i, r in enumerate(_records(doc, "buses")):
        loc = f"buses[{i}]"
        bid = _field(r, "id", "str", loc)
        buses.append(Bus(bid, _field(r, "latitude", "num", loc, bid), _field(r, "longitude", "num", loc, bid)))
    lines = []
    for i, r in enumerate(_records(doc, "lines")):
        loc = f"lines[{i}]"
        lid = _field(r, "id", "str", loc)
        lines.append(
            Line(
                lid,
                _field(r, "from_bus", "str", loc, lid),
                _field(r, "to_bus", "str", loc, lid),
                _field(r, "susceptance", "num", loc, lid),
                _field(r, "flow_limit", "num", loc, lid),
                _field(r, "angle_min", "num", loc, lid, default=-DEFAULT_ANGLE_LIMIT),
                _field(r, "angle_max", "num", loc, lid, default=DEFAULT_ANGLE_LIMIT),
            )
        )
    gens = []
    for i, r in enumerate(_records(doc, "generators")):
        loc = f"generators[{i}]"
        gid = _field(r, "id", "str", loc)
        gens.append(
            Generator(gid, _field(r, "bus", "str", loc, gid), _field(r, "p_min", "num", loc, gid), _field(r, "p_max", "num", loc, gid))
        )
    loads = []
    for i, r in enumerate(_records(doc, "loads")):
        loc = f"loads[{i}]"
        bus = _field(r, "bus", "str", loc)
        loads.append(LoadPoint(bus, _field(r, "base_demand", "num", loc, bus)))
    return Network.build(buses, lines, gens, loads)


def parse_network(text: str) -> Network:
    """Parse a network JSON document and validate every invariant."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", locator=f"line {exc.lineno} column {exc.colno}") from exc
    return network_from_dict(doc)


def network_to_dict(network: Network) -> dict[str, Any]:
    return {
        "buses": [{"id": b.id, "latitude": b.latitude, "longitude": b.longitude} for b in network.buses.values()],
        "lines": [
            {
                "id": l.id,
                "from_bus": l.from_bus,
                "to_bus": l.to_bus,
                "susceptance": l.susceptance,
                "flow_limit": l.flow_limit,
                "angle_min": l.angle_min,
                "angle_max": l.angle_max,
            }
            for l in network.lines.values()
        ],
        "generators": [{"id": g.id, "bus": g.bus, "p_min": g.p_min, "p_max": g.p_max} for g in network.generators.values()],
        "loads": [{"bus": d.bus, "base_demand": d.base_demand} for d in network.loads.values()],
    }


def serialize_network(network: Network) -> str:
    return json.dumps(network_to_dict(network), indent=2) + "\n"


def connected_components(network: Network, removed: Iterable[str] = ()) -> list[tuple[str, ...]]:
    """Partition buses into islands after taking ``removed`` lines out.

    Components are returned with sorted members, ordered by their smallest
    bus id, so ``component[0]`` is the natural angle reference.
    """
    removed = set(removed)
    unknown = removed.difference(network.lines)
    if unknown:
        raise ReferenceIntegrityError(f"unknown line id(s) {sorted(unknown)}")

    neighbours: dict[str, list[str]] = {b: [] for b in network.buses}
    for line in network.lines.values():
        if line.id in removed:
            continue
        neighbours[line.from_bus].append(line.to_bus)
        neighbours[line.to_bus].append(line.from_bus)

    seen: set[str] = set()
    components = []
    for start in network.buses:
        if start in seen:
            continue
        seen.add(start)
        members = [start]
        queue = deque([start])
        while queue:
            for nxt in neighbours[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    members.append(nxt)
                    queue.append(nxt)
        components.append(tuple(sorted(members)))
    return components


@dataclass(frozen=True)
class DemandProfile:
    """Hourly demand multipliers by 1-based day of year."""

    multipliers: dict[int, tuple[float, ...]]

    def __post_init__(self):
        for day, values in self.multipliers.items():
            if len(values) != HOURS_PER_DAY:
                raise SchemaError(f"expected {HOURS_PER_DAY} multipliers, got {len(values)}", locator=f"day {day}")
            if any(not (math.isfinite(v) and v >= 0) for v in values):
                raise DataRangeError("multipliers must be finite and >= 0", locator=f"day {day}")

    @property
    def days(self) -> list[int]:
        return sorted(self.multipliers)

    def for_day(self, day: int) -> tuple[float, ...]:
        try:
            return self.multipliers[day]
        except KeyError:
            raise UnknownDayError(f"day {day} not in demand profile") from None

    def multiplier(self, day: int, hour: int) -> float:
        if not 0 <= hour < HOURS_PER_DAY:
            raise ValueError(f"hour {hour} outside 0..23")
        return self.for_day(day)[hour]


def parse_demand_profile(text: str) -> DemandProfile:
    """Parse ``{"1": [24 multipliers], "2": [...], ...}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", locator=f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("demand profile must be an object keyed by day")
    out: dict[int, tuple[float, ...]] = {}
    for key, values in doc.items():
        try:
            day = int(key)
        except ValueError:
            raise SchemaError(f"day key {key!r} is not an integer") from None
        if not 1 <= day <= 365:
            raise DataRangeError(f"day {day} outside 1..365", locator=f"day {key}")
        if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
            raise SchemaError("multipliers must be an array of numbers", locator=f"day {key}")
        out[day] = tuple(float(v) for v in values)
    return DemandProfile({d: out[d] for d in sorted(out)})


def serialize_demand_profile(profile: DemandProfile) -> str:
    return json.dumps({str(d): list(v) for d, v in profile.multipliers.items()}, indent=1) + "\n"
