"""Petri net model and DOT / PNML export.

Places are either the source ``i``, the sink ``o``, or an internal place
keyed by a pair of activity sets; internal place names join the sorted
members of each set with commas and the two sets with ``&``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass


@dataclass(frozen=True)
class ActivitySetPair:
    set_a: frozenset[str]
    set_b: frozenset[str]

    def __post_init__(self):
        if not self.set_a or not self.set_b:
            raise ValueError("both sets of an ActivitySetPair must be non-empty")

    @property
    def label(self) -> str:
        return ",".join(sorted(self.set_a)) + "&" + ",".join(sorted(self.set_b))

    def contains(self, other: "ActivitySetPair") -> bool:
        return other.set_a <= self.set_a and other.set_b <= self.set_b


def pair(set_a, set_b) -> ActivitySetPair:
    return ActivitySetPair(frozenset(set_a), frozenset(set_b))


@dataclass(frozen=True)
class Place:
    kind: str  # "source" | "sink" | "internal"
    pair: ActivitySetPair | None = None

    def __post_init__(self):
        if self.kind not in ("source", "sink", "internal"):
            raise ValueError(f"bad place kind {self.kind!r}")
        if (self.kind == "internal") != (self.pair is not None):
            raise ValueError("internal places carry a pair, terminal places do not")

    @property
    def name(self) -> str:
        if self.kind == "source":
            return "i"
        if self.kind == "sink":
            return "o"
        return self.pair.label


SOURCE = Place("source")
SINK = Place("sink")


@dataclass(frozen=True)
class FlowArc:
    """Arc between a place and a transition; transitions are plain activity names."""

    source: Place | str
    target: Place | str

    def __post_init__(self):
        if isinstance(self.source, Place) == isinstance(self.target, Place):
            raise ValueError("a flow arc connects a place with a transition")


@dataclass(frozen=True)
class PetriNet:
    transitions: frozenset[str]
    places: frozenset[Place]
    flow: frozenset[FlowArc]


def _endpoint_name(x: Place | str) -> str:
    return x.name if isinstance(x, Place) else x


def _arc_sort_key(arc: FlowArc):
    return (_endpoint_name(arc.source), _endpoint_name(arc.target))


def export_dot(net: PetriNet) -> str:
    """DOT digraph: places as circles (i/o labeled), transitions as boxes."""
    lines = ["digraph petrinet {", "  rankdir=LR;"]
    for place in sorted(net.places, key=lambda p: p.name):
        label = place.name if place.kind != "internal" else ""
        lines.append(f'  "p_{place.name}" [shape=circle, label="{label}"];')
    for t in sorted(net.transitions):
        lines.append(f'  "t_{t}" [shape=box, label="{t}"];')
    for arc in sorted(net.flow, key=_arc_sort_key):
        src = ("p_" if isinstance(arc.source, Place) else "t_") + _endpoint_name(arc.source)
        dst = ("p_" if isinstance(arc.target, Place) else "t_") + _endpoint_name(arc.target)
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


_PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"


def export_pnml(net: PetriNet) -> str:
    """PNML with one place/transition/arc element per net element."""
    root = ET.Element("pnml")
    netel = ET.SubElement(root, "net", id="net0", type="http://www.pnml.org/version-2009/grammar/ptnet")
    places = sorted(net.places, key=lambda p: p.name)
    transitions = sorted(net.transitions)
    place_ids = {p.name: f"p{i}" for i, p in enumerate(places)}
    trans_ids = {t: f"t{i}" for i, t in enumerate(transitions)}
    for p in places:
        el = ET.SubElement(netel, "place", id=place_ids[p.name])
        ET.SubElement(ET.SubElement(el, "name"), "text").text = p.name
    for t in transitions:
        el = ET.SubElement(netel, "transition", id=trans_ids[t])
        ET.SubElement(ET.SubElement(el, "name"), "text").text = t
    for i, arc in enumerate(sorted(net.flow, key=_arc_sort_key)):
        if isinstance(arc.source, Place):
            src, dst = place_ids[arc.source.name], trans_ids[arc.target]
        else:
            src, dst = trans_ids[arc.source], place_ids[arc.target.name]
        ET.SubElement(netel, "arc", id=f"a{i}", source=src, target=dst)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def place_from_name(name: str) -> Place:
    if name == "i":
        return SOURCE
    if name == "o":
        return SINK
    part_a, part_b = name.split("&")
    return Place("internal", pair(part_a.split(","), part_b.split(",")))


def parse_pnml(text: str) -> PetriNet:
    """Inverse of export_pnml; reconstructs the net from element names."""
    root = ET.fromstring(text)
    netel = root.find("net")
    id_to_name: dict[str, str] = {}
    id_is_place: dict[str, bool] = {}
    places: set[Place] = set()
    transitions: set[str] = set()
    for el in netel:
        if el.tag in ("place", "transition"):
            name = el.find("name/text").text
            id_to_name[el.get("id")] = name
            id_is_place[el.get("id")] = el.tag == "place"
            if el.tag == "place":
                places.add(place_from_name(name))
            else:
                transitions.add(name)
    flow: set[FlowArc] = set()
    for el in netel.findall("arc"):
        src_id, dst_id = el.get("source"), el.get("target")
        src = place_from_name(id_to_name[src_id]) if id_is_place[src_id] else id_to_name[src_id]
        dst = place_from_name(id_to_name[dst_id]) if id_is_place[dst_id] else id_to_name[dst_id]
        flow.add(FlowArc(src, dst))
    return PetriNet(frozenset(transitions), frozenset(places), frozenset(flow))
