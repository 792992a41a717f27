"""
Learning-content ontology: contents with grade/level attributes linked by
prerequisite edges. Loaded from JSON; a small number-line / groups-of-numbers
sample ships with the package.
"""

import heapq
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel, Field, ValidationError

from core.exceptions import ContentGraphError, CyclicGraph, UnknownContent

logger = logging.getLogger(__name__)

SAMPLE_GRAPH_PATH = Path(__file__).parent / "sample_content_graph.json"


class ContentLevel(Enum):
    ELEMENTARY = "Elementary"
    INTERMEDIATE = "Intermediate"
    HIGH_INTERMEDIATE = "HighIntermediate"
    ADVANCED = "Advanced"


@dataclass(frozen=True)
class ContentNode:
    id: str
    title: str
    category: str
    grade: int
    level: ContentLevel
    prerequisites: tuple = ()
    area: Optional[str] = None
    subject: Optional[str] = None


class _NodeSchema(BaseModel):
    id: str = Field(min_length=1)
    title: str
    category: str = ""
    grade: int
    level: ContentLevel
    prerequisites: List[str] = Field(default_factory=list)
    area: Optional[str] = None
    subject: Optional[str] = None


class _GraphSchema(BaseModel):
    nodes: List[_NodeSchema]


class ContentGraph:
    """Acyclic prerequisite graph indexed by content id (insertion ordered)."""

    def __init__(self, nodes: Iterable[ContentNode]):
        self.nodes: Dict[str, ContentNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise ContentGraphError(f"Duplicate content id {node.id}")
            self.nodes[node.id] = node
        self._order = {node_id: i for i, node_id in enumerate(self.nodes)}
        for node in self.nodes.values():
            for prereq in node.prerequisites:
                if prereq not in self.nodes:
                    raise UnknownContent(f"{node.id} requires unknown content {prereq}")
        self.topological_order(self.nodes)  # raises CyclicGraph

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: str) -> ContentNode:
        return self.nodes[node_id]

    @property
    def grades(self) -> List[int]:
        return sorted({node.grade for node in self.nodes.values()})

    def prerequisite_closure(self, node_ids: Iterable[str], mastered: Iterable[str] = ()) -> List[str]:
        """The given nodes plus every prerequisite reachable without crossing a mastered node."""
        mastered = set(mastered)
        seen = set()
        stack = [n for n in node_ids]
        while stack:
            node_id = stack.pop()
            if node_id in seen:
                continue
            seen.add(node_id)
            for prereq in self.nodes[node_id].prerequisites:
                if prereq not in mastered and prereq not in seen:
                    stack.append(prereq)
        return sorted(seen, key=self._order.__getitem__)

    def topological_order(self, node_ids: Iterable[str]) -> List[str]:
        """Kahn's algorithm on the induced subgraph; ties broken by insertion order."""
        subset = set(node_ids)
        indegree = {n: 0 for n in subset}
        dependents = defaultdict(list)
        for node_id in subset:
            for prereq in self.nodes[node_id].prerequisites:
                if prereq in subset:
                    indegree[node_id] += 1
                    dependents[prereq].append(node_id)

        ready = [(self._order[n], n) for n, d in indegree.items() if d == 0]
        heapq.heapify(ready)
        order: List[str] = []
        while ready:
            _, node_id = heapq.heappop(ready)
            order.append(node_id)
            for nxt in dependents[node_id]:
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    heapq.heappush(ready, (self._order[nxt], nxt))

        if len(order) != len(subset):
            stuck = sorted(n for n, d in indegree.items() if d > 0)
            raise CyclicGraph(f"Cycle detected among prerequisites: {stuck}")
        return order


def content_graph_from_dict(payload: dict) -> ContentGraph:
    try:
        parsed = _GraphSchema.model_validate(payload)
    except ValidationError as e:
        raise ContentGraphError(f"Invalid content graph: {e}")
    return ContentGraph(
        ContentNode(
            id=n.id, title=n.title, category=n.category, grade=n.grade, level=n.level,
            prerequisites=tuple(n.prerequisites), area=n.area, subject=n.subject,
        )
        for n in parsed.nodes
    )


def load_content_graph(path) -> ContentGraph:
    """Load a `{nodes: [...]}` content graph JSON file."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ContentGraphError(f"{path}: invalid JSON: {e}")
    graph = content_graph_from_dict(payload)
    logger.info(f"Loaded content graph with {len(graph)} nodes from {path}")
    return graph


def sample_content_graph() -> ContentGraph:
    """Bundled fourth-grade number-line / groups-of-numbers fragment."""
    return load_content_graph(SAMPLE_GRAPH_PATH)
