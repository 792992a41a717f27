"""
Newline-delimited JSON agent service over TCP.

One request object per line in, one response object per line out, in order,
per connection. Ops: assess (Part-1 SLP), recommend (Part-2 RLCR, rank level
and contents), reload (swap a knowledge base from an FML file).
"""

import json
import logging
import socketserver
import threading
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from analysis.recommender import build_part2_system, rank_to_level, recommend_contents
from app import schemas
from config import config
from core.exceptions import FuzzyAgentError
from core.inference import inference_engine
from data.content_graph import ContentGraph
from data.fml_io import load_fml
from data.models import FuzzySystem

logger = logging.getLogger(__name__)

PART1_SIGNATURE = (("SA", "LCD", "SCL", "STS"), "SLP")
PART2_SIGNATURE = (("SA", "SLP"), "RLCR")


def _signature(system: FuzzySystem) -> Tuple[Tuple[str, ...], str]:
    return tuple(v.name for v in system.input_variables), system.output_variable.name


@dataclass(frozen=True)
class ServiceState:
    part1: FuzzySystem
    part2: FuzzySystem
    graph: ContentGraph
    part2_derived: bool = False  # part2 is rebuilt from part1 on every part1 reload


class AgentService:
    """Request dispatch over a swappable (part1, part2, graph) state."""

    def __init__(self, part1: FuzzySystem, part2: Optional[FuzzySystem], graph: ContentGraph,
                 current_grade: Optional[int] = None):
        derived = part2 is None
        if derived:
            part2 = build_part2_system(part1)
        for system, expected in ((part1, PART1_SIGNATURE), (part2, PART2_SIGNATURE)):
            if _signature(system) != expected:
                raise FuzzyAgentError(f"{system.name} has signature {_signature(system)}, expected {expected}")
        self._state = ServiceState(part1, part2, graph, part2_derived=derived)
        self._lock = threading.Lock()
        self.current_grade = config.CURRENT_GRADE if current_grade is None else current_grade
        self.handlers = {
            "assess": self.assess,
            "recommend": self.recommend,
            "reload": self.reload,
        }

    @property
    def state(self) -> ServiceState:
        return self._state

    def handle_line(self, line: bytes) -> Dict[str, Any]:
        """Answer one request line; never raises."""
        request_id = None
        try:
            try:
                raw = json.loads(line.decode("utf-8"))
            except UnicodeDecodeError:
                return schemas.error(None, "request is not valid UTF-8")
            except ValueError as e:
                return schemas.error(None, f"malformed JSON: {e}")
            if not isinstance(raw, dict):
                return schemas.error(None, "request must be a JSON object")
            candidate = raw.get("requestId")
            if isinstance(candidate, (str, int)) and not isinstance(candidate, bool):
                request_id = candidate
            try:
                envelope = schemas.Envelope.model_validate(raw)
            except ValidationError as e:
                return schemas.error(request_id, f"invalid request: {e.errors()[0]['msg']}")
            handler = self.handlers.get(envelope.op)
            if handler is None:
                return schemas.error(request_id, f"unknown op {envelope.op!r}")
            return schemas.ok(request_id, handler(raw))
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or "request"
            return schemas.error(request_id, f"invalid {field}: {first['msg']}")
        except (FuzzyAgentError, OSError) as e:
            return schemas.error(request_id, str(e) or e.__class__.__name__)
        except Exception as e:
            logger.error(f"Unexpected error handling request {request_id!r}: {e}")
            return schemas.error(request_id, f"internal error: {e.__class__.__name__}")

    def assess(self, raw: Dict[str, Any]) -> Dict[str, Any]:
        request = schemas.AssessRequest.model_validate(raw)
        result = inference_engine.infer(self._state.part1, {
            "SA": request.sa, "LCD": request.lcd, "SCL": request.scl, "STS": request.sts,
        })
        payload = {"slp": result.crisp_value, "label": result.winning_term}
        if result.clamped:
            payload["clamped"] = result.clamped
        return payload

    def recommend(self, raw: Dict[str, Any]) -> Dict[str, Any]:
        request = schemas.RecommendRequest.model_validate(raw)
        state = self._state
        clamped = []
        slp = request.slp
        if slp is None:
            assessed = inference_engine.infer(state.part1, {
                "SA": request.sa, "LCD": request.lcd, "SCL": request.scl, "STS": request.sts,
            })
            slp = assessed.crisp_value
            clamped.extend(assessed.clamped)
        ranked = inference_engine.infer(state.part2, {"SA": request.sa, "SLP": slp})
        clamped.extend(n for n in ranked.clamped if n not in clamped)
        level = rank_to_level(ranked.crisp_value)
        grade = self.current_grade if request.grade is None else request.grade
        contents = recommend_contents(state.graph, level, grade, mastered=request.mastered)
        payload = {
            "slp": slp,
            "rlcr": ranked.crisp_value,
            "level": level.name,
            "contents": [schemas.ContentSummary(id=n.id, title=n.title).model_dump() for n in contents],
        }
        if clamped:
            payload["clamped"] = clamped
        return payload

    def reload(self, raw: Dict[str, Any]) -> Dict[str, Any]:
        request = schemas.ReloadRequest.model_validate(raw)
        system = load_fml(request.path)
        expected = PART1_SIGNATURE if request.target == "part1" else PART2_SIGNATURE
        if _signature(system) != expected:
            raise FuzzyAgentError(
                f"{request.path} has signature {_signature(system)}, {request.target} needs {expected}")
        changes = {request.target: system}
        if request.target == "part2":
            changes["part2_derived"] = False
        with self._lock:
            if request.target == "part1" and self._state.part2_derived:
                changes["part2"] = build_part2_system(system)
            self._state = replace(self._state, **changes)
        rebuilt = "part2" in changes and request.target == "part1"
        logger.info(f"Reloaded {request.target} knowledge base from {request.path}"
                    + ("; rebuilt part2 from it" if rebuilt else ""))
        return {"target": request.target, "system": system.name, "rules": len(system.rules),
                "part2Rebuilt": rebuilt}


class _LineHandler(socketserver.StreamRequestHandler):

    def handle(self):
        peer = "%s:%s" % self.client_address[:2]
        logger.debug(f"Connection from {peer}")
        try:
            for line in self.rfile:
                line = line.rstrip(b"\r\n")
                if not line.strip():
                    continue
                response = self.server.service.handle_line(line)
                self.wfile.write(json.dumps(response).encode("utf-8") + b"\n")
                self.wfile.flush()
        except (ConnectionError, OSError) as e:
            logger.debug(f"Connection {peer} closed: {e}")


class AgentServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: Tuple[str, int], service: AgentService):
        self.service = service
        super().__init__(address, _LineHandler)

    @property
    def bound_address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"


def serve(bind: str, part1: FuzzySystem, part2: Optional[FuzzySystem], graph: ContentGraph,
          on_ready=None):
    """Run the service until interrupted; part2=None derives it from part1."""
    service = AgentService(part1, part2, graph)
    with AgentServer(config.parse_bind(bind), service) as server:
        logger.info(f"Agent service listening on {server.bound_address}")
        if on_ready:
            on_ready(server)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            logger.info("Interrupted, shutting down agent service")
        finally:
            server.server_close()
