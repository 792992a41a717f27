"""
Request and response models for the agent service wire protocol.
"""
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Envelope(BaseModel):
    """Fields shared by every request line; op-specific fields ride alongside."""
    model_config = ConfigDict(extra="allow", populate_by_name=True)

    op: str
    request_id: Optional[Union[str, int]] = Field(default=None, alias="requestId")


class _Payload(BaseModel):
    model_config = ConfigDict(extra="ignore", allow_inf_nan=False)


class AssessRequest(_Payload):
    sa: float
    lcd: float
    scl: float
    sts: float


class RecommendRequest(_Payload):
    sa: float
    slp: Optional[float] = None
    lcd: Optional[float] = None
    scl: Optional[float] = None
    sts: Optional[float] = None
    grade: Optional[int] = None
    mastered: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _slp_or_behaviour(self):
        if self.slp is None and None in (self.lcd, self.scl, self.sts):
            raise ValueError("recommend needs slp, or lcd, scl and sts to assess it")
        return self


class ReloadRequest(_Payload):
    path: str = Field(min_length=1)
    target: Literal["part1", "part2"] = "part1"


class ContentSummary(BaseModel):
    id: str
    title: str


class Response(BaseModel):
    request_id: Optional[Union[str, int]] = Field(default=None, serialization_alias="requestId")
    status: Literal["ok", "error"]
    result: Optional[Dict[str, Any]] = None
    message: Optional[str] = None

    def to_wire(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_none=True) | {"requestId": self.request_id}


def ok(request_id, result: Dict[str, Any]) -> Dict[str, Any]:
    return Response(request_id=request_id, status="ok", result=result).to_wire()


def error(request_id, message: str) -> Dict[str, Any]:
    return Response(request_id=request_id, status="error", message=message or "error").to_wire()
