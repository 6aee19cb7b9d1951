"""Request/response schemas for the session service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class SessionCreate(BaseModel):
    kind: str = Field(description="incorrectness or incompleteness")
    program: str
    query: str
    oracle: str = Field(default="interactive", description="interactive or spec-driven")
    corr_spec: Optional[str] = None
    compl_spec: Optional[str] = None
    bound: Optional[int] = None
    depth: Optional[int] = None
    require_symptom: bool = True


class AnswerBody(BaseModel):
    answer: str = Field(description="yes or no")
    question_index: Optional[int] = Field(
        default=None,
        description="sequence number of the question being answered; a stale "
                    "index conflicts instead of consuming the next question")


class CheckCreate(BaseModel):
    kind: str
    program: Optional[str] = None
    spec: Optional[str] = None
    corr_spec: Optional[str] = None
    lm: Optional[str] = None
    lm_shortest_path: Optional[str] = None
    split: Optional[str] = None
    part: Optional[int] = None
    atom: Optional[str] = None
    query: Optional[str] = None
    rules: Optional[str] = None
    via: Optional[str] = None
    bound: Optional[int] = None
    depth: Optional[int] = None

    def params(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}
