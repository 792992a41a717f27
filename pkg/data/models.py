#!/usr/bin/env python3
"""
Data models for fuzzy systems, their FML representation and datasets.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd


class Hedge(Enum):
    """Linguistic hedge applied to a term's membership degree."""
    NONE = "None"
    VERY = "Very"
    MORE_OR_LESS = "MoreOrLess"


class VariableKind(Enum):
    INPUT = "Input"
    OUTPUT = "Output"


@dataclass(frozen=True)
class TrapezoidShape:
    """Trapezoid membership parameters (param1..param4 in FML)."""
    a: float
    b: float
    c: float
    d: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def is_ordered(self) -> bool:
        return self.a <= self.b <= self.c <= self.d

    @classmethod
    def repaired(cls, params, left: float, right: float) -> "TrapezoidShape":
        """Sort the four params ascending and clamp them into [left, right]."""
        values = np.clip(np.sort(np.asarray(params, dtype=float)), left, right)
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class ConceptAttributes:
    """Ontology attributes a linguistic concept may carry."""
    area: Optional[str] = None
    grade: Optional[str] = None
    subject: Optional[str] = None

    def items(self) -> List[Tuple[str, str]]:
        return [(k, v) for k, v in (("area", self.area), ("grade", self.grade),
                                    ("subject", self.subject)) if v is not None]


@dataclass(frozen=True)
class FuzzyTerm:
    name: str
    shape: TrapezoidShape
    complement: bool = False
    hedge: Hedge = Hedge.NONE
    meta: Optional[ConceptAttributes] = None


@dataclass(frozen=True)
class FuzzyVariable:
    name: str
    domain_left: float
    domain_right: float
    kind: VariableKind
    terms: Tuple[FuzzyTerm, ...]
    accumulation: str = "MAX"
    defuzzifier: str = "COG"
    default_value: float = 0.0

    @property
    def width(self) -> float:
        return self.domain_right - self.domain_left

    @property
    def term_names(self) -> List[str]:
        return [t.name for t in self.terms]

    def term(self, name: str) -> Optional[FuzzyTerm]:
        for term in self.terms:
            if term.name == name:
                return term
        return None

    def clamp(self, value: float) -> float:
        return min(max(value, self.domain_left), self.domain_right)


@dataclass(frozen=True)
class Rule:
    name: str
    antecedent: Tuple[Tuple[str, str], ...]
    consequent: Tuple[str, str]
    weight: float = 1.0
    connector: str = "AND"
    and_method: str = "MIN"
    or_method: str = "MAX"


@dataclass(frozen=True)
class FuzzySystem:
    """Knowledge base plus Mamdani rule base; the unit FML files describe."""
    name: str
    variables: Tuple[FuzzyVariable, ...]
    rules: Tuple[Rule, ...]
    network_address: str = "127.0.0.1"

    @property
    def input_variables(self) -> List[FuzzyVariable]:
        return [v for v in self.variables if v.kind == VariableKind.INPUT]

    @property
    def output_variable(self) -> FuzzyVariable:
        outputs = [v for v in self.variables if v.kind == VariableKind.OUTPUT]
        if len(outputs) != 1:
            raise ValueError(f"System {self.name} has {len(outputs)} output variables")
        return outputs[0]

    def variable(self, name: str) -> Optional[FuzzyVariable]:
        for var in self.variables:
            if var.name == name:
                return var
        return None


@dataclass(frozen=True)
class Record:
    """One crisp input tuple with its desired output."""
    inputs: Dict[str, float]
    desired: float


@dataclass
class Dataset:
    """Ordered records sharing one schema (input names, then output name)."""
    records: List[Record]
    schema: List[str]
    output: str
    seed: Optional[int] = None
    _matrix: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def desired_column(self) -> str:
        return f"{self.output.lower()}_do"

    def input_matrix(self) -> np.ndarray:
        """Inputs as an (n, len(schema)) array in schema order."""
        if self._matrix is None:
            self._matrix = np.array(
                [[rec.inputs[name] for name in self.schema] for rec in self.records],
                dtype=float,
            ).reshape(len(self.records), len(self.schema))
        return self._matrix

    def desired_vector(self) -> np.ndarray:
        return np.array([rec.desired for rec in self.records], dtype=float)

    def subset(self, indices) -> "Dataset":
        return Dataset(
            records=[self.records[i] for i in indices],
            schema=list(self.schema),
            output=self.output,
            seed=self.seed,
        )

    def to_frame(self) -> pd.DataFrame:
        """Dataset as a DataFrame with lowercase column names."""
        frame = pd.DataFrame(self.input_matrix(), columns=[n.lower() for n in self.schema])
        frame[self.desired_column] = self.desired_vector()
        return frame
