from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class MatrixModel(BaseModel):
    n: int
    field: str
    rows: List[List[str]]


class ConjugatorModel(BaseModel):
    p: MatrixModel
    p_inv: MatrixModel


class TermModel(BaseModel):
    coeff: str
    point: List[MatrixModel]
    conjugator: Optional[ConjugatorModel] = None
    value: MatrixModel
    role: str = ""
    pair: Optional[int] = None


class CertificateModel(BaseModel):
    version: int = 1
    polynomial: str
    n: int
    field: str
    target: MatrixModel
    terms: List[TermModel] = []
    meta: Dict[str, Any] = {}


class SquareZeroSumModel(BaseModel):
    target: MatrixModel
    parts: List[MatrixModel] = []


class CommutatorFormModel(BaseModel):
    x: MatrixModel
    y: MatrixModel
    target: MatrixModel


class RunConfig(BaseModel):
    command: str
    polys: List[str] = []
    n: int = 2
    field: str = "Q"
    seed: int
    budget: int
    target: Optional[str] = None
    cert: Optional[str] = None
    out: Optional[str] = None
    format: str = "text"
    z: Optional[str] = None
    exhaustive: bool = False
    k: int = 1
    regime: str = "general"


class RunResult(BaseModel):
    command: str
    seed: int
    budget: int
    status: str
    exit_code: int
    result: Dict[str, Any] = {}
