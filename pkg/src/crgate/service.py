"""HTTP front end over the same in-process calls the CLI makes.

Run with ``crgate serve`` or ``uvicorn crgate.service:app``.
"""
from __future__ import annotations

import json
import math
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .errors import ConfigError, DomainError, PoleError
from .frames import J_from_xi
from .operators import PAULI_LABELS
from .sweep import SweepConfig, build_config, evaluate_point, run_sweep, to_json

app = FastAPI(title="crgate", version=__version__)


class Device(BaseModel):
    omega1: float = 5.114
    omega2: float = 4.914
    delta1: float = -0.330
    delta2: float = -0.330
    g1: float = 0.098
    g2: float = 0.083
    omega_r: float = 6.31
    J: Optional[float] = 3.80e-3
    d: int = Field(5, ge=2, le=12)


class Crosstalk(BaseModel):
    A: float = Field(0.0, ge=0.0, le=1.0)
    phi_c: float = 0.0
    phi_t: float = 0.0


class AxisModel(BaseModel):
    name: Literal["Omega", "Delta", "omega1"]
    start: float
    stop: float
    points: int = Field(ge=2, le=200)


class PointRequest(BaseModel):
    device: Device = Device()
    Omega: float = 0.02
    Delta: Optional[float] = None
    method: Literal["exact", "pert"] = "exact"
    order: int = Field(3, ge=1, le=9)
    crosstalk: Crosstalk = Crosstalk()


class PointResponse(BaseModel):
    delta_ghz: float
    omega_ghz: float
    method: str
    order: Optional[int]
    coefficients_mhz: Optional[dict[str, float]]
    I_metric: Optional[float]
    status: str
    detail: str = ""


class SweepRequest(BaseModel):
    device: Device = Device()
    Omega: float = 0.02
    axis1: AxisModel
    axis2: Optional[AxisModel] = None
    method: Literal["exact", "pert"] = "exact"
    order: int = Field(3, ge=1, le=9)
    crosstalk: Crosstalk = Crosstalk()


class JcalResponse(BaseModel):
    xi_ghz: float
    J_ghz: float


def _assignments(device: Device, Omega: float, method: str, order: int, ct: Crosstalk,
                 axes: dict) -> list:
    items = [(None, f"device.{k}", "none" if v is None else repr(v))
             for k, v in device.model_dump().items()]
    items += [(None, "drive.Omega", repr(Omega)), (None, "method.name", method),
              (None, "method.order", str(order))]
    items += [(None, f"crosstalk.{k}", repr(v)) for k, v in ct.model_dump().items()]
    for tag, ax in axes.items():
        if ax is not None:
            items += [(None, f"{tag}.{k}", str(v)) for k, v in ax.model_dump().items()]
    return items


def _config(req, axes) -> SweepConfig:
    try:
        return build_config(_assignments(req.device, req.Omega, req.method, req.order,
                                         req.crosstalk, axes))
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/point", response_model=PointResponse)
def point(req: PointRequest):
    axis = AxisModel(name="Omega", start=req.Omega, stop=req.Omega, points=2)
    config = _config(req, {"axis1": axis})
    where = {"Omega": req.Omega}
    if req.Delta is not None:
        where["Delta"] = req.Delta
    row = evaluate_point(config, where)
    return PointResponse(delta_ghz=row.delta_ghz, omega_ghz=row.omega_ghz, method=row.method,
                         order=row.order, coefficients_mhz=row.coefficients_mhz,
                         I_metric=row.I_metric, status=row.status, detail=row.detail)


@app.post("/sweep")
def sweep(req: SweepRequest):
    """Same document as ``crgate sweep --format json``."""
    config = _config(req, {"axis1": req.axis1, "axis2": req.axis2})
    n = math.prod(a.points for a in config.axes())
    if n > 2000:
        raise HTTPException(status_code=422, detail=f"grid of {n} points exceeds 2000")
    return json.loads(to_json(run_sweep(config), config))


@app.get("/jcal", response_model=JcalResponse)
def jcal(xi: float, delta1: float = -0.330, delta2: float = -0.330, detuning: float = 0.200):
    try:
        return JcalResponse(xi_ghz=xi, J_ghz=J_from_xi(xi, delta1, delta2, detuning))
    except (PoleError, DomainError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


@app.get("/paulis")
def paulis():
    return {"labels": list(PAULI_LABELS)}

