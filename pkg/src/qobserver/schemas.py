"""Pydantic request models shared by the HTTP service and the CLI config files.

A CLI config file is simply the JSON body of the corresponding endpoint, so
one schema validates both.  Complex numbers travel as [re, im] pairs.
"""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator


class PlantModel(BaseModel):
    C_p: list[float] = Field(min_length=2, max_length=2)
    x_p0_mean: list[float] = Field(default=[0.0, 0.0], min_length=2, max_length=2)

    @field_validator("C_p")
    @classmethod
    def _nonzero(cls, v):
        if all(x == 0.0 for x in v):
            raise ValueError("C_p must be nonzero")
        return v


class ObserverModel(BaseModel):
    beta: list[float] = Field(min_length=2, max_length=2)
    omega_o: float = Field(default=0.0, ge=0.0)
    kappa: float = Field(gt=0.0, description="kappa must be positive")


class DesignRequest(BaseModel):
    plant: PlantModel
    observer: ObserverModel


class SimModel(BaseModel):
    dt: float = Field(gt=0.0)
    t_final: float = Field(gt=0.0)
    seed: int = Field(ge=0)
    n_trajectories: int = Field(default=1, ge=1)
    burn_in: float = Field(default=0.0, ge=0.0)
    method: Literal["euler", "exact"] = "euler"
    noise: bool = True
    x_o0: Union[Literal["vacuum", "zero"], list[float]] = "vacuum"


class SimulateRequest(DesignRequest):
    sim: SimModel
    store_paths: bool = True


class SynthesizeRequest(BaseModel):
    epsilon: list[float] = Field(min_length=2, max_length=2, description="[re, im]")
    phi: float = 0.0
    kappa1: float = Field(gt=0.0)
    kappa2: float = Field(gt=0.0)
    kappa3: float = Field(gt=0.0)
    omega_o: float = Field(default=0.0, ge=0.0)
    theta: Optional[float] = None

    @field_validator("epsilon")
    @classmethod
    def _nonzero(cls, v):
        if v[0] == 0.0 and v[1] == 0.0:
            raise ValueError("epsilon must be nonzero")
        return v


class VerifyRequest(DesignRequest):
    # Test hook: additive perturbation of the observer drift, used to
    # demonstrate a failing realizability check.
    A_perturbation: Optional[list[list[float]]] = None
    seed: int = 0


class CurveRequest(BaseModel):
    theta_min: float = 0.01
    theta_max: float = 2.0 * math.pi - 0.01
    n_points: int = Field(default=1000, ge=2)

    @field_validator("theta_max")
    @classmethod
    def _inside(cls, v, info):
        if v >= 2.0 * math.pi:
            raise ValueError("theta_max must be below 2*pi")
        return v

    @field_validator("theta_min")
    @classmethod
    def _positive(cls, v):
        if v <= 0.0:
            raise ValueError("theta_min must be above 0")
        return v
