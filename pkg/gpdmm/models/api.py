"""
Request and response schemas of the HTTP and WebSocket surface
"""
from typing import List, Optional, Union

from pydantic import BaseModel, Field, field_validator


class FramesRequest(BaseModel):
    """Observed frames, one row of joint angles per time step"""

    frames: List[List[float]] = Field(..., min_length=1, description="Matriz tiempo x rasgos")

    @field_validator('frames')
    @classmethod
    def validate_rectangular(cls, v):
        widths = {len(row) for row in v}
        if len(widths) != 1 or 0 in widths:
            raise ValueError(f"Todas las filas deben tener el mismo número (>0) de rasgos: {sorted(widths)}")
        return v

    model_config = {
        "json_schema_extra": {
            "example": {"frames": [[0.1, -0.2, 0.3], [0.12, -0.18, 0.31], [0.15, -0.15, 0.33]]}
        }
    }


class GenerateRequest(FramesRequest):
    horizon: int = Field(..., ge=0, le=10000, description="Pasos a generar")
    class_hint: Optional[Union[int, str]] = Field(None, description="Etiqueta o índice; None usa el clasificador")


class GenerateResponse(BaseModel):
    class_index: int = Field(..., ge=0)
    class_label: str
    horizon: int = Field(..., ge=0)
    frames: List[List[float]]


class GeneratedFrame(BaseModel):
    """One message of the generation stream"""

    step: int = Field(..., ge=0)
    class_label: str
    values: List[float]
