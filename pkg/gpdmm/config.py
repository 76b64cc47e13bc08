"""
Configuration settings for the GPDMM toolkit
"""
import os
import logging
from typing import Optional
from pydantic import field_validator, ConfigDict

logger = logging.getLogger(__name__)

try:
    from pydantic_settings import BaseSettings
except ImportError:
    # Fallback si pydantic-settings no está instalado
    from pydantic import BaseModel as BaseSettings


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Settings(BaseSettings):
    """Process-level settings read from the environment or a .env file"""

    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "runs"

    # Model served by the HTTP API
    MODEL_PATH: Optional[str] = None

    # Seconds between frames on the generation WebSocket
    STREAM_INTERVAL: float = 0.05

    # Parallel jobs for MCCV iterations, search candidates and expert fitting
    WORKERS: int = 1

    model_config = ConfigDict(
        env_file=".env",
        env_prefix="GPDMM_",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator('LOG_LEVEL', mode='before')
    @classmethod
    def validate_log_level(cls, v):
        """Accept any standard logging level name"""
        v = str(v).strip().upper()
        # getLevelNamesMapping is 3.11+; _nameToLevel is the same mapping on 3.10
        level_names = getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))()
        if v not in level_names:
            raise ValueError(f"LOG_LEVEL desconocido: '{v}'")
        return v

    @field_validator('STREAM_INTERVAL')
    @classmethod
    def validate_interval(cls, v):
        if v < 0:
            raise ValueError(f"STREAM_INTERVAL debe ser >= 0. Recibido: {v}")
        return v

    @field_validator('WORKERS')
    @classmethod
    def validate_workers(cls, v):
        if v < 1:
            raise ValueError(f"WORKERS debe ser >= 1. Recibido: {v}")
        return v

    def resolve_model_path(self) -> str:
        """
        Return the configured model document path.

        Returns:
            str: Path of the model served by the API

        Raises:
            RuntimeError: If no model is configured or the file is missing
        """
        if not self.MODEL_PATH:
            error_msg = (
                "❌ ERROR: No se configuró GPDMM_MODEL_PATH.\n"
                "📝 Entrene un modelo con `python -m gpdmm train` y exporte:\n"
                "   • GPDMM_MODEL_PATH=runs/model.json"
            )
            logger.error(error_msg)
            raise RuntimeError("GPDMM_MODEL_PATH no configurado")
        if not os.path.isfile(self.MODEL_PATH):
            logger.error(f"❌ Documento de modelo no encontrado: {self.MODEL_PATH}")
            raise RuntimeError(f"Modelo no encontrado: {self.MODEL_PATH}")
        return self.MODEL_PATH


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once, with the package-wide format"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format=LOG_FORMAT,
    )


# Global settings instance
settings = Settings()
