"""
Main FastAPI application serving a trained GPDMM
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, WebSocket
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from gpdmm import __version__
from gpdmm.api.websocket import websocket_generate_endpoint
from gpdmm.config import configure_logging, settings
from gpdmm.exceptions import GPDMMError, NumericError
from gpdmm.gp.mixture import classify, continue_prefix
from gpdmm.gp.serialization import load_model
from gpdmm.models.api import FramesRequest, GenerateRequest, GenerateResponse
from gpdmm.models.reports import ClassificationResult

configure_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Startup and shutdown lifecycle events
    """
    logger.info("🚀 Servicio GPDMM iniciándose...")
    try:
        app.state.model = load_model(settings.resolve_model_path())
    except Exception as e:
        logger.error(f"❌ Error cargando el modelo: {str(e)}")
        raise
    model = app.state.model
    logger.info(f"✅ Modelo listo: clases {model.class_labels}, D={model.D}, Q={model.Q}")
    logger.info("📡 Generación en streaming disponible en: ws://localhost:8000/ws/generate")
    yield
    logger.info("🛑 Deteniendo servicio GPDMM...")


app = FastAPI(
    title="GPDMM",
    description="Clasificación y generación de movimiento con mezclas de GPDM",
    version=__version__,
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # In production, specify exact origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(GPDMMError)
async def gpdmm_error_handler(request: Request, exc: GPDMMError):
    """Numeric failures are server errors; bad input is 422"""
    status = 500 if isinstance(exc, NumericError) else 422
    logger.warning(f"⚠️  {type(exc).__name__} en {request.url.path}: {exc}")
    return JSONResponse(status_code=status, content={"error": type(exc).__name__, "detail": str(exc)})


@app.get("/")
async def root():
    """
    Root endpoint with service information
    """
    return {
        "service": "GPDMM",
        "version": __version__,
        "description": "Mezcla de modelos dinámicos GP para clasificar y continuar movimientos",
        "endpoints": ["/classify", "/generate"],
        "websocket_endpoint": "/ws/generate",
        "documentation": "/docs"
    }


@app.get("/health")
async def health_check(request: Request):
    """
    Health check endpoint with the loaded model's shape
    """
    model = request.app.state.model
    return {
        "status": "healthy",
        "service": "GPDMM",
        "model": {
            "loaded": model is not None,
            "classes": list(model.class_labels),
            "D": model.D,
            "Q": model.Q,
            "order": model.order,
            "sparse": any(e.sparse is not None for e in model.experts),
        }
    }


@app.post("/classify", response_model=ClassificationResult)
def classify_prefix(body: FramesRequest, request: Request):
    """Posterior over movement classes for an observed prefix"""
    return classify(request.app.state.model, body.frames)


@app.post("/generate", response_model=GenerateResponse)
def generate_continuation(body: GenerateRequest, request: Request):
    """Continue the observed frames for `horizon` steps"""
    model = request.app.state.model
    class_index, frames = continue_prefix(model, body.frames, body.class_hint, body.horizon)
    return GenerateResponse(class_index=class_index, class_label=model.class_labels[class_index],
                            horizon=body.horizon, frames=frames.tolist())


@app.websocket("/ws/generate")
async def websocket_endpoint(websocket: WebSocket):
    """
    Streams a generated continuation frame by frame

    Connect to ws://localhost:8000/ws/generate, send one GenerateRequest as
    JSON and receive one GeneratedFrame every STREAM_INTERVAL seconds; the
    server closes the socket after the last frame.
    """
    await websocket_generate_endpoint(websocket)
