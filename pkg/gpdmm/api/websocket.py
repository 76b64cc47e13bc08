"""
WebSocket endpoint streaming generated motion frames
"""
import asyncio
import json
import logging
from typing import List

from fastapi import WebSocket, WebSocketDisconnect
from pydantic import ValidationError
from starlette.concurrency import run_in_threadpool

from gpdmm.config import settings
from gpdmm.exceptions import GPDMMError
from gpdmm.gp.mixture import continue_prefix
from gpdmm.models.api import GeneratedFrame, GenerateRequest

logger = logging.getLogger(__name__)


class ConnectionManager:
    """Tracks open generation streams"""

    def __init__(self):
        self.active_connections: List[WebSocket] = []

    async def connect(self, websocket: WebSocket):
        await websocket.accept()
        self.active_connections.append(websocket)
        logger.info(f"Nueva conexión WebSocket establecida. Total: {len(self.active_connections)}")

    def disconnect(self, websocket: WebSocket):
        if websocket in self.active_connections:
            self.active_connections.remove(websocket)
            logger.info(f"Conexión WebSocket cerrada. Total: {len(self.active_connections)}")

    async def stream(self, websocket: WebSocket, request: GenerateRequest):
        """Generate the whole continuation off the event loop, then send it one frame at a time"""
        model = websocket.app.state.model
        class_index, frames = await run_in_threadpool(
            continue_prefix, model, request.frames, request.class_hint, request.horizon
        )
        label = model.class_labels[class_index]
        logger.info(f"📡 Transmitiendo {len(frames)} cuadros de la clase '{label}'")
        for step, values in enumerate(frames):
            frame = GeneratedFrame(step=step, class_label=label, values=values.tolist())
            await websocket.send_text(frame.model_dump_json())
            await asyncio.sleep(settings.STREAM_INTERVAL)


manager = ConnectionManager()


async def websocket_generate_endpoint(websocket: WebSocket):
    """
    Usage:
        Connect to: ws://localhost:8000/ws/generate
        Send a GenerateRequest, receive GeneratedFrame messages
    """
    await manager.connect(websocket)
    try:
        data = await websocket.receive_text()
        request = GenerateRequest.model_validate_json(data)
        await manager.stream(websocket, request)
        await websocket.close()
    except WebSocketDisconnect:
        logger.info("Cliente desconectado del WebSocket")
    except (ValidationError, GPDMMError) as e:
        logger.warning(f"⚠️  Solicitud de generación rechazada: {str(e)}")
        await websocket.send_text(json.dumps({"error": type(e).__name__, "detail": str(e)}))
        await websocket.close(code=1003)
    except Exception as e:
        logger.error(f"Error en WebSocket: {str(e)}")
        await websocket.close(code=1011)
    finally:
        manager.disconnect(websocket)
