import os
import sys

from loguru import logger

from src.constantes import VARIABLE_HILOS

FORMATO_REGISTRO = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | "
    "<cyan>{module}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)


def configurar_registro(nivel: str = "INFO"):
    """Deja un único sink en stderr con el formato del proyecto."""
    logger.remove()
    logger.add(sys.stderr, level=nivel, format=FORMATO_REGISTRO)


def hilos_maximos() -> int:
    valor = os.environ.get(VARIABLE_HILOS, "").strip()
    if not valor:
        return max(1, min(8, os.cpu_count() or 1))
    try:
        return max(1, int(valor))
    except ValueError:
        logger.warning(f"{VARIABLE_HILOS}={valor!r} no es un entero; se usa 1 hilo")
        return 1
