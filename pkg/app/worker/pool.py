"""
Ejecución paralela de tareas independientes (corridas sombra, pruebas).
"""
import logging
from typing import Callable, List, Optional, Sequence, TypeVar

from joblib import Parallel, delayed
from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_parallel(
    func: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    description: Optional[str] = None,
) -> List[R]:
    """
    Aplicar ``func`` a cada elemento y devolver los resultados en orden.

    Args:
        func: Función serializable (se envía a procesos loky si workers > 1)
        items: Elementos a procesar
        workers: Cantidad de procesos
        description: Texto de la barra de progreso en modo serial

    Returns:
        Resultados alineados con ``items``
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        show_bar = description is not None and logging.getLogger().isEnabledFor(logging.INFO)
        return [func(item) for item in tqdm(items, desc=description, disable=not show_bar, leave=False)]

    logger.info(f"Ejecutando {len(items)} tareas con {workers} procesos")
    return Parallel(n_jobs=workers, backend="loky")(delayed(func)(item) for item in items)
