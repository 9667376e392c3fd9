import logging

from celery import group, shared_task
from django.conf import settings

logger = logging.getLogger(__name__)


@shared_task(name="corridas.evaluar_punto", bind=True, max_retries=0)
def evaluar_punto(self, datos, eje, valor, hilos=1):
    """Evalúa un punto de un barrido. Recibe la configuración ya validada
    (tipos nativos de JSON) y devuelve las filas como diccionarios."""
    from apps.corridas.services import tareas

    try:
        return tareas.evaluar_punto(datos, eje, valor, hilos)
    except Exception:
        logger.exception("Falló el punto %s=%s del barrido", eje, valor)
        raise


def barrer(datos, eje, valores, hilos=None):
    """Filas por punto en el orden de `valores`.

    Con MFD_CELERY_BARRIDO los puntos se reparten en un group de Celery;
    si no, en un pool de hilos local."""
    from concurrent.futures import ThreadPoolExecutor

    from apps.corridas.services import tareas

    valores = list(valores)
    if getattr(settings, "MFD_CELERY_BARRIDO", False):
        resultado = group(evaluar_punto.s(datos, eje, v) for v in valores).apply_async()
        # group conserva el orden de las firmas al recolectar
        por_valor = resultado.get(disable_sync_subtasks=False)
    else:
        hilos = hilos or int(getattr(settings, "MFD_HILOS", 1))
        if hilos <= 1 or len(valores) == 1:
            por_valor = [tareas.evaluar_punto(datos, eje, v) for v in valores]
        else:
            with ThreadPoolExecutor(max_workers=min(hilos, len(valores))) as pool:
                por_valor = list(pool.map(lambda v: tareas.evaluar_punto(datos, eje, v), valores))
    return [[tareas.Fila.desde_dict(fila) for fila in filas] for filas in por_valor]
