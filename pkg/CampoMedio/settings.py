"""
Django settings for CampoMedio project.

Proyecto batch: no expone URLs ni usa base de datos. Django aporta settings,
comandos de gestión y el runner de tests; Celery reparte los barridos.
"""

from pathlib import Path
import os
import sys

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv()

SECRET_KEY = os.getenv("SECRET_KEY", "django-insecure-campo-medio-solo-batch")

DEBUG = os.getenv("DEBUG", "false").lower() == "true"

ALLOWED_HOSTS = []


# Application definition

DJANGO_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

PROJECT_APPS = [
    "apps.base",
    "apps.reservorio",
    "apps.modelo",
    "apps.conmutadores",
    "apps.wick",
    "apps.expansion",
    "apps.formas_cerradas",
    "apps.corridas",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + PROJECT_APPS

MIDDLEWARE = []

# Sin persistencia: los artefactos son CSV y reportes en disco
DATABASES = {}

LANGUAGE_CODE = "es-co"

TIME_ZONE = "America/Bogota"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

TESTING = "test" in sys.argv

# --- Logging ---
MFD_LOG_LEVEL = os.getenv("MFD_LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "simple"},
    },
    "loggers": {
        "apps": {
            "handlers": ["console"],
            "level": "WARNING" if TESTING else MFD_LOG_LEVEL,
            "propagate": False,
        },
    },
}

# --- Celery / Redis ---
REDIS_URL = os.getenv("REDIS_URL")
CELERY_BROKER_URL = REDIS_URL or "memory://"
CELERY_RESULT_BACKEND = REDIS_URL or "cache+memory://"
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_ACKS_LATE = True
CELERY_WORKER_PREFETCH_MULTIPLIER = 1
# Sin broker (o en tests) las tareas corren de forma síncrona
CELERY_TASK_ALWAYS_EAGER = (
    os.getenv("CELERY_EAGER", "false").lower() == "true" or TESTING or not REDIS_URL
)
CELERY_TASK_EAGER_PROPAGATES = CELERY_TASK_ALWAYS_EAGER
CELERY_TASK_ROUTES = {
    "corridas.*": {"queue": "barridos"},
}

# --- Motor numérico ---
MFD_DIMENSION_MAXIMA = int(os.getenv("MFD_DIMENSION_MAXIMA", "4096"))   # tope del oráculo denso
MFD_R_MAXIMO = int(os.getenv("MFD_R_MAXIMO", "8"))                      # orden máximo de multiconmutadores
MFD_NU_MAXIMO = int(os.getenv("MFD_NU_MAXIMO", "2"))
MFD_HILOS = int(os.getenv("MFD_HILOS", str(os.cpu_count() or 1)))
MFD_BLOQUE_NODOS = int(os.getenv("MFD_BLOQUE_NODOS", "4096"))           # nodos de cuadratura por bloque
MFD_TOLERANCIA_TRUNCAMIENTO = float(os.getenv("MFD_TOLERANCIA_TRUNCAMIENTO", "1e-6"))
MFD_CORTE_ANCILLA = int(os.getenv("MFD_CORTE_ANCILLA", "40"))
MFD_SEMILLA = int(os.getenv("MFD_SEMILLA", "20240601"))
MFD_CELERY_BARRIDO = os.getenv("MFD_CELERY_BARRIDO", "false").lower() == "true"
