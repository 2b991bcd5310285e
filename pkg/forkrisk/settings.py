import os
from pathlib import Path

import dj_database_url

BASE_DIR = Path(__file__).resolve().parent.parent

# Carrega .env se existir (util para manage.py, cron de sweeps, etc.)
ENV_FILE = BASE_DIR / ".env"
try:
    from dotenv import load_dotenv
    if ENV_FILE.exists():
        load_dotenv(ENV_FILE)
except Exception:
    # Sem python-dotenv o projeto ainda roda com as vars de ambiente do sistema.
    pass


# ========================
# Core / Environment
# ========================

SECRET_KEY = os.environ.get("SECRET_KEY", "dev-insecure-key")

DEBUG = os.environ.get("DEBUG", "0") == "1"

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "rest_framework",
    "core",
    "simulator",
    "sweeps",
]

DATABASES = {
    "default": dj_database_url.config(
        default=os.environ.get("DATABASE_URL", "sqlite:///" + str(BASE_DIR / "db.sqlite3")),
        conn_max_age=int(os.environ.get("DB_CONN_MAX_AGE", "60")),
        ssl_require=False,
    )
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [],
    "UNAUTHENTICATED_USER": None,
}


# ========================
# Toolkit
# ========================

FORKRISK_SCAN_CAP = int(os.environ.get("FORKRISK_SCAN_CAP", "512"))
FORKRISK_TAIL_MAX_TERMS = int(os.environ.get("FORKRISK_TAIL_MAX_TERMS", "10000"))
FORKRISK_TAIL_TOLERANCE = float(os.environ.get("FORKRISK_TAIL_TOLERANCE", "1e-16"))

FORKRISK_SIM_BATCHES = int(os.environ.get("FORKRISK_SIM_BATCHES", "100"))
FORKRISK_SIM_MAX_ARRIVALS = int(os.environ.get("FORKRISK_SIM_MAX_ARRIVALS", "1000000"))

FORKRISK_DEFAULT_SEED = int(os.environ.get("FORKRISK_DEFAULT_SEED", "0"))
FORKRISK_WORKERS = int(os.environ.get("FORKRISK_WORKERS", "1"))

FORKRISK_SWEEP_OUTPUT_DIR = Path(
    os.environ.get("FORKRISK_SWEEP_OUTPUT_DIR", str(BASE_DIR / "sweeps_output"))
)


# ========================
# Logging
# ========================

FORKRISK_LOG_LEVEL = os.environ.get("FORKRISK_LOG_LEVEL", "WARNING").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "core": {"handlers": ["console"], "level": FORKRISK_LOG_LEVEL, "propagate": False},
        "simulator": {"handlers": ["console"], "level": FORKRISK_LOG_LEVEL, "propagate": False},
        "sweeps": {"handlers": ["console"], "level": FORKRISK_LOG_LEVEL, "propagate": False},
    },
}
