"""
Django settings for the summing_site project.

The project has no database, templates or HTTP surface; it hosts the
summing_lab management commands. Engine defaults come from the environment
(optionally a .env file at the project root).
"""

from pathlib import Path
import os

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'django-insecure-summing-lab-development-key')

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'summing_lab',  # sequence classes, summing norms, verification suites
]

MIDDLEWARE = []

# No database: every command is a pure computation
DATABASES = {}


# Engine defaults; command-line flags override them

SUMMING_ENGINE = {
    'SEED': int(os.getenv('SUMMING_SEED', '0')),
    'RESTARTS': int(os.getenv('SUMMING_RESTARTS', '4')),
    'MAX_ITER': int(os.getenv('SUMMING_MAX_ITER', '200')),
    'TOL': float(os.getenv('SUMMING_TOL', '1e-7')),
    'GRID': int(os.getenv('SUMMING_GRID', '360')),
    'MID_MAX_M': int(os.getenv('SUMMING_MID_MAX_M', '64')),
    'RAD_MC': int(os.getenv('SUMMING_RAD_MC', '0')),
    'WORKERS': int(os.getenv('SUMMING_WORKERS', '1')),
    'CACHE_SIZE': int(os.getenv('SUMMING_CACHE_SIZE', '256')),
}

SUMMING_LOG_LEVEL = os.getenv('SUMMING_LOG_LEVEL', 'WARNING').upper()


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(module)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': SUMMING_LOG_LEVEL,
    },
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
