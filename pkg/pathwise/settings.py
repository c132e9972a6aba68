"""
Django settings for the pathwise project.

Solver defaults live in the PATHWISE dictionary below and can be overridden
per run through a pathwise.set file or command line flags.
"""

from pathlib import Path
import os

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# ==============================
# Security
# ==============================
SECRET_KEY = os.environ.get(
    'SECRET_KEY',
    'pathwise-insecure-local-key-not-used-for-signing'
)

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# ==============================
# Applications
# ==============================
INSTALLED_APPS = [
    # Local Apps
    'graphs',
    'resources',
    'problems',
    'labels',
    'relaxations',
    'solver',
    'oracle',
    'instgen',
    'telemetry',
    'cli',

    # Third party
    'rest_framework',
]

# ==============================
# Database
# ==============================
# Instances and results are file based; nothing is persisted.
DATABASES = {}

# ==============================
# DRF (used for JSON reports only)
# ==============================
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'COERCE_DECIMAL_TO_STRING': False,
}

# ==============================
# Internationalization
# ==============================
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# ==============================
# Logging
# ==============================
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
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
        'level': os.environ.get('PATHWISE_LOG_LEVEL', 'WARNING'),
    },
}

# ==============================
# PathWise solver defaults
# ==============================
# Parameters file, overridden by --config on the command line
PATHWISE_SET = os.environ.get('PATHWISE_SET', 'pathwise.set')

PATHWISE = {
    # Graph storage
    'storage': 'auto',
    'density_threshold': 0.25,
    'small_n_threshold': 1024,

    # Relaxation
    'relaxation': 'ngc-dssrc',
    'ng_size': 16,

    # Half-way point
    'hwp': 0.5,
    'hwp_step': 0.05,
    'hwp_threshold': 0.20,

    # Run control
    'time_limit': 3600.0,  # one hour
    'elementary': True,
    'seed': 0,

    # DIMACS time weights = distance weights / divisor when no time file is given
    'dimacs_time_divisor': 1.0,

    # Data collection
    'telemetry': True,
    'log_file': None,
    'report_format': 'text',
    'report_timers': False,

    # Profiles selected from the problem's cyclicity class
    'cyclic': {
        'direction': 'bidirectional',
        'parallel': True,
        'selection': 'node',
        'join': 'bounded',
        'unreachable': True,
        'compress': False,
    },
    'acyclic': {
        'direction': 'bidirectional',
        'parallel': False,
        'selection': 'rr',
        'join': 'bounded',
        'unreachable': False,
        'compress': True,
        'storage': 'sparse',
    },
}
