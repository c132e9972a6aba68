import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'pathwise.settings')
django.setup()
