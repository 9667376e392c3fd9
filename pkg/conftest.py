import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "CampoMedio.settings")
django.setup()
