"""
ASGI do serviço de escalonamento convergente 5G-TSN.

Expõe o callable ``application`` usado pelo servidor ASGI.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")

application = get_asgi_application()
