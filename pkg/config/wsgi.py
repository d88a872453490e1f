"""
WSGI do serviço de escalonamento convergente 5G-TSN.

Expõe o callable ``application`` usado pelo servidor WSGI.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")

application = get_wsgi_application()
