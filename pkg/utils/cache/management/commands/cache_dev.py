"""
Django Management Command para inspecionar o cache

Este comando fornece funcionalidades para:
- Verificar health check
- Mostrar a configuração do backend
- Listar e limpar as entradas de um cenário
"""

from django.conf import settings
from django.core.cache import cache
from django.core.management.base import BaseCommand

from utils.cache.cache_utils import cache_manager


class Command(BaseCommand):
    help = "Utilitários para inspecionar o cache de escalonamentos"

    def add_arguments(self, parser):
        parser.add_argument(
            "--health-check", action="store_true", help="Verifica saúde do cache"
        )

        parser.add_argument(
            "--backend-info",
            action="store_true",
            help="Mostra informações do backend de cache",
        )

        parser.add_argument(
            "--list-digest",
            type=str,
            help="Lista as chaves em cache de um cenário (digest)",
        )

        parser.add_argument(
            "--clear-digest",
            type=str,
            help="Remove as entradas em cache de um cenário (digest)",
        )

        parser.add_argument(
            "--clear-all", action="store_true", help="Limpa todo o cache (CUIDADO!)"
        )

    def handle(self, *args, **options):
        self.stdout.write(self.style.SUCCESS("=== Converged Scheduling Cache ==="))

        if options["health_check"]:
            self.health_check()
        elif options["backend_info"]:
            self.show_backend_info()
        elif options["list_digest"]:
            self.list_digest(options["list_digest"])
        elif options["clear_digest"]:
            removed = cache_manager.invalidate_digest(options["clear_digest"])
            self.stdout.write(self.style.SUCCESS(f"✅ {removed} entradas removidas"))
        elif options["clear_all"]:
            self.clear_all_cache()
        else:
            self.stdout.write(
                self.style.WARNING("Use --help para ver as opções disponíveis")
            )

    def health_check(self):
        """Verifica saúde do cache"""
        is_healthy, message = cache_manager.health_check()

        if is_healthy:
            self.stdout.write(self.style.SUCCESS(f"✅ {message}"))
        else:
            self.stdout.write(self.style.ERROR(f"❌ {message}"))

    def show_backend_info(self):
        """Mostra informações do backend"""
        for key, value in cache_manager.get_backend_info().items():
            self.stdout.write(f"{key}: {value}")

        self.stdout.write(self.style.SUCCESS("\n=== TTL ==="))
        for key, value in getattr(settings, "CACHE_TTL", {}).items():
            self.stdout.write(f"{key}: {value}s")

    def list_digest(self, digest):
        keys = cache_manager.get_keys_for_digest(digest)
        if not keys:
            self.stdout.write(self.style.WARNING("⚠️  Nenhuma chave encontrada"))
            return
        self.stdout.write(f"📋 Encontradas {len(keys)} chaves:")
        for key in keys:
            self.stdout.write(f"  🔑 {key}")

    def clear_all_cache(self):
        """Limpa todo o cache com confirmação"""
        self.stdout.write(
            self.style.WARNING("⚠️  ATENÇÃO: Isso vai limpar TODO o cache!")
        )

        confirm = input("Digite 'CONFIRMAR' para continuar: ")
        if confirm != "CONFIRMAR":
            self.stdout.write(self.style.SUCCESS("✅ Operação cancelada"))
            return

        cache.clear()
        self.stdout.write(self.style.SUCCESS("🧹 Cache limpo com sucesso!"))
