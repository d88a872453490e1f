#!/usr/bin/env python
"""
Script para gerar e armazenar os cenários do corpus de experimentos

Gera os documentos de bancada, de referência e da varredura de quantidade de
fluxos e os grava no banco (atualizando pelo nome). Opcionalmente escreve os
arquivos JSON num diretório.

Uso:
    python scripts/load_scenarios.py [--write-dir scenarios/generated]
"""

import argparse
import json
import os
import sys
from pathlib import Path

import django

# Configuração do Django
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
django.setup()

from django.core.exceptions import ValidationError
from django.db import transaction

from apps.experiment.corpus import desk_document, example_document, flowcount_document
from apps.experiment.sweeps import DEFAULT_POINTS, SweepKind
from apps.network.loader import load_scenario
from apps.network.models import Scenario


def corpus_documents() -> list[dict]:
    documents = [desk_document(), example_document()]
    documents.extend(flowcount_document(count) for count in DEFAULT_POINTS[SweepKind.FLOW_COUNT])
    return documents


def main():
    parser = argparse.ArgumentParser(description="Gera e armazena os cenários do corpus")
    parser.add_argument("--write-dir", help="Diretório para gravar também os arquivos JSON")
    args = parser.parse_args()

    write_dir = Path(args.write_dir) if args.write_dir else None
    if write_dir:
        write_dir.mkdir(parents=True, exist_ok=True)

    print("🚀 Gerando cenários do corpus...")
    with transaction.atomic():
        for document in corpus_documents():
            try:
                spec = load_scenario(document)
            except ValidationError as exc:
                print(f"❌ {document['name']}: {'; '.join(exc.messages)}")
                sys.exit(1)

            Scenario.objects.update_or_create(
                name=document["name"],
                defaults={"document": document, "description": document.get("description", "")},
            )
            if write_dir:
                path = write_dir / f"{document['name']}.json"
                path.write_text(json.dumps(document, indent=2), encoding="utf-8")
            print(f"✅ {spec.name}: {len(spec.flows)} fluxos ({spec.digest[:12]})")

    print(f"🎉 {Scenario.objects.count()} cenários no banco")


if __name__ == "__main__":
    main()
