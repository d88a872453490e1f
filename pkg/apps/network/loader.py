import json
from pathlib import Path
from typing import Union

from django.core.exceptions import ValidationError

from .serializers import ScenarioDocumentSerializer
from .types import Scenario
from .utils import scenario_digest


def read_document(source: Union[str, Path]) -> dict:
    """Lê um documento JSON do disco"""
    try:
        with open(source, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"Não foi possível ler {source}: {exc}")


def load_scenario(source: Union[str, Path, dict]) -> Scenario:
    """
    Carrega e valida um cenário a partir de um arquivo ou dicionário.

    Args:
        source: Caminho do arquivo JSON ou o documento já decodificado

    Returns:
        Cenário imutável com o digest do documento

    Raises:
        ValidationError: documento inválido, com os caminhos dos campos
    """
    document = source if isinstance(source, dict) else read_document(source)
    serializer = ScenarioDocumentSerializer(data=document)
    if not serializer.is_valid():
        raise ValidationError(format_errors(serializer.errors))
    return serializer.to_scenario(digest=scenario_digest(document))


def format_errors(errors, prefix: str = "") -> list[str]:
    """Achata os erros aninhados do DRF em mensagens 'campo: mensagem'"""
    messages = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = f"{prefix}.{key}" if prefix else str(key)
            messages.extend(format_errors(value, path))
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                messages.extend(format_errors(value, f"{prefix}[{index}]"))
            else:
                messages.append(f"{prefix}: {value}" if prefix else str(value))
    else:
        messages.append(f"{prefix}: {errors}" if prefix else str(errors))
    return messages


