"""JSON-lines dataset records: {id, request, inventory, nl_text}."""

import json
from typing import Iterable, List

from .evaluate import EvalRecord
from .model import Inventory, SymbolicRequest


def write_records(path: str, records: Iterable[EvalRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps({
                "id": record.record_id,
                "request": record.request.to_json(),
                "inventory": record.inventory.to_json(),
                "nl_text": record.nl_text,
            }, separators=(",", ":")) + "\n")
            count += 1
    return count


def read_records(path: str) -> List[EvalRecord]:
    records: List[EvalRecord] = []
    with open(path, encoding="utf-8") as handle:
        for idx, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            records.append(EvalRecord(
                request=SymbolicRequest.from_json(raw["request"]),
                inventory=Inventory.from_json(raw["inventory"]),
                nl_text=raw.get("nl_text", ""),
                record_id=str(raw.get("id", idx)),
            ))
    return records
