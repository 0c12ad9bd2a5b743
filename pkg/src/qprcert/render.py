from __future__ import annotations

from pathlib import Path
from typing import Any, Final

from minijinja import Environment

from qprcert.utils import to_jsonable

ENV: Final[Environment] = Environment()


def format_number(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"

    if value is None:
        return "null"

    if isinstance(value, float):
        return f"{value:.12g}"

    return str(value)


ENV.add_filter("sig12", format_number)

for file in Path(__file__).parent.glob("*.txt.j2"):
    ENV.add_template(name=file.stem, source=file.read_text(encoding="utf-8"))


def render_template(name: str, /, **context: object) -> str:
    return ENV.render_template(name, **context)


def flatten(payload: object, prefix: str = "") -> list[tuple[str, Any]]:
    """Flatten nested mappings and lists into ``(dotted.key, scalar)`` rows."""
    value = to_jsonable(payload)
    if isinstance(value, dict):
        rows: list[tuple[str, Any]] = []
        for key in sorted(value):
            rows.extend(flatten(value[key], f"{prefix}.{key}" if prefix else key))
        return rows

    if isinstance(value, list):
        rows = []
        for index, item in enumerate(value):
            rows.extend(flatten(item, f"{prefix}[{index}]"))
        return rows

    return [(prefix, value)]


def render_table(payload: object, *, title: str) -> str:
    rows = flatten(payload)
    width = max((len(key) for key, _ in rows), default=0)
    return render_template(
        "table.txt",
        title=title,
        rows=[(key.ljust(width), format_number(value)) for key, value in rows],
    )


__all__ = ["ENV", "flatten", "format_number", "render_table", "render_template"]
