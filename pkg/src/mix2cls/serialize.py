"""JSON export of ASTs and reports, DOT export of explored state graphs."""
from __future__ import annotations

import dataclasses
import json

from . import sessiontypes, syntax
from .printer import show_process, show_type

SCHEMA = 1

_KINDS = {
    cls.__name__: cls
    for mod in (syntax, sessiontypes)
    for cls in vars(mod).values()
    if isinstance(cls, type) and dataclasses.is_dataclass(cls) and cls.__module__ == mod.__name__
}


def to_data(node):
    """Plain JSON-ready data with an explicit ``kind`` on every node."""
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        out = {"kind": type(node).__name__}
        for f in dataclasses.fields(node):
            out[f.name] = to_data(getattr(node, f.name))
        return out
    if isinstance(node, (tuple, list)):
        return [to_data(x) for x in node]
    return node


def from_data(data):
    if isinstance(data, dict):
        cls = _KINDS[data["kind"]]
        kwargs = {k: from_data(v) for k, v in data.items() if k != "kind"}
        return cls(**kwargs)
    if isinstance(data, list):
        return tuple(from_data(x) for x in data)
    return data


def context_data(ctx) -> list:
    return [{"name": n, "type": to_data(t), "text": show_type(t)} for n, t in ctx.items()]


def translation_document(source_ctx, source, ctx, target) -> dict:
    return {
        "schema": SCHEMA,
        "source": {"context": context_data(source_ctx), "process": to_data(source),
                   "text": show_process(source)},
        "target": {"context": context_data(ctx), "process": to_data(target),
                   "text": show_process(target)},
    }


def trace_data(trace) -> dict:
    return {
        "length": len(trace),
        "steps": [
            {"rule": s.rule, "tag": s.tag, "channels": list(s.channels) if s.channels else None,
             "label": None if s.label is None else str(s.label),
             "value": None if s.value is None else str(s.value)}
            for s in trace.steps
        ],
    }


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    try:
        return show_process(v)
    except TypeError:
        return str(v)


def report_data(rep) -> dict:
    return {
        "claim": rep.claim,
        "subject": rep.subject,
        "outcome": rep.outcome,
        "diagnostic": rep.diagnostic,
        "notes": list(rep.notes),
        "data": _plain(rep.data),
        "witnesses": [trace_data(t) for t in rep.witnesses],
    }


def reports_document(reports) -> dict:
    return {"schema": SCHEMA, "reports": [report_data(r) for r in reports]}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def exploration_dot(ex) -> str:
    ids = {k: f"n{i}" for i, k in enumerate(sorted(ex.states, key=lambda k: (ex.depth[k], k)))}
    lines = ["digraph reductions {", "  node [shape=box, fontname=monospace];"]
    for k, nid in ids.items():
        text = show_process(ex.states[k]).replace("\\", "\\\\").replace('"', '\\"')
        if len(text) > 80:
            text = text[:77] + "..."
        style = ", style=bold" if k == ex.start_key else ""
        lines.append(f'  {nid} [label="d{ex.depth[k]}: {text}"{style}];')
    for k, out in ex.edges.items():
        for step, dst in out:
            lines.append(f'  {ids[k]} -> {ids[dst]} [label="{step.tag}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
