"""
Report rendering for the command line: canonical JSON and aligned text tables
"""

import json
import sys
from enum import Enum
from typing import Dict, Iterable, List, Sequence, TextIO

import numpy as np


def _default(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def to_json_text(payload) -> str:
    """Sorted keys and fixed indentation, so equal payloads give equal bytes"""
    return json.dumps(payload, indent=2, sort_keys=True, default=_default, ensure_ascii=False)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ",".join(_cell(v) for v in value)
    if value is None:
        return "-"
    return str(value)


def render_table(rows: Iterable[Dict], columns: Sequence[str]) -> str:
    rows = list(rows)
    cells = [[_cell(row.get(col)) for col in columns] for row in rows]
    widths = [max([len(col)] + [len(r[i]) for r in cells]) for i, col in enumerate(columns)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def render_checks(checks: Dict[str, Dict], summary: Dict, title: str) -> str:
    output = [f"=== {title.upper()} ===", ""]
    for name, result in checks.items():
        icon, text = ("[+]", "PASS") if result["status"] else ("[X]", "FAIL")
        output.append(f"{icon} {name}: {text}")
        output.append(f"   {result['message']}")
    output.append("")
    output.append(f"Status: {summary.get('status', '').upper()}")
    output.append(f"Message: {summary.get('message', '')}")
    return "\n".join(output)


def render_transcript(transcript: Dict) -> str:
    events = []
    for e in transcript.get("events", []):
        actor = e.get("party") or "+".join(e.get("parties", []))
        events.append({
            "kind": e.get("kind"),
            "party": actor,
            "to": e.get("receiver"),
            "qubits": e.get("qubits"),
            "what": e.get("label") or e.get("operator") or e.get("basis"),
            "bits": e.get("bits"),
            "p": e.get("probability"),
        })
    lines = [f"protocol: {transcript.get('protocol')}"]
    lines.append(render_table(events, ["kind", "party", "to", "qubits", "what", "bits", "p"]))
    lines.append(f"cbits: {transcript.get('total_cbits')} {transcript.get('cbit_totals')}")
    lines.append(f"fidelity: {_cell(transcript.get('fidelity'))}")
    return "\n".join(lines)


LEDGER_COLUMNS = ["label", "match", "overlap", "max_amplitude_diff"]


def _render_ledger(payload: Dict) -> str:
    blocks = []
    for section, entries in payload.items():
        if section == "summary" or not isinstance(entries, list) or not entries:
            continue
        columns = [c for c in LEDGER_COLUMNS if any(c in e for e in entries)] or sorted(entries[0])
        blocks.append(f"[{section}]\n{render_table(entries, columns)}")
    if "summary" in payload:
        blocks.append("[summary]\n" + render_table(
            [{"section": k, **v} for k, v in payload["summary"].items()], ["section", "entries", "mismatches"]
        ))
    return "\n\n".join(blocks)


def _render_diagnose(payload: Dict) -> str:
    ledger = payload["ledger"]
    rows = [{"rest": s["split"][0], "part": s["split"][1], "entropy": s["entropy"], "purity": s["purity"]}
            for s in ledger["splits"]]
    blocks = [render_table(rows, ["rest", "part", "entropy", "purity"])]
    blocks.append(f"MEMS: S1={ledger['mems']['S1']:.12g} S2={ledger['mems']['S2']:.12g}")
    if "checks" in payload:
        blocks.append(render_checks(payload["checks"]["checks"], payload["checks"]["summary"], "brown expectations"))
    return "\n\n".join(blocks)


def render_text(command: str, payload: Dict) -> str:
    if command == "verify-tables":
        return _render_ledger(payload)
    if command == "diagnose":
        return _render_diagnose(payload)
    if "transcript" in payload:
        text = render_transcript(payload["transcript"])
        if "audit" in payload:
            text += "\n\n" + render_checks(payload["audit"]["checks"], payload["audit"]["summary"], "audit")
        return text
    if command == "audit":
        return render_checks(payload["checks"], payload["summary"], "audit")
    if command == "batch":
        return render_table(payload["runs"], ["run", "fidelity", "cbits", "audit"]) + \
            f"\n\nmin fidelity: {_cell(payload['summary']['min_fidelity'])}"
    if command == "dense" and "codes" in payload:
        return render_table(payload["codes"], ["message", "bits", "row", "triple"])
    return to_json_text(payload)


def emit(command: str, payload: Dict, fmt: str = "json", stream: TextIO = None):
    stream = stream or sys.stdout
    text = render_text(command, payload) if fmt == "text" else to_json_text(payload)
    stream.write(text + "\n")


def mismatch_summary(ledger: Dict[str, List[Dict]]) -> Dict[str, Dict]:
    return {
        section: {
            "entries": len(entries),
            "mismatches": [e.get("label") for e in entries if not e.get("match", True)],
        }
        for section, entries in ledger.items()
    }
