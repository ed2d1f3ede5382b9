"""JSON schemas for the file formats read and written by the command line."""

_VALUE = {"oneOf": [{"type": "integer", "minimum": 0},
                    {"type": "string", "pattern": r"^\d+(\.\d+)?(/\d+)?$"}]}
_VERDICT = {
    "type": "object",
    "required": ["pass"],
    "properties": {"pass": {"type": "boolean"}, "witness": {"type": "object"}},
}
_SKIPPED = {"type": "object", "required": ["skipped"]}

INSTANCE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "instance",
    "type": "object",
    "required": ["agents", "goods", "groups", "valuations"],
    "properties": {
        "agents": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "goods": {"type": "array", "items": {"type": "string"}},
        "groups": {"type": "array", "minItems": 1,
                   "items": {"type": "array", "items": {"type": "string"}, "minItems": 1}},
        "valuations": {"type": "array", "items": {"type": "array", "items": _VALUE}},
        "class": {"enum": ["all-common", "group-common", "general"]},
    },
}

ALLOCATION = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "allocation",
    "type": "object",
    "required": ["bundles"],
    "properties": {
        "bundles": {"type": "object",
                    "additionalProperties": {"type": "array", "items": {"type": "string"}}},
    },
}

TRACE_EVENT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "trace event (one per line)",
    "type": "object",
    "required": ["step", "round", "group", "agent", "good", "reason"],
    "properties": {
        "step": {"type": "integer", "minimum": 0},
        "round": {"type": "integer", "minimum": 0},
        "group": {"type": "integer", "minimum": 0},
        "agent": {"type": ["integer", "null"], "minimum": 0},
        "good": {"type": "integer", "minimum": 0},
        "reason": {"enum": ["sm", "iwrr", "weighted-greedy", "representative"]},
    },
}

REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fairness report",
    "type": "object",
    "required": ["ef", "ef1", "efx", "wef", "wef1", "wefx", "pef1", "iprop1", "exante_wef1"],
    "properties": {
        **{name: _VERDICT for name in ("ef", "ef1", "efx", "pef1", "iprop1")},
        **{name: {"oneOf": [_VERDICT, _SKIPPED]} for name in ("wef", "wef1", "wefx")},
        "exante_wef1": {
            "type": "object",
            "required": ["pass", "gamma", "min_feasible_gamma"],
            "properties": {
                "pass": {"type": "boolean"},
                "gamma": _VALUE,
                "min_feasible_gamma": {"oneOf": [_VALUE, {"const": "inf"}]},
            },
        },
    },
}

ALL = {"instance": INSTANCE, "allocation": ALLOCATION, "trace": TRACE_EVENT, "report": REPORT}
