"""JSON schemas for the ``--format json`` output of each CLI verb."""

STATUS = {"enum": ["OK", "VIOLATION", "UNSATISFIABLE", "NOT_APPLICABLE", "EXHAUSTED", "ROLE_VIOLATED", "NOT_FOUND"]}
FRACTION = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
COLORS = {"type": "array", "items": {"enum": ["I", "O", None]}}
IDS = {"type": "array", "items": {"type": "integer", "minimum": 0}}


def _obj(required, **props):
    return {
        "type": "object",
        "required": ["status", *required],
        "properties": {"status": STATUS, **props},
    }


SCHEMAS = {
    "mad": _obj(["mad", "witness", "n", "m"], mad=FRACTION, witness=IDS, n={"type": "integer"}, m={"type": "integer"}),
    "solve": _obj(
        ["method", "spec"],
        method={"enum": ["thm1", "thm2", "exact"]},
        spec={"type": "string"},
        coloring=COLORS,
        residual_vertices=IDS,
        core_vertices=IDS,
        reason={"enum": ["exhausted", "oracle"]},
    ),
    "verify": _obj(["spec"], spec={"type": "string"}, kind={"type": "string"}, witness=IDS),
    "gen": _obj(["prng", "seed", "graphs"], prng={"const": "python-random-mt19937"}, seed={"type": "integer"},
                graphs={"type": "array"}),
    "reduce-sat": _obj(["n", "m", "variables", "clauses", "transmitters", "girth_floor"], sound={"type": "boolean"}),
    "certify-gadget": _obj(["role"], role={"enum": ["ForceI", "ForceO", "Transmitter"]}, facts={"type": "object"}),
    "mine-gadget": _obj([], gadget={"type": "object"}, reason={"type": "string"}),
    "audit-discharge": _obj(
        ["total", "conserved", "negative", "final"],
        total=FRACTION,
        conserved={"type": "boolean"},
        negative=IDS,
        final={"type": "object", "additionalProperties": FRACTION},
    ),
    "bench": _obj(["prng", "seed", "rows"], rows={"type": "array", "items": {"type": "object",
                  "required": ["method", "k", "n", "m", "seed", "seconds", "status"]}}),
}
