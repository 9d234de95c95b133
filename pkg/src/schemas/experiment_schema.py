from marshmallow import Schema, fields, validate, validates_schema, ValidationError


class TimingSchema(Schema):
    kind = fields.Str(load_default="uniform", validate=validate.OneOf(["fixed", "uniform"]))
    t = fields.Float(load_default=None, allow_none=True)
    t_min = fields.Float(load_default=0.0)
    t_max = fields.Float(load_default=1.0)

    @validates_schema
    def validate_window(self, data, **kwargs):
        if data["kind"] == "fixed" and data.get("t") is None:
            raise ValidationError("fixed timing needs 't'", field_name="t")
        if data["kind"] == "uniform" and data["t_min"] > data["t_max"]:
            raise ValidationError("t_min exceeds t_max", field_name="t_min")


class AgentSchema(Schema):
    party = fields.Str(
        required=True,
        metadata={"description": "Party label (A, B, ...) or index"}
    )
    input_dist = fields.List(fields.Float(validate=validate.Range(min=0.0)), load_default=None)
    timing = fields.Nested(TimingSchema, load_default=lambda: {"kind": "uniform"})


class ExperimentConfigSchema(Schema):
    """Simulation configuration file"""
    behavior = fields.Raw(
        required=True,
        metadata={"description": "Behavior file path (relative to the config) or inline behavior"}
    )
    agents = fields.List(fields.Nested(AgentSchema), load_default=list)
    rounds = fields.Int(load_default=10_000, validate=validate.Range(min=0))
    mode = fields.Str(
        load_default="upgraded",
        validate=validate.OneOf(["upgraded", "naive-assignment", "naive-decomposition"])
    )
    assignment = fields.Raw(
        load_default=None,
        allow_none=True,
        metadata={"description": "Assignment file path or inline assignment (naive-assignment)"}
    )
    order = fields.Str(
        load_default=None,
        allow_none=True,
        metadata={"description": "Fixed order such as 'A,B' (naive-decomposition)"}
    )
    policy = fields.Str(load_default="force", validate=validate.OneOf(["block", "force"]))
    seed = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=0))
    workers = fields.Int(load_default=1, validate=validate.Range(min=1))

    @validates_schema
    def validate_mode_fields(self, data, **kwargs):
        if data["mode"] == "naive-assignment" and data.get("assignment") is None:
            raise ValidationError("naive-assignment mode needs 'assignment'", field_name="assignment")
        if data["mode"] == "naive-decomposition" and not data.get("order"):
            raise ValidationError("naive-decomposition mode needs 'order'", field_name="order")


class RoundLogSchema(Schema):
    """One JSON-lines record per round"""
    round_id = fields.Int(required=True)
    timestamps = fields.List(fields.Float(), required=True)
    ordering = fields.List(fields.Str(), required=True)
    inputs = fields.List(fields.Int(allow_none=True), required=True)
    nominal_inputs = fields.List(fields.Int(), required=True)
    forced = fields.List(fields.Bool(), required=True)
    outcomes = fields.List(fields.Int(allow_none=True), required=True)
    order_index = fields.Int(required=True)
    term_index = fields.Int(required=True)
    aborted = fields.Bool(load_default=False)
    violation = fields.Bool(load_default=False)
