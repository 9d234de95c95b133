from marshmallow import Schema, fields, validate, validates_schema, ValidationError


class ScenarioFieldsSchema(Schema):
    """Scenario header shared by behavior, assignment and decomposition files"""
    parties = fields.Int(
        required=True,
        validate=validate.Range(min=1),
        metadata={"description": "Number of parties"}
    )
    inputs = fields.List(
        fields.Int(validate=validate.Range(min=1)),
        required=True,
        metadata={"description": "Input cardinality per party"}
    )
    outputs = fields.List(
        fields.Int(validate=validate.Range(min=1)),
        required=True,
        metadata={"description": "Output cardinality per party"}
    )

    @validates_schema
    def validate_cardinalities(self, data, **kwargs):
        n = data.get("parties")
        for key in ("inputs", "outputs"):
            if key in data and len(data[key]) != n:
                raise ValidationError(
                    f"expected {n} entries, got {len(data[key])}", field_name=key
                )


class BehaviorSchema(ScenarioFieldsSchema):
    """P(outputs | inputs), joint input outer and joint output inner"""
    probs = fields.List(
        fields.Float(allow_nan=False),
        required=True,
        metadata={"description": "Flat probability table"}
    )

    @validates_schema
    def validate_size(self, data, **kwargs):
        if "inputs" not in data or "outputs" not in data or "probs" not in data:
            return
        size = 1
        for c in list(data["inputs"]) + list(data["outputs"]):
            size *= c
        if len(data["probs"]) != size:
            raise ValidationError(
                f"expected {size} probabilities, got {len(data['probs'])}", field_name="probs"
            )
