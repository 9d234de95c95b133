from marshmallow import Schema, fields, validates_schema, ValidationError

from schemas.behavior_schema import ScenarioFieldsSchema


def _check_rows(rows, n_parties):
    for k, row in enumerate(rows):
        if len(row) != 2 or any(len(part) != n_parties for part in row):
            raise ValidationError(
                f"row {k} must be [[inputs], [outputs]] with {n_parties} entries each",
                field_name="table"
            )


class AssignmentSchema(ScenarioFieldsSchema):
    """Deterministic assignment as ([inputs], [outputs]) rows in joint-input order"""
    table = fields.List(
        fields.List(fields.List(fields.Int())),
        required=True,
        metadata={"description": "Rows [[x...], [a...]] ordered by joint input index"}
    )

    @validates_schema
    def validate_rows(self, data, **kwargs):
        if "table" in data and "parties" in data:
            _check_rows(data["table"], data["parties"])


class TermSchema(Schema):
    weight = fields.Float(required=True, allow_nan=False)
    table = fields.List(fields.List(fields.List(fields.Int())), required=True)


class DecompositionSchema(ScenarioFieldsSchema):
    """Weighted order-respecting assignments"""
    order = fields.List(
        fields.Str(),
        required=True,
        metadata={"description": "Party labels, earliest first"}
    )
    terms = fields.List(fields.Nested(TermSchema), required=True)

    @validates_schema
    def validate_terms(self, data, **kwargs):
        if "parties" not in data:
            return
        if "order" in data and len(data["order"]) != data["parties"]:
            raise ValidationError("order must name every party once", field_name="order")
        for term in data.get("terms", []):
            _check_rows(term["table"], data["parties"])
