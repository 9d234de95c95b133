from marshmallow import Schema, fields, validate

from schemas.assignment_schema import AssignmentSchema, DecompositionSchema
from schemas.behavior_schema import BehaviorSchema


class RepositoryDumpSchema(Schema):
    """Audit dump of a built repository"""
    seed = fields.Int(required=True, validate=validate.Range(min=0, max=2**64 - 1))
    mode = fields.Str(
        required=True,
        validate=validate.OneOf(["upgraded", "naive-assignment", "naive-decomposition"])
    )
    behavior = fields.Nested(BehaviorSchema, required=True)
    assignment = fields.Nested(AssignmentSchema, load_default=None, allow_none=True)
    order = fields.List(fields.Str(), load_default=None, allow_none=True)
    decompositions = fields.List(fields.Nested(DecompositionSchema), load_default=list)
