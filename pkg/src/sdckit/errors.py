"""Exception types shared across the toolkit."""


class SdcError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(SdcError):
    """Malformed schema document or schema/data mismatch."""


class DataError(SdcError):
    """Malformed data file or cell value (reported with row context)."""


class HierarchyError(SdcError):
    """Malformed generalization hierarchy or value outside its domain."""


class AnonymizationError(SdcError):
    """An anonymization operator cannot satisfy its postcondition."""


class UndefinedLossError(SdcError):
    """Information-loss ratio is undefined (zero original slope)."""
