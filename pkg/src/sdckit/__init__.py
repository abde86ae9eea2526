"""k-anonymity analysis and anonymization toolkit for tabular microdata.

The package splits into metric modules (anonymity, risk, infoloss) that only
measure, operator modules (anonymizer) that transform data, deterministic
synthetic data generation (datagen), and two front doors: a CLI (cli) and an
HTTP session service (service). Reports (report) are pure views over the
metric modules.
"""

from .anonymity import (DEFAULT_BOUNDS, FrequencyProfile, PartitionResult,
                        QuartileSummary, ThresholdCounts, complete_qid_view,
                        effective_size, effective_sizes, is_k_anonymous,
                        partition, quartile_summary, threshold_counts)
from .anonymizer import (AnonymizationResult, GeneralizationHierarchy,
                         PlanStep, RecodePlan, achieve_k_anonymity, apply_op,
                         casewise_delete, global_recode, load_hierarchy,
                         local_suppress, replay, zip_truncate)
from .datagen import (GeneratorSpec, SplitMix64, VariablePool,
                      canonical_hierarchy_text, canonical_spec, generate,
                      load_spec)
from .errors import (AnonymizationError, DataError, HierarchyError, SchemaError,
                     SdcError, UndefinedLossError)
from .infoloss import (LossReport, info_loss_ratio, prec_loss, quartile_slope,
                       suppression_accounting)
from .microdata import (DatasetSchema, Microdata, QuasiIdentifier,
                        VariableMeta, load_table, parse_schema,
                        schema_to_json, table_to_csv, truncate_date_to_year,
                        write_table)
from .report import ReportTable, anonymity_report, comparison_report, render
from .risk import (RiskProfile, RiskSummary, global_risk, record_risks,
                   risk_histogram, risk_summary, threshold_for_k,
                   unsafe_records)

__version__ = "0.1.0"

__all__ = [
    "AnonymizationError", "AnonymizationResult", "DEFAULT_BOUNDS",
    "DataError", "DatasetSchema", "FrequencyProfile",
    "GeneralizationHierarchy", "GeneratorSpec", "HierarchyError",
    "LossReport", "Microdata", "PartitionResult", "PlanStep",
    "QuartileSummary", "QuasiIdentifier", "RecodePlan", "ReportTable",
    "RiskProfile", "RiskSummary", "SchemaError", "SdcError", "SplitMix64",
    "ThresholdCounts", "UndefinedLossError", "VariableMeta", "VariablePool",
    "achieve_k_anonymity", "anonymity_report", "apply_op",
    "canonical_hierarchy_text", "canonical_spec",
    "casewise_delete", "comparison_report", "complete_qid_view",
    "effective_size", "effective_sizes", "generate", "global_recode",
    "global_risk", "info_loss_ratio", "is_k_anonymous", "load_hierarchy",
    "load_spec", "load_table", "local_suppress", "parse_schema", "partition",
    "prec_loss", "quartile_slope", "quartile_summary", "record_risks",
    "render", "replay", "risk_histogram", "risk_summary", "schema_to_json",
    "suppression_accounting", "table_to_csv", "threshold_counts",
    "threshold_for_k", "truncate_date_to_year", "unsafe_records",
    "write_table", "zip_truncate",
]
