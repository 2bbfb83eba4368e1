"""Table extraction from OCR token boxes via typed-graph pattern matching."""

from .alignment import AlignmentConfig, LabeledDocument, label_document
from .document import (
    Cell,
    DocumentError,
    ExtractedTable,
    GroundTruthTable,
    Page,
    Raster,
    SchemaError,
    Token,
    load_document,
    load_ground_truth,
    load_page_file,
)
from .evaluation import ScoreBreakdown, column_accuracy, fitness, line_accuracy, score, table_accuracy
from .iso_search import SearchBudget, SearchResult, brute_force_embedding, find_embedding, find_largest
from .order_model import TableCandidate, is_well_formed, repair
from .pattern import Family, Pattern, make_pattern, shrink_sequence
from .pipeline import ExtractionResult, NoRasterError, PipelineConfig, Strategy, extract, resolve_dynamic
from .synth import SynthSpec, generate
from .table_graph import TypedGraph, build_document_graph
from .visual import Structure, SurrogateParams, SurrogateReport, analyze_page

__version__ = "0.1.0"

__all__ = [
    "AlignmentConfig",
    "Cell",
    "DocumentError",
    "ExtractedTable",
    "ExtractionResult",
    "Family",
    "GroundTruthTable",
    "LabeledDocument",
    "NoRasterError",
    "Page",
    "Pattern",
    "PipelineConfig",
    "Raster",
    "SchemaError",
    "ScoreBreakdown",
    "SearchBudget",
    "SearchResult",
    "Strategy",
    "Structure",
    "SurrogateParams",
    "SurrogateReport",
    "SynthSpec",
    "TableCandidate",
    "Token",
    "TypedGraph",
    "analyze_page",
    "brute_force_embedding",
    "build_document_graph",
    "column_accuracy",
    "extract",
    "find_embedding",
    "find_largest",
    "fitness",
    "generate",
    "is_well_formed",
    "label_document",
    "line_accuracy",
    "load_document",
    "load_ground_truth",
    "load_page_file",
    "make_pattern",
    "repair",
    "resolve_dynamic",
    "score",
    "shrink_sequence",
    "table_accuracy",
]
