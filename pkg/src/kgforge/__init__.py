"""kgforge: ontologically grounded knowledge graphs with customizable modeling.

The package turns ontology files and tabular edge sources into knowledge
graphs under a configurable knowledge model (class- or instance-based),
relation strategy (standard or inverse), and semantic abstraction mode, with
ontology quality control, graph statistics, and build provenance throughout.
"""

__version__ = "0.1.0"

from .rdf import (  # noqa: F401
    NamespaceTable,
    Term,
    Triple,
    TripleGraph,
    blank,
    contract_iri,
    expand_curie,
    iri,
    literal,
    load_ntriples,
    parse_ntriples,
    save_ntriples,
    serialize_ntriples,
    triple,
)
from .qc import CleaningPolicy, QCReport, clean_ontology, profile_ontology  # noqa: F401
from .merge import AlignmentMap, align_identifiers, merge  # noqa: F401
from .edges import EdgeList, EdgeTypeSpec, FilterRule, assemble_edges  # noqa: F401
from .build import (  # noqa: F401
    AnchorMap,
    BuildConfig,
    RelationCatalog,
    apply_relation_strategy,
    build,
)
from .abstraction import AbstractionReport, abstract, harmonize  # noqa: F401
from .stats import GraphStats, compute_stats  # noqa: F401
from .provenance import BuildMetadata, SourceRecord, record_source  # noqa: F401
from .pipeline import BuildManifest, BuildTuple, load_manifest, run_pipeline  # noqa: F401
