"""Well-known RDF/RDFS/OWL vocabulary IRIs and namespace bases."""

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OBO_NS = "http://purl.obolibrary.org/obo/"
OBOINOWL_NS = "http://www.geneontology.org/formats/oboInOwl#"

RDF_TYPE = RDF_NS + "type"
RDF_FIRST = RDF_NS + "first"
RDF_REST = RDF_NS + "rest"
RDF_NIL = RDF_NS + "nil"

RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_SUBPROPERTYOF = RDFS_NS + "subPropertyOf"
RDFS_LABEL = RDFS_NS + "label"
RDFS_COMMENT = RDFS_NS + "comment"
RDFS_DOMAIN = RDFS_NS + "domain"
RDFS_RANGE = RDFS_NS + "range"

OWL_CLASS = OWL_NS + "Class"
OWL_NAMED_INDIVIDUAL = OWL_NS + "NamedIndividual"
OWL_OBJECT_PROPERTY = OWL_NS + "ObjectProperty"
OWL_ANNOTATION_PROPERTY = OWL_NS + "AnnotationProperty"
OWL_DATATYPE_PROPERTY = OWL_NS + "DatatypeProperty"
OWL_RESTRICTION = OWL_NS + "Restriction"
OWL_ON_PROPERTY = OWL_NS + "onProperty"
OWL_SOME_VALUES_FROM = OWL_NS + "someValuesFrom"
OWL_INTERSECTION_OF = OWL_NS + "intersectionOf"
OWL_UNION_OF = OWL_NS + "unionOf"
OWL_COMPLEMENT_OF = OWL_NS + "complementOf"
OWL_EQUIVALENT_CLASS = OWL_NS + "equivalentClass"
OWL_DEPRECATED = OWL_NS + "deprecated"
OWL_ONTOLOGY = OWL_NS + "Ontology"
OWL_THING = OWL_NS + "Thing"

XSD_BOOLEAN = XSD_NS + "boolean"
XSD_INTEGER = XSD_NS + "integer"
XSD_STRING = XSD_NS + "string"

OBOINOWL_OBSOLETE_CLASS = OBOINOWL_NS + "ObsoleteClass"

IAO_DEFINITION = OBO_NS + "IAO_0000115"
SYNONYM_PREDICATES = (
    OBOINOWL_NS + "hasExactSynonym",
    OBOINOWL_NS + "hasRelatedSynonym",
    OBOINOWL_NS + "hasBroadSynonym",
    OBOINOWL_NS + "hasNarrowSynonym",
)

# Declaration kinds inspected by the quality checks and the abstraction pass.
DECLARATION_KINDS = (
    OWL_CLASS,
    OWL_OBJECT_PROPERTY,
    OWL_ANNOTATION_PROPERTY,
    OWL_DATATYPE_PROPERTY,
    OWL_NAMED_INDIVIDUAL,
)


def is_vocab_iri(value: str) -> bool:
    """True when ``value`` lives in the RDF, RDFS, OWL, or XSD namespaces."""
    return value.startswith((RDF_NS, RDFS_NS, OWL_NS, XSD_NS))
