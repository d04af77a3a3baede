//! Core planning vocabulary. Every term lives in [`BASE`](super::BASE).
//!
//! The class and property set is a reconstruction of the planning ontology
//! fragments (regulation and event domains); user ontologies may extend it.

use super::Iri;

macro_rules! vocab {
    ($($fn_name:ident => $local:literal),* $(,)?) => {
        $(
            pub fn $fn_name() -> Iri {
                Iri::local($local)
            }
        )*
    };
}

// classes
vocab! {
    infrastructure => "Infrastructure",
    wind_farm => "WindFarm",
    turbine => "Turbine",
    cable => "Cable",
    regulation => "Regulation",
    event => "Event",
    governing_entity => "GoverningEntity",
    document => "Document",
    class => "Class",
}

// properties
vocab! {
    rdf_type => "type",
    sub_class_of => "subClassOf",
    domain => "domain",
    range => "range",
    has_geometry => "hasGeometry",
    has_conflict => "hasConflict",
    has_turbine_status => "hasTurbineStatus",
    has_pitch_angle => "hasPitchAngle",
    has_yaw_angle => "hasYawAngle",
    has_wind_speed => "hasWindSpeed",
    has_regulation_description => "hasRegulationDescription",
    has_impact_area => "hasImpactArea",
    has_impact_value => "hasImpactValue",
    has_impact_unit => "hasImpactUnit",
    violates => "violates",
    has_annotation => "hasAnnotation",
    has_name => "hasName",
    has_acronym => "hasAcronym",
    has_description => "hasDescription",
    has_category => "hasCategory",
    has_source_section => "hasSourceSection",
    has_context_quote => "hasContextQuote",
    applies_to => "appliesTo",
    has_jurisdiction => "hasJurisdiction",
    has_role => "hasRole",
    has_title => "hasTitle",
    has_project_name => "hasProjectName",
    has_location => "hasLocation",
    has_distance_to_storm => "hasDistanceToStorm",
}

// individuals
vocab! {
    operational => "Operational",
    parked => "Parked",
    shutdown => "Shutdown",
}
