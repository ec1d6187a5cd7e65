//! Validation findings with stable codes.

use std::fmt;

use crate::logic::Formula;

/// One of the three name sorts of a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Variable,
    Action,
    Event,
}

impl Sort {
    pub const ALL: [Sort; 3] = [Sort::Variable, Sort::Action, Sort::Event];

    /// Keyword used by the diagram file format (`var`, `action`, `event`).
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Variable => "var",
            Sort::Action => "action",
            Sort::Event => "event",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Sort> {
        match s {
            "var" => Some(Sort::Variable),
            "action" => Some(Sort::Action),
            "event" => Some(Sort::Event),
            _ => None,
        }
    }

    pub(crate) fn tag(self) -> &'static str {
        match self {
            Sort::Variable => "p",
            Sort::Action => "a",
            Sort::Event => "e",
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Variable => "variable",
            Sort::Action => "action",
            Sort::Event => "event",
        })
    }
}

/// Which half of an action's presentation a finding refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    Prescription,
    Description,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Prescription => "prescription",
            Part::Description => "description",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidName {
        sort: Sort,
        name: String,
    },
    NameSetsOverlap {
        name: String,
    },
    /// π, δ or ε has an entry for a name outside A (or E), or lacks one for a name inside it.
    PresentationDomain {
        sort: Sort,
        name: String,
        missing: bool,
    },
    UnknownSymbol {
        action: String,
        part: Part,
        symbol: String,
    },
    ObservedActionUnknown {
        event: String,
        action: String,
    },
    NotTotal {
        sort: Sort,
        name: String,
    },
    UnknownSource {
        sort: Sort,
        name: String,
    },
    ImageOutsideTarget {
        sort: Sort,
        name: String,
        image: String,
    },
    PrescriptionNotPreserved {
        action: String,
        missing: Vec<Formula>,
    },
    DescriptionNotPreserved {
        action: String,
        missing: Vec<Formula>,
    },
    ObservationNotPreserved {
        event: String,
        missing: Vec<String>,
    },
    EndpointMismatch {
        edge: String,
        detail: String,
    },
    LegMissing {
        node: String,
    },
    LegUnexpected {
        node: String,
    },
    LegInvalid {
        node: String,
        violation: Box<Violation>,
    },
    EdgeInvalid {
        edge: String,
        violation: Box<Violation>,
    },
    NodeInvalid {
        node: String,
        violation: Box<Violation>,
    },
    CommutationFailure {
        edge: String,
        sort: Sort,
        name: String,
        via_edge: String,
        direct: String,
    },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::InvalidName { .. } => "E010",
            Violation::NameSetsOverlap { .. } => "E011",
            Violation::PresentationDomain { .. } => "E012",
            Violation::UnknownSymbol { .. } => "E013",
            Violation::ObservedActionUnknown { .. } => "E014",
            Violation::NotTotal { .. } => "E020",
            Violation::UnknownSource { .. } => "E021",
            Violation::ImageOutsideTarget { .. } => "E022",
            Violation::PrescriptionNotPreserved { .. } => "E023",
            Violation::DescriptionNotPreserved { .. } => "E024",
            Violation::ObservationNotPreserved { .. } => "E025",
            Violation::EndpointMismatch { .. } => "E030",
            Violation::LegMissing { .. } => "E031",
            Violation::LegUnexpected { .. } => "E032",
            Violation::LegInvalid { violation, .. }
            | Violation::EdgeInvalid { violation, .. }
            | Violation::NodeInvalid { violation, .. } => violation.code(),
            Violation::CommutationFailure { .. } => "E033",
        }
    }

    /// Short variant name, e.g. `NameSetsOverlap`.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::InvalidName { .. } => "InvalidName",
            Violation::NameSetsOverlap { .. } => "NameSetsOverlap",
            Violation::PresentationDomain { .. } => "PresentationDomain",
            Violation::UnknownSymbol { .. } => "UnknownSymbol",
            Violation::ObservedActionUnknown { .. } => "ObservedActionUnknown",
            Violation::NotTotal { .. } => "NotTotal",
            Violation::UnknownSource { .. } => "UnknownSource",
            Violation::ImageOutsideTarget { .. } => "ImageOutsideTarget",
            Violation::PrescriptionNotPreserved { .. } => "PrescriptionNotPreserved",
            Violation::DescriptionNotPreserved { .. } => "DescriptionNotPreserved",
            Violation::ObservationNotPreserved { .. } => "ObservationNotPreserved",
            Violation::EndpointMismatch { .. } => "EndpointMismatch",
            Violation::LegMissing { .. } => "LegMissing",
            Violation::LegUnexpected { .. } => "LegUnexpected",
            Violation::LegInvalid { violation, .. }
            | Violation::EdgeInvalid { violation, .. }
            | Violation::NodeInvalid { violation, .. } => violation.kind(),
            Violation::CommutationFailure { .. } => "CommutationFailure",
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidName { sort, name } => {
                write!(f, "InvalidName: {sort} name `{name}` is not an identifier")
            }
            Violation::NameSetsOverlap { name } => write!(
                f,
                "NameSetsOverlap: `{name}` is declared in more than one of variables/actions/events"
            ),
            Violation::PresentationDomain { sort, name, missing } => {
                if *missing {
                    write!(f, "PresentationDomain: {sort} `{name}` has no presentation entry")
                } else {
                    write!(f, "PresentationDomain: presentation entry for undeclared {sort} `{name}`")
                }
            }
            Violation::UnknownSymbol { action, part, symbol } => write!(
                f,
                "UnknownSymbol: {part} of action `{action}` mentions `{symbol}`, which is not a variable"
            ),
            Violation::ObservedActionUnknown { event, action } => write!(
                f,
                "ObservedActionUnknown({event}, {action}): event `{event}` observes undeclared action `{action}`"
            ),
            Violation::NotTotal { sort, name } => {
                write!(f, "NotTotal: {sort} `{name}` has no image")
            }
            Violation::UnknownSource { sort, name } => {
                write!(f, "UnknownSource: map mentions {sort} `{name}`, absent from the source")
            }
            Violation::ImageOutsideTarget { sort, name, image } => write!(
                f,
                "ImageOutsideTarget: {sort} `{name}` maps to `{image}`, absent from the target"
            ),
            Violation::PrescriptionNotPreserved { action, missing } => write!(
                f,
                "PrescriptionNotPreserved({action}): translated guard sentences {{{}}} missing from target",
                join(missing)
            ),
            Violation::DescriptionNotPreserved { action, missing } => write!(
                f,
                "DescriptionNotPreserved({action}): translated effect sentences {{{}}} missing from target",
                join(missing)
            ),
            Violation::ObservationNotPreserved { event, missing } => write!(
                f,
                "ObservationNotPreserved({event}): translated actions {{{}}} not observed by the image event",
                join(missing)
            ),
            Violation::EndpointMismatch { edge, detail } => {
                write!(f, "EndpointMismatch: edge `{edge}`: {detail}")
            }
            Violation::LegMissing { node } => write!(f, "LegMissing: no leg for node `{node}`"),
            Violation::LegUnexpected { node } => {
                write!(f, "LegUnexpected: leg for `{node}`, which is not a diagram node")
            }
            Violation::LegInvalid { node, violation } => write!(f, "leg `{node}`: {violation}"),
            Violation::EdgeInvalid { edge, violation } => write!(f, "edge `{edge}`: {violation}"),
            Violation::NodeInvalid { node, violation } => write!(f, "node `{node}`: {violation}"),
            Violation::CommutationFailure {
                edge,
                sort,
                name,
                via_edge,
                direct,
            } => write!(
                f,
                "CommutationFailure: edge `{edge}`, {sort} `{name}`: through the edge it reaches `{via_edge}`, directly `{direct}`"
            ),
        }
    }
}

/// All findings of one validation pass. Empty means valid.
pub type Report = Vec<Violation>;
