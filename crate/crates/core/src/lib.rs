//! Components, morphisms and colimit composition for the Compos architecture
//! description language.
//!
//! A system is described as a [`Diagram`] of components linked by component
//! morphisms; [`colimit_system`] computes the composed component. The [`dsl`]
//! module reads and writes `.compos` component files and `.diagram` files, and
//! [`sim`] executes a component as a guarded-event transition system.

pub mod colimit;
pub mod diagnostics;
pub mod dsl;
pub mod fixtures;
pub mod gen;
pub mod laws;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod quotient;
pub mod sim;

pub use colimit::{
    assemble, check_cocone, colimit_signature, colimit_system, mediating_morphism, Cocone,
    ColimitError, ColimitResult, Diagram, DiagramError, Edge, NameClass, Partition,
};
pub use diagnostics::{Part, Report, Sort, Violation};
pub use laws::{run_laws, Fault, LawsReport};
pub use logic::{Formula, LogicError, NameMap, SentenceSet};
pub use model::{
    components_isomorphic, Component, ComponentMorphism, ModelError, Presentation, Signature,
    SignatureMorphism,
};
pub use oracle::{naive_partition, verify_universal_property, OracleError};
pub use sim::{SimError, State, Trace};
