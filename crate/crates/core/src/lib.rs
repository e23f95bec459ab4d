//! Fundamental groups of small simplicial complexes: enumeration of 2-pure complexes up to
//! isomorphism, edge-path presentations and their simplification, catalog-based group
//! recognition, and the cone-extension search over complexes on up to eight vertices.

pub mod abelian;
pub mod complex;
pub mod enumerate;
pub mod fixtures;
pub mod io;
pub mod presentation;
pub mod recognize;
pub mod search;

pub use abelian::AbelianInvariants;
pub use complex::{Complex, ComplexError, ReductionReport, Reduced, TriMask, TriangleComplex};
pub use io::{parse_complex, render_facet_list, render_json, ParseError};
pub use presentation::{abelianization, edge_path_presentation, tietze_simplify, Presentation};
pub use recognize::{GroupBase, GroupId, Recognizer};
