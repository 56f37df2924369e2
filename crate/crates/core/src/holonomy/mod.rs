//! Horizontal paths, holonomy and dual holonomy transport, the groupoid of
//! infinitesimal holonomy transformations and the experiments built on it.

mod groupoid;
mod invariant;
mod loops;
mod path;
mod search;
mod span;
mod transport;

pub use groupoid::{
    compose, holonomy_transformation, invert, lift_transformations, rho, rho_coords, zeta, zeta_bar,
    HolonomyTransformation, MAX_CONDITION,
};
pub use invariant::{invariant_metric_average, InvariantMetric};
pub use loops::{
    latitude_lift_point, latitude_roots, FlatRectangles, HopfLatitudeLoops, LoopFamily, RetraceLoops,
    CLOSURE_TOLERANCE,
};
pub use path::{
    default_steps, horizontal_geodesic, random_horizontal_path, random_horizontal_path_with, random_path_for_item,
    reparametrized, HorizontalPath, PathSegment, SegmentOrigin, DEFAULT_STEPS_PER_UNIT, GEODESIC_DRIFT_LIMIT,
    JOIN_TOLERANCE,
};
pub use search::{
    holonomy_bound_detailed, holonomy_bound_estimate, rho_of_matrix, thm_max_search, vertizontal_margin,
    BoundSample, HolonomyBound, PathShape, SearchOptions, SearchResult,
};
pub use span::{dual_leaf_span, dual_orthogonality_check, SpanAccumulator, SpanCheck, RANK_TOLERANCE};
pub use transport::{
    transport_dual, transport_holonomy, transport_jobs, FieldKind, FieldNode, MatrixTransport, TransportJob,
    TransportedField, DRIFT_BREACH,
};
