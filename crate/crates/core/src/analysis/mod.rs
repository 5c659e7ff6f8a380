//! Experiments and probes: Faber–Krahn gaps, density and Ahlfors probes,
//! Cheeger constants of convex polygons, honeycomb scaling and the
//! verification suites built from them.

mod cheeger;
mod faber_krahn;
mod honeycomb;
mod probes;
pub mod verify;

pub use cheeger::{
    cheeger_convex_polygon, cheeger_disk, cheeger_hexagon, inner_parallel_area, regular_polygon,
};
pub use faber_krahn::{faber_krahn_gap, faber_krahn_refinement, FaberKrahnGap, FaberKrahnRefinement};
pub use honeycomb::{honeycomb_scaling, HoneycombRow, HoneycombRun, HoneycombTable};
pub use probes::{
    ahlfors_probe, boundary_points, density_probe, unit_ball_volume, ProbeReport, AHLFORS_SPREAD,
    DENSITY_FLOOR,
};
