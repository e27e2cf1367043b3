//! Configuration parsing and result serialization for the `nsdarcy` driver:
//! JSON run configs, CSV tables, legacy VTK fields, MSH export and JSON run
//! reports.

pub mod config;
pub mod csvio;
pub mod mshio;
pub mod profiles;
pub mod report;
pub mod vtk;
pub mod yshape_gen;
