//! Library side of the command-line front end: file formats, report
//! rendering, and the example-figure pipeline.

pub mod figures;
pub mod io;
pub mod output;
