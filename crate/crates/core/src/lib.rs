//! Combined heat and power unit commitment with PEV parking lots:
//! domain model, operation-region geometry, fleet constraints, file
//! formats, a double Benders decomposition solver, and a brute-force
//! oracle for tiny instances.

pub mod benders;
pub mod geometry;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pev;
pub mod scenario;
