pub mod bwform;
pub mod certificates;
pub mod constraints;
pub mod exact;
pub mod indexing;
pub mod report;
pub mod sdpsolve;
pub mod structured;
