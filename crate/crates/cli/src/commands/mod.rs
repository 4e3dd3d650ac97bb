pub mod dynamics;
pub mod exact;
pub mod mc;
pub mod schedule;
