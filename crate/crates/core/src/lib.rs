//! Simulation, planning, masking and learning components.

pub mod achievements;
pub mod agent;
pub mod planner;
pub mod provider;
pub mod pruner;
pub mod solver;
pub mod world;
