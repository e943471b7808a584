pub mod bench;
pub mod canonical;
pub mod dataset;
pub mod geo;
pub mod kb;
pub mod money;
pub mod dialogue;
pub mod plan;
pub mod validator;
pub mod planner;
