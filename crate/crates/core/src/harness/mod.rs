pub mod fuzz;
pub mod generate;
