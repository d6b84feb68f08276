pub mod error;
pub mod par;
pub mod poly;
pub mod defpoly;
pub mod expr;
pub mod resultant;
pub mod isolation;
pub mod verify;
pub mod program;
