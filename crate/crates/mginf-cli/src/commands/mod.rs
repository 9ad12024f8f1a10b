pub mod busy;
pub mod eval;
pub mod moments;
pub mod simulate;
pub mod sweep;
pub mod validate;
