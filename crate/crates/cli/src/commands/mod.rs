pub mod compare;
pub mod eval;
pub mod gen_data;
pub mod gradcheck;
pub mod simulate;
pub mod train;
