pub mod acceptance;
pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod grouprep;
pub mod io;
pub mod kohler;
pub mod par;
pub mod quadfield;
pub mod rayclass;
pub mod snf;
pub mod theta;
