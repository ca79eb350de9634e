pub mod embezzle;
pub mod entropy;
pub mod region;
pub mod selftest;
pub mod simulate;
pub mod split;
