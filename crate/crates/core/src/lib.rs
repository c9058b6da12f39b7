#![no_std]

extern crate alloc;

pub mod catalog;
pub mod chartable;
pub mod eigen;
pub mod group;
pub mod linalg;
pub mod matrix;
pub mod reduction;
pub mod reps;
pub mod scalar;
