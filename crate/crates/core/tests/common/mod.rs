#![allow(dead_code)]

pub mod reference_values;

use lightcone::C64;

pub fn c(p: (f64, f64)) -> C64 {
    C64::new(p.0, p.1)
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
