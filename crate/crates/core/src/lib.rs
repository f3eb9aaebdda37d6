// `!(x > y)` comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gcode;
pub mod mesh;
pub mod qr3d;
pub mod recon;
pub mod stego;
pub mod vrml;
