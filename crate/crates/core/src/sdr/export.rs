//! SDPA sparse text export for external cross-checking.
//!
//! A standard-form problem `min ⟨C, X⟩ s.t. ⟨A_m, X⟩ = b_m` is written as the
//! SDPA dual with `F0 = −C`, `F_m = A_m` and cost vector `b`:
//!
//! ```text
//! "comment line
//! m
//! nBlocks
//! n_1 n_2 ...
//! b_1 b_2 ...
//! matno block i j value     (upper triangle, 1-based, one entry per line)
//! ```
//!
//! Record `matno = 0` holds `F0`. Each constraint matrix is one contiguous
//! group of lines.

use std::io::Write;

use super::ipm::{SparseBlocks, StandardSdp};
use crate::error::Result;

fn write_matrix<W: Write>(
    out: &mut W,
    matno: usize,
    blocks: &SparseBlocks,
    sign: f64,
) -> Result<()> {
    for e in blocks {
        let n = e.mat.nrows();
        for i in 0..n {
            for j in i..n {
                let v = sign * e.mat[(i, j)];
                if v != 0.0 {
                    writeln!(out, "{matno} {} {} {} {v:e}", e.block + 1, i + 1, j + 1)?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_sdpa<W: Write>(p: &StandardSdp, comment: &str, out: &mut W) -> Result<()> {
    p.validate()?;
    writeln!(out, "\"{}", comment.replace('\n', " "))?;
    writeln!(out, "{}", p.b.len())?;
    writeln!(out, "{}", p.sizes.len())?;
    let sizes: Vec<String> = p.sizes.iter().map(usize::to_string).collect();
    writeln!(out, "{}", sizes.join(" "))?;
    let b: Vec<String> = p.b.iter().map(|v| format!("{v:e}")).collect();
    writeln!(out, "{}", b.join(" "))?;
    write_matrix(out, 0, &p.c, -1.0)?;
    for (m, a) in p.a.iter().enumerate() {
        write_matrix(out, m + 1, a, 1.0)?;
    }
    Ok(())
}

pub fn to_sdpa_string(p: &StandardSdp, comment: &str) -> Result<String> {
    let mut buf = Vec::new();
    write_sdpa(p, comment, &mut buf)?;
    Ok(String::from_utf8(buf).expect("SDPA output is ASCII"))
}
