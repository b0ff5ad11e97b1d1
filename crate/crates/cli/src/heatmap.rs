//! Grid field emission: plain CSV matrices and 8-bit binary PGM images.
//!
//! Both formats write the top row as the grid's `y = 1` edge, so the files
//! read like a map of the search area viewed from above.

use std::io::{self, Write};

use crate::format::g9;

/// Rows of `field` (row-major, row 0 at `y = 0`) from `y = 1` down to `y = 0`.
fn rows_top_down(field: &[f64], resolution: usize) -> impl Iterator<Item = &[f64]> {
    assert_eq!(
        field.len(),
        resolution * resolution,
        "field does not match grid"
    );
    field.chunks(resolution).rev()
}

pub fn write_csv<W: Write>(mut out: W, field: &[f64], resolution: usize) -> io::Result<()> {
    for row in rows_top_down(field, resolution) {
        let line: Vec<String> = row.iter().map(|&v| g9(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// P5 greyscale: values are clamped to `[0, 1]` and 1.0 maps to 255.
pub fn write_pgm<W: Write>(mut out: W, field: &[f64], resolution: usize) -> io::Result<()> {
    write!(out, "P5\n{resolution} {resolution}\n255\n")?;
    let mut bytes = Vec::with_capacity(field.len());
    for row in rows_top_down(field, resolution) {
        bytes.extend(
            row.iter()
                .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
        );
    }
    out.write_all(&bytes)
}
