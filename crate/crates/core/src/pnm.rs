//! Plain (ASCII) portable bitmap and graymap export.
//!
//! Binary matrices become `P1` bitmaps: `P1\n<cols> <rows>\n` followed by one
//! line per row with entries separated by single spaces. Other matrices
//! become `P2` graymaps with maxval `|S|-1`.

use crate::error::{Error, Result};
use crate::matrix::IterationMatrix;

pub fn export_matrix_image(matrix: &IterationMatrix) -> Result<Vec<u8>> {
    if matrix.states() > 256 {
        return Err(Error::unsupported("graymaps hold at most 256 levels"));
    }
    let mut out = String::new();
    if matrix.states() == 2 {
        out.push_str(&format!("P1\n{} {}\n", matrix.cols(), matrix.rows()));
    } else {
        out.push_str(&format!(
            "P2\n{} {}\n{}\n",
            matrix.cols(),
            matrix.rows(),
            matrix.states() - 1
        ));
    }
    for r in 0..matrix.rows() {
        for c in 0..matrix.cols() {
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&matrix.entry(r, c).to_string());
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// A decoded plain PBM/PGM image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    /// Row-major samples.
    pub samples: Vec<u32>,
}

/// Parses `P1`/`P2` images, including `#` comments.
pub fn parse_plain(bytes: &[u8]) -> Result<PlainImage> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::invalid("image is not ASCII"))?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let magic = tokens.next().ok_or_else(|| Error::invalid("empty image"))?;
    let mut number = |what: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| Error::invalid(format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::invalid(format!("bad {what}")))
    };
    let width = number("width")? as usize;
    let height = number("height")? as usize;
    let maxval = match magic {
        "P1" => 1,
        "P2" => number("maxval")?,
        other => return Err(Error::invalid(format!("unsupported magic `{other}`"))),
    };
    let samples = (0..width * height)
        .map(|_| number("sample"))
        .collect::<Result<Vec<_>>>()?;
    if samples.iter().any(|&s| s > maxval) {
        return Err(Error::invalid("sample exceeds maxval"));
    }
    Ok(PlainImage {
        width,
        height,
        maxval,
        samples,
    })
}
