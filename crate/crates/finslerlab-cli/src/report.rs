//! Deterministic report formatting.
//!
//! Every float the binary prints goes through [`sig9`], nine significant
//! digits: plain decimal notation inside a comfortable magnitude window,
//! scientific notation outside it. The formatting is part of the interface;
//! identical inputs must produce byte-identical reports, which also makes
//! the CSV output stable enough to diff.

use finslerlab::SquareMatrix;

/// Nine significant digits. Magnitudes in [1e-4, 1e9) print as fixed-point
/// decimals, everything else in scientific notation. Exact zero (of either
/// sign) prints as a plain fixed-point zero.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..=8).contains(&mag) {
        format!("{:.*}", (8 - mag).max(0) as usize, x)
    } else {
        format!("{x:.8e}")
    }
}

/// One direction, printed as a bracketed component list.
pub fn fmt_direction(y: &[f64]) -> String {
    let parts: Vec<String> = y.iter().map(|&c| sig9(c)).collect();
    format!("[{}]", parts.join(", "))
}

/// Component list usable inside a CSV label (no commas).
pub fn fmt_direction_label(y: &[f64]) -> String {
    let parts: Vec<String> = y.iter().map(|&c| sig9(c)).collect();
    parts.join(";")
}

/// CSV for a square matrix: header `i,j,value`, 1-indexed rows in row-major
/// order.
pub fn matrix_csv(e: &SquareMatrix) -> String {
    let mut out = String::from("i,j,value\n");
    for i in 0..e.n() {
        for j in 0..e.n() {
            out.push_str(&format!("{},{},{}\n", i + 1, j + 1, sig9(e[(i, j)])));
        }
    }
    out
}

/// CSV for labelled scalars: header `label,value`.
pub fn scalar_csv(rows: &[(String, String)]) -> String {
    let mut out = String::from("label,value\n");
    for (label, value) in rows {
        out.push_str(&format!("{label},{value}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_keeps_nine_significant_digits() {
        assert_eq!(sig9(16.0 / 9.0), "1.77777778");
        assert_eq!(sig9(-16.0), "-16.0000000");
        assert_eq!(sig9(128.0 / 3.0), "42.6666667");
        assert_eq!(sig9(0.0050283106), "0.00502831060");
        assert_eq!(sig9(0.0), "0.00000000");
        assert_eq!(sig9(-0.0), "0.00000000");
    }

    #[test]
    fn sig9_switches_to_scientific_outside_the_window() {
        assert_eq!(sig9(f64::EPSILON), "2.22044605e-16");
        assert_eq!(sig9(1.0e9), "1.00000000e9");
        assert_eq!(sig9(9.99999999e8), "999999999");
    }

    #[test]
    fn matrix_csv_is_one_indexed_row_major() {
        let mut m = SquareMatrix::zeros(2);
        m[(0, 1)] = 0.5;
        let csv = matrix_csv(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,j,value");
        assert_eq!(lines[2], "1,2,0.500000000");
        assert_eq!(lines.len(), 5);
    }
}
