//! Text formats shared by the exporters.

use std::fmt::Write as _;

/// Fixed 17-significant-digit scientific notation, so that exported numbers
/// round-trip and diff cleanly between runs.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Accumulates a CSV table with a header row.
#[derive(Debug, Clone)]
pub struct CsvTable {
    buf: String,
    cols: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        CsvTable {
            buf,
            cols: header.len(),
        }
    }

    /// Appends a row of preformatted cells.
    pub fn push_row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut n = 0;
        for (i, c) in cells.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(c.as_ref());
            n += 1;
        }
        debug_assert_eq!(n, self.cols, "row width does not match header");
        self.buf.push('\n');
    }

    pub fn push_reals(&mut self, cells: &[f64]) {
        self.push_row(cells.iter().map(|v| fmt_f64(*v)));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub(crate) fn push_line(out: &mut String, args: std::fmt::Arguments<'_>) {
    out.write_fmt(args).expect("writing to a String cannot fail");
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn table() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push_reals(&[1.0, 2.0]);
        t.push_row(["x", "y"]);
        assert_eq!(t.finish(), "a,b\n1.0000000000000000e0,2.0000000000000000e0\nx,y\n");
    }
}
