//! Classical function tables queried as `|i>|j> -> |i>|j ⊕ f(i)>`.

use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::state::{read_bits, write_bits, StateVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    input_width: usize,
    output_width: usize,
    table: Vec<u64>,
}

/// Builds an oracle from a table whose length is a power of two. The output
/// width is the number of bits of the largest entry (at least one).
pub fn make_oracle(table: Vec<u64>) -> Result<Oracle> {
    let max = table.iter().copied().max().unwrap_or(0);
    let width = (64 - max.leading_zeros() as usize).max(1);
    Oracle::new(table, width)
}

impl Oracle {
    pub fn new(table: Vec<u64>, output_width: usize) -> Result<Self> {
        if table.is_empty() || !table.len().is_power_of_two() {
            return Err(domain(format!("oracle table length {} is not a power of two", table.len())));
        }
        if output_width == 0 || output_width > 63 {
            return Err(domain(format!("oracle output width {output_width} out of range")));
        }
        if let Some((i, v)) = table.iter().enumerate().find(|(_, &v)| v >> output_width != 0) {
            return Err(domain(format!("entry {i} = {v} does not fit in {output_width} bits")));
        }
        let input_width = table.len().trailing_zeros() as usize;
        Ok(Self { input_width, output_width, table })
    }

    /// Tabulates `f` over `n` input bits.
    pub fn from_fn(n: usize, output_width: usize, f: impl Fn(usize) -> u64) -> Result<Self> {
        if n > 30 {
            return Err(Error::Resource(format!("oracle over {n} input bits is too large to tabulate")));
        }
        Self::new((0..1usize << n).map(f).collect(), output_width)
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Classical lookup.
    pub fn eval(&self, i: usize) -> u64 {
        self.table[i]
    }

    /// One quantum query on the given registers (first listed qubit is the most significant).
    pub fn query(&self, state: &mut StateVector, inputs: &[usize], outputs: &[usize]) -> Result<()> {
        if inputs.len() != self.input_width || outputs.len() != self.output_width {
            return Err(domain(format!(
                "oracle takes {} input and {} output qubits, got {} and {}",
                self.input_width,
                self.output_width,
                inputs.len(),
                outputs.len()
            )));
        }
        let all: Vec<usize> = inputs.iter().chain(outputs).copied().collect();
        state.check_qubits(&all)?;
        let n = state.num_qubits();
        state.permute_basis(|idx| {
            let i = read_bits(n, idx, inputs);
            let j = read_bits(n, idx, outputs);
            write_bits(n, idx, outputs, j ^ self.table[i] as usize)
        });
        Ok(())
    }

    /// Parses a table file: an optional `format binary|decimal` header (decimal
    /// by default), an optional `width <bits>` header, then one `index value`
    /// line per entry. `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut radix = 10;
        let mut width: Option<usize> = None;
        let mut entries: Vec<(usize, u64)> = Vec::new();
        let mut value_len: Option<usize> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "format" => {
                    if !entries.is_empty() {
                        return Err(err("format header after entries".into()));
                    }
                    radix = match fields.get(1).copied() {
                        Some("binary") => 2,
                        Some("decimal") => 10,
                        other => return Err(err(format!("unknown format {other:?}"))),
                    };
                }
                "width" => {
                    let w = fields
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("width needs a positive integer".into()))?;
                    width = Some(w);
                }
                _ => {
                    if fields.len() != 2 {
                        return Err(err(format!("expected `index value`, got {line:?}")));
                    }
                    let index = usize::from_str_radix(fields[0], radix)
                        .map_err(|e| err(format!("bad index {:?}: {e}", fields[0])))?;
                    let value = u64::from_str_radix(fields[1], radix)
                        .map_err(|e| err(format!("bad value {:?}: {e}", fields[1])))?;
                    if radix == 2 {
                        let len = fields[1].len();
                        if value_len.is_some_and(|l| l != len) {
                            return Err(err("binary values must all have the same length".into()));
                        }
                        value_len = Some(len);
                    }
                    entries.push((index, value));
                }
            }
        }
        let size = entries.len();
        if size == 0 || !size.is_power_of_two() {
            return Err(domain(format!("table has {size} entries, expected a power of two")));
        }
        let mut table = vec![None; size];
        for (index, value) in entries {
            let slot = table
                .get_mut(index)
                .ok_or_else(|| domain(format!("index {index} out of range for {size} entries")))?;
            if slot.replace(value).is_some() {
                return Err(domain(format!("index {index} listed twice")));
            }
        }
        let table: Vec<u64> = table.into_iter().map(|v| v.expect("all indices present")).collect();
        match width.or(value_len) {
            Some(w) => Self::new(table, w),
            None => make_oracle(table),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Resource(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_table(&text)
    }

    /// Table file text in the given radix (2 or 10).
    pub fn to_table_text(&self, binary: bool) -> String {
        let mut out = String::new();
        if binary {
            out.push_str("format binary\n");
            for (i, v) in self.table.iter().enumerate() {
                out.push_str(&format!(
                    "{:0iw$b} {:0ow$b}\n",
                    i,
                    v,
                    iw = self.input_width.max(1),
                    ow = self.output_width
                ));
            }
        } else {
            out.push_str(&format!("format decimal\nwidth {}\n", self.output_width));
            for (i, v) in self.table.iter().enumerate() {
                out.push_str(&format!("{i} {v}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_zero_leaves_queries_alone() {
        let o = make_oracle(vec![0, 0, 0, 0]).unwrap();
        for i in 0..4 {
            let mut s = StateVector::basis_state(3, i << 1).unwrap();
            o.query(&mut s, &[0, 1], &[2]).unwrap();
            assert_eq!(s.amplitude(i << 1), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn query_entangles_by_linearity() {
        let o = make_oracle(vec![0, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = StateVector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        o.query(&mut s, &[0], &[1]).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn double_query_is_identity() {
        let o = Oracle::new(vec![3, 1, 2, 0], 2).unwrap();
        for idx in 0..16 {
            let mut s = StateVector::basis_state(4, idx).unwrap();
            o.query(&mut s, &[0, 1], &[2, 3]).unwrap();
            o.query(&mut s, &[0, 1], &[2, 3]).unwrap();
            assert_eq!(s.amplitude(idx), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn bad_length_is_rejected() {
        assert!(make_oracle(vec![0, 1, 0]).is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let o = Oracle::new(vec![5, 0, 7, 2], 3).unwrap();
        for binary in [true, false] {
            assert_eq!(Oracle::parse_table(&o.to_table_text(binary)).unwrap(), o);
        }
        let parsed = Oracle::parse_table("format binary\n# f\n1 1\n0 0\n").unwrap();
        assert_eq!(parsed.table(), &[0, 1]);
        assert!(matches!(Oracle::parse_table("0 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
    }
}
