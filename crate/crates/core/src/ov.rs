//! Orthogonal Vectors instances, the text format, and the exhaustive oracle.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fixed-length 0/1 vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        BitVector(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitVector(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Number of coordinates equal to 1.
    /// Positions of the 1-bits in increasing order.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn dot(&self, other: &BitVector) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(&x, &y)| x && y)
            .count()
    }

    fn pack(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.0.len().div_ceil(64)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("non-binary character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(BitVector)
    }
}

/// Two families of `d`-dimensional bit vectors. Duplicate vectors are allowed
/// and keep distinct indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    d: usize,
    set_a: Vec<BitVector>,
    set_b: Vec<BitVector>,
}

impl OvInstance {
    pub fn new(d: usize, set_a: Vec<BitVector>, set_b: Vec<BitVector>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        if set_a.is_empty() || set_b.is_empty() {
            return Err(Error::InvalidInstance("both vector sets must be nonempty".into()));
        }
        for (name, set) in [("A", &set_a), ("B", &set_b)] {
            if let Some((i, v)) = set.iter().enumerate().find(|(_, v)| v.len() != d) {
                return Err(Error::InvalidInstance(format!(
                    "vector {i} of set {name} has length {}, expected {d}",
                    v.len()
                )));
            }
        }
        Ok(OvInstance { d, set_a, set_b })
    }

    /// Convenience constructor from `"0101"`-style strings.
    pub fn from_strs(set_a: &[&str], set_b: &[&str]) -> Result<Self> {
        let conv = |s: &&str| {
            s.parse::<BitVector>()
                .map_err(Error::InvalidInstance)
        };
        let a = set_a.iter().map(conv).collect::<Result<Vec<_>>>()?;
        let b = set_b.iter().map(conv).collect::<Result<Vec<_>>>()?;
        let d = a.first().map_or(0, BitVector::len);
        OvInstance::new(d, a, b)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn set_a(&self) -> &[BitVector] {
        &self.set_a
    }

    pub fn set_b(&self) -> &[BitVector] {
        &self.set_b
    }

    pub fn n_a(&self) -> usize {
        self.set_a.len()
    }

    pub fn n_b(&self) -> usize {
        self.set_b.len()
    }

    pub fn ones_a(&self) -> usize {
        self.set_a.iter().map(BitVector::ones).sum()
    }

    pub fn ones_b(&self) -> usize {
        self.set_b.iter().map(BitVector::ones).sum()
    }
}

const OV_FORMAT: &str = "ov";

/// Parses the OV text format: a `nA nB d` header, then `nA` lines of set A
/// followed by `nB` lines of set B, each exactly `d` characters of `0`/`1`.
pub fn parse_ov(text: &str) -> Result<OvInstance> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let eof_line = body.split('\n').count() + 1;
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .filter(|(_, l)| !l.is_empty())
        .ok_or_else(|| Error::parse(OV_FORMAT, 1, "missing header"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            OV_FORMAT,
            1,
            "malformed header, expected `nA nB d`",
        ));
    }
    let mut nums = [0usize; 3];
    for (slot, field) in nums.iter_mut().zip(&fields) {
        *slot = field
            .parse()
            .map_err(|_| Error::parse(OV_FORMAT, 1, format!("malformed header field {field:?}")))?;
    }
    let [n_a, n_b, d] = nums;
    if n_a == 0 || n_b == 0 || d == 0 {
        return Err(Error::parse(OV_FORMAT, 1, "nA, nB and d must be positive"));
    }

    let mut read_set = |count: usize| -> Result<Vec<BitVector>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(OV_FORMAT, eof_line, "unexpected end of file"))?;
            let v: BitVector = line
                .parse()
                .map_err(|e: String| Error::parse(OV_FORMAT, line_no, e))?;
            if v.len() != d {
                return Err(Error::parse(
                    OV_FORMAT,
                    line_no,
                    format!("vector has length {}, expected {d}", v.len()),
                ));
            }
            out.push(v);
        }
        Ok(out)
    };
    let set_a = read_set(n_a)?;
    let set_b = read_set(n_b)?;
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(OV_FORMAT, line_no, "trailing content after set B"));
    }
    OvInstance::new(d, set_a, set_b)
}

/// Canonical serialization; `parse_ov(&write_ov(x)) == x`.
pub fn write_ov(instance: &OvInstance) -> String {
    let mut out = String::with_capacity((instance.n_a() + instance.n_b() + 1) * (instance.d + 1));
    out.push_str(&format!(
        "{} {} {}\n",
        instance.n_a(),
        instance.n_b(),
        instance.d
    ));
    for v in instance.set_a.iter().chain(&instance.set_b) {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Exhaustive scan over all cross pairs. Returns the lexicographically least
/// `(i, j)` with `A[i] · B[j] = 0`. The scan never exits early so its cost is
/// always `Θ(nA · nB · d)`.
pub fn ov_brute(instance: &OvInstance) -> Option<(usize, usize)> {
    let packed_b: Vec<Vec<u64>> = instance.set_b.iter().map(BitVector::pack).collect();
    let mut best = None;
    for (i, a) in instance.set_a.iter().enumerate() {
        let pa = a.pack();
        for (j, pb) in packed_b.iter().enumerate() {
            let orthogonal = pa.iter().zip(pb).all(|(x, y)| x & y == 0);
            if orthogonal && best.is_none() {
                best = Some((i, j));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_writes_canonical_file() {
        let text = "2 2 2\n10\n11\n01\n00\n";
        let inst = parse_ov(text).unwrap();
        assert_eq!(inst.dim(), 2);
        assert_eq!(inst.set_a()[0].to_string(), "10");
        assert_eq!(inst.set_a()[1].to_string(), "11");
        assert_eq!(inst.set_b()[0].to_string(), "01");
        assert_eq!(inst.set_b()[1].to_string(), "00");
        assert_eq!(write_ov(&inst), text);
    }

    #[test]
    fn writes_header_na_nb_d() {
        let inst = OvInstance::from_strs(&["10"], &["01"]).unwrap();
        assert_eq!(write_ov(&inst), "1 1 2\n10\n01\n");
    }

    #[test]
    fn rejects_non_binary() {
        let err = parse_ov("1 1 3\n102\n000\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("non-binary character"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn rejects_ragged_and_bad_headers() {
        assert!(parse_ov("1 1 2\n10\n0\n").unwrap_err().to_string().contains("line 3"));
        assert!(parse_ov("1 1\n1\n0\n").is_err());
        assert!(parse_ov("1 x 1\n1\n0\n").is_err());
        assert!(parse_ov("0 1 1\n0\n").is_err());
        assert!(parse_ov("1 1 1\n1\n").is_err());
        assert!(parse_ov("1 1 1\n1\n0\n1\n").is_err());
        assert!(parse_ov("1 1 2\n10 \n01\n").is_err());
    }

    #[test]
    fn instance_invariants() {
        assert!(OvInstance::new(2, vec![], vec![BitVector::zeros(2)]).is_err());
        assert!(OvInstance::new(2, vec![BitVector::zeros(3)], vec![BitVector::zeros(2)]).is_err());
    }

    #[test]
    fn brute_force_small_cases() {
        let zero = OvInstance::from_strs(&["0"], &["0"]).unwrap();
        assert_eq!(ov_brute(&zero), Some((0, 0)));
        let disjoint = OvInstance::from_strs(&["10"], &["01"]).unwrap();
        assert_eq!(ov_brute(&disjoint), Some((0, 0)));
        let ones = OvInstance::from_strs(&["1"], &["1"]).unwrap();
        assert_eq!(ov_brute(&ones), None);
    }

    #[test]
    fn brute_force_is_lexicographic() {
        let inst = OvInstance::from_strs(&["11", "10", "01"], &["11", "01", "10"]).unwrap();
        // (1, 1) and (2, 2) are both orthogonal.
        assert_eq!(ov_brute(&inst), Some((1, 1)));
    }

    #[test]
    fn brute_force_handles_wide_vectors() {
        let mut a = BitVector::zeros(130);
        a.set(129, true);
        let mut b = BitVector::zeros(130);
        b.set(129, true);
        let inst = OvInstance::new(130, vec![a.clone()], vec![b]).unwrap();
        assert_eq!(ov_brute(&inst), None);
        let inst = OvInstance::new(130, vec![a], vec![BitVector::zeros(130)]).unwrap();
        assert_eq!(ov_brute(&inst), Some((0, 0)));
    }
}
