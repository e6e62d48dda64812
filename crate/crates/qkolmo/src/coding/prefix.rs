use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// `s_k = 1^{⌊log k⌋} 0 bin(k)`.
pub fn self_delim_encode(k: u64) -> Result<String> {
    self_delim_encode_big(&BigInt::from(k))
}

pub fn self_delim_encode_big(k: &BigInt) -> Result<String> {
    if !k.is_positive() {
        return Err(Error::InvalidArgument("self-delimiting code needs k ≥ 1".into()));
    }
    let bin = k.to_str_radix(2);
    let mut s = "1".repeat(bin.len() - 1);
    s.push('0');
    s.push_str(&bin);
    Ok(s)
}

/// Reads `s_k` from the front of `stream`, returning `k` and the rest.
pub fn self_delim_decode(stream: &str) -> Result<(u64, &str)> {
    let (k, rest) = self_delim_decode_big(stream)?;
    Ok((k.to_u64().ok_or(Error::MalformedStream)?, rest))
}

pub fn self_delim_decode_big(stream: &str) -> Result<(BigInt, &str)> {
    let b = stream.as_bytes();
    let ones = b.iter().take_while(|&&c| c == b'1').count();
    let start = ones + 1;
    let end = start + ones + 1;
    if b.get(ones) != Some(&b'0') || b.len() < end {
        return Err(Error::MalformedStream);
    }
    let digits = &stream[start..end];
    if !digits.starts_with('1') || !digits.bytes().all(|c| c == b'0' || c == b'1') {
        return Err(Error::MalformedStream);
    }
    let k = BigInt::parse_bytes(digits.as_bytes(), 2).ok_or(Error::MalformedStream)?;
    Ok((k, &stream[end..]))
}

/// Exact `∑ 2^{−ℓᵢ}`.
pub fn kraft_sum(lengths: &[usize]) -> Rational {
    lengths.iter().fold(Rational::zero(), |acc, &l| {
        acc + Rational::new(BigInt::one(), BigInt::one() << l)
    })
}

pub fn kraft_check(lengths: &[usize]) -> bool {
    kraft_sum(lengths) <= Rational::one()
}

/// Prefix-free codewords assigned online, with the consumed Kraft mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixCode {
    codewords: Vec<String>,
    mass: Rational,
}

impl Default for PrefixCode {
    fn default() -> Self {
        PrefixCode::new()
    }
}

fn bits_of(s: &str) -> u64 {
    s.bytes().fold(0u64, |v, c| (v << 1) | u64::from(c == b'1'))
}

impl PrefixCode {
    pub fn new() -> Self {
        PrefixCode {
            codewords: Vec::new(),
            mass: Rational::zero(),
        }
    }

    pub fn codewords(&self) -> &[String] {
        &self.codewords
    }

    pub fn mass(&self) -> &Rational {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Appends the lexicographically first word of length `len` that is
    /// neither a prefix nor an extension of an existing codeword.
    pub fn extend(&mut self, len: usize) -> Result<&str> {
        if len > 63 {
            return Err(Error::InvalidArgument(format!("codeword length {len} exceeds 63")));
        }
        let top: u128 = 1u128 << len;
        let mut v: u128 = 0;
        'search: while v < top {
            for c in &self.codewords {
                let lc = c.len();
                if lc <= len {
                    let shift = len - lc;
                    if (v >> shift) as u64 == bits_of(c) {
                        v = ((v >> shift) + 1) << shift;
                        continue 'search;
                    }
                } else if bits_of(&c[..len]) as u128 == v {
                    v += 1;
                    continue 'search;
                }
            }
            let word: String = (0..len)
                .map(|i| if (v >> (len - 1 - i)) & 1 == 1 { '1' } else { '0' })
                .collect();
            self.mass += Rational::new(BigInt::one(), BigInt::one() << len);
            self.codewords.push(word);
            return Ok(self.codewords.last().expect("just pushed"));
        }
        Err(Error::KraftViolated(len))
    }

    /// Codewords for a whole length sequence.
    pub fn from_lengths(lengths: &[usize]) -> Result<PrefixCode> {
        let mut c = PrefixCode::new();
        for &l in lengths {
            c.extend(l)?;
        }
        Ok(c)
    }

    pub fn is_prefix_free(&self) -> bool {
        for (i, a) in self.codewords.iter().enumerate() {
            for (j, b) in self.codewords.iter().enumerate() {
                if i != j && b.starts_with(a.as_str()) {
                    return false;
                }
            }
        }
        true
    }

    /// One codeword per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for c in &self.codewords {
            s.push_str(c);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<PrefixCode> {
        let mut c = PrefixCode::new();
        for (i, line) in text.lines().enumerate() {
            let w = line.trim();
            if !w.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(crate::error::parse_err(i + 1, format!("not a binary codeword: `{w}`")));
            }
            c.mass += Rational::new(BigInt::one(), BigInt::one() << w.len());
            c.codewords.push(w.to_string());
        }
        if !c.is_prefix_free() {
            return Err(Error::InvalidArgument("codewords are not prefix free".into()));
        }
        Ok(c)
    }
}

/// Functional form of [`PrefixCode::extend`].
pub fn blind_prefix_extend(code: &PrefixCode, next_len: usize) -> Result<PrefixCode> {
    let mut c = code.clone();
    c.extend(next_len)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_delim_examples() {
        assert_eq!(self_delim_encode(1).unwrap(), "01");
        assert_eq!(self_delim_encode(2).unwrap(), "1010");
        assert_eq!(self_delim_encode(5).unwrap(), "110101");
        assert_eq!(self_delim_decode("110101tail").unwrap(), (5, "tail"));
        assert_eq!(self_delim_decode("01").unwrap(), (1, ""));
        assert!(self_delim_decode("111").is_err());
        assert!(self_delim_decode("1100").is_err());
        assert!(self_delim_decode("1001").is_err());
        assert!(self_delim_encode(0).is_err());
        for k in 1..300u64 {
            let s = self_delim_encode(k).unwrap();
            assert_eq!(s.len(), 2 * (63 - k.leading_zeros() as usize) + 2);
            assert_eq!(self_delim_decode(&s).unwrap(), (k, ""));
        }
    }

    #[test]
    fn kraft_examples() {
        assert!(kraft_check(&[1, 2, 2]));
        assert!(!kraft_check(&[1, 1, 1]));
        assert!(kraft_check(&[]));
    }

    #[test]
    fn blind_examples() {
        let c = blind_prefix_extend(&PrefixCode::new(), 1).unwrap();
        assert_eq!(c.codewords(), ["0"]);
        let c = blind_prefix_extend(&PrefixCode::parse("00").unwrap(), 1).unwrap();
        assert_eq!(c.codewords(), ["00", "1"]);
        let mut c = PrefixCode::parse("0").unwrap();
        c.extend(2).unwrap();
        c.extend(2).unwrap();
        assert_eq!(c.codewords(), ["0", "10", "11"]);
        assert!(matches!(c.extend(1), Err(Error::KraftViolated(1))));
        assert_eq!(
            PrefixCode::from_lengths(&[1, 2, 2]).unwrap().codewords(),
            ["0", "10", "11"]
        );
        let z = PrefixCode::from_lengths(&[0]).unwrap();
        assert_eq!(z.codewords(), [""]);
        assert!(PrefixCode::parse("0\n01").is_err());
    }
}
