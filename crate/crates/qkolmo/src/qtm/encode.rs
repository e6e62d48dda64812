use num_bigint::BigInt;
use num_traits::Signed;

use super::qstring::QubitString;
use crate::coding::self_delim_encode_big;
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// `|s_k⟩⟨s_k| ⊗ σ`.
pub fn encode_pair(k: u64, sigma: &QubitString) -> Result<QubitString> {
    if k < 1 {
        return Err(Error::InvalidArgument("parameter k must be at least 1".into()));
    }
    sigma.prepend_classical(&self_delim_encode_big(&BigInt::from(k))?)
}

/// `⟨l, ⟨m, σ⟩⟩` for `δ = l/m` in lowest terms.
pub fn encode_rational(delta: &Rational, sigma: &QubitString) -> Result<QubitString> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("rational parameter must be positive".into()));
    }
    let inner = sigma.prepend_classical(&self_delim_encode_big(delta.denom())?)?;
    inner.prepend_classical(&self_delim_encode_big(delta.numer())?)
}

/// Predicted base length `2⌊log k⌋ + 2 + ℓ(σ)`.
pub fn encoded_length(k: u64, sigma_len: usize) -> usize {
    2 * (63 - k.max(1).leading_zeros() as usize) + 2 + sigma_len
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn pair_examples() {
        let e = QubitString::empty();
        let a = encode_pair(1, &e).unwrap();
        assert!(a.exact_eq(&QubitString::classical("01").unwrap()).unwrap());
        let b = encode_pair(5, &e).unwrap();
        assert!(b.exact_eq(&QubitString::classical("110101").unwrap()).unwrap());
        assert_eq!(b.lengths().0, 6);
        let c = encode_pair(3, &QubitString::classical("0").unwrap()).unwrap();
        assert!(c.exact_eq(&QubitString::classical("10110").unwrap()).unwrap());
        assert_eq!(c.lengths().0, encoded_length(3, 1));
        assert!(encode_pair(0, &e).is_err());
    }

    #[test]
    fn rational_encoding() {
        let r = encode_rational(&rat(2, 4), &QubitString::empty()).unwrap();
        // 1/2 → s_1 s_2 = "01" "1010"
        assert!(r.exact_eq(&QubitString::classical("011010").unwrap()).unwrap());
    }
}
