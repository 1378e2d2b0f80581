use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// `1 + Σ_{i=2}^{n} (K(i) + 3)`.
pub fn factor_count_bound(n: usize, k: &BTreeMap<usize, u64>) -> Result<u64> {
    if n < 2 {
        return Err(Error::Precondition(format!("the bound needs n >= 2, got {n}")));
    }
    let mut total: u64 = 1;
    for i in 2..=n {
        let ki = k.get(&i).ok_or(Error::MissingK(i))?;
        total = total
            .checked_add(ki.saturating_add(3))
            .ok_or_else(|| Error::Precondition("bound overflows u64".into()))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let k = |pairs: &[(usize, u64)]| pairs.iter().cloned().collect::<BTreeMap<_, _>>();
        assert_eq!(factor_count_bound(2, &k(&[(2, 4)])).unwrap(), 8);
        assert_eq!(factor_count_bound(2, &k(&[(2, 0)])).unwrap(), 4);
        assert_eq!(factor_count_bound(3, &k(&[(2, 4), (3, 5)])).unwrap(), 16);
        assert_eq!(factor_count_bound(3, &k(&[(2, 4)])), Err(Error::MissingK(3)));
        assert!(factor_count_bound(1, &k(&[])).is_err());
    }
}
