use crate::error::{Error, Result};

/// Substitution length `k` and fill probability `p` of the rule
/// `0 -> 0…0`, `1 -> ⟨p…p⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    k: u32,
    p: f64,
}

impl RuleParams {
    pub fn new(k: u32, p: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(alloc::format!(
                "k must be at least 2, got {k}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(alloc::format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        Ok(RuleParams { k, p })
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Probability of writing a zero, `1 - p`.
    #[inline]
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// The branching ratio `k p`, which is the mean offspring of a one.
    #[inline]
    pub fn kp(&self) -> f64 {
        self.k as f64 * self.p
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        RuleParams::new(self.k, p)
    }
}

/// Maximum number of entries a count distribution may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportCap(pub usize);

impl SupportCap {
    pub const DEFAULT: SupportCap = SupportCap(1 << 20);

    /// Support length `k^i + 1`, or a resource error if it exceeds the cap.
    pub fn support_len(self, k: u32, i: u32) -> Result<usize> {
        let required = (k as u128)
            .checked_pow(i)
            .and_then(|n| n.checked_add(1))
            .unwrap_or(u128::MAX);
        if required > self.0 as u128 {
            return Err(Error::ResourceLimit {
                required,
                cap: self.0 as u128,
            });
        }
        Ok(required as usize)
    }
}

impl Default for SupportCap {
    fn default() -> Self {
        SupportCap::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_domain() {
        assert!(RuleParams::new(1, 0.5).is_err());
        assert!(RuleParams::new(2, -0.1).is_err());
        assert!(RuleParams::new(2, 1.5).is_err());
        assert!(RuleParams::new(2, f64::NAN).is_err());
        assert!(RuleParams::new(2, 0.0).is_ok());
        assert!(RuleParams::new(2, 1.0).is_ok());
    }

    #[test]
    fn support_cap() {
        let cap = SupportCap::DEFAULT;
        assert_eq!(cap.support_len(2, 19).unwrap(), (1 << 19) + 1);
        assert!(cap.support_len(2, 20).is_err());
        assert!(matches!(
            cap.support_len(2, 30),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(cap.support_len(1000, 40).is_err());
        assert_eq!(SupportCap(9).support_len(2, 3).unwrap(), 9);
    }
}
