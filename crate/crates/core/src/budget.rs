use crate::error::{Error, Result};

/// Element budget for a single construction. Builders whose output size can
/// be predicted check it up front; enumerative builders count as they go and
/// abort once the budget is crossed, so a runaway instance fails fast instead
/// of exhausting memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_elements: usize,
}

pub const DEFAULT_MAX_ELEMENTS: usize = 1_000_000;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

impl Budget {
    pub fn new(max_elements: usize) -> Self {
        Budget { max_elements }
    }

    pub fn admit(&self, what: &str, count: usize) -> Result<()> {
        if count > self.max_elements {
            Err(Error::budget(what, self.max_elements))
        } else {
            Ok(())
        }
    }

    /// Checked product for size predictions; saturates instead of wrapping.
    pub fn admit_product(&self, what: &str, factors: &[usize]) -> Result<usize> {
        let mut acc: usize = 1;
        for &f in factors {
            acc = acc.saturating_mul(f);
            if acc > self.max_elements {
                return Err(Error::budget(what, self.max_elements));
            }
        }
        Ok(acc)
    }
}
