use std::sync::Arc;

use crate::category::{FiniteOmegaCat, RawCategory};

fn close(mut raw: RawCategory) -> FiniteOmegaCat {
    raw.add_missing_units();
    raw.fill_forced_compositions();
    raw.freeze().expect("fixture is well formed")
}

/// One 0-cell and nothing else.
pub fn terminal() -> FiniteOmegaCat {
    let mut raw = RawCategory::new(0);
    raw.add_obj("*");
    close(raw)
}

/// The empty category.
pub fn empty() -> FiniteOmegaCat {
    close(RawCategory::new(0))
}

/// `k` isolated 0-cells named `x0`, `x1`, ...
pub fn discrete(k: usize) -> FiniteOmegaCat {
    let mut raw = RawCategory::new(0);
    for i in 0..k {
        raw.add_obj(&format!("x{i}"));
    }
    close(raw)
}

/// a, b and a single non-invertible 1-cell f : a → b.
pub fn walking_arrow() -> FiniteOmegaCat {
    let mut raw = RawCategory::new(1);
    raw.add_obj("a");
    raw.add_obj("b");
    raw.add_arrow(1, "f", "a", "b");
    close(raw)
}

/// a, b with u : a → b and ubar : b → a inverse to each other.
pub fn interval_iso() -> FiniteOmegaCat {
    let mut raw = RawCategory::new(1);
    raw.add_obj("a");
    raw.add_obj("b");
    raw.add_arrow(1, "u", "a", "b");
    raw.add_arrow(1, "ubar", "b", "a");
    raw.add_missing_units();
    raw.set_comp(1, 0, "u", "ubar", "1_a").unwrap();
    raw.set_comp(1, 0, "ubar", "u", "1_b").unwrap();
    raw.fill_forced_compositions();
    raw.freeze().expect("fixture is well formed")
}

pub fn shared(c: FiniteOmegaCat) -> Arc<FiniteOmegaCat> {
    Arc::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(terminal().total_stored(), 1);
        assert_eq!(discrete(2).count(0), 2);
        assert_eq!(walking_arrow().count(1), 3);
        assert_eq!(interval_iso().count(1), 4);
        assert_eq!(interval_iso().non_unit_count(), 4);
        assert_eq!(empty().total_stored(), 0);
    }
}
