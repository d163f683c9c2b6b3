//! Succinct formulas for iterated binary relations.

use super::formula::{and, eq, exists, forall, implies, or, rel, Formula};

/// A formula in `x, y` defining `r^(2^m)`, of size linear in `m`.
///
/// Level `i` quantifies the fresh variables `z_i`, `x_i`, `y_i`:
/// `∃z_i ∀x_i ∀y_i (((x_i = x ∧ y_i = z_i) ∨ (x_i = z_i ∧ y_i = y)) → φ_{i−1}(x_i, y_i))`.
pub fn power_path_formula(r: &str, m: usize, x: &str, y: &str) -> Formula {
    if m == 0 {
        return rel(r, [x, y]);
    }
    let (z, xi, yi) = (format!("z_{m}"), format!("x_{m}"), format!("y_{m}"));
    let guard = or(and(eq(&xi, x), eq(&yi, &z)), and(eq(&xi, &z), eq(&yi, y)));
    exists(&z, forall(&xi, forall(&yi, implies(guard, power_path_formula(r, m - 1, &xi, &yi)))))
}

/// `∃z_1 … z_{n−1} (r(x, z_1) ∧ … ∧ r(z_{n−1}, y))`, defining `rⁿ`.
pub fn unary_path_formula(r: &str, n: usize, x: &str, y: &str) -> Formula {
    assert!(n >= 1, "path length must be positive");
    let names: Vec<String> = std::iter::once(x.to_string())
        .chain((1..n).map(|i| format!("z_{i}")))
        .chain(std::iter::once(y.to_string()))
        .collect();
    let body = names.windows(2).map(|w| rel(r, [w[0].as_str(), w[1].as_str()])).reduce(and).unwrap();
    names[1..n].iter().rev().fold(body, |f, z| exists(z, f))
}
