use std::collections::BTreeMap;

use crate::linalg::Field;

/// `Σ α_i x_i + Σ β_j y_j + c`, stored sparsely with no zero coefficients.
///
/// Source programs never carry a constant; it only shows up while
/// homogenizing, before the constant edges are eliminated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinForm {
    x: BTreeMap<u32, u32>,
    y: BTreeMap<u32, u32>,
    constant: u32,
}

impl LinForm {
    pub fn zero() -> LinForm {
        LinForm::default()
    }

    pub fn var(i: u32) -> LinForm {
        let mut l = LinForm::zero();
        l.x.insert(i, 1);
        l
    }

    pub fn help(j: u32) -> LinForm {
        let mut l = LinForm::zero();
        l.y.insert(j, 1);
        l
    }

    /// Builds a form, reducing coefficients mod p and summing repeats.
    pub fn from_parts(
        field: &Field,
        xs: impl IntoIterator<Item = (u32, i64)>,
        ys: impl IntoIterator<Item = (u32, i64)>,
        constant: i64,
    ) -> LinForm {
        let mut l = LinForm::zero();
        for (i, c) in xs {
            l.add_x(field, i, field.elem(c));
        }
        for (j, c) in ys {
            l.add_y(field, j, field.elem(c));
        }
        l.constant = field.elem(constant);
        l
    }

    pub fn x_terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.x.iter().map(|(&i, &c)| (i, c))
    }

    pub fn y_terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.y.iter().map(|(&j, &c)| (j, c))
    }

    pub fn constant(&self) -> u32 {
        self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_empty() && self.y.is_empty() && self.constant == 0
    }

    /// Nonzero and nothing but a field element.
    pub fn is_constant(&self) -> bool {
        self.x.is_empty() && self.y.is_empty() && self.constant != 0
    }

    pub fn add_x(&mut self, field: &Field, i: u32, c: u32) {
        bump(&mut self.x, field, i, c);
    }

    pub fn add_y(&mut self, field: &Field, j: u32, c: u32) {
        bump(&mut self.y, field, j, c);
    }

    pub fn add_constant(&mut self, field: &Field, c: u32) {
        self.constant = field.add(self.constant, c);
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, field: &Field, c: u32, other: &LinForm) {
        if c == 0 {
            return;
        }
        for (i, a) in other.x_terms() {
            self.add_x(field, i, field.mul(c, a));
        }
        for (j, a) in other.y_terms() {
            self.add_y(field, j, field.mul(c, a));
        }
        self.constant = field.mul_add(self.constant, c, other.constant);
    }
}

fn bump(map: &mut BTreeMap<u32, u32>, field: &Field, k: u32, c: u32) {
    if c == 0 {
        return;
    }
    let v = field.add(map.get(&k).copied().unwrap_or(0), c);
    if v == 0 {
        map.remove(&k);
    } else {
        map.insert(k, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_not_stored() {
        let f = Field::new(3).unwrap();
        let l = LinForm::from_parts(&f, [(0, 1), (0, 2), (1, 3)], [(0, 0)], 0);
        assert!(l.is_zero());
        let mut m = LinForm::var(1);
        m.add_scaled(&f, 2, &LinForm::var(1));
        assert!(m.is_zero());
    }

    #[test]
    fn constant_detection() {
        let f = Field::new(2).unwrap();
        assert!(LinForm::from_parts(&f, [], [], 1).is_constant());
        assert!(!LinForm::from_parts(&f, [(0, 1)], [], 1).is_constant());
        assert!(!LinForm::zero().is_constant());
    }
}
