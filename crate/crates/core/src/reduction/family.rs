use std::fmt;

use crate::realnum::RealOracle;

/// One axis of a parameterized family: a list of parameter tuples, each with
/// the real component it contributes, added with a fixed integer sign.
#[derive(Clone, Debug)]
pub struct Axis {
    /// Names of the parameters, e.g. `["d", "e"]`.
    pub names: Vec<String>,
    pub sign: i8,
    pub entries: Vec<(Vec<i64>, RealOracle)>,
}

impl Axis {
    pub fn new(names: &[&str], sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "axis sign must be +1 or -1");
        Axis {
            names: names.iter().map(|s| s.to_string()).collect(),
            sign,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<i64>, component: RealOracle) {
        assert_eq!(params.len(), self.names.len(), "parameter arity");
        self.entries.push((params, component));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A family `mu(p) = constant + sum_k sign_k * axis_k[i_k]` ranging over the
/// Cartesian product of its axes. A scalar `mu` is a family with no axes.
#[derive(Clone, Debug)]
pub struct MuFamily {
    pub label: String,
    pub constant: RealOracle,
    pub axes: Vec<Axis>,
}

impl MuFamily {
    pub fn scalar(mu: RealOracle) -> Self {
        MuFamily {
            label: mu.label().to_string(),
            constant: mu,
            axes: Vec::new(),
        }
    }

    /// A family given as an explicit list of parameter tuples and values.
    pub fn explicit(label: &str, names: &[&str], members: Vec<(Vec<i64>, RealOracle)>) -> Self {
        let mut axis = Axis::new(names, 1);
        for (p, v) in members {
            axis.push(p, v);
        }
        MuFamily {
            label: label.to_string(),
            constant: RealOracle::integer(0),
            axes: vec![axis],
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn param_names(&self) -> Vec<String> {
        self.axes
            .iter()
            .flat_map(|a| a.names.iter().cloned())
            .collect()
    }

    /// Axis positions of member `index` (last axis varies fastest).
    pub fn positions(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = index % axis.len();
            index /= axis.len();
        }
        out
    }

    pub fn params(&self, index: usize) -> Vec<i64> {
        self.positions(index)
            .iter()
            .zip(&self.axes)
            .flat_map(|(&i, a)| a.entries[i].0.iter().copied())
            .collect()
    }

    /// `mu` for member `index` as a single oracle.
    pub fn member(&self, index: usize) -> RealOracle {
        let mut acc = self.constant.clone();
        for (&i, a) in self.positions(index).iter().zip(&self.axes) {
            let c = &a.entries[i].1;
            acc = if a.sign > 0 { acc.add(c) } else { acc.sub(c) };
        }
        acc
    }

    pub fn describe(&self, index: usize) -> String {
        let names = self.param_names();
        let params = self.params(index);
        if names.is_empty() {
            return self.label.clone();
        }
        let parts: Vec<String> = names
            .iter()
            .zip(params)
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        parts.join(", ")
    }
}

impl fmt::Display for MuFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} members)", self.label, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_indexing() {
        let mut a = Axis::new(&["m"], 1);
        for m in 0..3 {
            a.push(vec![m], RealOracle::integer(m));
        }
        let mut b = Axis::new(&["d", "e"], -1);
        for (d, e) in [(0, 0), (0, 1)] {
            b.push(vec![d, e], RealOracle::integer(10 * d + e));
        }
        let fam = MuFamily {
            label: "t".into(),
            constant: RealOracle::integer(100),
            axes: vec![a, b],
        };
        assert_eq!(fam.len(), 6);
        assert_eq!(fam.params(0), vec![0, 0, 0]);
        assert_eq!(fam.params(1), vec![0, 0, 1]);
        assert_eq!(fam.params(5), vec![2, 0, 1]);
        assert_eq!(fam.describe(5), "m=2, d=0, e=1");
        let v = fam.member(5).enclosure_at(64).unwrap();
        assert_eq!(v.to_f64(), 101.0);
        assert_eq!(MuFamily::scalar(RealOracle::integer(1)).len(), 1);
    }
}
