//! Matveev's lower bound for a non-zero `prod eta_i^b_i - 1`:
//! `log |Gamma| > -C (1 + log D) A_1 ... A_l` with
//! `C = 1.4 * 30^(l+3) * l^4.5 * d^2 * (1 + log d)`.

use super::{LinformsError, PolyLogBound};
use crate::realnum::{parse_decimal, RealOracle};

/// Data fed to the lower bound; `D` is taken to be `n1` and stays symbolic.
#[derive(Clone, Debug)]
pub struct MatveevInput {
    pub l: u32,
    pub field_degree: u32,
    /// `A_1, ..., A_l`, each possibly growing with `n1`.
    pub a: Vec<PolyLogBound>,
}

/// Smallest admissible `A_j`.
pub const A_FLOOR: &str = "0.16";

impl MatveevInput {
    pub fn validate(&self) -> Result<(), LinformsError> {
        if self.l < 2 {
            return Err(LinformsError::InvalidInput(format!("l = {} < 2", self.l)));
        }
        if self.field_degree < 1 {
            return Err(LinformsError::InvalidInput(
                "field degree must be positive".into(),
            ));
        }
        if self.a.len() != self.l as usize {
            return Err(LinformsError::InvalidInput(format!(
                "expected {} A values, got {}",
                self.l,
                self.a.len()
            )));
        }
        let (num, den) = parse_decimal(A_FLOOR).expect("valid constant");
        for (j, a) in self.a.iter().enumerate() {
            let iv = a.coefficient_enclosure()?;
            // Rejected only when certainly below the floor.
            if iv.hi_le_ratio(&num, &den) && iv.hi_mantissa() * &den != &num << iv.prec() {
                return Err(LinformsError::InvalidInput(format!(
                    "A_{} = {} is below {A_FLOOR}",
                    j + 1,
                    iv
                )));
            }
        }
        Ok(())
    }
}

/// The theorem's leading constant `1.4 * 30^(l+3) * l^4.5 * d^2 * (1 + log d)`.
pub fn matveev_constant(l: u32, field_degree: u32) -> Result<RealOracle, LinformsError> {
    let l_big = RealOracle::integer(l);
    let d = RealOracle::integer(field_degree);
    let c = RealOracle::decimal("1.4")?
        .mul(&RealOracle::integer(30).powi(i64::from(l) + 3)?)
        .mul(&l_big.powi(4)?.mul(&l_big.sqrt()?))
        .mul(&d.powi(2)?)
        .mul(&RealOracle::integer(1).add(&d.ln()?));
    Ok(c.with_label(format!("matveev({l}, {field_degree})")))
}

/// `C (1 + log n1) A_1 ... A_l` as a bound symbolic in `n1`.
pub fn matveev_coefficient(input: &MatveevInput) -> Result<PolyLogBound, LinformsError> {
    input.validate()?;
    let mut coefficient = matveev_constant(input.l, input.field_degree)?;
    let mut exponent = 1;
    for a in &input.a {
        coefficient = coefficient.mul(&a.coefficient);
        exponent += a.exponent;
    }
    Ok(PolyLogBound::new(coefficient, exponent))
}
