//! Numerical certification that the linear forms used by the bound steps
//! do not vanish at concrete parameter values.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::LinformsError;
use crate::realnum::{constants, PrecisionPolicy, RealOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormId {
    /// `alpha^n1 2^-a1 / (4 sqrt 2) - 1`
    Gamma,
    /// `1 - alpha^-n1 2^a2 4 sqrt 2 (2^(a1-a2) + 1)`
    Gamma1,
    /// `1 - alpha^-n1 2^a1 4 sqrt 2 (1 + 2^(a2-a1) + 2^(a3-a1))`
    GammaA,
    /// `alpha^n2 2^-a2 (1 + alpha^(n1-n2)) / (4 sqrt 2 (2^(a1-a2) + 1)) - 1`
    GammaB,
    /// `alpha^n2 2^-a1 (1 + alpha^(n1-n2)) / (4 sqrt 2) - 1`
    Gamma2,
    /// `1 - alpha^-n1 2^a1 4 sqrt 2 (1 + 2^(a2-a1) + 2^(a3-a1)) / (1 + alpha^(n2-n1))`
    Gamma3,
}

impl FormId {
    pub const ALL: [FormId; 6] = [
        FormId::Gamma,
        FormId::Gamma1,
        FormId::GammaA,
        FormId::GammaB,
        FormId::Gamma2,
        FormId::Gamma3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormId::Gamma => "Gamma",
            FormId::Gamma1 => "Gamma1",
            FormId::GammaA => "GammaA",
            FormId::GammaB => "GammaB",
            FormId::Gamma2 => "Gamma2",
            FormId::Gamma3 => "Gamma3",
        }
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Concrete indices and exponents at which a form is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n1: i64,
    pub n2: i64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
}

fn pow(base: &RealOracle, k: i64) -> Result<RealOracle, LinformsError> {
    Ok(base.powi(k)?)
}

/// The form's value at `w`, as an oracle.
pub fn form_oracle(form: FormId, w: &Witness) -> Result<RealOracle, LinformsError> {
    let alpha = constants::alpha();
    let two = RealOracle::integer(2);
    let one = RealOracle::integer(1);
    let c = constants::four_sqrt2();
    let three_terms = one
        .add(&pow(&two, w.a2 - w.a1)?)
        .add(&pow(&two, w.a3 - w.a1)?);
    let v = match form {
        FormId::Gamma => pow(&alpha, w.n1)?
            .mul(&pow(&two, -w.a1)?)
            .div(&c)?
            .sub(&one),
        FormId::Gamma1 => one.sub(
            &pow(&alpha, -w.n1)?
                .mul(&pow(&two, w.a2)?)
                .mul(&c)
                .mul(&pow(&two, w.a1 - w.a2)?.add(&one)),
        ),
        FormId::GammaA => one.sub(
            &pow(&alpha, -w.n1)?
                .mul(&pow(&two, w.a1)?)
                .mul(&c)
                .mul(&three_terms),
        ),
        FormId::GammaB => pow(&alpha, w.n2)?
            .mul(&pow(&two, -w.a2)?)
            .mul(&one.add(&pow(&alpha, w.n1 - w.n2)?))
            .div(&c.mul(&pow(&two, w.a1 - w.a2)?.add(&one)))?
            .sub(&one),
        FormId::Gamma2 => pow(&alpha, w.n2)?
            .mul(&pow(&two, -w.a1)?)
            .mul(&one.add(&pow(&alpha, w.n1 - w.n2)?))
            .div(&c)?
            .sub(&one),
        FormId::Gamma3 => one.sub(
            &pow(&alpha, -w.n1)?
                .mul(&pow(&two, w.a1)?)
                .mul(&c)
                .mul(&three_terms)
                .div(&one.add(&pow(&alpha, w.n2 - w.n1)?))?,
        ),
    };
    Ok(v.with_label(format!(
        "{form}({}, {}, {}, {}, {})",
        w.n1, w.n2, w.a1, w.a2, w.a3
    )))
}

/// Certifies `form(w) != 0` by interval evaluation at escalating precision.
/// Returns `Ok(true)` once an enclosure excludes zero and reports an
/// undecided result when the policy's cap is reached first.
pub fn nonvanishing_check(
    form: FormId,
    w: &Witness,
    policy: &PrecisionPolicy,
) -> Result<bool, LinformsError> {
    let oracle = form_oracle(form, w)?;
    for bits in policy.ladder() {
        let iv = oracle.enclosure_at(bits)?;
        if !iv.contains_zero() {
            return Ok(true);
        }
    }
    Err(LinformsError::Undecided {
        what: format!("{} at {} bits", oracle.label(), policy.cap),
    })
}
