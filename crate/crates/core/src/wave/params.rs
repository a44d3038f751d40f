use std::cmp::Ordering;
use std::fmt;

use crate::exact::QSqrt3;
use crate::{Error, Result};

/// `β²_wave / π = (32 − 16√3)/5`.
pub fn beta_sq_wave_over_pi() -> QSqrt3 {
    QSqrt3::from_ratios(32, 5, -16, 5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    AtMost,
    LessThan,
    AtLeast,
    GreaterThan,
}

impl Relation {
    fn holds(self, ord: Ordering) -> bool {
        match self {
            Relation::Equal => ord == Ordering::Equal,
            Relation::AtMost => ord != Ordering::Greater,
            Relation::LessThan => ord == Ordering::Less,
            Relation::AtLeast => ord != Ordering::Less,
            Relation::GreaterThan => ord == Ordering::Greater,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::AtMost => "<=",
            Relation::LessThan => "<",
            Relation::AtLeast => ">=",
            Relation::GreaterThan => ">",
        }
    }
}

/// One exact relation `lhs ⋈ rhs` between elements of `Q(√3)`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: &'static str,
    pub lhs: QSqrt3,
    pub relation: Relation,
    pub rhs: QSqrt3,
    pub holds: bool,
    /// Part of the well-posedness argument. The remaining entries restate
    /// the exponent ranges listed alongside the table and are reported only.
    pub required: bool,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} ({}) [{}]",
            self.name,
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            if self.holds { "holds" } else { "fails" },
            if self.required { "required" } else { "range" }
        )
    }
}

/// Exponents of the X+Y fixed-point argument, all exact. `β²` is stored as
/// `β²/π`.
#[derive(Clone, Debug)]
pub struct WaveParameters {
    pub beta_sq_over_pi: QSqrt3,
    pub p: QSqrt3,
    pub alpha: QSqrt3,
    pub s1: QSqrt3,
    pub s2: QSqrt3,
    pub q: QSqrt3,
    pub r: QSqrt3,
    pub q_dual: QSqrt3,
    pub r_dual: QSqrt3,
    pub q1: QSqrt3,
    pub r1: QSqrt3,
    pub q1_dual: QSqrt3,
    pub r1_dual: QSqrt3,
    pub constraints: Vec<Constraint>,
}

impl WaveParameters {
    pub fn required_hold(&self) -> bool {
        self.constraints.iter().filter(|c| c.required).all(|c| c.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.holds)
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }
}

fn q(a: i64, b: i64) -> QSqrt3 {
    QSqrt3::ratio(a, b)
}

/// The parameter table for `0 < β² ≤ β²_wave` (given as `β²/π`), with every
/// constraint checked in exact arithmetic.
///
/// The exponents do not depend on `β²`: they are chosen at the threshold,
/// where the moment condition is saturated, and remain valid below it.
pub fn wave_parameters(beta_sq_over_pi: &QSqrt3) -> Result<WaveParameters> {
    let threshold = beta_sq_wave_over_pi();
    if beta_sq_over_pi.signum() <= 0 || *beta_sq_over_pi > threshold {
        return Err(Error::InvalidArgument(format!(
            "β²/π = {} outside (0, {}]",
            beta_sq_over_pi, threshold
        )));
    }
    let one = QSqrt3::one();
    let two = QSqrt3::int(2);
    let half = q(1, 2);
    let r3 = QSqrt3::sqrt3();

    let p = QSqrt3::from_ratios(3, 2, 1, 2);
    let alpha = QSqrt3::from_ratios(-2, 5, 2, 5);
    let s1 = &one - &alpha;
    let s2 = &s1 + &one;
    // closed forms from the table
    let q_tab = QSqrt3::int(15) / (QSqrt3::int(7) - &r3 * QSqrt3::int(2));
    let r_tab = QSqrt3::int(30) / (&r3 * QSqrt3::int(8) - QSqrt3::int(13));
    let q1 = QSqrt3::int(15) / (QSqrt3::int(9) - &r3 * QSqrt3::int(4));
    let r1 = QSqrt3::int(30) / (&r3 * QSqrt3::int(16) - QSqrt3::int(21));
    let q1_dual = one.clone();
    let r1_dual = two.clone();
    // the fixed admissible pairs
    let q_dual = QSqrt3::int(3) / (&two + &s1);
    let r_dual = QSqrt3::int(6) / (QSqrt3::int(7) - QSqrt3::int(4) * &s1);

    let theta = &alpha / &s1;
    let theta_dual = &alpha / (&one - &s1);
    let inv = |x: &QSqrt3| x.recip();
    let beta2 = beta_sq_over_pi.clone();

    let mut cs = Vec::new();
    let mut add = |name: &'static str, lhs: QSqrt3, relation: Relation, rhs: QSqrt3, required: bool| {
        let holds = relation.holds(lhs.cmp(&rhs));
        cs.push(Constraint {
            name,
            lhs,
            relation,
            rhs,
            holds,
            required,
        });
    };
    use Relation::*;

    add("pair_time_exponent", q_tab.clone(), Equal, QSqrt3::int(3) / &s1, true);
    add("pair_space_exponent", r_tab.clone(), Equal, QSqrt3::int(6) / (QSqrt3::int(3) - QSqrt3::int(4) * &s1), true);
    add("admissible_scaling", inv(&q_tab) + inv(&r_tab) * &two, Equal, &one - &s1, true);
    add("dual_admissible_scaling", inv(&q_dual) + inv(&r_dual) * &two - &two, Equal, &one - &s1, true);
    add("admissible_gap", inv(&q_tab) * &two + inv(&r_tab), AtMost, half.clone(), true);
    add("dual_admissible_gap", inv(&q_dual) * &two + inv(&r_dual), AtLeast, q(5, 2), true);

    add("interpolation_time_exponent", inv(&q1), Equal, (&one - &theta) / &q_tab, true);
    add("interpolation_space_exponent", inv(&r1), Equal, (&one - &theta) / &r_tab + &theta * &half, true);
    add(
        "dual_interpolation_time_exponent",
        inv(&q1_dual),
        Equal,
        (&one - &theta_dual) / &q_dual + &theta_dual,
        true,
    );
    add(
        "dual_interpolation_space_exponent",
        inv(&r1_dual),
        Equal,
        (&one - &theta_dual) / &r_dual + &theta_dual * &half,
        true,
    );
    add(
        "interpolated_space_gap",
        inv(&r1) - inv(&r1_dual),
        Equal,
        &alpha * q(4, 3) - q(2, 3),
        true,
    );

    add("product_estimate", inv(&r1) + inv(&p), AtMost, inv(&r1_dual) + &alpha * &half, true);
    add("holder_in_time", inv(&q1) + inv(&p), LessThan, inv(&q1_dual), true);
    add("sobolev_embedding", (&two - &s2 - &alpha) * &half, AtLeast, inv(&r1_dual) - &half, true);
    add("moment_threshold", alpha.clone(), AtLeast, (&p - &one) * &beta2 * q(1, 4), true);
    add(
        "coupling_bound",
        beta2.clone(),
        AtMost,
        (&two * &p - QSqrt3::int(3)) * QSqrt3::int(8) / (QSqrt3::int(5) * &p * (&p - &one)),
        true,
    );
    add(
        "optimal_moment_order",
        -(&two * &p * &p) + QSqrt3::int(6) * &p - QSqrt3::int(3),
        Equal,
        QSqrt3::zero(),
        true,
    );
    add("chaos_integrability", &p * &beta2, LessThan, QSqrt3::int(8), true);
    add("moment_order", p.clone(), AtLeast, two.clone(), true);
    add("bessel_order_positive", alpha.clone(), GreaterThan, QSqrt3::zero(), true);
    add("bessel_order_below_s1", alpha.clone(), AtMost, s1.clone(), true);
    add("bessel_order_below_dual_s1", alpha.clone(), AtMost, &one - &s1, true);
    add("rough_regularity_lower", s1.clone(), GreaterThan, q(1, 4), true);
    add("rough_regularity_upper", s1.clone(), LessThan, q(3, 4), true);
    add("smooth_regularity_lower", s2.clone(), GreaterThan, one.clone(), true);
    add("smooth_regularity_upper", s2.clone(), LessThan, two.clone(), true);

    add("range_dual_time_lower", q_dual.clone(), AtLeast, one.clone(), false);
    add("range_dual_time_order", q_dual.clone(), AtMost, q1_dual.clone(), false);
    add("range_dual_time_upper", q1_dual.clone(), AtMost, two.clone(), false);
    add("range_time_lower", q_tab.clone(), AtLeast, two.clone(), false);
    add("range_time_order", q_tab.clone(), AtMost, q1.clone(), false);
    add("range_dual_space_lower", r_dual.clone(), GreaterThan, one.clone(), false);
    add("range_dual_space_order", r_dual.clone(), AtMost, r1_dual.clone(), false);
    add("range_dual_space_upper", r1_dual.clone(), AtMost, two.clone(), false);
    add("range_space_lower", r1.clone(), AtLeast, two.clone(), false);
    add("range_space_order", r1.clone(), AtMost, r_tab.clone(), false);

    Ok(WaveParameters {
        beta_sq_over_pi: beta2,
        p,
        alpha,
        s1,
        s2,
        q: q_tab,
        r: r_tab,
        q_dual,
        r_dual,
        q1,
        r1,
        q1_dual,
        r1_dual,
        constraints: cs,
    })
}
