//! Sums of `z = y/x` over subgroups of `E(F_q)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{Curve, CurveError, Point};
use crate::galois::{FieldDesc, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZSumError {
    #[error("every point of the subgroup is a pole of z")]
    EmptyAfterPoles,
    #[error("multiplier must be at least 1")]
    ZeroMultiplier,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// `m E(F_q)`, sorted.
pub fn subgroup_by_multiplier(curve: &Curve, m: u64) -> Result<Vec<Point>, ZSumError> {
    if m == 0 {
        return Err(ZSumError::ZeroMultiplier);
    }
    let image: BTreeSet<Point> =
        curve.enumerate_points()?.iter().map(|p| curve.scalar_mul(m as i64, p)).collect();
    Ok(image.into_iter().collect())
}

/// `{ z(g1) + z(g2) }` over ordered pairs of non-poles in `g`.
pub fn z_sum_set(curve: &Curve, g: &[Point]) -> Result<BTreeSet<FieldElem>, ZSumError> {
    let f = curve.field();
    let zs: BTreeSet<FieldElem> = g.iter().filter_map(|p| curve.z_coord(p).ok()).collect();
    if zs.is_empty() {
        return Err(ZSumError::EmptyAfterPoles);
    }
    let mut out = BTreeSet::new();
    for &a in &zs {
        for &b in &zs {
            out.insert(f.add(a, b));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSumReport {
    pub q: u64,
    pub curve: String,
    pub group_order: u64,
    pub multiplier: u64,
    pub index: u64,
    pub subgroup_order: u64,
    pub sum_set_size: u64,
    pub missing: Vec<String>,
    pub covered: bool,
    pub empty_after_poles: bool,
}

pub fn z_sum_report(curve: &Curve, m: u64) -> Result<ZSumReport, ZSumError> {
    let f = curve.field();
    let n = curve.count_points()?;
    let g = subgroup_by_multiplier(curve, m)?;
    let (set, empty) = match z_sum_set(curve, &g) {
        Ok(s) => (s, false),
        Err(ZSumError::EmptyAfterPoles) => (BTreeSet::new(), true),
        Err(e) => return Err(e),
    };
    let missing: Vec<String> = f.elements().filter(|x| !set.contains(x)).map(|x| f.format(x)).collect();
    Ok(ZSumReport {
        q: f.order(),
        curve: curve.literal(),
        group_order: n,
        multiplier: m,
        index: n / g.len() as u64,
        subgroup_order: g.len() as u64,
        sum_set_size: set.len() as u64,
        covered: missing.is_empty(),
        missing,
        empty_after_poles: empty,
    })
}

/// Curves scanned for a field, in lexicographic coefficient order:
/// short models `y^2 = x^3 + a4 x + a6` for `p >= 5`, `y^2 = x^3 + a2 x^2 + a4 x + a6`
/// for `p = 3`, and `(a1, a3) in {(1,0), (0,1)}` with `a2, a4, a6` free for `p = 2`.
pub fn curve_sample(field: &FieldDesc) -> Vec<Curve> {
    let q = field.order() as u32;
    let mut out = Vec::new();
    let mut push = |codes: [u32; 5]| {
        if let Ok(c) = Curve::from_codes(field, codes) {
            out.push(c);
        }
    };
    match field.characteristic() {
        2 => {
            for (a1, a3) in [(0, 1), (1, 0)] {
                for a2 in 0..q {
                    for a4 in 0..q {
                        for a6 in 0..q {
                            push([a1, a2, a3, a4, a6]);
                        }
                    }
                }
            }
        }
        3 => {
            for a2 in 0..q {
                for a4 in 0..q {
                    for a6 in 0..q {
                        push([0, a2, 0, a4, a6]);
                    }
                }
            }
        }
        _ => {
            for a4 in 0..q {
                for a6 in 0..q {
                    push([0, 0, 0, a4, a6]);
                }
            }
        }
    }
    out
}

/// Divisors `m` of `#E` giving distinct images `m E` of index at most `index_bound`.
fn multipliers(curve: &Curve, index_bound: u64) -> Result<Vec<(u64, Vec<Point>)>, ZSumError> {
    let n = curve.count_points()?;
    let mut seen: Vec<Vec<Point>> = Vec::new();
    let mut out = Vec::new();
    for m in (1..=n).filter(|m| n % m == 0) {
        let g = subgroup_by_multiplier(curve, m)?;
        if n / g.len() as u64 > index_bound || seen.contains(&g) {
            continue;
        }
        seen.push(g.clone());
        out.push((m, g));
    }
    Ok(out)
}

pub fn zsum_scan(field: &FieldDesc, index_bound: u64) -> Result<Vec<ZSumReport>, ZSumError> {
    let mut reports = Vec::new();
    for curve in curve_sample(field) {
        for (m, _) in multipliers(&curve, index_bound)? {
            reports.push(z_sum_report(&curve, m)?);
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub index: u64,
    pub reports: u64,
    pub covered: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSumSummary {
    pub q: u64,
    pub by_index: Vec<IndexStats>,
}

/// Coverage counts at index 1, 2 and 3.
pub fn summarize(q: u64, reports: &[ZSumReport]) -> ZSumSummary {
    let by_index = (1..=3)
        .map(|index| {
            let at: Vec<&ZSumReport> = reports.iter().filter(|r| r.index == index).collect();
            let covered = at.iter().filter(|r| r.covered).count() as u64;
            let total = at.len() as u64;
            IndexStats {
                index,
                reports: total,
                covered,
                fraction: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
            }
        })
        .collect();
    ZSumSummary { q, by_index }
}

/// For index 1, 2, 3: the smallest `q` among the summaries where every
/// report at that index covered `F_q`.
pub fn smallest_full_coverage(summaries: &[ZSumSummary]) -> [Option<u64>; 3] {
    let mut out = [None; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = summaries
            .iter()
            .filter(|s| {
                let st = &s.by_index[i];
                st.reports > 0 && st.covered == st.reports
            })
            .map(|s| s.q)
            .min();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5_fixture() -> Curve {
        let f5 = FieldDesc::prime(5).unwrap();
        Curve::from_ints(&f5, [0, 0, 0, 1, 0]).unwrap()
    }

    #[test]
    fn multiplier_images() {
        let e = f5_fixture();
        assert_eq!(subgroup_by_multiplier(&e, 1).unwrap().len(), 4);
        assert_eq!(subgroup_by_multiplier(&e, 2).unwrap(), vec![Point::Infinity]);
        assert_eq!(subgroup_by_multiplier(&e, 4).unwrap(), vec![Point::Infinity]);
        assert_eq!(subgroup_by_multiplier(&e, 0).unwrap_err(), ZSumError::ZeroMultiplier);
    }

    #[test]
    fn f5_full_group_misses_all_but_zero() {
        let e = f5_fixture();
        let rep = z_sum_report(&e, 1).unwrap();
        assert_eq!(rep.missing, vec!["1", "2", "3", "4"]);
        assert_eq!(rep.sum_set_size, 1);
        assert!(!rep.covered);
    }

    #[test]
    fn trivial_subgroup_is_all_poles() {
        let e = f5_fixture();
        assert_eq!(z_sum_set(&e, &[Point::Infinity]).unwrap_err(), ZSumError::EmptyAfterPoles);
        let rep = z_sum_report(&e, 2).unwrap();
        assert!(rep.empty_after_poles);
        assert_eq!(rep.index, 4);
    }

    #[test]
    fn seventeen_fixtures() {
        let f17 = FieldDesc::prime(17).unwrap();
        let e = Curve::from_ints(&f17, [0, 0, 0, 0, 1]).unwrap();
        let rep = z_sum_report(&e, 1).unwrap();
        assert_eq!(rep.group_order, 18);
        assert!(rep.covered);
        let e = Curve::from_ints(&f17, [0, 0, 0, 3, 3]).unwrap();
        assert_eq!(z_sum_report(&e, 1).unwrap().missing, vec!["3", "14"]);
        let reports = zsum_scan(&f17, 1).unwrap();
        let s = summarize(17, &reports);
        assert_eq!((s.by_index[0].reports, s.by_index[0].covered), (272, 260));
    }

    #[test]
    fn sample_shapes() {
        let f3 = FieldDesc::prime(3).unwrap();
        assert!(curve_sample(&f3).iter().all(|c| c.coefficients()[0] == f3.zero()));
        let f2 = FieldDesc::prime(2).unwrap();
        assert!(curve_sample(&f2).iter().all(|c| {
            let a = c.coefficients();
            (a[0] == f2.one()) != (a[2] == f2.one())
        }));
    }
}
