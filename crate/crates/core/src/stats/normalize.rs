use serde::{Deserialize, Serialize};

use super::{StatVector, Statistic};
use crate::error::{Error, Result};

/// Summary statistics rescaled for comparison across orders.
///
/// Clustering coefficients, density, assortativity and the triangle ratio
/// are kept as is; diameter and both connectivities are divided by `n - 1`
/// and the average path length by `apl_ref`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedStatVector {
    pub acc: f64,
    pub gcc: f64,
    pub scc: f64,
    pub apl: f64,
    pub r: Option<f64>,
    pub diam: f64,
    pub den: f64,
    pub rt: f64,
    pub cv: f64,
    pub ce: f64,
    pub apl_ref: f64,
}

impl NormalizedStatVector {
    /// Values in [`Statistic::SUMMARY`] order; `None` for undefined
    /// assortativity.
    pub fn values(&self) -> [Option<f64>; 10] {
        [
            Some(self.acc),
            Some(self.gcc),
            Some(self.scc),
            Some(self.apl),
            self.r,
            Some(self.diam),
            Some(self.den),
            Some(self.rt),
            Some(self.cv),
            Some(self.ce),
        ]
    }

    pub fn get(&self, stat: Statistic) -> Option<Option<f64>> {
        Statistic::SUMMARY
            .iter()
            .position(|&s| s == stat)
            .map(|i| self.values()[i])
    }
}

pub fn normalize(sv: &StatVector, apl_ref: f64) -> Result<NormalizedStatVector> {
    if apl_ref.is_nan() || apl_ref <= 0.0 || apl_ref.is_infinite() {
        return Err(Error::BadReference(apl_ref));
    }
    if sv.n < 2 {
        return Err(Error::OrderTooSmall { n: sv.n, min: 2 });
    }
    let span = (sv.n - 1) as f64;
    Ok(NormalizedStatVector {
        acc: sv.acc,
        gcc: sv.gcc,
        scc: sv.scc,
        apl: sv.apl / apl_ref,
        r: sv.r,
        diam: sv.diam as f64 / span,
        den: sv.den,
        rt: sv.rt,
        cv: sv.cv as f64 / span,
        ce: sv.ce as f64 / span,
        apl_ref,
    })
}

/// Largest average path length in a batch, the reference used when no
/// exact ground-truth maximum is available. Falls back to 1 when every
/// value is 0.
pub fn max_apl<'a, I>(stats: I) -> f64
where
    I: IntoIterator<Item = &'a StatVector>,
{
    let m = stats.into_iter().map(|s| s.apl).fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::stats::stat_vector;

    #[test]
    fn scales_integer_statistics() {
        let p9 = Graph::from_edge_list(9, (1..9).map(|i| (i - 1, i))).unwrap();
        let mut sv = stat_vector(&p9).unwrap();
        sv.diam = 4;
        let nv = normalize(&sv, 3.0).unwrap();
        assert_eq!(nv.diam, 0.5);
        assert_eq!(nv.cv, 1.0 / 8.0);
        assert_eq!(nv.den, sv.den);
        assert_eq!(nv.r, sv.r);
    }

    #[test]
    fn scales_apl() {
        let mut sv = stat_vector(&Graph::complete(4).unwrap()).unwrap();
        sv.apl = 1.5;
        assert_eq!(normalize(&sv, 3.0).unwrap().apl, 0.5);
        assert!(matches!(normalize(&sv, 0.0), Err(Error::BadReference(_))));
        assert!(matches!(normalize(&sv, -1.0), Err(Error::BadReference(_))));
    }
}
