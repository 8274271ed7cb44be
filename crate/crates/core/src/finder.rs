//! "Same statistics, different graphs": filter an atlas by fixed statistic
//! ranges and bin a free statistic into slots with one exemplar each.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::{load_atlas, Atlas, AtlasRow};
use crate::error::{Error, Result};
use crate::graph::pair_count;
use crate::stats::{StatVector, Statistic};

/// Slack added to both ends of preset bounds.
pub const PRESET_SLACK: f64 = 1e-9;

/// Denominator used when a query touches the triangle ratio.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RtMode {
    /// Triangles over `n(n-1)/2`, the stored `rt` column.
    #[default]
    Pairs,
    /// Triangles over `C(n,3)`.
    Triples,
}

impl fmt::Display for RtMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RtMode::Pairs => "pairs",
            RtMode::Triples => "triples",
        })
    }
}

impl FromStr for RtMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pairs" => Ok(RtMode::Pairs),
            "triples" => Ok(RtMode::Triples),
            _ => Err(Error::BadQuery(format!("unknown rt mode {s:?}"))),
        }
    }
}

/// Closed interval on a raw statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub stat: Statistic,
    pub min: f64,
    pub max: f64,
}

impl Constraint {
    pub fn new(stat: Statistic, min: f64, max: f64) -> Self {
        Constraint { stat, min, max }
    }

    pub fn point(stat: Statistic, value: f64) -> Self {
        Constraint::new(stat, value, value)
    }

    fn widened(self, slack: f64) -> Self {
        Constraint::new(self.stat, self.min - slack, self.max + slack)
    }

    fn admits(&self, v: Option<f64>) -> bool {
        v.is_some_and(|v| v >= self.min && v <= self.max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterQuery {
    pub n: usize,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    pub vary: Statistic,
    #[serde(default)]
    pub rt_mode: RtMode,
}

impl FilterQuery {
    pub fn new(n: usize, vary: Statistic) -> Self {
        FilterQuery {
            n,
            constraints: Vec::new(),
            vary,
            rt_mode: RtMode::Pairs,
        }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            if c.min.is_nan() || c.max.is_nan() || c.min > c.max {
                return Err(Error::BadQuery(format!(
                    "constraint on {} has min {} > max {}",
                    c.stat, c.min, c.max
                )));
            }
            if c.stat == self.vary {
                return Err(Error::BadQuery(format!(
                    "{} is both constrained and varied",
                    c.stat
                )));
            }
        }
        Ok(())
    }

    /// Value of `stat` as seen by this query (the triangle ratio follows
    /// `rt_mode`).
    pub fn value(&self, sv: &StatVector, stat: Statistic) -> Option<f64> {
        match (stat, self.rt_mode) {
            (Statistic::Rt, RtMode::Triples) => Some(sv.triangle_fraction()),
            _ => sv.get(stat),
        }
    }

    pub fn matches(&self, sv: &StatVector) -> bool {
        self.constraints.iter().all(|c| c.admits(self.value(sv, c.stat)))
    }
}

/// Rows of `rows` satisfying every constraint, in input order.
pub fn query_rows<'a>(rows: &'a [AtlasRow], q: &FilterQuery) -> Result<Vec<&'a AtlasRow>> {
    q.validate()?;
    Ok(rows.par_iter().filter(|r| q.matches(&r.stats)).collect())
}

pub fn query<'a>(atlas: &'a Atlas, q: &FilterQuery) -> Result<Vec<&'a AtlasRow>> {
    if atlas.n != q.n {
        return Err(Error::BadQuery(format!(
            "query is for order {}, atlas has order {}",
            q.n, atlas.n
        )));
    }
    query_rows(&atlas.rows, q)
}

/// Loads the atlas for `q.n` from `dir`, then runs `q` and slots the result.
pub fn find(dir: &Path, q: &FilterQuery) -> Result<SlotResult> {
    q.validate()?;
    let atlas = load_atlas(dir, q.n)?;
    let matches = query(&atlas, q)?;
    slotize(&matches, q, atlas.apl_ref)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub label: String,
    /// Slot interval; `lo == hi` for an integer slot. Continuous slots are
    /// half-open except the last, which is closed.
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Lexicographically smallest graph6 string in the slot.
    pub exemplar: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotResult {
    pub vary: Statistic,
    pub rt_mode: RtMode,
    pub slots: Vec<Slot>,
    pub total_matches: usize,
    /// Matches whose free statistic is undefined (assortativity only).
    pub undefined: usize,
}

impl SlotResult {
    pub fn occupied(&self) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(|s| s.count > 0)
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied().count()
    }

    /// Distance from the lowest to the highest edge of the occupied slots.
    pub fn occupied_span(&self) -> f64 {
        let lo = self.occupied().map(|s| s.lo).fold(f64::INFINITY, f64::min);
        let hi = self.occupied().map(|s| s.hi).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }
}

enum Binning {
    Continuous { lo: f64, width: f64, count: usize },
    Integer { max: usize },
}

fn binning(stat: Statistic, n: usize, mode: RtMode) -> Binning {
    let unit = Binning::Continuous {
        lo: 0.0,
        width: 0.1,
        count: 10,
    };
    match stat {
        Statistic::R => Binning::Continuous {
            lo: -1.0,
            width: 0.2,
            count: 10,
        },
        Statistic::Acc | Statistic::Gcc | Statistic::Scc | Statistic::Den | Statistic::Apl => unit,
        Statistic::Rt => match mode {
            RtMode::Triples => unit,
            // T / C(n,2) reaches (n-2)/3 on complete graphs.
            RtMode::Pairs => Binning::Continuous {
                lo: 0.0,
                width: 0.1,
                count: ((n.saturating_sub(2) as f64 / 3.0).max(1.0) * 10.0).ceil() as usize,
            },
        },
        Statistic::Diam | Statistic::Cv | Statistic::Ce => Binning::Integer {
            max: n.saturating_sub(1),
        },
        Statistic::Girth => Binning::Integer { max: n },
        Statistic::Triangles => Binning::Integer {
            max: n * n.saturating_sub(1) * n.saturating_sub(2) / 6,
        },
        Statistic::M => Binning::Integer { max: pair_count(n) },
        Statistic::N => Binning::Integer { max: n },
    }
}

fn continuous_index(x: f64, lo: f64, width: f64, count: usize) -> usize {
    let t = (x - lo) / width;
    let mut k = t.floor();
    // values on a boundary belong to the upper slot despite rounding
    if (k + 1.0 - t).abs() < 1e-9 {
        k += 1.0;
    }
    (k.max(0.0) as usize).min(count - 1)
}

/// Bins matches by the query's free statistic. Normalized APL is used when
/// the free statistic is APL, with `apl_ref` as the reference.
pub fn slotize(matches: &[&AtlasRow], q: &FilterQuery, apl_ref: f64) -> Result<SlotResult> {
    Ok(assign_slots(matches, q, apl_ref)?.0)
}

/// Like [`slotize`], also returning each match's slot index (`None` when
/// the free statistic is undefined).
pub fn assign_slots(matches: &[&AtlasRow], q: &FilterQuery, apl_ref: f64) -> Result<(SlotResult, Vec<Option<usize>>)> {
    if q.vary == Statistic::Apl && !(apl_ref > 0.0 && apl_ref.is_finite()) {
        return Err(Error::BadReference(apl_ref));
    }
    let bins = binning(q.vary, q.n, q.rt_mode);
    let mut slots: Vec<Slot> = match bins {
        Binning::Continuous { lo, width, count } => (0..count)
            .map(|i| {
                let a = lo + width * i as f64;
                let b = lo + width * (i + 1) as f64;
                let close = if i + 1 == count { ']' } else { ')' };
                Slot {
                    label: format!("[{a:.1},{b:.1}{close}"),
                    lo: a,
                    hi: b,
                    count: 0,
                    exemplar: None,
                }
            })
            .collect(),
        Binning::Integer { max } => (0..=max)
            .map(|v| Slot {
                label: v.to_string(),
                lo: v as f64,
                hi: v as f64,
                count: 0,
                exemplar: None,
            })
            .collect(),
    };
    let mut undefined = 0;
    let mut assigned = Vec::with_capacity(matches.len());
    for row in matches {
        let Some(mut x) = q.value(&row.stats, q.vary) else {
            undefined += 1;
            assigned.push(None);
            continue;
        };
        if q.vary == Statistic::Apl {
            x /= apl_ref;
        }
        let idx = match bins {
            Binning::Continuous { lo, width, count } => continuous_index(x, lo, width, count),
            Binning::Integer { max } => (x as usize).min(max),
        };
        assigned.push(Some(idx));
        let slot = &mut slots[idx];
        slot.count += 1;
        if slot.exemplar.as_deref().is_none_or(|e| row.graph6.as_str() < e) {
            slot.exemplar = Some(row.graph6.clone());
        }
    }
    let result = SlotResult {
        vary: q.vary,
        rt_mode: q.rt_mode,
        slots,
        total_matches: matches.len(),
        undefined,
    };
    Ok((result, assigned))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub query: FilterQuery,
}

fn preset(name: &str, description: &str, n: usize, vary: Statistic, rt_mode: RtMode, cs: &[(Statistic, f64, f64)]) -> Preset {
    Preset {
        name: name.into(),
        description: description.into(),
        query: FilterQuery {
            n,
            constraints: cs
                .iter()
                .map(|&(s, lo, hi)| Constraint::new(s, lo, hi).widened(PRESET_SLACK))
                .collect(),
            vary,
            rt_mode,
        },
    }
}

/// Named queries reproducing the fixed-statistics experiments on the n=9
/// atlas. The triangle-ratio bounds are read as triangle fractions; see
/// [`with_rt_mode`] to switch denominators.
pub fn preset_experiments() -> Vec<Preset> {
    use Statistic::*;
    vec![
        preset(
            "assortativity-variability",
            "Fix APL, density, GCC and triangle ratio; vary assortativity",
            9,
            R,
            RtMode::Triples,
            &[(Apl, 1.42, 1.47), (Den, 0.52, 0.57), (Gcc, 0.5, 0.6), (Rt, 0.15, 0.25)],
        ),
        preset(
            "gcc-variability",
            "Fix APL, diameter, both connectivities and assortativity; vary GCC",
            9,
            Gcc,
            RtMode::Triples,
            &[(Apl, 1.47, 1.69), (Diam, 3.0, 3.0), (Cv, 2.0, 2.0), (Ce, 2.0, 2.0), (R, -0.29, -0.22)],
        ),
        preset(
            "edge-connectivity-variability",
            "Fix SCC, ACC, assortativity and triangle ratio; vary edge connectivity",
            9,
            Ce,
            RtMode::Triples,
            &[(Scc, 0.75, 0.85), (Acc, 0.75, 0.8), (R, -0.3, -0.2), (Rt, 0.35, 0.45)],
        ),
        preset(
            "same-stats-different-graphs",
            "Fix edges, triangles, girth and GCC; vary node connectivity",
            9,
            Cv,
            RtMode::Triples,
            &[(M, 18.0, 18.0), (Triangles, 11.0, 11.0), (Girth, 3.0, 3.0), (Gcc, 0.515625, 0.515625)],
        ),
    ]
}

pub fn preset_by_name(name: &str) -> Option<Preset> {
    preset_experiments().into_iter().find(|p| p.name == name)
}

pub fn with_rt_mode(mut q: FilterQuery, mode: RtMode) -> FilterQuery {
    q.rt_mode = mode;
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_all;

    fn atlas(n: usize) -> Atlas {
        Atlas::from_graphs(n, &enumerate_all(n).unwrap()).unwrap()
    }

    #[test]
    fn query_examples() {
        let a = atlas(5);
        let all = query(&a, &FilterQuery::new(5, Statistic::R)).unwrap();
        assert_eq!(all.len(), 34);
        let empty = query(&a, &FilterQuery::new(5, Statistic::R).with(Constraint::point(Statistic::Den, 0.0))).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].stats.m, 0);
        let none = FilterQuery::new(5, Statistic::R)
            .with(Constraint::point(Statistic::Den, 0.0))
            .with(Constraint::new(Statistic::Gcc, 1e-12, 1.0));
        assert!(query(&a, &none).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_queries() {
        let a = atlas(4);
        let inverted = FilterQuery::new(4, Statistic::R).with(Constraint::new(Statistic::Gcc, 0.6, 0.2));
        assert!(matches!(query(&a, &inverted), Err(Error::BadQuery(_))));
        let overlap = FilterQuery::new(4, Statistic::Gcc).with(Constraint::new(Statistic::Gcc, 0.0, 1.0));
        assert!(matches!(query(&a, &overlap), Err(Error::BadQuery(_))));
        assert!(query(&a, &FilterQuery::new(5, Statistic::R)).is_err());
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(find(dir.path(), &FilterQuery::new(5, Statistic::R)), Err(Error::MissingAtlas(5))));
    }

    #[test]
    fn undefined_assortativity_never_matches() {
        let a = atlas(5);
        let q = FilterQuery::new(5, Statistic::Gcc).with(Constraint::new(Statistic::R, -1.0, 1.0));
        let hits = query(&a, &q).unwrap();
        assert!(hits.iter().all(|r| r.stats.r.is_some()));
        assert!(hits.len() < 34);
    }

    #[test]
    fn slots_partition_matches() {
        let a = atlas(6);
        for vary in Statistic::ALL {
            for mode in [RtMode::Pairs, RtMode::Triples] {
                let q = FilterQuery { rt_mode: mode, ..FilterQuery::new(6, vary) };
                let hits = query(&a, &q).unwrap();
                let res = slotize(&hits, &q, a.apl_ref).unwrap();
                let counted: usize = res.slots.iter().map(|s| s.count).sum();
                assert_eq!(counted + res.undefined, res.total_matches, "{vary}");
                assert!(res.slots.iter().all(|s| s.exemplar.is_some() == (s.count > 0)));
            }
        }
    }

    #[test]
    fn slot_layouts() {
        let a = atlas(5);
        let q = FilterQuery::new(5, Statistic::R);
        let res = slotize(&query(&a, &q).unwrap(), &q, a.apl_ref).unwrap();
        assert_eq!(res.slots.len(), 10);
        assert_eq!(res.slots[0].label, "[-1.0,-0.8)");
        assert_eq!(res.slots[9].label, "[0.8,1.0]");
        let q = FilterQuery::new(5, Statistic::Ce);
        let res = slotize(&query(&a, &q).unwrap(), &q, a.apl_ref).unwrap();
        assert_eq!(res.slots.iter().map(|s| s.label.as_str()).collect::<Vec<_>>(), ["0", "1", "2", "3", "4"]);
        assert_eq!(res.occupied_count(), 5);
        // boundaries go to the upper slot
        assert_eq!(continuous_index(0.3, 0.0, 0.1, 10), 3);
        assert_eq!(continuous_index(1.0, 0.0, 0.1, 10), 9);
        assert_eq!(continuous_index(-0.6, -1.0, 0.2, 10), 2);
    }

    #[test]
    fn exemplar_is_smallest_graph6() {
        let a = atlas(5);
        let q = FilterQuery::new(5, Statistic::Diam);
        let hits = query(&a, &q).unwrap();
        let res = slotize(&hits, &q, a.apl_ref).unwrap();
        for slot in res.occupied() {
            let smallest = hits
                .iter()
                .filter(|r| r.stats.diam as f64 == slot.lo)
                .map(|r| r.graph6.as_str())
                .min()
                .unwrap();
            assert_eq!(slot.exemplar.as_deref(), Some(smallest));
        }
    }

    #[test]
    fn presets_are_valid() {
        let presets = preset_experiments();
        assert_eq!(presets.len(), 4);
        for p in &presets {
            p.query.validate().unwrap();
        }
        let e2 = preset_by_name("gcc-variability").unwrap();
        let r = e2.query.constraints.iter().find(|c| c.stat == Statistic::R).unwrap();
        assert!(r.min < -0.29 && r.max > -0.22);
        assert!(preset_by_name("nope").is_none());
        let json = serde_json::to_string(&presets[0].query).unwrap();
        let back: FilterQuery = serde_json::from_str(&json).unwrap();
        assert_eq!(back, presets[0].query);
    }
}
