use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Names of the per-graph statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    N,
    M,
    Triangles,
    Girth,
    Acc,
    Gcc,
    Scc,
    Apl,
    R,
    Diam,
    Den,
    Rt,
    Cv,
    Ce,
}

impl Statistic {
    /// The ten summary statistics compared across graph sets, in report
    /// order.
    pub const SUMMARY: [Statistic; 10] = [
        Statistic::Acc,
        Statistic::Gcc,
        Statistic::Scc,
        Statistic::Apl,
        Statistic::R,
        Statistic::Diam,
        Statistic::Den,
        Statistic::Rt,
        Statistic::Cv,
        Statistic::Ce,
    ];

    pub const ALL: [Statistic; 14] = [
        Statistic::N,
        Statistic::M,
        Statistic::Triangles,
        Statistic::Girth,
        Statistic::Acc,
        Statistic::Gcc,
        Statistic::Scc,
        Statistic::Apl,
        Statistic::R,
        Statistic::Diam,
        Statistic::Den,
        Statistic::Rt,
        Statistic::Cv,
        Statistic::Ce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::N => "n",
            Statistic::M => "m",
            Statistic::Triangles => "triangles",
            Statistic::Girth => "girth",
            Statistic::Acc => "acc",
            Statistic::Gcc => "gcc",
            Statistic::Scc => "scc",
            Statistic::Apl => "apl",
            Statistic::R => "r",
            Statistic::Diam => "diam",
            Statistic::Den => "den",
            Statistic::Rt => "rt",
            Statistic::Cv => "cv",
            Statistic::Ce => "ce",
        }
    }

    /// Integer-valued statistics.
    pub fn is_integral(self) -> bool {
        matches!(
            self,
            Statistic::N
                | Statistic::M
                | Statistic::Triangles
                | Statistic::Girth
                | Statistic::Diam
                | Statistic::Cv
                | Statistic::Ce
        )
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.trim().to_ascii_lowercase();
        let stat = match lower.as_str() {
            "n" | "order" | "vertices" => Statistic::N,
            "m" | "e" | "edges" | "size" => Statistic::M,
            "triangles" | "t" => Statistic::Triangles,
            "girth" => Statistic::Girth,
            "acc" => Statistic::Acc,
            "gcc" | "transitivity" => Statistic::Gcc,
            "scc" => Statistic::Scc,
            "apl" => Statistic::Apl,
            "r" | "assortativity" => Statistic::R,
            "diam" | "diameter" => Statistic::Diam,
            "den" | "density" => Statistic::Den,
            "rt" => Statistic::Rt,
            "cv" | "node-connectivity" => Statistic::Cv,
            "ce" | "edge-connectivity" => Statistic::Ce,
            _ => return Err(Error::UnknownStatistic(s.to_string())),
        };
        Ok(stat)
    }
}
