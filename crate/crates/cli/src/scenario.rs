//! Scenario files: a committee, the mechanisms to study, an optional menu of
//! experiments and numerical settings, stored as JSON.

use persuade_lab::lab::ExperimentMenu;
use persuade_lab::mechanism::full_catalog;
use persuade_lab::{
    make_catalog_mechanism, BeliefDistribution, CatalogKind, Committee, CostKernel, MemberSpec,
    VotingMechanism, DEFAULT_GRID_N,
};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}, field `{field}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },

    #[error("invalid scenario: {0}")]
    Validation(String),
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}

fn default_tolerance() -> f64 {
    1e-9
}

/// Cost kernel as written in a scenario. A composite kernel without `u`
/// uses the member's own `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelEntry {
    Quadratic {
        alpha: f64,
    },
    ScaledEntropy {
        alpha: f64,
    },
    CompositeCounterexample {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<f64>,
    },
    Tabulated {
        points: Vec<(f64, f64)>,
    },
}

impl KernelEntry {
    pub fn resolve(&self, member_u: f64) -> CostKernel {
        match self {
            KernelEntry::Quadratic { alpha } => CostKernel::Quadratic { alpha: *alpha },
            KernelEntry::ScaledEntropy { alpha } => CostKernel::ScaledEntropy { alpha: *alpha },
            KernelEntry::CompositeCounterexample { u } => CostKernel::CompositeCounterexample {
                u: u.unwrap_or(member_u),
            },
            KernelEntry::Tabulated { points } => CostKernel::Tabulated {
                points: points.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberEntry {
    pub u: f64,
    pub kernel: KernelEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub profile: Vec<String>,
    pub p: f64,
}

/// A catalog mechanism (`{"kind": ...}`) or an explicit decision table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MechanismEntry {
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        /// Vote labels per member; inferred from the rows in order of
        /// first appearance when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vote_sets: Option<Vec<Vec<String>>>,
        table: Vec<TableRow>,
    },
    Catalog(CatalogKind),
}

/// The scenario exactly as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub prior: f64,
    pub members: Vec<MemberEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mechanisms: Vec<MechanismEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub menu: Option<Vec<BeliefDistribution>>,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub file: ScenarioFile,
    pub committee: Committee,
    /// Mechanisms listed in the file, or the full binary catalog when none are.
    pub mechanisms: Vec<VotingMechanism>,
    pub menu: Option<ExperimentMenu>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.file == other.file
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    parse_scenario_str(&text, &id)
}

pub fn parse_scenario_str(text: &str, id: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    Scenario::from_file(file, id)
}

impl Scenario {
    pub fn from_file(file: ScenarioFile, id: &str) -> Result<Self, ScenarioError> {
        let invalid = |msg: String| ScenarioError::Validation(msg);
        if file.grid_n < 3 {
            return Err(invalid(format!(
                "grid_n = {} (need at least 3)",
                file.grid_n
            )));
        }
        if !(file.tolerance.is_finite() && file.tolerance > 0.0) {
            return Err(invalid(format!(
                "tolerance = {} (must be positive)",
                file.tolerance
            )));
        }
        let members = file
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                MemberSpec::new(m.u, m.kernel.resolve(m.u))
                    .map_err(|e| invalid(format!("members[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let committee = Committee::new(members, file.prior)
            .map_err(|e| invalid(format!("prior/members: {e}")))?;
        let n = committee.len();

        let mechanisms = if file.mechanisms.is_empty() {
            full_catalog(n)
                .iter()
                .map(|k| make_catalog_mechanism(k, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(e.to_string()))?
        } else {
            file.mechanisms
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    build_mechanism(m, n).map_err(|e| invalid(format!("mechanisms[{i}]: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?
        };

        let menu = match &file.menu {
            None => None,
            Some(entries) => Some(
                ExperimentMenu::new(entries.clone(), committee.prior())
                    .map_err(|e| invalid(format!("menu: {e}")))?,
            ),
        };

        Ok(Scenario {
            id: id.to_string(),
            file,
            committee,
            mechanisms,
            menu,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("scenario serializes")
    }

    /// The same scenario with one parameter replaced.
    ///
    /// `prior`, `uN` and `alphaN` are recognised, with members numbered from 1.
    pub fn with_param(&self, param: &str, value: f64) -> Result<Scenario, ScenarioError> {
        let mut file = self.file.clone();
        let bad = || ScenarioError::Validation(format!("unknown parameter `{param}`"));
        if param == "prior" {
            // Menu entries are tied to the old prior.
            file.prior = value;
            file.menu = None;
        } else if let Some(idx) = param.strip_prefix('u') {
            let i = member_index(idx, file.members.len()).ok_or_else(bad)?;
            file.members[i].u = value;
        } else if let Some(idx) = param.strip_prefix("alpha") {
            let i = member_index(idx, file.members.len()).ok_or_else(bad)?;
            match &mut file.members[i].kernel {
                KernelEntry::Quadratic { alpha } | KernelEntry::ScaledEntropy { alpha } => {
                    *alpha = value
                }
                _ => {
                    return Err(ScenarioError::Validation(format!(
                        "member {} has no alpha parameter",
                        i + 1
                    )))
                }
            }
        } else {
            return Err(bad());
        }
        Scenario::from_file(file, &self.id)
    }
}

fn member_index(s: &str, n: usize) -> Option<usize> {
    let i: usize = s.parse().ok()?;
    (1..=n).contains(&i).then(|| i - 1)
}

fn build_mechanism(entry: &MechanismEntry, n: usize) -> Result<VotingMechanism, String> {
    let mech = match entry {
        MechanismEntry::Catalog(kind) => {
            make_catalog_mechanism(kind, n).map_err(|e| e.to_string())?
        }
        MechanismEntry::Table {
            name,
            vote_sets,
            table,
        } => {
            let vote_sets = match vote_sets {
                Some(v) => v.clone(),
                None => infer_vote_sets(table),
            };
            let rows: Vec<(Vec<String>, f64)> =
                table.iter().map(|r| (r.profile.clone(), r.p)).collect();
            let name = name.clone().unwrap_or_else(|| "table".to_string());
            VotingMechanism::from_rows(name, vote_sets, &rows).map_err(|e| e.to_string())?
        }
    };
    if mech.n_members() != n {
        return Err(format!(
            "{} voters for a committee of {n}",
            mech.n_members()
        ));
    }
    mech.validate().map_err(|e| e.to_string())?;
    Ok(mech)
}

fn infer_vote_sets(rows: &[TableRow]) -> Vec<Vec<String>> {
    let width = rows.first().map_or(0, |r| r.profile.len());
    let mut sets: Vec<Vec<String>> = vec![Vec::new(); width];
    for row in rows {
        for (set, label) in sets.iter_mut().zip(&row.profile) {
            if !set.contains(label) {
                set.push(label.clone());
            }
        }
    }
    sets
}
