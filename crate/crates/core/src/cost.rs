//! Cost functions over node labels and the gap symbol.
//!
//! A [`CostFunction`] has default replacement, deletion and insertion costs and
//! optional per-pair overrides. A lookup returns the override if present, else
//! zero for identical labels, else the matching default. The gap symbol is
//! written `-` in cost files and represented as `None` in the API.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CostError;
use crate::tree::{PreorderIndex, GAP};

/// A label or the gap symbol (`None`).
pub type Symbol<'a> = Option<&'a str>;

/// Default costs used when no override applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefaultCosts {
    /// Cost of relabelling a node with a different label.
    pub rep: f64,
    /// Cost of deleting a node.
    pub del: f64,
    /// Cost of inserting a node.
    pub ins: f64,
}

impl Default for DefaultCosts {
    fn default() -> Self {
        DefaultCosts {
            rep: 1.0,
            del: 1.0,
            ins: 1.0,
        }
    }
}

/// Pairwise cost function on labels extended with the gap symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    defaults: DefaultCosts,
    // from -> to -> cost, with the gap spelled `-`.
    overrides: HashMap<String, HashMap<String, f64>>,
}

impl Default for CostFunction {
    fn default() -> Self {
        Self::unit()
    }
}

/// One entry of a cost file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    /// Source symbol (`-` for the gap).
    pub from: String,
    /// Target symbol (`-` for the gap).
    pub to: String,
    /// The cost.
    pub cost: f64,
}

/// The JSON layout of a cost file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostFile {
    /// Default costs.
    #[serde(default)]
    pub default: DefaultCosts,
    /// Whether every entry also defines its reverse pair.
    #[serde(default)]
    pub symmetric: bool,
    /// Per-pair overrides.
    #[serde(default)]
    pub entries: Vec<CostEntry>,
}

fn spell(symbol: Symbol<'_>) -> &str {
    symbol.unwrap_or(GAP)
}

fn check_finite(from: Symbol<'_>, to: Symbol<'_>, value: f64) -> Result<(), CostError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CostError::NotFinite {
            from: spell(from).to_string(),
            to: spell(to).to_string(),
            value,
        })
    }
}

impl CostFunction {
    /// Unit costs: every replacement of distinct labels, deletion and insertion costs 1.
    pub fn unit() -> Self {
        CostFunction {
            defaults: DefaultCosts::default(),
            overrides: HashMap::new(),
        }
    }

    /// A cost function with the given defaults and no overrides.
    pub fn new(defaults: DefaultCosts) -> Result<Self, CostError> {
        check_finite(Some("*"), Some("*"), defaults.rep)?;
        check_finite(Some("*"), None, defaults.del)?;
        check_finite(None, Some("*"), defaults.ins)?;
        Ok(CostFunction {
            defaults,
            overrides: HashMap::new(),
        })
    }

    /// The default costs.
    pub fn defaults(&self) -> DefaultCosts {
        self.defaults
    }

    /// Sets the cost of the pair `(from, to)`.
    pub fn set(&mut self, from: Symbol<'_>, to: Symbol<'_>, cost: f64) -> Result<(), CostError> {
        if from.is_none() && to.is_none() {
            return Err(CostError::GapToGap);
        }
        check_finite(from, to, cost)?;
        self.overrides
            .entry(spell(from).to_string())
            .or_default()
            .insert(spell(to).to_string(), cost);
        Ok(())
    }

    /// Builder form of [`CostFunction::set`].
    pub fn with(mut self, from: Symbol<'_>, to: Symbol<'_>, cost: f64) -> Result<Self, CostError> {
        self.set(from, to, cost)?;
        Ok(self)
    }

    /// Cost of the pair `(from, to)`; gap against gap is an error.
    pub fn cost(&self, from: Symbol<'_>, to: Symbol<'_>) -> Result<f64, CostError> {
        match (from, to) {
            (None, None) => Err(CostError::GapToGap),
            (Some(a), Some(b)) => Ok(self.rep(a, b)),
            (Some(a), None) => Ok(self.del(a)),
            (None, Some(b)) => Ok(self.ins(b)),
        }
    }

    fn lookup(&self, from: &str, to: &str) -> Option<f64> {
        self.overrides.get(from)?.get(to).copied()
    }

    /// Cost of relabelling `from` to `to`.
    pub fn rep(&self, from: &str, to: &str) -> f64 {
        match self.lookup(from, to) {
            Some(c) => c,
            None if from == to => 0.0,
            None => self.defaults.rep,
        }
    }

    /// Cost of deleting a node labelled `label`.
    pub fn del(&self, label: &str) -> f64 {
        self.lookup(label, GAP).unwrap_or(self.defaults.del)
    }

    /// Cost of inserting a node labelled `label`.
    pub fn ins(&self, label: &str) -> f64 {
        self.lookup(GAP, label).unwrap_or(self.defaults.ins)
    }

    /// Labels mentioned by overrides (the gap excluded), sorted.
    pub fn alphabet(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .overrides
            .iter()
            .flat_map(|(from, row)| std::iter::once(from).chain(row.keys()))
            .filter(|l| l.as_str() != GAP)
            .cloned()
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Parses a cost file.
    pub fn from_json(text: &str) -> Result<Self, CostError> {
        let file: CostFile =
            serde_json::from_str(text).map_err(|e| CostError::Json(e.to_string()))?;
        Self::from_file(&file)
    }

    /// Builds a cost function from a parsed cost file.
    ///
    /// With `symmetric` set, each entry also defines its reverse pair unless
    /// the file gives that pair explicitly.
    pub fn from_file(file: &CostFile) -> Result<Self, CostError> {
        let mut costs = CostFunction::new(file.default)?;
        let symbol = |s: &str| (s != GAP).then(|| s.to_string());
        let explicit: std::collections::HashSet<(&str, &str)> = file
            .entries
            .iter()
            .map(|e| (e.from.as_str(), e.to.as_str()))
            .collect();
        for entry in &file.entries {
            let from = symbol(&entry.from);
            let to = symbol(&entry.to);
            costs.set(from.as_deref(), to.as_deref(), entry.cost)?;
            if file.symmetric && !explicit.contains(&(entry.to.as_str(), entry.from.as_str())) {
                costs.set(to.as_deref(), from.as_deref(), entry.cost)?;
            }
        }
        Ok(costs)
    }

    /// Serializes to the cost file layout, entries sorted.
    pub fn to_file(&self) -> CostFile {
        let mut entries: Vec<CostEntry> = self
            .overrides
            .iter()
            .flat_map(|(from, row)| {
                row.iter().map(move |(to, &cost)| CostEntry {
                    from: from.clone(),
                    to: to.clone(),
                    cost,
                })
            })
            .collect();
        entries.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        CostFile {
            default: self.defaults,
            symmetric: false,
            entries,
        }
    }

    /// Serializes to a cost file.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("cost files always serialize")
    }

    /// Checks the metric properties over `alphabet` extended with the gap.
    ///
    /// The cost function's own [`alphabet`](Self::alphabet) is always
    /// included, so overrides are checked even when not listed.
    pub fn verify_metric<S: AsRef<str>>(&self, alphabet: &[S]) -> MetricReport {
        let mut labels: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        labels.extend(self.alphabet());
        labels.sort();
        labels.dedup();
        labels.retain(|l| l != GAP);
        let mut symbols: Vec<Symbol<'_>> = labels.iter().map(|l| Some(l.as_str())).collect();
        symbols.push(None);
        let cost = |a: Symbol<'_>, b: Symbol<'_>| self.cost(a, b).ok();
        let mut report = MetricReport::default();

        for &a in &symbols {
            for &b in &symbols {
                let Some(ab) = cost(a, b) else { continue };
                if ab < 0.0 {
                    report
                        .non_negativity
                        .get_or_insert_with(|| Violation::new(&[a, b], format!("c({}, {}) = {ab} < 0", spell(a), spell(b))));
                }
                if a == b && ab != 0.0 {
                    report
                        .self_equality
                        .get_or_insert_with(|| Violation::new(&[a, b], format!("c({}, {}) = {ab} != 0", spell(a), spell(b))));
                }
                if a != b && ab <= 0.0 {
                    report
                        .discernibility
                        .get_or_insert_with(|| Violation::new(&[a, b], format!("c({}, {}) = {ab} <= 0", spell(a), spell(b))));
                }
                if let Some(ba) = cost(b, a) {
                    if ab != ba {
                        report.symmetry.get_or_insert_with(|| {
                            let (sa, sb) = (spell(a), spell(b));
                            Violation::new(&[a, b], format!("c({sa}, {sb}) = {ab} but c({sb}, {sa}) = {ba}"))
                        });
                    }
                }
            }
        }
        'triangle: for &a in &symbols {
            for &b in &symbols {
                for &c in &symbols {
                    let (Some(ac), Some(ab), Some(bc)) = (cost(a, c), cost(a, b), cost(b, c)) else {
                        continue;
                    };
                    if ac > ab + bc {
                        report.triangle = Some(Violation::new(
                            &[a, b, c],
                            format!(
                                "c({sa}, {sc}) = {ac} > c({sa}, {sb}) + c({sb}, {sc}) = {}",
                                ab + bc,
                                sa = spell(a),
                                sb = spell(b),
                                sc = spell(c),
                            ),
                        ));
                        break 'triangle;
                    }
                }
            }
        }
        report
    }

    /// Checks the properties the dynamic program needs (non-negativity,
    /// self-equality and the triangle inequality) over `alphabet`.
    pub fn check_admissible<S: AsRef<str>>(&self, alphabet: &[S]) -> Result<(), CostError> {
        let report = self.verify_metric(alphabet);
        if report.is_admissible() {
            Ok(())
        } else {
            let failures: Vec<String> = report
                .properties()
                .into_iter()
                .filter_map(|(name, violation, required)| {
                    violation.filter(|_| required).map(|v| format!("{name} fails at {v}"))
                })
                .collect();
            Err(CostError::NotAdmissible(failures.join("; ")))
        }
    }
}

/// The first violation found for one metric property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// The offending symbols (`-` for the gap).
    pub symbols: Vec<String>,
    /// Human-readable description.
    pub detail: String,
}

impl Violation {
    fn new(symbols: &[Symbol<'_>], detail: String) -> Self {
        Violation {
            symbols: symbols.iter().map(|s| spell(*s).to_string()).collect(),
            detail,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}): {}", self.symbols.join(", "), self.detail)
    }
}

/// Outcome of [`CostFunction::verify_metric`].
///
/// Non-negativity, self-equality and the triangle inequality are required by
/// the distance computation; discernibility and symmetry are reported as
/// warnings only.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricReport {
    /// `c(a, b) >= 0`.
    pub non_negativity: Option<Violation>,
    /// `c(a, a) = 0`.
    pub self_equality: Option<Violation>,
    /// `c(a, b) > 0` for `a != b`.
    pub discernibility: Option<Violation>,
    /// `c(a, b) = c(b, a)`.
    pub symmetry: Option<Violation>,
    /// `c(a, c) <= c(a, b) + c(b, c)`.
    pub triangle: Option<Violation>,
}

impl MetricReport {
    /// Whether the properties required by the distance computation hold.
    pub fn is_admissible(&self) -> bool {
        self.non_negativity.is_none() && self.self_equality.is_none() && self.triangle.is_none()
    }

    /// Whether all five metric properties hold.
    pub fn is_metric(&self) -> bool {
        self.is_admissible() && self.discernibility.is_none() && self.symmetry.is_none()
    }

    /// `(name, violation, required)` for each property.
    pub fn properties(&self) -> [(&'static str, Option<&Violation>, bool); 5] {
        [
            ("non-negativity", self.non_negativity.as_ref(), true),
            ("self-equality", self.self_equality.as_ref(), true),
            ("discernibility", self.discernibility.as_ref(), false),
            ("symmetry", self.symmetry.as_ref(), false),
            ("triangle inequality", self.triangle.as_ref(), true),
        ]
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, violation, required) in self.properties() {
            match violation {
                None => writeln!(f, "{name}: ok")?,
                Some(v) if required => writeln!(f, "{name}: FAILED at {v}")?,
                Some(v) => writeln!(f, "{name}: warning at {v}")?,
            }
        }
        Ok(())
    }
}

/// Costs resolved for every node and node pair of two indexed forests.
#[derive(Debug, Clone)]
pub(crate) struct NodeCosts {
    del: Vec<f64>,
    ins: Vec<f64>,
    rep: Vec<f64>,
    cols: usize,
}

impl NodeCosts {
    pub(crate) fn new(x: &PreorderIndex, y: &PreorderIndex, costs: &CostFunction) -> Self {
        let del = std::iter::once(0.0)
            .chain(x.labels().iter().map(|l| costs.del(l)))
            .collect();
        let ins = std::iter::once(0.0)
            .chain(y.labels().iter().map(|l| costs.ins(l)))
            .collect();
        let mut rep = Vec::with_capacity(x.len() * y.len());
        for a in x.labels() {
            for b in y.labels() {
                rep.push(costs.rep(a, b));
            }
        }
        NodeCosts {
            del,
            ins,
            rep,
            cols: y.len(),
        }
    }

    /// Cost of deleting node `i` of the source.
    #[inline]
    pub(crate) fn del(&self, i: usize) -> f64 {
        self.del[i]
    }

    /// Cost of inserting node `j` of the target.
    #[inline]
    pub(crate) fn ins(&self, j: usize) -> f64 {
        self.ins[j]
    }

    /// Cost of replacing source node `i` with target node `j`.
    #[inline]
    pub(crate) fn rep(&self, i: usize, j: usize) -> f64 {
        self.rep[(i - 1) * self.cols + (j - 1)]
    }
}
