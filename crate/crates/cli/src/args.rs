//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tree edit distance, optimal edit scripts and co-optimal mapping counts.
///
/// Trees are given inline in bracket notation (`a(b(c,d),e)`), as `@path` to
/// read a file, or as `-` to read standard input. Files may hold bracket
/// notation or JSON.
#[derive(Debug, Parser)]
#[command(name = "treedist", version)]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all commands.
#[derive(Debug, Args)]
pub struct Options {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// JSON cost file; unit costs when omitted.
    #[arg(long, value_name = "PATH", global = true)]
    pub cost: Option<PathBuf>,
    /// Tolerance when comparing floating-point costs.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_eps, global = true)]
    pub eps: f64,
    /// Count with the memoised strategy instead of the recursive one.
    #[arg(long, global = true)]
    pub tabulated_counting: bool,
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Text,
    /// JSON.
    Json,
    /// Comma-separated values.
    Csv,
}

/// The operations.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the edit distance between two trees.
    Dist(Pair),
    /// Print an optimal edit script turning the first tree into the second.
    Script(Pair),
    /// Print an optimal mapping as `i j` pairs of pre-order positions.
    Map(Pair),
    /// Print the number of co-optimal mappings.
    Count(Pair),
    /// Print, for every node pair, how many co-optimal mappings contain it.
    Gamma {
        #[command(flatten)]
        pair: Pair,
        /// Print probabilities under a uniform choice of co-optimal mapping.
        #[arg(long)]
        normalize: bool,
        /// Decimal places for probabilities.
        #[arg(long, default_value_t = 6)]
        precision: usize,
    },
    /// Apply an edit script to a tree or forest and print the result.
    Apply {
        /// The tree or forest to edit.
        forest: String,
        /// The edit script.
        script: String,
    },
    /// Print the script that undoes a script applied to a tree or forest.
    Invert {
        /// The tree or forest the script applies to.
        forest: String,
        /// The edit script.
        script: String,
    },
    /// Check that a mapping between two trees is valid and report its cost.
    ValidateMap {
        #[command(flatten)]
        pair: Pair,
        /// The mapping (`i j` lines or a JSON array of pairs).
        mapping: String,
    },
    /// Print the pairwise distance matrix of several trees.
    Matrix {
        /// The trees, in row and column order.
        trees: Vec<String>,
        /// A file with one tree per non-empty line, appended to the list.
        #[arg(long, value_name = "PATH")]
        list: Option<PathBuf>,
    },
    /// Check the cost file for the properties the distance relies on.
    CheckCost {
        /// Trees whose labels are added to the alphabet that is checked.
        trees: Vec<String>,
    },
}

/// A source and a target tree.
#[derive(Debug, Args)]
pub struct Pair {
    /// The source tree.
    pub source: String,
    /// The target tree.
    pub target: String,
}

fn parse_eps(text: &str) -> Result<f64, String> {
    let eps: f64 = text.parse().map_err(|e| format!("{e}"))?;
    if eps.is_finite() && eps >= 0.0 {
        Ok(eps)
    } else {
        Err("must be a finite, non-negative number".into())
    }
}
