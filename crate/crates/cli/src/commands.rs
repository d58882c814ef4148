//! Command implementations. Each returns the text to print on success.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};
use treedist::{
    ted, ContractError, CostFunction, CountOptions, CountingStrategy, Forest, Mapping, Tree,
    TreeDistance,
};

use crate::args::{Command, Format, Options, Pair};
use crate::decimal::to_decimal;
use crate::error::CliError;
use crate::input;

/// Runs one command and renders its output.
pub fn run(command: &Command, options: &Options) -> Result<String, CliError> {
    match command {
        Command::Dist(pair) => {
            let state = solve(pair, options)?;
            Ok(match options.format {
                Format::Json => json!({ "distance": state.distance() }).to_string(),
                Format::Text | Format::Csv => state.distance().to_string(),
            })
        }
        Command::Script(pair) => {
            let script = solve(pair, options)?.script(options.eps);
            Ok(match options.format {
                Format::Json => script.to_json(),
                Format::Text | Format::Csv => script.to_string(),
            })
        }
        Command::Map(pair) => {
            let mapping = solve(pair, options)?.backtrace(options.eps);
            Ok(render_mapping(&mapping, options.format))
        }
        Command::Count(pair) => {
            let counts = solve(pair, options)?.count_cooptimal(count_options(options));
            Ok(match options.format {
                Format::Json => json!({ "total": counts.total().to_string() }).to_string(),
                Format::Text | Format::Csv => counts.total().to_string(),
            })
        }
        Command::Gamma {
            pair,
            normalize,
            precision,
        } => gamma(pair, *normalize, *precision, options),
        Command::Apply { forest, script } => {
            let forest = input::forest(forest)?;
            let result = input::script(script)?.apply(&forest);
            Ok(match options.format {
                Format::Json => forest_json(&result),
                Format::Text | Format::Csv => result.to_string(),
            })
        }
        Command::Invert { forest, script } => {
            let forest = input::forest(forest)?;
            let inverse = input::script(script)?.invert(&forest);
            Ok(match options.format {
                Format::Json => inverse.to_json(),
                Format::Text | Format::Csv => inverse.to_string(),
            })
        }
        Command::ValidateMap { pair, mapping } => validate_map(pair, mapping, options),
        Command::Matrix { trees, list } => matrix(trees, list.as_deref(), options),
        Command::CheckCost { trees } => check_cost(trees, options),
    }
}

fn count_options(options: &Options) -> CountOptions {
    CountOptions {
        eps: options.eps,
        strategy: if options.tabulated_counting {
            CountingStrategy::Tabulated
        } else {
            CountingStrategy::Recursive
        },
    }
}

/// Loads the costs and checks them over the labels of `trees`.
fn admissible_costs<'a>(
    options: &Options,
    trees: impl IntoIterator<Item = &'a Tree>,
) -> Result<CostFunction, CliError> {
    let costs = input::costs(options.cost.as_deref())?;
    if options.cost.is_some() {
        let alphabet: BTreeSet<&str> = trees.into_iter().flat_map(Tree::labels).collect();
        costs.check_admissible(&alphabet.into_iter().collect::<Vec<_>>())?;
    }
    Ok(costs)
}

fn solve(pair: &Pair, options: &Options) -> Result<TreeDistance, CliError> {
    let source = input::tree(&pair.source)?;
    let target = input::tree(&pair.target)?;
    let costs = admissible_costs(options, [&source, &target])?;
    Ok(ted(&source, &target, &costs)?)
}

fn render_mapping(mapping: &Mapping, format: Format) -> String {
    match format {
        Format::Json => mapping.to_json(),
        Format::Text => mapping.to_string(),
        Format::Csv => mapping
            .pairs()
            .map(|(i, j)| format!("{i},{j}"))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn forest_json(forest: &Forest) -> String {
    match forest.trees() {
        [tree] => tree.to_json(),
        _ => forest.to_json(),
    }
}

fn rows_to_text(rows: &[Vec<String>], separator: &str) -> String {
    rows.iter()
        .map(|row| row.join(separator))
        .collect::<Vec<_>>()
        .join("\n")
}

fn gamma(pair: &Pair, normalize: bool, precision: usize, options: &Options) -> Result<String, CliError> {
    let counts = solve(pair, options)?.count_cooptimal(count_options(options));
    let (rows, deletions, insertions): (Vec<Vec<String>>, Vec<String>, Vec<String>) = if normalize {
        let p = counts.probabilities()?;
        let show = |values: &[num_rational::BigRational]| {
            values.iter().map(|v| to_decimal(v, precision)).collect::<Vec<_>>()
        };
        (
            p.pairs.iter().map(|row| show(row)).collect(),
            show(&p.deletions),
            show(&p.insertions),
        )
    } else {
        let show = |values: &[BigUint]| values.iter().map(BigUint::to_string).collect::<Vec<_>>();
        (
            counts.gamma_rows().iter().map(|row| show(row)).collect(),
            show(&counts.deletion_counts()),
            show(&counts.insertion_counts()),
        )
    };
    Ok(match options.format {
        Format::Json => {
            let key = if normalize { "probabilities" } else { "gamma" };
            let mut object = serde_json::Map::new();
            object.insert("total".into(), Value::String(counts.total().to_string()));
            object.insert(key.into(), json!(rows));
            object.insert("deletions".into(), json!(deletions));
            object.insert("insertions".into(), json!(insertions));
            Value::Object(object).to_string()
        }
        Format::Csv => rows_to_text(&rows, ","),
        Format::Text => rows_to_text(&rows, " "),
    })
}

fn validate_map(pair: &Pair, mapping: &str, options: &Options) -> Result<String, CliError> {
    let source = input::tree(&pair.source)?;
    let target = input::tree(&pair.target)?;
    let mapping = input::mapping(mapping)?;
    let costs = admissible_costs(options, [&source, &target])?;
    let (x, y) = (Forest::from(source), Forest::from(target));
    mapping.validate(&x, &y)?;
    let cost = mapping.cost(&x, &y, &costs);
    Ok(match options.format {
        Format::Json => json!({ "valid": true, "pairs": mapping.len(), "cost": cost }).to_string(),
        Format::Text | Format::Csv => format!("valid mapping of {} pairs, cost {cost}", mapping.len()),
    })
}

fn matrix(arguments: &[String], list: Option<&std::path::Path>, options: &Options) -> Result<String, CliError> {
    let mut names: Vec<String> = arguments.to_vec();
    let mut trees = arguments
        .iter()
        .map(|a| input::tree(a))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = list {
        let text = input::read_file(path)?;
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let tree = Tree::parse_any(line).map_err(|error| CliError::Parse {
                context: format!("{} line {}", path.display(), number + 1),
                error,
            })?;
            names.push(line.to_string());
            trees.push(tree);
        }
    }
    if trees.is_empty() {
        return Err(ContractError::InvalidQuery("matrix needs at least one tree".into()).into());
    }
    let costs = admissible_costs(options, &trees)?;
    let cells: Vec<(usize, usize)> = (0..trees.len())
        .flat_map(|i| (0..trees.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| ted(&trees[i], &trees[j], &costs).map(|state| state.distance()))
        .collect::<Result<Vec<f64>, _>>()?;
    let rows: Vec<Vec<f64>> = values.chunks(trees.len()).map(<[f64]>::to_vec).collect();
    Ok(match options.format {
        Format::Json => json!({ "trees": names, "distances": rows }).to_string(),
        Format::Csv => {
            let mut out = String::from("tree");
            for name in &names {
                let _ = write!(out, ",{}", csv_field(name));
            }
            for (name, row) in names.iter().zip(&rows) {
                let _ = write!(out, "\n{}", csv_field(name));
                for value in row {
                    let _ = write!(out, ",{value}");
                }
            }
            out
        }
        Format::Text => rows_to_text(
            &rows
                .iter()
                .map(|row| row.iter().map(f64::to_string).collect())
                .collect::<Vec<_>>(),
            " ",
        ),
    })
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn check_cost(arguments: &[String], options: &Options) -> Result<String, CliError> {
    let costs = input::costs(options.cost.as_deref())?;
    let mut alphabet: BTreeSet<String> = costs.alphabet().into_iter().collect();
    for argument in arguments {
        let tree = input::tree(argument)?;
        alphabet.extend(tree.labels().into_iter().map(str::to_string));
    }
    let alphabet: Vec<String> = alphabet.into_iter().collect();
    let report = costs.verify_metric(&alphabet);
    let rendered = match options.format {
        Format::Json => json!({
            "alphabet": alphabet,
            "admissible": report.is_admissible(),
            "metric": report.is_metric(),
            "report": report,
        })
        .to_string(),
        Format::Text | Format::Csv => format!(
            "{}{}",
            report,
            if report.is_metric() {
                "metric"
            } else if report.is_admissible() {
                "admissible"
            } else {
                "not admissible"
            }
        ),
    };
    if report.is_admissible() {
        Ok(rendered)
    } else {
        // The report is still useful on standard output.
        println!("{rendered}");
        Err(treedist::CostError::NotAdmissible(
            "required properties fail over the observed alphabet".into(),
        )
        .into())
    }
}
