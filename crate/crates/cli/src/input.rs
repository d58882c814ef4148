//! Reading trees, scripts, mappings and cost files from arguments.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use treedist::{CostFunction, Forest, Mapping, ParseError, Script, Tree};

use crate::error::CliError;

/// Resolves an argument to text: `@path` reads a file, `-` reads standard
/// input and anything else is taken literally.
pub fn resolve(argument: &str) -> Result<String, CliError> {
    if argument == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|error| CliError::Read {
                source_name: "stdin".into(),
                error,
            })?;
        Ok(text)
    } else if let Some(path) = argument.strip_prefix('@') {
        read_file(Path::new(path))
    } else {
        Ok(argument.to_string())
    }
}

/// Reads a whole file.
pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|error| CliError::Read {
        source_name: path.display().to_string(),
        error,
    })
}

fn parsed<T>(what: &str, argument: &str, result: Result<T, ParseError>) -> Result<T, CliError> {
    result.map_err(|error| CliError::Parse {
        context: format!("{what} {}", describe(argument)),
        error,
    })
}

/// A short name for an argument in diagnostics.
pub fn describe(argument: &str) -> String {
    match argument {
        "-" => "from stdin".into(),
        a if a.starts_with('@') => format!("in {}", &a[1..]),
        a => format!("{a:?}"),
    }
}

/// A tree in bracket notation or JSON.
pub fn tree(argument: &str) -> Result<Tree, CliError> {
    let text = resolve(argument)?;
    parsed("tree", argument, Tree::parse_any(&text))
}

/// A forest in bracket notation, or a JSON tree or array of trees.
pub fn forest(argument: &str) -> Result<Forest, CliError> {
    let text = resolve(argument)?;
    let result = match text.trim_start().chars().next() {
        Some('{') => Tree::from_json(&text).map(Forest::from),
        Some('[') => Forest::from_json(&text),
        _ => Forest::parse(&text),
    };
    parsed("forest", argument, result)
}

/// An edit script in text or JSON form.
pub fn script(argument: &str) -> Result<Script, CliError> {
    let text = resolve(argument)?;
    parsed("script", argument, Script::parse_any(&text))
}

/// A mapping in text or JSON form.
pub fn mapping(argument: &str) -> Result<Mapping, CliError> {
    let text = resolve(argument)?;
    parsed("mapping", argument, Mapping::parse_any(&text))
}

/// The cost function from `path`, or unit costs.
pub fn costs(path: Option<&Path>) -> Result<CostFunction, CliError> {
    match path {
        None => Ok(CostFunction::unit()),
        Some(path) => Ok(CostFunction::from_json(&read_file(path)?)?),
    }
}
