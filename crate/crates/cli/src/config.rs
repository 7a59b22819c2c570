//! Flat `key = value` config parsing.
//!
//! One key per line, `#` starts a comment, blank lines ignored. A `[stock]`
//! header opens a per-stock block for baskets; keys before the first header
//! are global. Global market keys serve as defaults for stock blocks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use asian_lattice::rec_btt::BaseSolver;
use asian_lattice::tree_model::MarketParams;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Exact,
    Mc,
    Btt,
    RecBtt,
    Basket,
}

/// One parsed pricing request.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub method: MethodKind,
    pub n: u32,
    pub strike: f64,
    /// One entry for a single-stock run; one per `[stock]` block otherwise.
    pub stocks: Vec<MarketParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_solver: Option<BaseSolver>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
}

/// Raw sections: the global key map plus one map per `[stock]` block.
#[derive(Debug, Default, Clone)]
pub struct Sections {
    pub global: BTreeMap<String, String>,
    pub stocks: Vec<BTreeMap<String, String>>,
    /// `[cell]` blocks, used by bench grids.
    pub cells: Vec<BTreeMap<String, String>>,
}

pub fn parse_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut out = Sections::default();
    enum Target {
        Global,
        Stock(usize),
        Cell(usize),
    }
    let mut target = Target::Global;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .ok_or_else(|| err(format!("line {}: unterminated section header", lineno + 1)))?
                .trim();
            match name {
                "stock" => {
                    out.stocks.push(BTreeMap::new());
                    target = Target::Stock(out.stocks.len() - 1);
                }
                "cell" => {
                    out.cells.push(BTreeMap::new());
                    target = Target::Cell(out.cells.len() - 1);
                }
                other => return Err(err(format!("line {}: unknown section [{other}]", lineno + 1))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(err(format!("line {}: empty value for {key}", lineno + 1)));
        }
        let map = match target {
            Target::Global => &mut out.global,
            Target::Stock(i) => &mut out.stocks[i],
            Target::Cell(i) => &mut out.cells[i],
        };
        if map.insert(key.clone(), value).is_some() {
            return Err(err(format!("line {}: duplicate key {key}", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, ConfigError> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| err(format!("{key}: not a number: {v}")))
        })
        .transpose()
}

pub fn get_u64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<u64>, ConfigError> {
    map.get(key)
        .map(|v| {
            v.parse::<u64>()
                .map_err(|_| err(format!("{key}: not an integer: {v}")))
        })
        .transpose()
}

pub fn parse_base_solver(v: &str) -> Result<BaseSolver, ConfigError> {
    match v {
        "btt" => Ok(BaseSolver::Btt),
        "exact" => Ok(BaseSolver::Exact),
        "mc" => Ok(BaseSolver::StrongMc),
        other => Err(err(format!("base_solver: expected btt|exact|mc, got {other}"))),
    }
}

pub fn parse_method(v: &str) -> Result<MethodKind, ConfigError> {
    match v {
        "exact" => Ok(MethodKind::Exact),
        "mc" => Ok(MethodKind::Mc),
        "btt" => Ok(MethodKind::Btt),
        "recbtt" => Ok(MethodKind::RecBtt),
        "basket" => Ok(MethodKind::Basket),
        other => Err(err(format!(
            "method: expected exact|mc|btt|recbtt|basket, got {other}"
        ))),
    }
}

fn stock_from(
    map: &BTreeMap<String, String>,
    global: &BTreeMap<String, String>,
    n: u32,
) -> Result<MarketParams, ConfigError> {
    let pick = |key: &str| -> Result<Option<f64>, ConfigError> {
        match get_f64(map, key)? {
            Some(v) => Ok(Some(v)),
            None => get_f64(global, key),
        }
    };
    let s0 = pick("s0")?.ok_or_else(|| err("missing s0"))?;
    let sigma = pick("sigma")?.ok_or_else(|| err("missing sigma"))?;
    let r = pick("r")?.ok_or_else(|| err("missing r"))?;
    if let Some(stock_n) = get_u64(map, "n")? {
        if stock_n as u32 != n {
            return Err(err(format!(
                "stock n = {stock_n} disagrees with the shared n = {n}"
            )));
        }
    }
    // structural validation happens later via MarketParams::new; carry the
    // raw values so module errors surface with their own exit code
    Ok(MarketParams { s0, sigma, r, n })
}

/// Builds a [`RunConfig`] for the `price` subcommand.
pub fn run_config(sections: &Sections) -> Result<RunConfig, ConfigError> {
    if !sections.cells.is_empty() {
        return Err(err("[cell] sections belong to bench grids, not price configs"));
    }
    let g = &sections.global;
    let method = parse_method(
        g.get("method")
            .ok_or_else(|| err("missing method"))?
            .as_str(),
    )?;
    let n = get_u64(g, "n")?.ok_or_else(|| err("missing n"))? as u32;
    let strike = get_f64(g, "strike")?.ok_or_else(|| err("missing strike"))?;

    let stocks: Vec<MarketParams> = if sections.stocks.is_empty() {
        vec![stock_from(&BTreeMap::new(), g, n)?]
    } else {
        sections
            .stocks
            .iter()
            .map(|m| stock_from(m, g, n))
            .collect::<Result<_, _>>()?
    };

    let cfg = RunConfig {
        method,
        n,
        strike,
        stocks,
        epsilon: get_f64(g, "epsilon")?,
        delta: get_f64(g, "delta")?,
        seed: get_u64(g, "seed")?,
        c1: get_f64(g, "c1")?,
        c2: get_f64(g, "c2")?,
        k: get_u64(g, "k")?.map(|v| v as usize),
        k0: get_u64(g, "k0")?.map(|v| v as usize),
        big_r: get_u64(g, "R")?.map(|v| v as u32),
        base_solver: g
            .get("base_solver")
            .map(|v| parse_base_solver(v))
            .transpose()?,
        n_max: get_u64(g, "n_max")?.map(|v| v as u32),
    };

    if cfg.method == MethodKind::Mc && cfg.seed.is_none() {
        return Err(err("mc mode requires an explicit seed (no wall-clock seeding)"));
    }
    if matches!(cfg.method, MethodKind::Btt | MethodKind::RecBtt) && cfg.stocks.len() > 1 {
        return Err(err("btt/recbtt price a single stock; use method = basket"));
    }
    Ok(cfg)
}
