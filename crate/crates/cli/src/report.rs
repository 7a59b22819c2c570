//! Output records: JSON-lines for machine use, CSV for benchmark tables.

use serde::{Deserialize, Serialize};

use asian_lattice::{Diagnostics, ErrorKind, Method, PriceEstimate};

/// One pricing-run record. Deterministic for a fixed config (including
/// seed) except for `runtime_ns`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub inputs: serde_json::Value,
    pub price: f64,
    pub error_kind: ErrorKind,
    pub error_value: f64,
    pub confidence: Option<f64>,
    pub diagnostics: Diagnostics,
    pub runtime_ns: u64,
}

impl RunRecord {
    pub fn new(inputs: serde_json::Value, estimate: PriceEstimate, runtime_ns: u64) -> Self {
        Self {
            method: estimate.method,
            inputs,
            price: estimate.price,
            error_kind: estimate.error_kind,
            error_value: estimate.error_value,
            confidence: estimate.confidence,
            diagnostics: estimate.diagnostics,
            runtime_ns,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

pub const CSV_HEADER: &str = "method,n,k_or_n,sigma,price,error_bound,runtime_ns,seed";

/// One CSV row of the benchmark schema. `k_or_n` is the method's size
/// knob: bucket count for the tree methods, sample count for Monte Carlo,
/// paths enumerated for the exact oracle.
pub struct CsvRow {
    pub method: Method,
    pub n: u32,
    pub k_or_n: u64,
    pub sigma: f64,
    pub price: f64,
    pub error_bound: f64,
    pub runtime_ns: u64,
    pub seed: Option<u64>,
}

impl CsvRow {
    pub fn from_estimate(
        estimate: &PriceEstimate,
        n: u32,
        sigma: f64,
        runtime_ns: u64,
        seed: Option<u64>,
    ) -> Self {
        let k_or_n = match &estimate.diagnostics {
            Diagnostics::Exact { paths_enumerated } => *paths_enumerated,
            Diagnostics::StrongMc(d) => d.n_samples,
            Diagnostics::Btt(d) => d.k as u64,
            Diagnostics::RecBtt(d) => d.schedule.levels[0].buckets as u64,
            Diagnostics::Basket(_) => 0,
        };
        Self {
            method: estimate.method,
            n,
            k_or_n,
            sigma,
            price: estimate.price,
            error_bound: estimate.error_value,
            runtime_ns,
            seed,
        }
    }

    pub fn to_line(&self) -> String {
        let method = match self.method {
            Method::StrongMc => "mc",
            Method::Btt => "btt",
            Method::RecBtt => "recbtt",
            Method::BasketBtt => "basket",
            Method::Exact => "exact",
        };
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{method},{},{},{},{:.12},{:.6e},{},{seed}",
            self.n, self.k_or_n, self.sigma, self.price, self.error_bound, self.runtime_ns
        )
    }
}

/// Structured error record emitted on any failure.
#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            error: ErrorBody {
                kind: kind.to_string(),
                message: message.into(),
            },
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("error record serializes")
    }
}
