//! The machine-readable output document and its two renderings.
//!
//! JSON is the contract: field order is fixed, rationals are `p/q` in
//! lowest terms, matrices are symmetric with a `0/1` diagonal. The table
//! format renders the same payload for humans.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Serialize)]
pub struct OutputDocument {
    pub mode: &'static str,
    pub payload: Payload,
    #[serde(skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Info {
        state_count: usize,
        label_count: usize,
        transition_count: usize,
        size_arith: u64,
        size_bits: u64,
        theta: Vec<String>,
    },
    Matrix {
        states: Vec<String>,
        matrix: Vec<Vec<String>>,
    },
    Pair {
        pair: [String; 2],
        distance: String,
    },
    Distance {
        distance: String,
    },
    Blocks {
        blocks: Vec<Vec<String>>,
    },
}

#[derive(Debug, Default, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.gamma.is_none()
            && self.epsilon.is_none()
            && self.denominator_bound.is_none()
            && self.iterations.is_none()
            && self.converged.is_none()
    }
}

impl OutputDocument {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                serde_json::to_string_pretty(self).expect("output serialisation cannot fail")
            }
            Format::Table => self.render_table(),
        }
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        match &self.payload {
            Payload::Info {
                state_count,
                label_count,
                transition_count,
                size_arith,
                size_bits,
                theta,
            } => {
                out.push_str(&format!("states:      {state_count}\n"));
                out.push_str(&format!("labels:      {label_count}\n"));
                out.push_str(&format!("transitions: {transition_count}\n"));
                out.push_str(&format!("|M|:         {size_arith}\n"));
                out.push_str(&format!("||M||:       {size_bits}\n"));
                out.push_str(&format!("Theta:       {{{}}}\n", theta.join(", ")));
            }
            Payload::Matrix { states, matrix } => {
                let width = states
                    .iter()
                    .map(String::len)
                    .chain(matrix.iter().flatten().map(String::len))
                    .max()
                    .unwrap_or(1);
                out.push_str(&format!("{:width$}", ""));
                for name in states {
                    out.push_str(&format!(" {name:>width$}"));
                }
                out.push('\n');
                for (name, row) in states.iter().zip(matrix) {
                    out.push_str(&format!("{name:>width$}"));
                    for value in row {
                        out.push_str(&format!(" {value:>width$}"));
                    }
                    out.push('\n');
                }
            }
            Payload::Pair { pair, distance } => {
                out.push_str(&format!("d({}, {}) = {distance}\n", pair[0], pair[1]));
            }
            Payload::Distance { distance } => {
                out.push_str(&format!("distance = {distance}\n"));
            }
            Payload::Blocks { blocks } => {
                for block in blocks {
                    out.push_str(&format!("{{{}}}\n", block.join(" ")));
                }
            }
        }
        if !self.metadata.is_empty() {
            let mut parts = Vec::new();
            if let Some(g) = &self.metadata.gamma {
                parts.push(format!("gamma = {g}"));
            }
            if let Some(e) = &self.metadata.epsilon {
                parts.push(format!("epsilon = {e}"));
            }
            if let Some(b) = self.metadata.denominator_bound {
                parts.push(format!("denominator bound = {b}"));
            }
            if let Some(i) = self.metadata.iterations {
                parts.push(format!("iterations = {i}"));
            }
            if let Some(c) = self.metadata.converged {
                parts.push(format!("converged = {c}"));
            }
            out.push_str(&format!("({})\n", parts.join(", ")));
        }
        out
    }
}
