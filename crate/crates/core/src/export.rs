//! JSON, DOT and plain-text renderings of labelled posets.
//!
//! The JSON form is self-contained: importing it rebuilds the same
//! [`LabeledPoset`], and exporting that again gives identical bytes.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::shellcheck::LabeledPoset;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub datum: String,
    pub mu: Vec<i32>,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    /// `W^{J,K}` in η-order, as reduced words.
    pub wjk: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub name: String,
    pub grade: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverJson {
    pub upper: usize,
    pub lower: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    #[serde(flatten)]
    pub header: Header,
    pub top: usize,
    pub bottom: usize,
    pub elements: Vec<ElementJson>,
    /// Every label of the order, ascending.
    pub label_order: Vec<String>,
    pub covers: Vec<CoverJson>,
}

impl PosetJson {
    pub fn new(lp: &LabeledPoset, header: Header) -> Self {
        let elements =
            (0..lp.len()).map(|i| ElementJson { name: lp.name(i).to_string(), grade: lp.grade(i) }).collect();
        let mut covers = Vec::new();
        for upper in 0..lp.len() {
            let mut cs = lp.covers_down(upper).to_vec();
            cs.sort_by_key(|&(c, l)| (l, c));
            covers.extend(cs.into_iter().map(|(lower, l)| CoverJson {
                upper,
                lower,
                label: lp.label_name(l).to_string(),
            }));
        }
        PosetJson {
            header,
            top: lp.top(),
            bottom: lp.bottom(),
            elements,
            label_order: lp.label_names().to_vec(),
            covers,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Input(format!("poset JSON: {e}")))
    }

    /// Rebuilds the labelled poset, checking the recorded grades and extremes.
    pub fn to_labeled_poset(&self) -> Result<LabeledPoset> {
        let rank: HashMap<&str, u32> =
            self.label_order.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
        if rank.len() != self.label_order.len() {
            return input("label_order lists a label twice");
        }
        let n = self.elements.len();
        let mut down = vec![Vec::new(); n];
        for c in &self.covers {
            let Some(&l) = rank.get(c.label.as_str()) else {
                return input(format!("label {} is not in label_order", c.label));
            };
            if c.upper >= n || c.lower >= n {
                return input(format!("cover {} -> {} out of range", c.upper, c.lower));
            }
            down[c.upper].push((c.lower, l));
        }
        let names = self.elements.iter().map(|e| e.name.clone()).collect();
        let lp = LabeledPoset::new(names, down, self.label_order.clone())?;
        if lp.top() != self.top || lp.bottom() != self.bottom {
            return input("recorded top or bottom does not match the covers");
        }
        if self.elements.iter().enumerate().any(|(i, e)| e.grade != lp.grade(i)) {
            return input("recorded grades do not match the covers");
        }
        Ok(lp)
    }
}

/// Hasse diagram with the top drawn first; edges point downward.
pub fn to_dot(lp: &LabeledPoset) -> String {
    let mut s = String::from("digraph poset {\n  rankdir=TB;\n");
    for i in 0..lp.len() {
        let _ = writeln!(s, "  n{i} [label=\"{}\"];", lp.name(i));
    }
    for upper in 0..lp.len() {
        let mut cs = lp.covers_down(upper).to_vec();
        cs.sort_by_key(|&(c, l)| (l, c));
        for (lower, l) in cs {
            let _ = writeln!(s, "  n{upper} -> n{lower} [label=\"{}\"];", lp.label_name(l));
        }
    }
    s.push_str("}\n");
    s
}

pub fn to_text(lp: &LabeledPoset) -> String {
    let mut s = String::new();
    let mut order: Vec<usize> = (0..lp.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(lp.grade(i)), i));
    for i in order {
        let _ = writeln!(s, "[{}] {}", lp.grade(i), lp.name(i));
        let mut cs = lp.covers_down(i).to_vec();
        cs.sort_by_key(|&(c, l)| (l, c));
        for (lower, l) in cs {
            let _ = writeln!(s, "    > {}  {}", lp.name(lower), lp.label_name(l));
        }
    }
    s
}
