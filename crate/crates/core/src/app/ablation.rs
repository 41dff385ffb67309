//! Accuracy of several enhancement orders over a set of pages.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::config::{Order, PipelineConfig};
use super::pipeline::run_with_decoder;
use super::score::score_accuracy;
use crate::decode::Decoder;
use crate::image::GrayImage;

#[derive(Debug, Error)]
pub enum AblationError {
    #[error("no pages to evaluate")]
    NoPages,
    #[error("no enhancement orders to compare")]
    NoOrders,
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug, Clone)]
pub struct AblationPage {
    pub name: String,
    pub image: GrayImage,
    pub reference: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationTable {
    pub orders: Vec<String>,
    pub pages: Vec<String>,
    /// `accuracy[page][order]`.
    pub accuracy: Vec<Vec<f64>>,
    /// Pages where the pipeline stopped early, as `(page, order, message)`.
    /// They score zero.
    pub failures: Vec<(usize, usize, String)>,
}

impl AblationTable {
    pub fn mean(&self, order: usize) -> f64 {
        let n = self.accuracy.len() as f64;
        self.accuracy.iter().map(|r| r[order]).sum::<f64>() / n
    }

    /// Pages on which `order` scores strictly above every other order in `others`.
    pub fn pages_strictly_best(&self, order: usize, others: &[usize]) -> usize {
        self.accuracy
            .iter()
            .filter(|r| others.iter().all(|&o| r[order] > r[o]))
            .count()
    }

    /// Pages on which `order` scores strictly below every order in `others`.
    pub fn pages_strictly_worst(&self, order: usize, others: &[usize]) -> usize {
        self.accuracy
            .iter()
            .filter(|r| others.iter().all(|&o| r[order] < r[o]))
            .count()
    }

    /// Column-aligned table of percentages with a mean row.
    pub fn to_text(&self) -> String {
        let name_w = self.pages.iter().map(|p| p.len()).max().unwrap_or(4).max(4);
        let col_w = self.orders.iter().map(|o| o.len()).max().unwrap_or(6).max(7);
        let mut out = format!("{:name_w$}", "page");
        for o in &self.orders {
            let _ = write!(out, "  {o:>col_w$}");
        }
        out.push('\n');
        for (p, row) in self.pages.iter().zip(&self.accuracy) {
            let _ = write!(out, "{p:name_w$}");
            for a in row {
                let _ = write!(out, "  {:>col_w$.1}", a * 100.0);
            }
            out.push('\n');
        }
        let _ = write!(out, "{:name_w$}", "mean");
        for o in 0..self.orders.len() {
            let _ = write!(out, "  {:>col_w$.1}", self.mean(o) * 100.0);
        }
        out.push('\n');
        out
    }

    /// One `page<TAB>order<TAB>accuracy` line per cell.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("page\torder\taccuracy\n");
        for (p, row) in self.pages.iter().zip(&self.accuracy) {
            for (o, a) in self.orders.iter().zip(row) {
                let _ = writeln!(out, "{p}\t{o}\t{a:.6}");
            }
        }
        out
    }
}

pub fn run_ablation(
    pages: &[AblationPage],
    orders: &[Order],
    base: &PipelineConfig,
) -> Result<AblationTable, AblationError> {
    if pages.is_empty() {
        return Err(AblationError::NoPages);
    }
    if orders.is_empty() {
        return Err(AblationError::NoOrders);
    }
    let configs: Vec<PipelineConfig> = orders
        .iter()
        .map(|o| {
            let cfg = PipelineConfig { order: o.clone(), ..base.clone() };
            cfg.validate().map(|_| cfg).map_err(|e| AblationError::Setup(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let decoder = Decoder::shipped(base.language, base.grade()).map_err(|e| AblationError::Setup(e.to_string()))?;

    let jobs: Vec<(usize, usize)> = (0..pages.len())
        .flat_map(|p| (0..orders.len()).map(move |o| (p, o)))
        .collect();
    let results: Vec<(usize, usize, Result<f64, String>)> = jobs
        .par_iter()
        .map(|&(p, o)| {
            let r = run_with_decoder(&pages[p].image, &configs[o], &decoder)
                .map(|rep| score_accuracy(&pages[p].reference, &rep.text))
                .map_err(|e| e.to_string());
            (p, o, r)
        })
        .collect();

    let mut accuracy = vec![vec![0.0; orders.len()]; pages.len()];
    let mut failures = Vec::new();
    for (p, o, r) in results {
        match r {
            Ok(a) => accuracy[p][o] = a,
            Err(msg) => failures.push((p, o, msg)),
        }
    }
    Ok(AblationTable {
        orders: orders.iter().map(|o| o.to_string()).collect(),
        pages: pages.iter().map(|p| p.name.clone()).collect(),
        accuracy,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs_are_errors() {
        let cfg = PipelineConfig::default();
        assert!(matches!(run_ablation(&[], &[Order(vec![])], &cfg), Err(AblationError::NoPages)));
        let page = AblationPage {
            name: "p".into(),
            image: GrayImage::filled(4, 4, 0).unwrap(),
            reference: String::new(),
        };
        assert!(matches!(run_ablation(&[page], &[], &cfg), Err(AblationError::NoOrders)));
    }

    #[test]
    fn table_formats() {
        let t = AblationTable {
            orders: vec!["CS".into(), "CS,IS,MO".into()],
            pages: vec!["en-01".into(), "en-02".into()],
            accuracy: vec![vec![0.5, 1.0], vec![0.25, 0.75]],
            failures: vec![],
        };
        assert_eq!(t.mean(0), 0.375);
        assert_eq!(t.pages_strictly_best(1, &[0]), 2);
        assert_eq!(t.pages_strictly_worst(0, &[1]), 2);
        let text = t.to_text();
        assert!(text.lines().next().unwrap().contains("CS,IS,MO"));
        assert!(text.contains("mean"));
        assert_eq!(t.to_tsv().lines().count(), 5);
    }
}
