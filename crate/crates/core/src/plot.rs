//! Tabular plot data (CSV). No rendering happens here.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::divergence::{project_pair, LayerDivergenceReport};
use crate::error::{Error, Result};
use crate::store::{DatasetManifest, Direction, Selection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    LayerCurves,
    Upset,
    Venn,
    Sankey,
    PcaScatter,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "layer-curves" => Ok(PlotKind::LayerCurves),
            "upset" => Ok(PlotKind::Upset),
            "venn" => Ok(PlotKind::Venn),
            "sankey" => Ok(PlotKind::Sankey),
            "pca-scatter" => Ok(PlotKind::PcaScatter),
            _ => Err(Error::Unknown { kind: "plot kind", name: s.to_string() }),
        }
    }
}

/// One row per layer:
/// `layer,{metric}_mean,{metric}_std` for silhouette, calinski_harabasz,
/// davies_bouldin, centroid_distance and explained_variance.
pub fn layer_curves_csv(report: &LayerDivergenceReport) -> String {
    let metrics = ["silhouette", "calinski_harabasz", "davies_bouldin", "centroid_distance", "explained_variance"];
    let mut out = String::from("layer");
    for m in metrics {
        let _ = write!(out, ",{m}_mean,{m}_std");
    }
    out.push('\n');
    for l in &report.layers {
        let _ = write!(out, "{}", l.layer);
        for s in [l.silhouette, l.calinski_harabasz, l.davies_bouldin, l.centroid_distance, l.explained_variance] {
            let _ = write!(out, ",{},{}", s.mean, s.std);
        }
        out.push('\n');
    }
    out
}

/// Long format: `layer,metric,mean,std`, one row per layer × metric.
pub fn layer_long_csv(report: &LayerDivergenceReport) -> String {
    let mut out = String::from("layer,metric,mean,std\n");
    for l in &report.layers {
        for (name, s) in [
            ("silhouette", l.silhouette),
            ("calinski_harabasz", l.calinski_harabasz),
            ("davies_bouldin", l.davies_bouldin),
            ("centroid_distance", l.centroid_distance),
        ] {
            let _ = writeln!(out, "{},{name},{},{}", l.layer, s.mean, s.std);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub coords: Vec<f64>,
    pub direction: Direction,
    pub sentence_id: String,
}

/// Sampled matching/non-matching rows of one layer projected on their
/// first three PCs.
pub fn pca_scatter(manifest: &DatasetManifest, persona: &str, layer: usize, n: usize, seed: u64) -> Result<Vec<ScatterPoint>> {
    let plus = manifest.select(&Selection::one(persona, Direction::Matching, layer))?;
    let minus = manifest.select(&Selection::one(persona, Direction::Notmatching, layer))?;
    let pair = project_pair(&plus, &minus, 3, n, seed, false)?;
    let mut points = Vec::with_capacity(2 * n);
    for (q, idv, d) in [(&pair.plus, &pair.plus_ids, Direction::Matching), (&pair.minus, &pair.minus_ids, Direction::Notmatching)] {
        for (row, id) in q.rows().into_iter().zip(idv) {
            points.push(ScatterPoint { coords: row.to_vec(), direction: d, sentence_id: id.clone() });
        }
    }
    Ok(points)
}

/// `pc1,pc2,pc3,direction,sentence_id`
pub fn pca_scatter_csv(points: &[ScatterPoint]) -> String {
    let mut out = String::from("pc1,pc2,pc3,direction,sentence_id\n");
    for p in points {
        let c = |i: usize| p.coords.get(i).copied().unwrap_or(0.0);
        let _ = writeln!(out, "{},{},{},{},{}", c(0), c(1), c(2), p.direction, p.sentence_id);
    }
    out
}
