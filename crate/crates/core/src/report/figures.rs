//! Static figures, each rendered from emitted tables only.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::manifest::Stage;
use super::stages::tables_dir;
use super::svg::{diverging, nice_max, sequential, Frame, Svg, COLOR_A, COLOR_B, COLOR_NEUTRAL};
use super::table::Table;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureRecord {
    pub name: String,
    /// Relative to the output directory; `None` when skipped.
    pub file: Option<String>,
    pub skipped: Option<String>,
}

struct FigureSpec {
    name: &'static str,
    stage: Stage,
    render: fn(&Path) -> Result<String>,
}

const FIGURES: &[FigureSpec] = &[
    FigureSpec {
        name: "correlation_heatmap",
        stage: Stage::Mediaclust,
        render: correlation_heatmap,
    },
    FigureSpec {
        name: "leaning_distribution",
        stage: Stage::Leaning,
        render: leaning_histogram,
    },
    FigureSpec {
        name: "activity",
        stage: Stage::Leaning,
        render: activity_curve,
    },
    FigureSpec {
        name: "joint_density_weighted",
        stage: Stage::Conet,
        render: joint_weighted,
    },
    FigureSpec {
        name: "joint_density_unweighted",
        stage: Stage::Conet,
        render: joint_unweighted,
    },
    FigureSpec {
        name: "response_curves",
        stage: Stage::Affect,
        render: response_curves,
    },
    FigureSpec {
        name: "reply_affect",
        stage: Stage::Affect,
        render: reply_affect,
    },
    FigureSpec {
        name: "model_comparison",
        stage: Stage::Classify,
        render: model_comparison,
    },
];

pub fn figures_dir(out: &Path) -> PathBuf {
    out.join("figures")
}

/// Renders every figure under `figures/`. Figures belonging to a stage in
/// `skipped` are recorded as skipped; any other missing table is an error.
pub fn render_figures(out: &Path, skipped: &BTreeMap<Stage, String>) -> Result<Vec<FigureRecord>> {
    let dir = figures_dir(out);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let tables = tables_dir(out);
    FIGURES
        .iter()
        .map(|spec| {
            if let Some(why) = skipped.get(&spec.stage) {
                return Ok(FigureRecord {
                    name: spec.name.into(),
                    file: None,
                    skipped: Some(format!("{} stage {why}", spec.stage.name())),
                });
            }
            let svg = (spec.render)(&tables)?;
            let path = dir.join(format!("{}.svg", spec.name));
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            Ok(FigureRecord {
                name: spec.name.into(),
                file: Some(format!("figures/{}.svg", spec.name)),
                skipped: None,
            })
        })
        .collect()
}

fn num(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn correlation_heatmap(tables: &Path) -> Result<String> {
    let corr = Table::read(tables, "media_correlation")?;
    let order = Table::read(tables, "media_order")?;
    let ids: Vec<&str> = order.strings("medium_id")?;
    let n = ids.len();
    let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let lookup = |m: &str| {
        pos.get(m)
            .copied()
            .ok_or_else(|| Error::MissingTable(format!("media_order lacks {m}")))
    };
    let mut grid = vec![f64::NAN; n * n];
    for ((a, b), r) in corr
        .strings("medium_a")?
        .into_iter()
        .zip(corr.strings("medium_b")?)
        .zip(corr.floats("r")?)
    {
        grid[lookup(a)? * n + lookup(b)?] = num(r);
    }
    let cell = (480.0 / n.max(1) as f64).min(24.0);
    let side = cell * n as f64;
    let (left, top) = (110.0, 50.0);
    let mut svg = Svg::new(left + side + 90.0, top + side + 110.0);
    svg.text(
        left + side / 2.0,
        30.0,
        13.0,
        "middle",
        "Media correlation (dendrogram order)",
    );
    for i in 0..n {
        for j in 0..n {
            let r = grid[i * n + j];
            let fill = if r.is_nan() {
                "#cccccc".to_owned()
            } else {
                diverging(r)
            };
            svg.rect(
                left + j as f64 * cell,
                top + i as f64 * cell,
                cell,
                cell,
                &fill,
                "cell",
            );
        }
    }
    let font = cell.clamp(5.0, 10.0);
    for (i, id) in ids.iter().enumerate() {
        let c = i as f64 * cell + cell / 2.0;
        svg.text(left - 4.0, top + c + font / 3.0, font, "end", id);
        svg.vtext(left + c + font / 3.0, top + side + 30.0, font, id);
    }
    for k in 0..=10 {
        let r = 1.0 - k as f64 / 5.0;
        let y = top + k as f64 * side / 11.0;
        svg.rect(left + side + 20.0, y, 16.0, side / 11.0, &diverging(r), "legend");
        svg.text(
            left + side + 40.0,
            y + side / 22.0 + 3.0,
            9.0,
            "start",
            &format!("{r:.1}"),
        );
    }
    Ok(svg.finish())
}

fn curve_frame(title: &str, ylabel: &str, ymax: f64, svg: &mut Svg) -> Frame {
    let f = Frame {
        left: 70.0,
        top: 40.0,
        width: 480.0,
        height: 300.0,
        x: (-1.0, 1.0),
        y: (0.0, ymax),
    };
    f.axes(svg, title, "leaning x", ylabel);
    f
}

fn leaning_histogram(tables: &Path) -> Result<String> {
    let t = Table::read(tables, "leaning_distribution")?;
    let lo = t.floats("bin_low")?;
    let hi = t.floats("bin_high")?;
    let v: Vec<f64> = t.floats("value")?.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let mut svg = Svg::new(600.0, 400.0);
    let f = curve_frame(
        "Distribution of user leanings",
        "P(x)",
        nice_max(v.iter().copied()),
        &mut svg,
    );
    for i in 0..v.len() {
        let (a, b) = (f.px(num(lo[i])), f.px(num(hi[i])));
        let y = f.py(v[i]);
        let color = if num(hi[i]) <= 0.0 {
            COLOR_B
        } else if num(lo[i]) >= 0.0 {
            COLOR_A
        } else {
            COLOR_NEUTRAL
        };
        svg.rect(a, y, (b - a).max(0.0), f.bottom() - y, color, "bar");
    }
    Ok(svg.finish())
}

fn activity_curve(tables: &Path) -> Result<String> {
    let t = Table::read(tables, "activity")?;
    let lo = t.floats("bin_low")?;
    let hi = t.floats("bin_high")?;
    let v = t.floats("value")?;
    let mut svg = Svg::new(600.0, 400.0);
    let f = curve_frame(
        "Mean comment activity by leaning",
        "<a(x)>",
        nice_max(v.iter().flatten().copied()),
        &mut svg,
    );
    let mut pts = Vec::new();
    for i in 0..v.len() {
        if let Some(y) = v[i] {
            let c = (num(lo[i]) + num(hi[i])) / 2.0;
            pts.push((f.px(c), f.py(y)));
        }
    }
    svg.polyline(&pts, COLOR_NEUTRAL);
    for &(x, y) in &pts {
        svg.circle(x, y, 2.5, COLOR_NEUTRAL);
    }
    Ok(svg.finish())
}

fn joint(tables: &Path, name: &str, title: &str) -> Result<String> {
    let t = Table::read(tables, name)?;
    let ix = t.ints("ix")?;
    let iy = t.ints("iy")?;
    let mass = t.floats("mass")?;
    let n = ix.iter().flatten().map(|&i| i as usize + 1).max().unwrap_or(0);
    let peak = mass.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    let mut svg = Svg::new(520.0, 480.0);
    let f = Frame {
        left: 70.0,
        top: 40.0,
        width: 400.0,
        height: 400.0,
        x: (-1.0, 1.0),
        y: (-1.0, 1.0),
    };
    let cell = f.width / n.max(1) as f64;
    for k in 0..mass.len() {
        let (Some(i), Some(j)) = (ix[k], iy[k]) else {
            continue;
        };
        // square-root scale keeps sparse off-diagonal mass visible
        let v = if peak > 0.0 {
            (num(mass[k]) / peak).sqrt()
        } else {
            0.0
        };
        let y = f.top + f.height - (j as f64 + 1.0) * cell;
        svg.rect(f.left + i as f64 * cell, y, cell, cell, &sequential(v), "cell");
    }
    f.axes(&mut svg, title, "leaning x", "neighbor mean leaning");
    Ok(svg.finish())
}

fn joint_weighted(tables: &Path) -> Result<String> {
    joint(
        tables,
        "joint_density_weighted",
        "Joint density, weighted network",
    )
}

fn joint_unweighted(tables: &Path) -> Result<String> {
    joint(
        tables,
        "joint_density_unweighted",
        "Joint density, unweighted network",
    )
}

fn response_curves(tables: &Path) -> Result<String> {
    let t = Table::read(tables, "response_curves")?;
    let groups = t.strings("group")?;
    let kinds = t.strings("kind")?;
    let lo = t.floats("bin_low")?;
    let hi = t.floats("bin_high")?;
    let v = t.floats("value")?;
    let mut svg = Svg::new(1740.0, 400.0);
    for (p, kind) in ["replies", "sympathies", "antipathies"].into_iter().enumerate() {
        let rows: Vec<usize> = (0..v.len()).filter(|&k| kinds[k] == kind).collect();
        let ymax = nice_max(rows.iter().filter_map(|&k| v[k]));
        let f = Frame {
            left: 70.0 + p as f64 * 580.0,
            top: 40.0,
            width: 480.0,
            height: 300.0,
            x: (-1.0, 1.0),
            y: (0.0, ymax),
        };
        f.axes(
            &mut svg,
            &format!("Mean {kind} per comment"),
            "commenter leaning x",
            kind,
        );
        for (group, color) in [("A", COLOR_A), ("B", COLOR_B)] {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|&&k| groups[k] == group)
                .filter_map(|&k| v[k].map(|y| (f.px((num(lo[k]) + num(hi[k])) / 2.0), f.py(y))))
                .collect();
            svg.polyline(&pts, color);
            for &(x, y) in &pts {
                svg.circle(x, y, 2.0, color);
            }
        }
        legend(&mut svg, f.left + f.width - 90.0, f.top + 10.0);
    }
    Ok(svg.finish())
}

fn legend(svg: &mut Svg, x: f64, y: f64) {
    svg.rect(x, y, 10.0, 10.0, COLOR_A, "legend");
    svg.text(x + 14.0, y + 9.0, 10.0, "start", "group A");
    svg.rect(x, y + 16.0, 10.0, 10.0, COLOR_B, "legend");
    svg.text(x + 14.0, y + 25.0, 10.0, "start", "group B");
}

fn reply_affect(tables: &Path) -> Result<String> {
    let t = Table::read(tables, "reply_affect")?;
    let groups = t.strings("group")?;
    let lo = t.ints("replies_lo")?;
    let s = t.floats("mean_sympathies")?;
    let a = t.floats("mean_antipathies")?;
    let n_buckets = lo.iter().flatten().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut svg = Svg::new(1160.0, 400.0);
    for (p, (name, vals)) in [("sympathies", &s), ("antipathies", &a)].into_iter().enumerate() {
        let ymax = nice_max(vals.iter().flatten().copied());
        let f = Frame {
            left: 70.0 + p as f64 * 580.0,
            top: 40.0,
            width: 480.0,
            height: 300.0,
            x: (0.0, n_buckets.max(1) as f64),
            y: (0.0, ymax),
        };
        f.axes(
            &mut svg,
            &format!("Mean {name} by reply count"),
            "replies (last bucket: at least)",
            name,
        );
        let w = f.width / n_buckets.max(1) as f64 / 2.0;
        for k in 0..vals.len() {
            let (Some(b), Some(v)) = (lo[k], vals[k]) else {
                continue;
            };
            let (off, color) = if groups[k] == "A" {
                (0.0, COLOR_A)
            } else {
                (w, COLOR_B)
            };
            let y = f.py(v);
            svg.rect(f.px(b as f64) + off, y, w * 0.9, f.bottom() - y, color, "bar");
        }
        legend(&mut svg, f.left + f.width - 90.0, f.top + 10.0);
    }
    Ok(svg.finish())
}

fn model_comparison(tables: &Path) -> Result<String> {
    let t = Table::read(tables, "model_comparison")?;
    let models = t.strings("model")?;
    let mean = t.floats("mean_accuracy")?;
    let min = t.floats("min_accuracy")?;
    let max = t.floats("max_accuracy")?;
    let mut svg = Svg::new(600.0, 400.0);
    let f = Frame {
        left: 70.0,
        top: 40.0,
        width: 480.0,
        height: 300.0,
        x: (0.0, models.len().max(1) as f64),
        y: (0.0, 1.0),
    };
    f.axes(&mut svg, "Cross-validated accuracy", "", "accuracy");
    for (k, m) in models.iter().enumerate() {
        let x = f.px(k as f64 + 0.2);
        let w = f.px(k as f64 + 0.8) - x;
        let y = f.py(num(mean[k]));
        svg.rect(x, y, w, f.bottom() - y, COLOR_NEUTRAL, "bar");
        let c = x + w / 2.0;
        svg.line(c, f.py(num(min[k])), c, f.py(num(max[k])), "black");
        svg.text(c, f.bottom() + 44.0, 11.0, "middle", m);
        svg.text(c, y - 4.0, 10.0, "middle", &format!("{:.3}", num(mean[k])));
    }
    Ok(svg.finish())
}
