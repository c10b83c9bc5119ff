//! Tabulated curves for the approximation and entropy-estimate plots.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{id_estimate, index_coincidence, mub_bound, Method};
use crate::designs::{builtin_design, povm_probabilities, BuiltinDesign, QuantumState};
use crate::error::{check_degree, Error, Result};
use crate::estimators::{eval_f, eval_g, x_ln_x};
use crate::relations::prop2_bounds;

pub const DEFAULT_POINTS: usize = 501;
/// Slack allowed in the row-wise ordering checks made before a row is emitted.
pub const ROW_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    /// Design whose measurement the figure describes; none for `fig1`.
    pub fn design(self) -> Option<BuiltinDesign> {
        match self {
            FigureId::Fig1 => None,
            FigureId::Fig2 => Some(BuiltinDesign::Octahedron),
            FigureId::Fig3 => Some(BuiltinDesign::Mub3),
            FigureId::Fig4 => Some(BuiltinDesign::Icosahedron),
            FigureId::Fig5 => Some(BuiltinDesign::Icosidodecahedron),
            FigureId::Fig6 => Some(BuiltinDesign::McLarenSnubCube),
        }
    }

    /// Right end of the abscissa range.
    pub fn x_max(self) -> f64 {
        match self {
            FigureId::Fig1 => 1.0,
            _ => 0.5,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::InvalidTag(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    /// Number of abscissa points, both endpoints included.
    pub points: usize,
    /// Degrees plotted in `fig1`.
    pub degrees: Vec<usize>,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        Self {
            id,
            points: DEFAULT_POINTS,
            degrees: vec![3, 5, 7],
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    /// Uniform grid on `[0, 1]` for `fig1` and on `[0, 1/2]` otherwise.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::DomainError {
                value: self.points as f64,
                domain: "at least two grid points",
            });
        }
        let last = (self.points - 1) as f64;
        let hi = self.id.x_max();
        Ok((0..self.points)
            .map(|i| if i + 1 == self.points { hi } else { hi * i as f64 / last })
            .collect())
    }
}

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV with 17 significant digits per field.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn violation(at: f64, detail: String) -> Error {
    Error::SandwichViolation { at, detail }
}

/// `x ln x` together with `-f_n` and `g_n` for each requested degree.
/// Each row is checked to satisfy `x ln x ≤ -f_n(x)` and `x ln x ≤ g_n(x)`.
pub fn emit_fig1(degrees: &[usize], grid: &[f64]) -> Result<Table> {
    if degrees.is_empty() {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            min: 2,
            max: 15,
        });
    }
    for &n in degrees {
        check_degree(n, 2, 15)?;
    }
    let mut columns = vec!["x".to_string(), "y".to_string()];
    columns.extend(degrees.iter().map(|n| format!("f{n}neg")));
    columns.extend(degrees.iter().map(|n| format!("g{n}")));
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let y = x_ln_x(x);
        let mut row = vec![x, y];
        for &n in degrees {
            row.push(-eval_f(n, x)?);
        }
        for &n in degrees {
            row.push(eval_g(n, x)?);
        }
        if let Some(v) = row[2..].iter().find(|&&v| v < y - 1e-13) {
            return Err(violation(x, format!("curve value {v} below x ln x = {y}")));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

pub const ENTROPY_COLUMNS: [&str; 7] = ["lambda", "H_exact", "LT", "UT", "LCh", "UCh", "ID"];

/// Entropy estimates along the family of qubit states with eigenvalues
/// `(1-λ, λ)`. Rows whose estimates fail to bracket the exact value abort
/// the emission.
pub fn emit_entropy_figure(spec: &FigureSpec) -> Result<Table> {
    let which = spec
        .id
        .design()
        .ok_or_else(|| Error::InvalidTag(format!("{} (not an entropy figure)", spec.id)))?;
    let design = builtin_design(which)?;
    let mut rows = Vec::with_capacity(spec.points);
    for lambda in spec.grid()? {
        let rho = QuantumState::from_min_eigenvalue(lambda)?;
        let taylor = prop2_bounds(&design, &rho, Method::Taylor)?;
        let cheb = prop2_bounds(&design, &rho, Method::Chebyshev)?;
        let h = taylor.average_entropy;
        let id = match design.partition() {
            Some(_) => mub_bound((1.0 - lambda).powi(2) + lambda * lambda)?,
            None => {
                let p = &povm_probabilities(&design, &rho)?[0];
                id_estimate(index_coincidence(p, 2)?, design.len())?
            }
        };
        let lowers = [("LT", taylor.lower), ("LCh", cheb.lower), ("ID", id)];
        let uppers = [("UT", taylor.upper), ("UCh", cheb.upper)];
        for (name, v) in lowers {
            if v > h + ROW_SLACK {
                return Err(violation(lambda, format!("{name} = {v} exceeds H = {h}")));
            }
        }
        for (name, v) in uppers {
            if v < h - ROW_SLACK {
                return Err(violation(lambda, format!("{name} = {v} below H = {h}")));
            }
        }
        rows.push(vec![lambda, h, taylor.lower, taylor.upper, cheb.lower, cheb.upper, id]);
    }
    Ok(Table {
        columns: ENTROPY_COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

pub fn emit_figure(spec: &FigureSpec) -> Result<Table> {
    match spec.id {
        FigureId::Fig1 => emit_fig1(&spec.degrees, &spec.grid()?),
        _ => emit_entropy_figure(spec),
    }
}

const COLORS: [&str; 8] = [
    "#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

/// Line plot of every column against the first one.
pub fn render_svg(table: &Table, title: &str) -> String {
    let (w, h, margin) = (720.0, 440.0, 50.0);
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let values = table.rows.iter().flat_map(|r| r[1..].iter().copied());
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    let (x0, x1) = (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(1.0));
    let sx = |x: f64| margin + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - lo) / (hi - lo) * (h - 2.0 * margin);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect x=\"{margin}\" y=\"{margin}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n\
         <text x=\"{}\" y=\"25\" text-anchor=\"middle\">{title}</text>\n\
         <text x=\"{margin}\" y=\"{}\">{x0}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{x1}</text>\n\
         <text x=\"5\" y=\"{}\">{lo:.3}</text><text x=\"5\" y=\"{}\">{hi:.3}</text>\n",
        w - 2.0 * margin,
        h - 2.0 * margin,
        w / 2.0,
        h - margin + 18.0,
        w - margin,
        h - margin + 18.0,
        h - margin,
        margin + 4.0,
    );
    for (j, name) in table.columns.iter().enumerate().skip(1) {
        let color = COLORS[(j - 1) % COLORS.len()];
        let pts: Vec<String> = table
            .rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[j])))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let ly = margin + 16.0 * j as f64;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{ly}\" fill=\"{color}\">{name}</text>\n",
            w - margin - 60.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_endpoints() {
        let g = FigureSpec::new(FigureId::Fig2).grid().unwrap();
        assert_eq!(g.len(), 501);
        assert_eq!((g[0], g[500]), (0.0, 0.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(FigureSpec::new(FigureId::Fig2).with_points(1).grid().is_err());
    }

    #[test]
    fn fig1_endpoints_vanish() {
        let t = emit_fig1(&[3, 5, 7], &FigureSpec::new(FigureId::Fig1).grid().unwrap()).unwrap();
        assert_eq!(t.columns, ["x", "y", "f3neg", "f5neg", "f7neg", "g3", "g5", "g7"]);
        for row in [&t.rows[0], t.rows.last().unwrap()] {
            assert!(row[1..].iter().all(|v| v.abs() < 1e-13), "{row:?}");
        }
        assert!(emit_fig1(&[], &[0.5]).is_err());
        assert!(matches!(emit_fig1(&[16], &[0.5]), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn octahedron_figure_rows() {
        let t = emit_entropy_figure(&FigureSpec::new(FigureId::Fig2).with_points(11)).unwrap();
        let first = &t.rows[0];
        let h = 2.0 / 3.0 * 6f64.ln() + 3f64.ln() / 3.0;
        assert!((first[1] - h).abs() < 1e-14);
        assert!(first[2] <= first[4]);
        let last = t.rows.last().unwrap();
        assert!(last[1..].iter().all(|v| (v - 6f64.ln()).abs() < 1e-9), "{last:?}");
    }

    #[test]
    fn csv_is_deterministic() {
        let spec = FigureSpec::new(FigureId::Fig3).with_points(21);
        let a = emit_figure(&spec).unwrap().to_csv();
        let b = emit_figure(&spec).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("lambda,H_exact,LT,UT,LCh,UCh,ID\n"));
    }

    #[test]
    fn svg_has_one_line_per_curve() {
        let t = emit_entropy_figure(&FigureSpec::new(FigureId::Fig2).with_points(5)).unwrap();
        let svg = render_svg(&t, "fig2");
        assert_eq!(svg.matches("<polyline").count(), 6);
    }
}
