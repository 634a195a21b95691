//! The paper's fifteen tables and three figures.

use serde::Serialize;

use copula_risk::{compute_measure, Alpha, Measure, Result, SolverSettings, Target};

use crate::format::{f17, opt_f17, CsvRow};
use crate::portfolio::{Dist, PortfolioSpec};

/// Largest |computed − printed| accepted as a rounding difference.
pub const TABLE_TOLERANCE: f64 = 0.02;

pub const PAPER_THETAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const PAPER_ALPHA: f64 = 0.9;

#[derive(Debug, Clone, Copy)]
pub struct TableDef {
    pub id: u8,
    pub dist: Dist,
    pub target: Target,
    pub measure: Measure,
    /// Printed entries at [`PAPER_THETAS`].
    pub printed: [f64; 5],
}

// Printed entries such as 3.14 are data, not approximations of constants.
#[allow(clippy::approx_constant)]
pub const TABLES: [TableDef; 15] = [
    table(1, Dist::Exp, Target::Min, Measure::Var, [2.14, 2.22, 2.3, 2.38, 2.45]),
    table(2, Dist::Exp, Target::Min, Measure::Cte, [3.04, 3.17, 3.23, 3.35, 3.44]),
    table(3, Dist::Exp, Target::Max, Measure::Var, [5.46, 5.45, 5.45, 5.44, 5.43]),
    table(
        4,
        Dist::Exp,
        Target::Max,
        Measure::Cte,
        [7.369, 7.366, 7.361, 7.356, 7.351],
    ),
    table(
        5,
        Dist::Pareto,
        Target::Min,
        Measure::Var,
        [1.39, 1.41, 1.43, 1.45, 1.47],
    ),
    table(
        6,
        Dist::Pareto,
        Target::Min,
        Measure::Cte,
        [1.63, 1.66, 1.69, 1.71, 1.74],
    ),
    table(
        7,
        Dist::Pareto,
        Target::Max,
        Measure::Var,
        [2.401, 2.40, 2.395, 2.39, 2.387],
    ),
    table(
        8,
        Dist::Pareto,
        Target::Max,
        Measure::Cte,
        [3.50, 3.49, 3.49, 3.49, 3.49],
    ),
    table(9, Dist::Exp, Target::Sum, Measure::Var, [7.19, 7.30, 7.40, 7.51, 7.61]),
    table(10, Dist::Exp, Target::Sum, Measure::Cte, [9.44, 9.58, 9.72, 9.86, 9.99]),
    table(11, Dist::Exp, Target::Min, Measure::Mot, [2.64, 2.88, 2.97, 3.07, 3.14]),
    table(12, Dist::Exp, Target::Max, Measure::Mot, [6.77, 6.77, 6.78, 6.77, 6.77]),
    table(
        13,
        Dist::Pareto,
        Target::Min,
        Measure::Mot,
        [1.52, 1.55, 1.58, 1.61, 1.64],
    ),
    table(
        14,
        Dist::Pareto,
        Target::Max,
        Measure::Mot,
        [2.98, 2.98, 2.975, 2.97, 2.97],
    ),
    table(15, Dist::Exp, Target::Sum, Measure::Mot, [8.78, 8.93, 9.05, 9.20, 9.31]),
];

/// Printed cells that disagree with the defining equation by far more than
/// rounding: (table id, θ).
pub const SUSPECTED_ERRATA: [(u8, f64); 2] = [(11, 0.1), (13, 0.1)];

const fn table(id: u8, dist: Dist, target: Target, measure: Measure, printed: [f64; 5]) -> TableDef {
    TableDef {
        id,
        dist,
        target,
        measure,
        printed,
    }
}

pub fn table_def(id: u8) -> Option<&'static TableDef> {
    TABLES.iter().find(|t| t.id == id)
}

impl TableDef {
    pub fn printed_at(&self, theta: f64) -> Option<f64> {
        PAPER_THETAS.iter().position(|&t| t == theta).map(|i| self.printed[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// No printed value to compare against.
    Unpublished,
    Ok,
    Deviation,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Unpublished => "",
            CellStatus::Ok => "ok",
            CellStatus::Deviation => "deviation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub table_id: u8,
    pub theta: f64,
    pub measure: Measure,
    pub target: Target,
    pub value: f64,
    pub paper_value: Option<f64>,
    pub delta: Option<f64>,
    pub status: CellStatus,
}

impl CsvRow for TableRow {
    const HEADER: &'static [&'static str] = &[
        "table_id",
        "theta",
        "measure",
        "target",
        "value",
        "paper_value",
        "delta",
        "status",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.table_id.to_string(),
            f17(self.theta),
            self.measure.to_string(),
            self.target.to_string(),
            f17(self.value),
            opt_f17(self.paper_value),
            opt_f17(self.delta),
            self.status.as_str().to_string(),
        ]
    }
}

/// Parameters of one table run.
#[derive(Debug, Clone)]
pub struct TableSpec {
    pub table_id: u8,
    pub theta_grid: Vec<f64>,
    pub alpha: Alpha,
    /// Overrides the paper's portfolio parameters; `theta` is ignored.
    pub portfolio: Option<PortfolioSpec>,
}

impl TableSpec {
    pub fn paper(table_id: u8) -> Self {
        Self {
            table_id,
            theta_grid: PAPER_THETAS.to_vec(),
            alpha: Alpha::new(PAPER_ALPHA).expect("valid level"),
            portfolio: None,
        }
    }
}

fn unknown_table(id: u8) -> copula_risk::Error {
    copula_risk::Error::Domain(format!("table id must be in 1..=15, got {id}"))
}

pub fn build_table(spec: &TableSpec, settings: &SolverSettings) -> Result<Vec<TableRow>> {
    let def = table_def(spec.table_id).ok_or_else(|| unknown_table(spec.table_id))?;
    let base = match spec.portfolio {
        Some(p) => PortfolioSpec { dist: def.dist, ..p },
        None => PortfolioSpec::paper_default(def.dist, 0.0),
    };
    let comparable = base == PortfolioSpec::paper_default(def.dist, 0.0) && spec.alpha.value() == PAPER_ALPHA;
    spec.theta_grid
        .iter()
        .map(|&theta| {
            let p = base.with_theta(theta).build()?;
            let value = compute_measure(&p, def.target, def.measure, spec.alpha, settings)?;
            let paper_value = if comparable { def.printed_at(theta) } else { None };
            let delta = paper_value.map(|pv| value - pv);
            let status = match delta {
                None => CellStatus::Unpublished,
                Some(d) if d.abs() <= TABLE_TOLERANCE => CellStatus::Ok,
                Some(_) => CellStatus::Deviation,
            };
            Ok(TableRow {
                table_id: def.id,
                theta,
                measure: def.measure,
                target: def.target,
                value,
                paper_value,
                delta,
                status,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigurePoint {
    pub figure_id: u8,
    pub theta: f64,
    pub target: Target,
    pub var: f64,
    pub cte: f64,
}

impl CsvRow for FigurePoint {
    const HEADER: &'static [&'static str] = &["figure_id", "theta", "target", "var", "cte"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.figure_id.to_string(),
            f17(self.theta),
            self.target.to_string(),
            f17(self.var),
            f17(self.cte),
        ]
    }
}

/// Tables holding the VaR and CTE series of each figure.
pub fn figure_tables(figure_id: u8) -> Option<(u8, u8)> {
    match figure_id {
        1 => Some((1, 2)),
        2 => Some((5, 6)),
        3 => Some((9, 10)),
        _ => None,
    }
}

pub fn build_figure(figure_id: u8, theta_grid: &[f64], settings: &SolverSettings) -> Result<Vec<FigurePoint>> {
    let (var_id, cte_id) = figure_tables(figure_id)
        .ok_or_else(|| copula_risk::Error::Domain(format!("figure id must be in 1..=3, got {figure_id}")))?;
    let series = |id| {
        let spec = TableSpec {
            theta_grid: theta_grid.to_vec(),
            ..TableSpec::paper(id)
        };
        build_table(&spec, settings)
    };
    let var = series(var_id)?;
    let cte = series(cte_id)?;
    Ok(var
        .iter()
        .zip(&cte)
        .map(|(v, c)| FigurePoint {
            figure_id,
            theta: v.theta,
            target: v.target,
            var: v.value,
            cte: c.value,
        })
        .collect())
}
