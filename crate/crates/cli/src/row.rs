//! One output row: the exact optimum and every approximation at `(n, eps)`.

use hypotest::bounds::{BoundContext, BoundQuery, BoundReport, BoundValue};
use hypotest::error::Error;
use hypotest::oracle::{build_atom_table, LlrAtomTable, OracleResult};
use serde_json::{Map, Value};

use crate::format::{decimals, paper_strassen, power_of_ten, sig};
use crate::CliResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Epsilon(f64),
    Delta(f64),
}

/// Exact table for `n`, or `None` when it would exceed the size limit.
pub fn exact_table(ctx: &BoundContext, n: u64) -> CliResult<Option<LlrAtomTable>> {
    match build_atom_table(ctx.family(), n as usize) {
        Ok(t) => Ok(Some(t)),
        Err(Error::TooLarge { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub report: BoundReport,
    pub exact: Option<OracleResult>,
    /// The epsilon as given, before any snapping.
    pub requested_epsilon: Option<f64>,
}

/// Evaluate one row. With `snap`, an `eps` budget is moved to the nearest
/// level attainable by a deterministic threshold test (needs `table`).
pub fn compute_row(ctx: &BoundContext, table: Option<&LlrAtomTable>, n: u64, budget: Budget, snap: bool) -> CliResult<Row> {
    let query = match budget {
        Budget::Epsilon(eps) if snap => {
            let t = table.ok_or_else(|| crate::CliError::Usage(format!("cannot snap epsilon: exact table for n = {n} is too large")))?;
            // validate before snapping so bad input still reports the user's value
            BoundQuery::with_epsilon(n, eps)?;
            BoundQuery::with_log_epsilon(n, t.snap_log_epsilon(eps))?
        }
        Budget::Epsilon(eps) => BoundQuery::with_epsilon(n, eps)?,
        Budget::Delta(delta) => BoundQuery::with_delta(n, delta)?,
    };
    let report = ctx.report(&query)?;
    let exact = table.map(|t| t.e1_star_log(query.log_epsilon));
    let requested_epsilon = match budget {
        Budget::Epsilon(eps) => Some(eps),
        Budget::Delta(_) => None,
    };
    Ok(Row { report, exact, requested_epsilon })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    Na,
}

impl Cell {
    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Na, Cell::Num)
    }

    fn opt_int(v: Option<u64>) -> Self {
        v.map_or(Cell::Na, Cell::Int)
    }

    fn bound(v: Option<BoundValue>) -> Self {
        Cell::opt(v.and_then(BoundValue::value))
    }

    pub fn render(&self, digits: usize) -> String {
        match self {
            Cell::Num(v) => sig(*v, digits),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Na => "NA".into(),
        }
    }

    pub fn to_json(&self, digits: usize) -> Value {
        match self {
            // round through the same text as TSV so both carry identical values
            Cell::Num(v) if v.is_finite() => sig(*v, digits).parse::<f64>().map(Value::from).unwrap_or(Value::Null),
            Cell::Num(_) | Cell::Na => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Flag(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

/// Columns of the full report, in output order.
pub const COLUMNS: [&str; 30] = [
    "epsilon",
    "delta",
    "exact_e1",
    "stein",
    "strassen",
    "hoeffding",
    "new_approx",
    "C",
    "C_prime",
    "exponent_regime",
    "converse_valid",
    "stein_converse_valid",
    "stein_achievability_valid",
    "n",
    "alpha_star",
    "d_delta",
    "strassen_clamped",
    "m",
    "n0",
    "n_min_converse",
    "log_epsilon",
    "log_exact_e1",
    "log_stein",
    "log_strassen",
    "log_hoeffding",
    "log_new_approx",
    "log_achievability_ub",
    "log_converse_lb",
    "log_stein_converse_lb",
    "log_stein_achievability_ub",
];

/// Columns of the comparison table in their reference rounding.
pub const PAPER_COLUMNS: [&str; 6] = ["epsilon", "exact_e1", "stein", "strassen", "hoeffding", "new_approx"];

impl Row {
    pub fn cells(&self) -> Vec<Cell> {
        let r = &self.report;
        let flag = |v: Option<BoundValue>| Cell::Flag(v.is_some_and(BoundValue::is_valid));
        vec![
            Cell::Num(r.epsilon),
            Cell::Num(r.delta),
            Cell::opt(self.exact.map(|e| e.e1_star)),
            Cell::Num(r.stein_prob()),
            Cell::opt(r.strassen_prob()),
            Cell::opt(r.hoeffding_prob()),
            Cell::opt(r.new_approx_prob()),
            Cell::opt(r.c),
            Cell::opt(r.c_prime),
            Cell::Flag(r.alpha_star.is_some()),
            Cell::Flag(r.converse_valid()),
            flag(r.stein_converse),
            flag(r.stein_achievability),
            Cell::Int(r.n),
            Cell::opt(r.alpha_star),
            Cell::opt(r.d_delta),
            Cell::opt(r.strassen_prob_clamped()),
            Cell::opt(r.m),
            Cell::opt_int(r.n0),
            Cell::opt_int(r.n_min_converse),
            Cell::Num(r.log_epsilon),
            Cell::opt(self.exact.map(|e| e.log_e1_star)),
            Cell::Num(r.stein),
            Cell::opt(r.strassen),
            Cell::opt(r.hoeffding),
            Cell::opt(r.new_approx),
            Cell::opt(r.achievability_bound()),
            Cell::opt(r.converse_bound()),
            Cell::bound(r.stein_converse),
            Cell::bound(r.stein_achievability),
        ]
    }

    /// Cells of [`PAPER_COLUMNS`] at the paper's printed precision. The
    /// epsilon column shows the requested value, which labels the row.
    pub fn paper_cells(&self) -> Vec<Cell> {
        let r = &self.report;
        let text = |v: Option<f64>, f: &dyn Fn(f64) -> String| v.map_or(Cell::Na, |v| Cell::Text(f(v)));
        vec![
            Cell::Text(decimals(self.requested_epsilon.unwrap_or(r.epsilon), 5)),
            text(self.exact.map(|e| e.e1_star), &|v| decimals(v, 3)),
            Cell::Text(power_of_ten(r.stein_prob())),
            text(r.strassen_prob(), &paper_strassen),
            text(r.hoeffding_prob(), &|v| decimals(v, 3)),
            text(r.new_approx_prob(), &|v| decimals(v, 3)),
        ]
    }
}

/// Tab-separated header plus rows, `\n` line endings.
pub fn render_tsv(columns: &[&str], rows: &[Vec<Cell>], digits: usize) -> String {
    let mut out = columns.join("\t");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| c.render(digits)).collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    out
}

pub fn json_object(columns: &[&str], row: &[Cell], digits: usize) -> Value {
    let mut m = Map::new();
    for (name, cell) in columns.iter().zip(row) {
        m.insert((*name).to_string(), cell.to_json(digits));
    }
    Value::Object(m)
}

pub fn render_json(columns: &[&str], rows: &[Vec<Cell>], digits: usize) -> String {
    let v = Value::Array(rows.iter().map(|r| json_object(columns, r, digits)).collect());
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}
