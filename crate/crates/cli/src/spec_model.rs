//! The manifold spec file: a TOML document naming a chart, a sample plan,
//! scalar fields, multivector fields, forms, and optionally a metric, a
//! connection (Christoffel symbols plus twist tensors), and a bilinear
//! form given as a list of homogeneous forms.
//!
//! Multi-index keys are comma-separated increasing integers (`"0,2"`);
//! twist entries are keyed `"K|I|J"`. Field values are DSL strings.

use std::collections::BTreeMap;

use serde::Deserialize;

use hiconn_core::bilinear::{BilinearFormEta, Metric};
use hiconn_core::connection::{AffineConnection, HigherConnection, TwistFields};
use hiconn_core::exterior::{DifferentialForm, MultiVectorField};
use hiconn_core::plan::{DEFAULT_ABS_TOL, DEFAULT_POINT_COUNT, DEFAULT_REL_TOL, DEFAULT_SEED};
use hiconn_core::{parse, Chart, MultiIndex, SamplePlan, ScalarField};

/// A spec-file problem: malformed document, bad key, bad field source.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct SpecError {
    pub message: String,
}

impl SpecError {
    fn new(message: impl Into<String>) -> Self {
        SpecError {
            message: message.into(),
        }
    }

    fn at(context: &str, err: impl std::fmt::Display) -> Self {
        SpecError {
            message: format!("{context}: {err}"),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    #[serde(rename = "box")]
    pub box_half_width: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    #[serde(default)]
    pub identity: bool,
    pub rows: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FieldTable {
    pub degree: usize,
    #[serde(flatten)]
    pub coeffs: BTreeMap<String, String>,
}

/// The raw deserialized document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dim: usize,
    pub coords: Option<Vec<String>>,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub scalars: BTreeMap<String, String>,
    #[serde(default)]
    pub mvfs: BTreeMap<String, FieldTable>,
    #[serde(default)]
    pub forms: BTreeMap<String, FieldTable>,
    pub metric: Option<MetricSection>,
    #[serde(default)]
    pub christoffel: BTreeMap<String, String>,
    #[serde(default)]
    pub twist: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub eta: BTreeMap<String, BTreeMap<String, String>>,
}

impl SpecFile {
    /// Parse the TOML text. Syntax errors carry the line/column reported
    /// by the TOML parser.
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        toml::from_str(text).map_err(|e| SpecError::new(format!("spec parse error: {e}")))
    }
}

/// Plan parameter overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct PlanOverrides {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
}

/// Everything a suite needs, built and validated from a [`SpecFile`].
#[derive(Debug, Clone)]
pub struct Context {
    pub chart: Chart,
    pub plan: SamplePlan,
    pub seed: u64,
    pub scalars: BTreeMap<String, ScalarField>,
    pub mvfs: BTreeMap<String, MultiVectorField>,
    pub forms: BTreeMap<String, DifferentialForm>,
    pub metric: Option<Metric>,
    pub base: Option<AffineConnection>,
    pub twist: Option<TwistFields>,
    pub eta: Option<BilinearFormEta>,
}

impl Context {
    /// True when the spec supplied any connection data.
    pub fn has_connection(&self) -> bool {
        self.base.is_some() || self.twist.is_some()
    }

    /// The spec's higher connection: supplied Christoffel symbols (flat
    /// when absent) plus supplied twist (zero when absent).
    pub fn connection(&self) -> HigherConnection {
        let base = self
            .base
            .clone()
            .unwrap_or_else(|| AffineConnection::flat(&self.chart));
        let twist = self
            .twist
            .clone()
            .unwrap_or_else(|| TwistFields::zero(&self.chart));
        HigherConnection::new(base, twist).expect("context charts agree")
    }
}

fn parse_multi_index(key: &str, dim: usize, context: &str) -> Result<MultiIndex, SpecError> {
    let idx = MultiIndex::parse(key).map_err(|e| SpecError::at(context, e))?;
    if idx.min_dim() > dim {
        return Err(SpecError::new(format!(
            "{context}: index `{key}` does not fit on a chart of dimension {dim}"
        )));
    }
    Ok(idx)
}

fn parse_field(src: &str, chart: &Chart, context: &str) -> Result<ScalarField, SpecError> {
    parse(src, chart).map_err(|e| SpecError::new(format!("{context}: in `{src}`: {e}")))
}

/// Validate the document and build core objects.
pub fn build(spec: &SpecFile, overrides: &PlanOverrides) -> Result<Context, SpecError> {
    if spec.dim == 0 {
        return Err(SpecError::new("dim must be at least 1"));
    }
    let chart = match &spec.coords {
        Some(names) => {
            if names.len() != spec.dim {
                return Err(SpecError::new(format!(
                    "coords lists {} names but dim = {}",
                    names.len(),
                    spec.dim
                )));
            }
            Chart::new(names.clone()).map_err(|e| SpecError::at("coords", e))?
        }
        None => Chart::standard(spec.dim).map_err(|e| SpecError::at("dim", e))?,
    };
    let dim = chart.dim();

    let seed = overrides.seed.or(spec.plan.seed).unwrap_or(DEFAULT_SEED);
    let points = overrides
        .points
        .or(spec.plan.points)
        .unwrap_or(DEFAULT_POINT_COUNT);
    let half_width = spec.plan.box_half_width.unwrap_or(1.0);
    let abs_tol = overrides
        .tol
        .or(spec.plan.abs_tol)
        .unwrap_or(DEFAULT_ABS_TOL);
    let rel_tol = spec.plan.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    let plan = SamplePlan::sample(dim, points, half_width, seed, abs_tol, rel_tol)
        .map_err(|e| SpecError::at("plan", e))?;

    let mut scalars = BTreeMap::new();
    for (name, src) in &spec.scalars {
        scalars.insert(
            name.clone(),
            parse_field(src, &chart, &format!("scalars.{name}"))?,
        );
    }

    let mut mvfs = BTreeMap::new();
    for (name, table) in &spec.mvfs {
        let context = format!("mvfs.{name}");
        if table.degree > dim {
            return Err(SpecError::new(format!(
                "{context}: degree {} exceeds dim {dim}",
                table.degree
            )));
        }
        let mut field = MultiVectorField::zero(&chart, table.degree);
        for (key, src) in &table.coeffs {
            let idx = parse_multi_index(key, dim, &context)?;
            let coeff = parse_field(src, &chart, &format!("{context}.{key}"))?;
            field
                .set_term(idx, coeff)
                .map_err(|e| SpecError::at(&context, e))?;
        }
        mvfs.insert(name.clone(), field);
    }

    let mut forms = BTreeMap::new();
    for (name, table) in &spec.forms {
        let context = format!("forms.{name}");
        if table.degree > dim {
            return Err(SpecError::new(format!(
                "{context}: degree {} exceeds dim {dim}",
                table.degree
            )));
        }
        let mut field = DifferentialForm::zero(&chart, table.degree);
        for (key, src) in &table.coeffs {
            let idx = parse_multi_index(key, dim, &context)?;
            let coeff = parse_field(src, &chart, &format!("{context}.{key}"))?;
            field
                .set_term(idx, coeff)
                .map_err(|e| SpecError::at(&context, e))?;
        }
        forms.insert(name.clone(), field);
    }

    let metric = match &spec.metric {
        None => None,
        Some(section) => {
            let matrix = if section.identity {
                if section.rows.is_some() {
                    return Err(SpecError::new(
                        "metric: give either identity = true or rows, not both",
                    ));
                }
                return_identity_rows(&chart)
            } else {
                let rows = section
                    .rows
                    .as_ref()
                    .ok_or_else(|| SpecError::new("metric: needs identity = true or rows"))?;
                let mut parsed = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    let mut prow = Vec::with_capacity(row.len());
                    for (j, src) in row.iter().enumerate() {
                        prow.push(parse_field(src, &chart, &format!("metric.rows[{i}][{j}]"))?);
                    }
                    parsed.push(prow);
                }
                parsed
            };
            Some(Metric::new(&chart, matrix).map_err(|e| SpecError::at("metric", e))?)
        }
    };

    let base = if spec.christoffel.is_empty() {
        None
    } else {
        let mut conn = AffineConnection::flat(&chart);
        for (key, src) in &spec.christoffel {
            let context = format!("christoffel.{key}");
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != 3 {
                return Err(SpecError::new(format!("{context}: key must be `k,i,j`")));
            }
            let nums: Vec<usize> = parts
                .iter()
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| SpecError::new(format!("{context}: key must be three integers")))?;
            if nums.iter().any(|&v| v >= dim) {
                return Err(SpecError::new(format!(
                    "{context}: index out of range for dim {dim}"
                )));
            }
            let field = parse_field(src, &chart, &context)?;
            conn.set_christoffel(nums[0], nums[1], nums[2], field)
                .map_err(|e| SpecError::at(&context, e))?;
        }
        Some(conn)
    };

    let twist = if spec.twist.is_empty() {
        None
    } else {
        let mut tw = TwistFields::zero(&chart);
        for (block_key, entries) in &spec.twist {
            let context = format!("twist.{block_key}");
            let parts: Vec<&str> = block_key.split(',').collect();
            if parts.len() != 2 {
                return Err(SpecError::new(format!(
                    "{context}: block key must be `k,l`"
                )));
            }
            let k: usize = parts[0]
                .trim()
                .parse()
                .map_err(|_| SpecError::new(format!("{context}: bad bidegree")))?;
            let l: usize = parts[1]
                .trim()
                .parse()
                .map_err(|_| SpecError::new(format!("{context}: bad bidegree")))?;
            for (entry_key, src) in entries {
                let entry_context = format!("{context}.{entry_key}");
                let segs: Vec<&str> = entry_key.split('|').collect();
                if segs.len() != 3 {
                    return Err(SpecError::new(format!(
                        "{entry_context}: entry key must be `K|I|J`"
                    )));
                }
                let kk = parse_multi_index(segs[0], dim, &entry_context)?;
                let ii = parse_multi_index(segs[1], dim, &entry_context)?;
                let jj = parse_multi_index(segs[2], dim, &entry_context)?;
                let field = parse_field(src, &chart, &entry_context)?;
                tw.add_term(k, l, (kk, ii, jj), field)
                    .map_err(|e| SpecError::at(&entry_context, e))?;
            }
        }
        Some(tw)
    };

    let eta = if spec.eta.is_empty() {
        None
    } else {
        let mut collected = Vec::new();
        for (deg_key, entries) in &spec.eta {
            let context = format!("eta.{deg_key}");
            let t: usize = deg_key
                .trim()
                .parse()
                .map_err(|_| SpecError::new(format!("{context}: degree key must be an integer")))?;
            if t > dim {
                return Err(SpecError::new(format!(
                    "{context}: degree {t} exceeds dim {dim}"
                )));
            }
            let mut form = DifferentialForm::zero(&chart, t);
            for (key, src) in entries {
                let idx = parse_multi_index(key, dim, &context)?;
                let coeff = parse_field(src, &chart, &format!("{context}.{key}"))?;
                form.set_term(idx, coeff)
                    .map_err(|e| SpecError::at(&context, e))?;
            }
            collected.push(form);
        }
        Some(BilinearFormEta::from_forms(&chart, collected).map_err(|e| SpecError::at("eta", e))?)
    };

    Ok(Context {
        chart,
        plan,
        seed,
        scalars,
        mvfs,
        forms,
        metric,
        base,
        twist,
        eta,
    })
}

fn return_identity_rows(chart: &Chart) -> Vec<Vec<ScalarField>> {
    let n = chart.dim();
    let mut rows = vec![vec![ScalarField::zero(chart); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = ScalarField::one(chart);
    }
    rows
}

fn toml_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Serialize a spec document with the connection replaced by the given
/// one. Named fields, the plan, the metric, and the form collection are
/// carried over; Christoffel symbols and twist entries are emitted from
/// the connection's coefficient fields in DSL syntax.
pub fn render_with_connection(spec: &SpecFile, ctx: &Context, conn: &HigherConnection) -> String {
    let mut out = String::new();
    let dim = ctx.chart.dim();
    out.push_str(&format!("dim = {dim}\n"));
    if let Some(coords) = &spec.coords {
        let quoted: Vec<String> = coords.iter().map(|c| toml_quote(c)).collect();
        out.push_str(&format!("coords = [{}]\n", quoted.join(", ")));
    }
    out.push_str("\n[plan]\n");
    out.push_str(&format!("seed = {}\n", ctx.seed));
    out.push_str(&format!("points = {}\n", ctx.plan.points().len()));
    if let Some(b) = spec.plan.box_half_width {
        out.push_str(&format!("box = {b}\n"));
    }
    out.push_str(&format!("abs_tol = {:e}\n", ctx.plan.abs_tol()));
    out.push_str(&format!("rel_tol = {:e}\n", ctx.plan.rel_tol()));

    if !spec.scalars.is_empty() {
        out.push_str("\n[scalars]\n");
        for (name, src) in &spec.scalars {
            out.push_str(&format!("{} = {}\n", toml_quote(name), toml_quote(src)));
        }
    }
    for (name, table) in &spec.mvfs {
        out.push_str(&format!("\n[mvfs.{}]\n", toml_quote(name)));
        out.push_str(&format!("degree = {}\n", table.degree));
        for (key, src) in &table.coeffs {
            out.push_str(&format!("{} = {}\n", toml_quote(key), toml_quote(src)));
        }
    }
    for (name, table) in &spec.forms {
        out.push_str(&format!("\n[forms.{}]\n", toml_quote(name)));
        out.push_str(&format!("degree = {}\n", table.degree));
        for (key, src) in &table.coeffs {
            out.push_str(&format!("{} = {}\n", toml_quote(key), toml_quote(src)));
        }
    }

    if let Some(metric) = &spec.metric {
        out.push_str("\n[metric]\n");
        if metric.identity {
            out.push_str("identity = true\n");
        } else if let Some(rows) = &metric.rows {
            let rendered: Vec<String> = rows
                .iter()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|c| toml_quote(c)).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            out.push_str(&format!("rows = [{}]\n", rendered.join(", ")));
        }
    }

    if let Some(eta) = &ctx.eta {
        for form in eta.forms() {
            if form.is_structural_zero() {
                continue;
            }
            out.push_str(&format!(
                "\n[eta.{}]\n",
                toml_quote(&form.degree().to_string())
            ));
            for (idx, coeff) in form.coefficients() {
                out.push_str(&format!(
                    "{} = {}\n",
                    toml_quote(&idx.to_string()),
                    toml_quote(&coeff.to_string())
                ));
            }
        }
    }

    // The constructed connection.
    let base = conn.base();
    let mut christoffel_lines = Vec::new();
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let gamma = base.christoffel(k, i, j);
                if !gamma.is_structural_zero() {
                    christoffel_lines.push(format!(
                        "{} = {}\n",
                        toml_quote(&format!("{k},{i},{j}")),
                        toml_quote(&gamma.to_string())
                    ));
                }
            }
        }
    }
    if !christoffel_lines.is_empty() {
        out.push_str("\n[christoffel]\n");
        for line in christoffel_lines {
            out.push_str(&line);
        }
    }
    for (&(k, l), block) in conn.twist().blocks() {
        if block.is_empty() {
            continue;
        }
        out.push_str(&format!("\n[twist.{}]\n", toml_quote(&format!("{k},{l}"))));
        for ((kk, ii, jj), field) in block {
            let key = format!("{kk}|{ii}|{jj}");
            out.push_str(&format!(
                "{} = {}\n",
                toml_quote(&key),
                toml_quote(&field.to_string())
            ));
        }
    }
    out
}
