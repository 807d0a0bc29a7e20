//! Line-oriented text formats for systems, designs, measures, roundings,
//! datasets, criterion reports and fit tables.

use std::fmt::Write as _;
use std::io::Read;

use num_rational::BigRational;
use oofa_core::criteria::{CriterionReport, DesignMeasure, ExactEfficiencies};
use oofa_core::{ConstraintSystem, Error as CoreError, GroupPartition, Label, ModelSpec, Order, PairwiseConstraint};

use crate::analysis::{Dataset, FitResult, Observation};
use crate::error::{Error, Result};

/// Strips a `#` comment and surrounding whitespace.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_label(s: &str, line: usize) -> Result<Label> {
    s.trim().parse::<Label>().map_err(|_| Error::parse(line, format!("bad label {:?}", s.trim())))
}

fn parse_labels(s: &str, line: usize) -> Result<Vec<Label>> {
    s.split(',').map(|x| parse_label(x, line)).collect()
}

/// Parses `i->j` (or `i-j`).
pub fn parse_constraint(s: &str, line: usize) -> Result<PairwiseConstraint> {
    let (a, b) = s
        .split_once("->")
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| Error::parse(line, format!("constraint {s:?} is not i->j")))?;
    Ok(PairwiseConstraint::new(parse_label(a, line)?, parse_label(b, line)?)?)
}

fn join_labels(labels: &[Label]) -> String {
    let mut s = String::new();
    for (k, l) in labels.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "{l}");
    }
    s
}

/// Parses a system file. Statements are separated by newlines or `;`:
/// `m = 6`, `group = 1,2`, `within = 4->5`. Without `group` lines the
/// system is a single group.
pub fn parse_system(text: &str) -> Result<ConstraintSystem> {
    let mut m = None;
    let mut groups = Vec::new();
    let mut within = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        for stmt in content(raw).split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let (key, value) = stmt
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key = value, got {stmt:?}")))?;
            let value = value.trim();
            match key.trim() {
                "m" => {
                    if m.is_some() {
                        return Err(Error::parse(line, "m given twice"));
                    }
                    m = Some(value.parse::<usize>().map_err(|_| Error::parse(line, "m is not an integer"))?);
                }
                "group" => groups.push(parse_labels(value, line)?),
                "within" => within.push(parse_constraint(value, line)?),
                other => return Err(Error::parse(line, format!("unknown key {other:?}"))),
            }
        }
    }
    let partition = match (m, groups.is_empty()) {
        (Some(m), true) => GroupPartition::single(m),
        (m, false) => {
            let p = GroupPartition::new(groups)?;
            if let Some(m) = m {
                if m != p.m() {
                    return Err(CoreError::DimensionMismatch { expected: m, found: p.m() }.into());
                }
            }
            p
        }
        (None, true) => return Err(Error::parse(0, "system needs m or at least one group")),
    };
    Ok(ConstraintSystem::new(partition, within)?)
}

/// System file text, one statement per line.
pub fn format_system(system: &ConstraintSystem) -> String {
    let mut s = format!("m = {}\n", system.m());
    for g in system.partition().groups() {
        let _ = writeln!(s, "group = {}", join_labels(g));
    }
    for c in system.within_constraints() {
        let _ = writeln!(s, "within = {}->{}", c.before, c.after);
    }
    s
}

/// The same statements on one line, for design-file headers.
pub fn format_system_inline(system: &ConstraintSystem) -> String {
    format_system(system).lines().collect::<Vec<_>>().join("; ")
}

pub fn parse_order(s: &str, line: usize) -> Result<Order> {
    Ok(Order::new(parse_labels(s, line)?).map_err(|e| Error::parse(line, e.to_string()))?)
}

pub fn format_order(o: &Order) -> String {
    join_labels(o.labels())
}

/// A list of orders with optional headers.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignFile {
    pub m: usize,
    pub spec: Option<ModelSpec>,
    pub system: Option<ConstraintSystem>,
    pub provenance: Option<String>,
    pub rows: Vec<Order>,
}

impl DesignFile {
    pub fn new(rows: Vec<Order>, m: usize) -> Self {
        DesignFile { m, spec: None, system: None, provenance: None, rows }
    }
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix('#')?.trim_start().strip_prefix(key)?.strip_prefix(':').map(str::trim)
}

/// Parses a design or order-list file. Recognized headers are
/// `# spec:`, `# system:` and `# provenance:`; other comments are ignored.
pub fn parse_design(text: &str) -> Result<DesignFile> {
    let mut spec = None;
    let mut system = None;
    let mut provenance = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if let Some(v) = header(t, "spec") {
            spec = Some(v.parse::<ModelSpec>().map_err(|e| Error::parse(line, e.to_string()))?);
        } else if let Some(v) = header(t, "system") {
            system = Some(parse_system(v).map_err(|e| Error::parse(line, e.to_string()))?);
        } else if let Some(v) = header(t, "provenance") {
            provenance = Some(v.to_string());
        } else if !content(t).is_empty() {
            rows.push(parse_order(content(t), line)?);
        }
    }
    let m = spec
        .as_ref()
        .map(ModelSpec::m)
        .or_else(|| system.as_ref().map(ConstraintSystem::m))
        .or_else(|| rows.first().map(Order::len))
        .ok_or_else(|| Error::parse(0, "empty design without headers"))?;
    if let Some(sys) = &system {
        if sys.m() != m {
            return Err(CoreError::DimensionMismatch { expected: m, found: sys.m() }.into());
        }
    }
    for (k, o) in rows.iter().enumerate() {
        if o.len() != m {
            return Err(Error::parse(k + 1, format!("row has {} labels, expected {m}", o.len())));
        }
    }
    Ok(DesignFile { m, spec, system, provenance, rows })
}

pub fn format_design(d: &DesignFile) -> String {
    let mut s = String::new();
    if let Some(spec) = &d.spec {
        let _ = writeln!(s, "# spec: {spec}");
    }
    if let Some(sys) = &d.system {
        let _ = writeln!(s, "# system: {}", format_system_inline(sys));
    }
    if let Some(p) = &d.provenance {
        let _ = writeln!(s, "# provenance: {p}");
    }
    for o in &d.rows {
        s.push_str(&format_order(o));
        s.push('\n');
    }
    s
}

/// `x` with `digits` significant digits in positional notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..).
    let rounded: f64 = s.parse().unwrap_or(x);
    let mag2 = rounded.abs().log10().floor() as i64;
    if mag2 > mag {
        let decimals = (digits as i64 - 1 - mag2).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        s
    }
}

/// A design measure, optionally tagged with its model.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFile {
    pub spec: Option<ModelSpec>,
    pub measure: DesignMeasure,
}

pub fn parse_measure(text: &str) -> Result<MeasureFile> {
    let mut spec = None;
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if let Some(v) = header(t, "spec") {
            spec = Some(v.parse::<ModelSpec>().map_err(|e| Error::parse(line, e.to_string()))?);
            continue;
        }
        let c = content(t);
        if c.is_empty() {
            continue;
        }
        let (o, w) = c.split_once(';').ok_or_else(|| Error::parse(line, "expected 'order ; weight'"))?;
        support.push(parse_order(o.trim(), line)?);
        weights.push(w.trim().parse::<f64>().map_err(|_| Error::parse(line, "bad weight"))?);
    }
    let measure = DesignMeasure::new(support, weights)?;
    Ok(MeasureFile { spec, measure })
}

pub fn format_measure(f: &MeasureFile) -> String {
    let mut s = String::new();
    if let Some(spec) = &f.spec {
        let _ = writeln!(s, "# spec: {spec}");
    }
    for (o, w) in f.measure.support().iter().zip(f.measure.weights()) {
        let _ = writeln!(s, "{} ; {}", format_order(o), format_significant(*w, 12));
    }
    s
}

/// Integer replications per order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundingFile {
    pub spec: Option<ModelSpec>,
    pub rows: Vec<(Order, u64)>,
}

impl RoundingFile {
    pub fn trials(&self) -> u64 {
        self.rows.iter().map(|r| r.1).sum()
    }

    /// Each order repeated by its count.
    pub fn expand(&self) -> Vec<Order> {
        self.rows.iter().flat_map(|(o, c)| std::iter::repeat_n(o.clone(), *c as usize)).collect()
    }
}

pub fn parse_rounding(text: &str) -> Result<RoundingFile> {
    let mut spec = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if let Some(v) = header(t, "spec") {
            spec = Some(v.parse::<ModelSpec>().map_err(|e| Error::parse(line, e.to_string()))?);
            continue;
        }
        let c = content(t);
        if c.is_empty() {
            continue;
        }
        let (o, n) = c.split_once(';').ok_or_else(|| Error::parse(line, "expected 'order ; count'"))?;
        rows.push((parse_order(o.trim(), line)?, n.trim().parse::<u64>().map_err(|_| Error::parse(line, "bad count"))?));
    }
    Ok(RoundingFile { spec, rows })
}

pub fn format_rounding(f: &RoundingFile) -> String {
    let mut s = String::new();
    if let Some(spec) = &f.spec {
        let _ = writeln!(s, "# spec: {spec}");
    }
    let _ = writeln!(s, "# trials: {}", f.trials());
    for (o, n) in &f.rows {
        let _ = writeln!(s, "{} ; {n}", format_order(o));
    }
    s
}

const NA: &str = "NA";

/// Reads `id,score,duration_seconds,pi1,...,pim`; extra columns pass through.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| Error::parse(1, format!("missing column {name:?}"));
    let id_col = find("id").ok_or_else(|| missing("id"))?;
    let score_col = find("score").ok_or_else(|| missing("score"))?;
    let dur_col = find("duration_seconds").ok_or_else(|| missing("duration_seconds"))?;
    let mut pi_cols = Vec::new();
    while let Some(c) = find(&format!("pi{}", pi_cols.len() + 1)) {
        pi_cols.push(c);
    }
    if pi_cols.is_empty() {
        return Err(missing("pi1"));
    }
    let known: Vec<usize> = [id_col, score_col, dur_col].into_iter().chain(pi_cols.iter().copied()).collect();
    let extra_cols: Vec<usize> = (0..headers.len()).filter(|c| !known.contains(c)).collect();
    let extra_names = extra_cols.iter().map(|&c| headers[c].to_string()).collect();

    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let num = |c: usize, what: &str| -> Result<f64> {
            rec[c].parse::<f64>().map_err(|_| Error::parse(line, format!("bad {what} {:?}", &rec[c])))
        };
        let response = if &rec[score_col] == NA { None } else { Some(num(score_col, "score")?) };
        let labels = pi_cols.iter().map(|&c| parse_label(&rec[c], line)).collect::<Result<Vec<_>>>()?;
        rows.push(Observation {
            id: rec[id_col].to_string(),
            order: Order::new(labels).map_err(|e| Error::parse(line, e.to_string()))?,
            response,
            duration_seconds: num(dur_col, "duration")?,
            extra: extra_cols.iter().map(|&c| rec[c].to_string()).collect(),
        });
    }
    Dataset::new(pi_cols.len(), extra_names, rows)
}

pub fn write_dataset(data: &Dataset) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["id".to_string(), "score".into(), "duration_seconds".into()];
    head.extend((1..=data.m()).map(|i| format!("pi{i}")));
    head.extend(data.extra_columns().iter().cloned());
    w.write_record(&head)?;
    for r in data.rows() {
        let mut rec = vec![
            r.id.clone(),
            r.response.map_or_else(|| NA.to_string(), |y| y.to_string()),
            r.duration_seconds.to_string(),
        ];
        rec.extend(r.order.labels().iter().map(|l| l.to_string()));
        rec.extend(r.extra.iter().cloned());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

fn opt_rat(v: &Option<BigRational>) -> String {
    v.as_ref().map_or_else(|| NA.to_string(), |x| x.to_string())
}

/// Columns of the machine-readable report row.
pub const REPORT_COLUMNS: &str = "p,runs,a_value,d_value,g_value,a_eff,d_eff,g_eff,g_exhaustive,singular";

/// The comma-separated row under [`REPORT_COLUMNS`].
pub fn format_report_row(r: &CriterionReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.p,
        r.runs.map_or_else(|| NA.to_string(), |n| n.to_string()),
        opt_f64(r.a_value),
        r.d_value,
        opt_f64(r.g_value),
        opt_f64(r.a_eff),
        r.d_eff,
        r.g_eff,
        r.g_exhaustive,
        r.singular
    )
}

/// Flat `key=value` block; ends with `columns=` and `row=` lines.
pub fn format_report(r: &CriterionReport) -> String {
    let mut s = String::new();
    let row = format_report_row(r);
    for (k, v) in REPORT_COLUMNS.split(',').zip(row.split(',')) {
        let _ = writeln!(s, "{k}={v}");
    }
    if let Some(e) = &r.exact {
        let _ = writeln!(s, "exact_a_eff={}", opt_rat(&e.a_eff));
        let _ = writeln!(s, "exact_d_ratio={}", e.d_ratio);
        let _ = writeln!(s, "exact_g_eff={}", opt_rat(&e.g_eff));
    }
    let _ = writeln!(s, "columns={REPORT_COLUMNS}");
    let _ = writeln!(s, "row={row}");
    s
}

/// Reads the report back from its `key=value` lines. Unknown keys are skipped.
pub fn parse_report(text: &str) -> Result<CriterionReport> {
    let mut kv = std::collections::HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let c = content(raw);
        if c.is_empty() {
            continue;
        }
        let (k, v) = c.split_once('=').ok_or_else(|| Error::parse(idx + 1, "expected key=value"))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| Error::parse(0, format!("missing key {k}")));
    let f = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::parse(0, format!("bad value for {k}"))) };
    let of = |k: &str| -> Result<Option<f64>> { if get(k)? == NA { Ok(None) } else { f(k).map(Some) } };
    let b = |k: &str| -> Result<bool> { get(k)?.parse().map_err(|_| Error::parse(0, format!("bad value for {k}"))) };
    let rat = |k: &str| -> Result<Option<BigRational>> {
        match get(k)? {
            NA => Ok(None),
            v => v.parse().map(Some).map_err(|_| Error::parse(0, format!("bad rational for {k}"))),
        }
    };
    let exact = if kv.contains_key("exact_d_ratio") {
        Some(ExactEfficiencies {
            a_eff: rat("exact_a_eff")?,
            d_ratio: rat("exact_d_ratio")?.ok_or_else(|| Error::parse(0, "exact_d_ratio is NA"))?,
            g_eff: rat("exact_g_eff")?,
        })
    } else {
        None
    };
    Ok(CriterionReport {
        p: get("p")?.parse().map_err(|_| Error::parse(0, "bad p"))?,
        runs: match get("runs")? {
            NA => None,
            v => Some(v.parse().map_err(|_| Error::parse(0, "bad runs"))?),
        },
        a_value: of("a_value")?,
        d_value: f("d_value")?,
        g_value: of("g_value")?,
        a_eff: of("a_eff")?,
        d_eff: f("d_eff")?,
        g_eff: f("g_eff")?,
        g_exhaustive: b("g_exhaustive")?,
        singular: b("singular")?,
        exact,
    })
}

fn format_p(p: f64) -> String {
    if p < 1e-4 {
        "<0.0001".into()
    } else {
        format!("{p:.4}")
    }
}

/// Estimate / SE / t / p per term, then residual summary lines.
pub fn format_fit_table(fit: &FitResult) -> String {
    let mut s = format!("{:<8}{:>12}{:>12}{:>10}{:>10}\n", "term", "Estimate", "SE", "t", "p");
    for j in 0..fit.p {
        let _ = writeln!(
            s,
            "{:<8}{:>12.4}{:>12.4}{:>10.3}{:>10}",
            fit.terms[j],
            fit.estimates[j],
            fit.std_errors[j],
            fit.t_values[j],
            format_p(fit.p_values[j])
        );
    }
    let _ = writeln!(s, "sigma2={:.6} r_squared={:.4} n_used={} p={} df={}", fit.sigma2, fit.r_squared, fit.n_used, fit.p, fit.df);
    s
}

/// Full-precision `term,estimate,se,t,p` rows.
pub fn format_fit_csv(fit: &FitResult) -> String {
    let mut s = String::from("term,estimate,se,t,p\n");
    for j in 0..fit.p {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fit.terms[j], fit.estimates[j], fit.std_errors[j], fit.t_values[j], fit.p_values[j]
        );
    }
    s
}

/// `id,residual` rows.
pub fn format_residuals(fit: &FitResult) -> String {
    let mut s = String::from("id,residual\n");
    for (id, r) in fit.ids.iter().zip(&fit.residuals) {
        let _ = writeln!(s, "{id},{r}");
    }
    s
}
