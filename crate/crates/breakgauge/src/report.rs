//! Table layouts for each artifact.

use breakgauge_core::breaks::BreakTestReport;
use breakgauge_core::descriptive::PROFILE_LEVELS;
use breakgauge_core::fear::{COEFFICIENT_NAMES, NUM_COEFFICIENTS, OFFSETS};

use crate::pipeline::{Analysis, Scope};
use crate::tables::{coef_cell, number, Artifact, Cell, Table};

pub const BREAKS: &str = "table1_breaks";
pub const BREAKS_STD: &str = "table1_breaks_std";
pub const PERCENTILES: &str = "table2_percentiles";
pub const DESCRIPTIVES: &str = "table3_descriptives";
pub const CORRELATIONS: &str = "table5_correlations";
pub const ESTIMATES: &str = "table6_estimates";
pub const REGIME_BANDS: &str = "fig1_regimes";

pub fn artifacts(a: &Analysis, scope: Scope) -> Vec<Artifact> {
    let mut out = Vec::new();
    if let Some(b) = &a.breaks {
        out.push(breaks_artifact(BREAKS, b));
    }
    if let Some(s) = &a.std_breaks {
        out.push(breaks_artifact(BREAKS_STD, &s.report));
    }
    if scope == Scope::All {
        out.push(percentiles(a));
        out.push(descriptives(a));
    }
    if scope != Scope::Breaks {
        out.push(correlations(a));
        out.push(estimates(a));
    }
    if let Some(b) = &a.breaks {
        out.push(regime_bands(a, b));
    }
    out
}

fn offset_label(k: i32) -> String {
    match k {
        0 => "t".into(),
        k if k > 0 => format!("t+{k}"),
        k => format!("t{k}"),
    }
}

fn breaks_artifact(name: &str, r: &BreakTestReport) -> Artifact {
    let mut tests = Table::new("Panel A: break tests", &["statistic", "value", "stars"]);
    tests.push(vec!["UDmax".into(), Cell::Num(r.udmax.value), Cell::stars(r.udmax.stars)]);
    for (m, v) in r.sup_f.iter().enumerate() {
        tests.push(vec![format!("supF({}|0)", m + 1).into(), Cell::Num(*v), Cell::Empty]);
    }
    for (l, s) in r.seq_f.iter().enumerate() {
        let label = format!("F({}|{})", l + 1, l);
        match s {
            Some(s) => tests.push(vec![label.into(), Cell::Num(s.value), Cell::stars(s.stars)]),
            None => tests.push(vec![label.into(), Cell::Empty, Cell::Empty]),
        }
    }
    for (m, v) in &r.lwz_by_m {
        tests.push(vec![format!("LWZ({m})").into(), Cell::Num(*v), Cell::Empty]);
    }
    tests.push(vec!["breaks_sequential".into(), Cell::Count(r.sequential_m), Cell::Empty]);
    tests.push(vec!["breaks_lwz".into(), Cell::Count(r.selected_m), Cell::Empty]);
    tests.push(vec!["observations".into(), Cell::Count(r.len), Cell::Empty]);
    tests.push(vec!["min_segment_length".into(), Cell::Count(r.min_segment_length), Cell::Empty]);

    let mut regimes = Table::new(
        "Panel B: regimes",
        &["regime", "start", "end", "obs", "mean", "se", "tstat", "stars"],
    );
    for (k, g) in r.regimes.iter().enumerate() {
        regimes.push(vec![
            Cell::Count(k + 1),
            Cell::Date(g.start_date),
            Cell::Date(g.end_date),
            Cell::Count(g.len()),
            Cell::Num(g.mean),
            Cell::Num(g.std_error),
            Cell::Num(g.t_stat),
            Cell::stars(g.stars),
        ]);
    }

    let mut dates = Table::new(
        "Panel C: break dates",
        &["break", "end_date", "index", "ci90_lower", "ci90_upper", "ci95_lower", "ci95_upper"],
    );
    for (k, iv) in r.intervals.iter().enumerate() {
        dates.push(vec![
            Cell::Count(k + 1),
            Cell::Date(iv.date),
            Cell::Count(iv.interval.index),
            Cell::Date(iv.ci90.0),
            Cell::Date(iv.ci90.1),
            Cell::Date(iv.ci95.0),
            Cell::Date(iv.ci95.1),
        ]);
    }
    let mut csv = vec![tests.clone(), regimes.clone()];
    if !r.intervals.is_empty() {
        csv.push(dates.clone());
    }

    // Markdown keeps the statistic panel compact: one row, one column per test.
    let mut header = vec!["UDmax".to_string()];
    let mut row = vec![Cell::Text(format!("{}{}", number(r.udmax.value), r.udmax.stars))];
    for (l, s) in r.seq_f.iter().enumerate() {
        header.push(format!("F({}|{})", l + 1, l));
        row.push(s.map_or(Cell::Empty, |s| Cell::Text(format!("{}{}", number(s.value), s.stars))));
    }
    header.push("LWZ breaks".into());
    row.push(Cell::Count(r.selected_m));
    let panel_a = Table {
        title: "Panel A: break tests".into(),
        header,
        rows: vec![row],
    };
    let mut md = vec![panel_a, regimes];
    if !r.intervals.is_empty() {
        md.push(dates);
    }
    Artifact {
        name: name.into(),
        csv,
        markdown: md,
    }
}

fn percentiles(a: &Analysis) -> Artifact {
    let mut header = vec!["period", "start", "end", "obs"];
    let levels: Vec<String> = PROFILE_LEVELS.iter().map(|l| format!("p{l}")).collect();
    header.extend(levels.iter().map(String::as_str));
    header.extend(["normal50", "normal90"]);
    let mut t = Table::new("Percentiles of daily VIX closes", &header);
    for (p, prof) in a.periods.iter().zip(&a.percentiles) {
        let mut row = vec![
            p.label.as_str().into(),
            Cell::Date(p.window.start),
            Cell::Date(p.window.end),
            Cell::Count(prof.n),
        ];
        row.extend(prof.percentiles.iter().map(|v| Cell::Num(*v)));
        row.extend([Cell::Num(prof.normal50), Cell::Num(prof.normal90)]);
        t.push(row);
    }
    Artifact::same(PERCENTILES, vec![t])
}

fn descriptives(a: &Analysis) -> Artifact {
    let mut t = Table::new(
        "Descriptive statistics",
        &["period", "variable", "n", "mean", "stddev", "min", "max", "rho1", "rho2", "rho3", "adf", "adf_stars"],
    );
    for d in &a.descriptives {
        let s = &d.stats;
        t.push(vec![
            d.period.as_str().into(),
            d.variable.as_str().into(),
            Cell::Count(s.n),
            Cell::Num(s.mean),
            Cell::Num(s.stddev),
            Cell::Num(s.min),
            Cell::Num(s.max),
            Cell::Num(s.rho[0]),
            Cell::Num(s.rho[1]),
            Cell::Num(s.rho[2]),
            Cell::Num(d.adf.statistic),
            Cell::stars(d.adf.rejection),
        ]);
    }
    let mut md = t.clone();
    md.header.truncate(10);
    md.header.push("ADF".into());
    for row in &mut md.rows {
        let stars = row.pop().unwrap();
        let adf = row.pop().unwrap();
        if let (Cell::Num(v), Cell::Text(s)) = (adf, stars) {
            row.push(Cell::Text(format!("{}{s}", number(v))));
        }
    }
    Artifact {
        name: DESCRIPTIVES.into(),
        csv: vec![t],
        markdown: vec![md],
    }
}

fn period_labels(a: &Analysis) -> Vec<&str> {
    a.periods.iter().map(|p| p.label.as_str()).collect()
}

fn correlations(a: &Analysis) -> Artifact {
    let mut long = Table::new("Lead-lag correlations", &["market", "offset", "period", "r", "n", "stars"]);
    for m in &a.markets {
        for c in &m.correlation.by_offset {
            long.push(vec![
                m.correlation.market_id.as_str().into(),
                Cell::Text(c.offset.to_string()),
                m.period.as_str().into(),
                Cell::Num(c.r),
                Cell::Count(c.n),
                Cell::stars(c.stars),
            ]);
        }
    }
    let labels = period_labels(a);
    let mut header = vec!["offset"];
    header.extend(&labels);
    let mut md = Vec::new();
    for id in a.panel.markets.keys() {
        let mut t = Table::new(format!("{id}: correlation of cVIX_t with R_t+i"), &header);
        for &k in &OFFSETS {
            let mut row = vec![Cell::Text(offset_label(k))];
            for label in &labels {
                let c = a
                    .markets
                    .iter()
                    .find(|m| &m.correlation.market_id == id && m.period == *label)
                    .and_then(|m| m.correlation.at(k));
                row.push(c.map_or(Cell::Empty, |c| Cell::Text(format!("{}{}", number(c.r), c.stars))));
            }
            t.push(row);
        }
        md.push(t);
    }
    Artifact {
        name: CORRELATIONS.into(),
        csv: vec![long],
        markdown: md,
    }
}

fn estimates(a: &Analysis) -> Artifact {
    let mut long = Table::new(
        "Fear-gauge regression",
        &["market", "period", "coefficient", "value", "se", "tstat", "stars"],
    );
    for m in &a.markets {
        let e = &m.estimate;
        let id = e.market_id.as_str();
        for j in 0..NUM_COEFFICIENTS {
            long.push(vec![
                id.into(),
                m.period.as_str().into(),
                COEFFICIENT_NAMES[j].into(),
                Cell::Num(e.coefficients[j]),
                Cell::Num(e.se[j]),
                Cell::Num(e.tstat[j]),
                Cell::stars(e.stars[j]),
            ]);
        }
        for (name, v) in [("beta_plus", e.beta_plus), ("beta_minus", e.beta_minus)] {
            long.push(vec![id.into(), m.period.as_str().into(), name.into(), Cell::Num(v), Cell::Empty, Cell::Empty, Cell::Empty]);
        }
        long.push(vec![id.into(), m.period.as_str().into(), "n".into(), Cell::Count(e.n), Cell::Empty, Cell::Empty, Cell::Empty]);
    }

    let labels = period_labels(a);
    let mut header = vec!["coefficient"];
    header.extend(&labels);
    let mut md = Vec::new();
    for id in a.panel.markets.keys() {
        let cols: Vec<_> = labels
            .iter()
            .map(|l| a.markets.iter().find(|m| &m.estimate.market_id == id && m.period == *l).map(|m| &m.estimate))
            .collect();
        let mut t = Table::new(format!("{id}: coefficient (t-statistic)"), &header);
        for j in 0..NUM_COEFFICIENTS {
            let mut row = vec![Cell::from(COEFFICIENT_NAMES[j])];
            row.extend(cols.iter().map(|e| e.map_or(Cell::Empty, |e| coef_cell(e.coefficients[j], e.tstat[j], e.stars[j]))));
            t.push(row);
        }
        let mut plus = vec![Cell::from("beta_plus")];
        plus.extend(cols.iter().map(|e| Cell::opt(e.map(|e| e.beta_plus))));
        t.push(plus);
        let mut minus = vec![Cell::from("beta_minus")];
        minus.extend(cols.iter().map(|e| Cell::opt(e.map(|e| e.beta_minus))));
        t.push(minus);
        let mut n = vec![Cell::from("n")];
        n.extend(cols.iter().map(|e| e.map_or(Cell::Empty, |e| Cell::Count(e.n))));
        t.push(n);
        md.push(t);
    }
    Artifact {
        name: ESTIMATES.into(),
        csv: vec![long],
        markdown: md,
    }
}

fn regime_bands(a: &Analysis, b: &BreakTestReport) -> Artifact {
    let mut t = Table::new("VIX with break regimes", &["date", "vix", "regime_id"]);
    let mut regime = 0;
    for (i, (d, v)) in a.vix.dates().iter().zip(a.vix.values()).enumerate() {
        while i >= b.regimes[regime].end {
            regime += 1;
        }
        t.push(vec![Cell::Date(*d), Cell::Num(*v), Cell::Count(regime + 1)]);
    }
    Artifact::same(REGIME_BANDS, vec![t])
}
